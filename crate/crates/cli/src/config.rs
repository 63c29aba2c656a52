//! Run configuration: a TOML file plus command-line overrides.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use evrgbd::geometry::{build_rectification, CalibrationBundle, RectificationLut, RectifiedRig};
use evrgbd::patterns::{DepthKind, PatternSequence, SequenceMode, SequenceParams};
use evrgbd::recon::DepthPolicy;
use evrgbd::simulator::{NoiseConfig, RenderOptions, SceneModel};
use evrgbd::tagger::TaggerConfig;
use serde::{Deserialize, Serialize};

/// Everything a simulate / oracle / pipeline run depends on.
///
/// Relative paths inside a config file are resolved against the file's
/// directory. `seed` replaces `noise.seed`. A missing `calibration` means
/// the built-in reference rig; a missing `window_us` means one sequence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub calibration: Option<PathBuf>,
    pub scene: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub window_us: Option<u64>,
    pub policy: DepthPolicy,
    pub sequence: SequenceParams,
    pub noise: NoiseConfig,
    pub render: RenderOptions,
    pub tagger: TaggerConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            calibration: None,
            scene: None,
            out: None,
            seed: 0,
            window_us: None,
            policy: DepthPolicy::default(),
            sequence: SequenceParams::default(),
            noise: NoiseConfig::noiseless(),
            render: RenderOptions::default(),
            tagger: TaggerConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let mut cfg: Self =
            toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut cfg.calibration, &mut cfg.scene, &mut cfg.out]
            .into_iter()
            .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = toml::to_string_pretty(self).context("serializing config")?;
        std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
    }

    pub fn out_dir(&self) -> Result<&Path> {
        match &self.out {
            Some(p) => Ok(p),
            None => bail!("no output directory: pass --out or set `out` in the config"),
        }
    }

    pub fn load_scene(&self) -> Result<SceneModel> {
        let Some(path) = &self.scene else {
            bail!("no scene: pass --scene or set `scene` in the config");
        };
        SceneModel::load(path).with_context(|| format!("loading scene {}", path.display()))
    }

    pub fn load_rig(&self) -> Result<Rig> {
        Rig::load(self.calibration.as_deref())
    }

    pub fn build_sequence(&self, rig: &Rig) -> Result<PatternSequence> {
        let grid = (rig.bundle.projector.width(), rig.bundle.projector.height());
        self.sequence
            .build(grid)
            .context("invalid sequence parameters")
    }

    /// Frame window: explicit, or the full sequence rounded up to 1 µs.
    pub fn window_for(&self, seq: &PatternSequence) -> u64 {
        self.window_us
            .unwrap_or_else(|| evrgbd::patterns::sequence_duration(seq).ceil() as u64)
    }
}

/// Calibration plus its rectification tables.
pub struct Rig {
    pub bundle: CalibrationBundle,
    pub rig: RectifiedRig,
    pub lut: RectificationLut,
}

impl Rig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let bundle = match path {
            Some(p) => CalibrationBundle::load(p)
                .with_context(|| format!("loading calibration {}", p.display()))?,
            None => CalibrationBundle::reference(),
        };
        let (rig, lut) = build_rectification(&bundle.camera, &bundle.projector, &bundle.extrinsics)
            .context("rectifying calibration")?;
        Ok(Self { bundle, rig, lut })
    }

    pub fn camera_dims(&self) -> (usize, usize) {
        (self.bundle.camera.width, self.bundle.camera.height)
    }
}

fn parse_mode(s: &str) -> std::result::Result<SequenceMode, String> {
    let v: u8 = s
        .parse()
        .map_err(|_| format!("`{s}` is not a mode number"))?;
    SequenceMode::try_from(v)
}

fn parse_count(s: &str) -> std::result::Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

fn parse_kind(s: &str) -> std::result::Result<DepthKind, String> {
    match s {
        "lines" => Ok(DepthKind::Lines),
        "dots" => Ok(DepthKind::Dots),
        _ => Err(format!("unknown pattern kind `{s}` (lines, dots)")),
    }
}

/// Sequence flags shared by every command that builds patterns.
#[derive(Args, Clone, Debug, Default)]
pub struct SequenceArgs {
    /// Sequence mode, 1-4.
    #[arg(long, value_parser = parse_mode)]
    pub mode: Option<SequenceMode>,
    /// Depth patterns per channel.
    #[arg(long, value_parser = parse_count)]
    pub n: Option<usize>,
    /// Depth pattern family: lines or dots.
    #[arg(long, value_parser = parse_kind)]
    pub kind: Option<DepthKind>,
    #[arg(long)]
    pub line_width: Option<usize>,
    /// First and last line center columns.
    #[arg(long, num_args = 2, value_names = ["FIRST", "LAST"])]
    pub span: Option<Vec<usize>>,
    #[arg(long)]
    pub exposure_us: Option<u32>,
    #[arg(long)]
    pub blank_us: Option<f64>,
    /// Pad the sequence to this total duration.
    #[arg(long)]
    pub target_us: Option<f64>,
}

impl SequenceArgs {
    pub fn apply(&self, p: &mut SequenceParams) {
        if let Some(v) = self.mode {
            p.mode = v;
        }
        if let Some(v) = self.n {
            p.n = v;
        }
        if let Some(v) = self.kind {
            p.kind = v;
        }
        if let Some(v) = self.line_width {
            p.line_width = v;
        }
        if let Some(v) = &self.span {
            p.span = (v[0], v[1]);
        }
        if let Some(v) = self.exposure_us {
            p.exposure_us = v;
        }
        if let Some(v) = self.blank_us {
            p.blank_us = v;
            p.target_duration_us = None;
        }
        if let Some(v) = self.target_us {
            p.target_duration_us = Some(v);
        }
    }
}

/// Flags mirroring [`RunConfig`].
#[derive(Args, Clone, Debug, Default)]
pub struct RunArgs {
    /// TOML run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub calibration: Option<PathBuf>,
    #[arg(long)]
    pub scene: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Frame window length.
    #[arg(long)]
    pub window_us: Option<u64>,
    /// Depth accumulation policy: median, mean or last.
    #[arg(long)]
    pub policy: Option<DepthPolicy>,
    #[command(flatten)]
    pub sequence: SequenceArgs,
    /// Background events per second.
    #[arg(long)]
    pub background_rate: Option<f64>,
    #[arg(long)]
    pub drop_probability: Option<f64>,
    /// Events per millisecond the sensor bus can carry.
    #[arg(long)]
    pub bus_cap: Option<u32>,
    /// Events per pixel at full albedo.
    #[arg(long)]
    pub k_max: Option<u32>,
    #[arg(long)]
    pub repetitions: Option<u32>,
}

impl RunArgs {
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(v) = &self.calibration {
            cfg.calibration = Some(v.clone());
        }
        if let Some(v) = &self.scene {
            cfg.scene = Some(v.clone());
        }
        if let Some(v) = &self.out {
            cfg.out = Some(v.clone());
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.window_us {
            cfg.window_us = Some(v);
        }
        if let Some(v) = self.policy {
            cfg.policy = v;
        }
        self.sequence.apply(&mut cfg.sequence);
        if let Some(v) = self.background_rate {
            cfg.noise.background_rate = v;
        }
        if let Some(v) = self.drop_probability {
            cfg.noise.drop_probability = v;
        }
        if let Some(v) = self.bus_cap {
            cfg.noise.bus_cap = Some(v);
        }
        if let Some(v) = self.k_max {
            cfg.render.k_max = v;
        }
        if let Some(v) = self.repetitions {
            cfg.render.repetitions = v;
        }
        if cfg.window_us == Some(0) {
            bail!("window must be positive");
        }
        cfg.noise.seed = cfg.seed;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relative_paths_follow_the_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(
            &path,
            "scene = \"scenes/plane.toml\"\nseed = 3\n[sequence]\nmode = 4\n",
        )
        .unwrap();
        let cfg = RunConfig::load(&path).unwrap();
        assert_eq!(cfg.scene.unwrap(), dir.path().join("scenes/plane.toml"));
        assert_eq!(cfg.sequence.mode, SequenceMode::DepthAndColor);
        assert_eq!(cfg.sequence.n, 23);
    }

    #[test]
    fn overrides_win_and_seed_reaches_noise() {
        let args = RunArgs {
            seed: Some(9),
            sequence: SequenceArgs {
                n: Some(45),
                ..SequenceArgs::default()
            },
            ..RunArgs::default()
        };
        let cfg = args.resolve().unwrap();
        assert_eq!(cfg.noise.seed, 9);
        assert_eq!(cfg.sequence.n, 45);
    }

    #[test]
    fn resolved_config_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("resolved.toml");
        let cfg = RunConfig {
            scene: Some(dir.path().join("s.toml")),
            window_us: Some(8000),
            ..RunConfig::default()
        };
        cfg.save(&path).unwrap();
        assert_eq!(RunConfig::load(&path).unwrap(), cfg);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<RunConfig>("sede = 1").is_err());
    }
}
