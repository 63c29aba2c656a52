use std::collections::BTreeSet;
use std::path::Path;

use anyhow::{Context, Result};
use evrgbd::io::save_pattern_png;
use evrgbd::patterns::{
    coverage_percentage, diamond_compensate, PatternManifest, PatternSequence, Role, SequenceParams,
};

use crate::config::{Rig, RunConfig};
use crate::layout;

/// Writes the manifest and one bitmap per entry into `dir`.
pub fn write(
    seq: &PatternSequence,
    params: &SequenceParams,
    dir: &Path,
    diamond: bool,
) -> Result<PatternManifest> {
    layout::create_dir(dir)?;
    let depth: BTreeSet<usize> = seq
        .entries
        .iter()
        .filter(|e| e.role == Role::Depth)
        .map(|e| e.pattern)
        .collect();
    let coverage = if depth.is_empty() {
        None
    } else {
        let patterns: Vec<_> = depth.iter().map(|&i| seq.patterns[i].clone()).collect();
        Some(coverage_percentage(&patterns, params.span).context("coverage")?)
    };
    let manifest = PatternManifest::from_sequence(seq, coverage);
    for (entry, m) in seq.entries.iter().zip(&manifest.entries) {
        let pattern = seq.pattern(entry);
        save_pattern_png(dir.join(&m.bitmap), pattern)?;
        if diamond {
            let native = diamond_compensate(pattern, seq.grid());
            save_pattern_png(dir.join(layout::dmd_bitmap(m.index)), &native)?;
        }
    }
    manifest.save(dir.join(layout::MANIFEST))?;
    Ok(manifest)
}

pub fn run(cfg: &RunConfig, diamond: bool, out: &Path) -> Result<()> {
    let rig = Rig::load(cfg.calibration.as_deref())?;
    let seq = cfg.build_sequence(&rig)?;
    let manifest = write(&seq, &cfg.sequence, out, diamond)?;
    RunConfig {
        out: Some(out.to_path_buf()),
        ..cfg.clone()
    }
    .save(&out.join(layout::RUN_CONFIG))?;
    println!(
        "mode {} n={}: {} entries, {:.3} us per sequence (blank {:.3} us)",
        manifest.mode.number(),
        manifest.n,
        manifest.entries.len(),
        manifest.duration_us,
        manifest.blank_us
    );
    if let Some(c) = manifest.coverage {
        println!("coverage: {:.2}% of {} active columns", c.cp, c.active_span);
    }
    Ok(())
}
