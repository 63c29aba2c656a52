use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use super::scene::{Albedo, SceneModel};
use crate::geometry::{
    cast_camera_ray, cast_projector_ray, CameraIntrinsics, Extrinsics, ProjectorModel,
};
use crate::patterns::{sequence_duration, PatternImage, PatternSequence, Role, SequenceEntry};
use crate::{Error, Execution, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Polarity {
    #[serde(rename = "ON")]
    On,
    #[serde(rename = "OFF")]
    Off,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Edge {
    #[serde(rename = "RISING")]
    Rising,
    #[serde(rename = "FALLING")]
    Falling,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct EventRecord {
    pub x: u16,
    pub y: u16,
    pub t: u64,
    pub polarity: Polarity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TriggerRecord {
    pub t: u64,
    pub edge: Edge,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EventStream {
    pub width: u16,
    pub height: u16,
    pub start_time: u64,
    pub events: Vec<EventRecord>,
    pub triggers: Vec<TriggerRecord>,
}

impl EventStream {
    /// Last timestamp seen in either list, or `start_time` when both are empty.
    pub fn end_time(&self) -> u64 {
        let e = self.events.last().map_or(0, |e| e.t);
        let t = self.triggers.last().map_or(0, |t| t.t);
        e.max(t).max(self.start_time)
    }

    pub fn on_event_count(&self) -> usize {
        self.events
            .iter()
            .filter(|e| e.polarity == Polarity::On)
            .count()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseConfig {
    /// Background events per second over the whole sensor.
    pub background_rate: f64,
    pub latency_mean_us: f64,
    /// Half-width of the uniform latency jitter.
    pub latency_jitter_us: f64,
    pub drop_probability: f64,
    /// Maximum events per millisecond bucket; `None` = unlimited.
    pub bus_cap: Option<u32>,
    pub seed: u64,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self {
            background_rate: 0.0,
            latency_mean_us: 200.0,
            latency_jitter_us: 50.0,
            drop_probability: 0.0,
            bus_cap: None,
            seed: 0,
        }
    }
}

impl NoiseConfig {
    /// Sensor latency only: no background events, drops or bus limit.
    pub fn noiseless() -> Self {
        Self::default()
    }

    pub fn validate(&self) -> Result<()> {
        let check = |name, v: f64| {
            if v >= 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::param(name, "must be finite and non-negative"))
            }
        };
        check("background_rate", self.background_rate)?;
        check("latency_mean_us", self.latency_mean_us)?;
        check("latency_jitter_us", self.latency_jitter_us)?;
        check("drop_probability", self.drop_probability)?;
        if self.drop_probability > 1.0 {
            return Err(Error::param("drop_probability", "must be <= 1"));
        }
        if self.latency_jitter_us > self.latency_mean_us {
            return Err(Error::param(
                "latency_jitter_us",
                "must not exceed latency_mean_us",
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RenderOptions {
    /// Events per pixel at full albedo.
    pub k_max: u32,
    /// Back-to-back plays of the sequence.
    pub repetitions: u32,
    pub start_time_us: u64,
    pub emit_off_events: bool,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self {
            k_max: 4,
            repetitions: 1,
            start_time_us: 0,
            emit_off_events: true,
        }
    }
}

/// A camera pixel reached by projector light, with the albedo seen there.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LitPixel {
    pub x: u16,
    pub y: u16,
    pub albedo: Albedo,
}

/// Relative tolerance for "the camera sees the same point the projector lit".
const VISIBILITY_TOL: f64 = 1e-6;

fn light_one(
    scene: &SceneModel,
    cam: &CameraIntrinsics,
    proj: &ProjectorModel,
    ext: &Extrinsics,
    px: usize,
    py: usize,
) -> Option<LitPixel> {
    let ray = cast_projector_ray(proj, ext, px as f64, py as f64).ok()?;
    let hit = scene.intersect(&ray)?;
    let [u, v] = cam.project(&hit.point)?;
    let (cx, cy) = (u.round(), v.round());
    if !cam.contains(cx, cy) {
        return None;
    }
    // Occlusion: nothing between the camera and the lit point.
    let dist = hit.point.norm();
    let view = crate::geometry::Ray::new(nalgebra::Vector3::zeros(), hit.point);
    let first = scene.intersect(&view)?;
    if (first.t - dist).abs() > VISIBILITY_TOL * dist.max(1.0) {
        return None;
    }
    // The pixel center must see the same surface, so a pixel straddling a
    // depth edge never reports the wrong side.
    let center = scene.intersect(&cast_camera_ray(cam, cx, cy).ok()?)?;
    (center.surface == hit.surface).then_some(LitPixel {
        x: cx as u16,
        y: cy as u16,
        albedo: center.albedo,
    })
}

/// Camera pixels lit by `pattern`, sorted by `(y, x)` without duplicates.
pub fn lit_pixels(
    scene: &SceneModel,
    cam: &CameraIntrinsics,
    proj: &ProjectorModel,
    ext: &Extrinsics,
    pattern: &PatternImage,
    exec: Execution,
) -> Vec<LitPixel> {
    let rows = exec.map_range(pattern.height(), |py| {
        (0..pattern.width())
            .filter(|&px| pattern.get(px, py))
            .filter_map(|px| light_one(scene, cam, proj, ext, px, py))
            .collect::<Vec<_>>()
    });
    let mut lit: Vec<LitPixel> = rows.into_iter().flatten().collect();
    lit.sort_by_key(|p| (p.y, p.x));
    lit.dedup_by_key(|p| (p.y, p.x));
    lit
}

/// Events per lit pixel for `entry`.
pub fn event_count(entry: &SequenceEntry, albedo: &Albedo, k_max: u32) -> u32 {
    let scaled = |c: usize| (albedo[c] * k_max as f64).round() as u32;
    match (entry.role, entry.channel) {
        (Role::Id, _) => 0,
        (Role::Depth, None) => k_max,
        (_, Some(ch)) => scaled(ch.index()),
        (Role::Color, None) => 0,
    }
}

fn check_inputs(
    scene: &SceneModel,
    cam: &CameraIntrinsics,
    proj: &ProjectorModel,
    ext: &Extrinsics,
    seq: &PatternSequence,
) -> Result<()> {
    cam.validate()?;
    proj.validate()?;
    ext.validate()?;
    scene.validate()?;
    if seq.entries.is_empty() {
        return Err(Error::Empty("pattern sequence"));
    }
    if seq.grid() != (proj.width(), proj.height()) {
        return Err(Error::DimensionMismatch(format!(
            "pattern grid {:?} vs projector {}x{}",
            seq.grid(),
            proj.width(),
            proj.height()
        )));
    }
    if cam.width > u16::MAX as usize || cam.height > u16::MAX as usize {
        return Err(Error::param("camera", "sensor larger than 65535 pixels"));
    }
    Ok(())
}

/// Lit pixels for every pattern referenced by a non-ID entry.
fn illuminate_sequence(
    scene: &SceneModel,
    cam: &CameraIntrinsics,
    proj: &ProjectorModel,
    ext: &Extrinsics,
    seq: &PatternSequence,
    exec: Execution,
) -> Vec<Vec<LitPixel>> {
    let mut used = vec![false; seq.patterns.len()];
    for e in seq.entries.iter().filter(|e| e.role != Role::Id) {
        used[e.pattern] = true;
    }
    seq.patterns
        .iter()
        .zip(&used)
        .map(|(p, &u)| {
            if u {
                lit_pixels(scene, cam, proj, ext, p, exec)
            } else {
                Vec::new()
            }
        })
        .collect()
}

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn latency(rng: &mut ChaCha8Rng, noise: &NoiseConfig) -> f64 {
    let jitter = if noise.latency_jitter_us > 0.0 {
        rng.random_range(-noise.latency_jitter_us..=noise.latency_jitter_us)
    } else {
        0.0
    };
    noise.latency_mean_us + jitter
}

/// [`render_events_with`] with default options and execution.
pub fn render_events(
    scene: &SceneModel,
    cam: &CameraIntrinsics,
    proj: &ProjectorModel,
    ext: &Extrinsics,
    seq: &PatternSequence,
    noise: &NoiseConfig,
) -> Result<EventStream> {
    render_events_with(
        scene,
        cam,
        proj,
        ext,
        seq,
        noise,
        &RenderOptions::default(),
        Execution::default(),
    )
}

/// Synthesizes the camera's event stream and the projector's trigger edges.
///
/// Every ON projector pixel casts one ray; the first hit is projected into
/// the camera and, if visible there, the nearest camera pixel emits
/// [`event_count`] ON events at entry onset plus latency and as many OFF
/// events at entry offset plus latency. Output is identical for both
/// execution modes.
#[allow(clippy::too_many_arguments)]
pub fn render_events_with(
    scene: &SceneModel,
    cam: &CameraIntrinsics,
    proj: &ProjectorModel,
    ext: &Extrinsics,
    seq: &PatternSequence,
    noise: &NoiseConfig,
    options: &RenderOptions,
    exec: Execution,
) -> Result<EventStream> {
    check_inputs(scene, cam, proj, ext, seq)?;
    noise.validate()?;
    let lit = illuminate_sequence(scene, cam, proj, ext, seq, exec);

    let onsets = seq.onsets_us();
    let duration = sequence_duration(seq);
    let start = options.start_time_us as f64;
    let reps = options.repetitions as usize;
    let per_rep = seq.entries.len();

    let mut triggers = Vec::with_capacity(2 * reps * per_rep);
    for rep in 0..reps {
        for (entry, onset) in seq.entries.iter().zip(&onsets) {
            let on = start + rep as f64 * duration + onset;
            let rise = on.round() as u64;
            triggers.push(TriggerRecord {
                t: rise,
                edge: Edge::Rising,
            });
            triggers.push(TriggerRecord {
                t: rise + entry.exposure_us as u64,
                edge: Edge::Falling,
            });
        }
    }

    let chunks = exec.map_range(reps * per_rep, |job| {
        let entry = &seq.entries[job % per_rep];
        let rise = triggers[2 * job].t as f64;
        let fall = triggers[2 * job + 1].t as f64;
        let mut r = rng(noise.seed, job as u64 + 1);
        let mut out = Vec::new();
        for p in &lit[entry.pattern] {
            let k = event_count(entry, &p.albedo, options.k_max);
            for _ in 0..k {
                let t = (rise + latency(&mut r, noise)).round() as u64;
                out.push(EventRecord {
                    x: p.x,
                    y: p.y,
                    t,
                    polarity: Polarity::On,
                });
            }
            if options.emit_off_events {
                for _ in 0..k {
                    let t = (fall + latency(&mut r, noise)).round() as u64;
                    out.push(EventRecord {
                        x: p.x,
                        y: p.y,
                        t,
                        polarity: Polarity::Off,
                    });
                }
            }
        }
        out
    });
    let mut events: Vec<EventRecord> = chunks.into_iter().flatten().collect();

    let end = start + reps as f64 * duration;
    if noise.background_rate > 0.0 && end > start {
        let mut r = rng(noise.seed, 0);
        let lambda = noise.background_rate * (end - start) * 1e-6;
        let count = Poisson::new(lambda)
            .map_err(|e| Error::param("background_rate", e.to_string()))?
            .sample(&mut r) as usize;
        for _ in 0..count {
            events.push(EventRecord {
                x: r.random_range(0..cam.width) as u16,
                y: r.random_range(0..cam.height) as u16,
                t: r.random_range(start..end).floor() as u64,
                polarity: if r.random_bool(0.5) {
                    Polarity::On
                } else {
                    Polarity::Off
                },
            });
        }
    }
    events.sort_by_key(|e| e.t);

    if noise.drop_probability > 0.0 {
        let mut r = rng(noise.seed, u64::MAX - 1);
        let p = noise.drop_probability;
        events.retain(|_| !r.random_bool(p));
    }
    if let Some(cap) = noise.bus_cap {
        events = apply_bus_cap(events, cap as usize, &mut rng(noise.seed, u64::MAX - 2));
    }

    Ok(EventStream {
        width: cam.width as u16,
        height: cam.height as u16,
        start_time: options.start_time_us,
        events,
        triggers,
    })
}

/// Keeps at most `cap` events per millisecond, chosen uniformly at random.
/// Input must be time-sorted; output stays time-sorted.
fn apply_bus_cap(events: Vec<EventRecord>, cap: usize, r: &mut ChaCha8Rng) -> Vec<EventRecord> {
    let mut out = Vec::with_capacity(events.len());
    let mut i = 0;
    while i < events.len() {
        let bucket = events[i].t / 1000;
        let j = i + events[i..].partition_point(|e| e.t / 1000 == bucket);
        let slice = &events[i..j];
        if slice.len() <= cap {
            out.extend_from_slice(slice);
        } else {
            let mut keep = index::sample(r, slice.len(), cap).into_vec();
            keep.sort_unstable();
            out.extend(keep.into_iter().map(|k| slice[k]));
        }
        i = j;
    }
    out
}

/// Camera pixels that receive at least one event from a depth entry of
/// `seq`. This is where a fully accumulated depth scan can carry data.
pub fn depth_support(
    scene: &SceneModel,
    cam: &CameraIntrinsics,
    proj: &ProjectorModel,
    ext: &Extrinsics,
    seq: &PatternSequence,
    k_max: u32,
    exec: Execution,
) -> Result<Vec<bool>> {
    check_inputs(scene, cam, proj, ext, seq)?;
    let lit = illuminate_sequence(scene, cam, proj, ext, seq, exec);
    let mut mask = vec![false; cam.width * cam.height];
    for e in seq.entries.iter().filter(|e| e.role == Role::Depth) {
        for p in &lit[e.pattern] {
            if event_count(e, &p.albedo, k_max) > 0 {
                mask[p.y as usize * cam.width + p.x as usize] = true;
            }
        }
    }
    Ok(mask)
}
