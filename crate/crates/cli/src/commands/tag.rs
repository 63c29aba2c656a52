use std::path::Path;

use anyhow::{bail, Context, Result};
use evrgbd::io::{load_events, save_tagged, TaggedFile};
use evrgbd::patterns::PatternManifest;
use evrgbd::simulator::EventStream;
use evrgbd::tagger::{process_stream, TagStats, TaggerConfig, TaggerState};

use crate::config::Rig;
use crate::layout;

pub fn tag(
    rig: &Rig,
    manifest: &PatternManifest,
    stream: &EventStream,
    config: &TaggerConfig,
) -> Result<(TaggedFile, TagStats)> {
    let grid = (manifest.grid[0], manifest.grid[1]);
    if grid != rig.rig.projector_size {
        bail!(
            "manifest grid {}x{} does not match the calibrated projector {}x{}",
            grid.0,
            grid.1,
            rig.rig.projector_size.0,
            rig.rig.projector_size.1
        );
    }
    if (stream.width as usize, stream.height as usize) != rig.rig.camera_size {
        bail!(
            "stream is {}x{} but the calibrated camera is {}x{}",
            stream.width,
            stream.height,
            rig.rig.camera_size.0,
            rig.rig.camera_size.1
        );
    }
    let mut state = TaggerState::new(
        &rig.rig,
        &rig.lut,
        manifest.columns.clone(),
        manifest.exposure_us,
        config.clone(),
    )?;
    let (events, stats) = process_stream(&mut state, stream)?;
    let file = TaggedFile {
        width: stream.width,
        height: stream.height,
        start_time: stream.start_time,
        events,
    };
    Ok((file, stats))
}

pub fn report(stats: &TagStats, on_events: usize) {
    let pct = |n: u64, d: u64| {
        if d == 0 {
            0.0
        } else {
            100.0 * n as f64 / d as f64
        }
    };
    println!(
        "tagged {} of {} events ({:.2}% of {} ON events), rejected {}",
        stats.tagged,
        stats.events,
        pct(stats.tagged, on_events as u64),
        on_events,
        stats.rejected()
    );
    println!(
        "rejections: off {} idle {} id {} bounds {} disparity {} range {}; desyncs {}",
        stats.off_polarity,
        stats.idle,
        stats.id_pattern,
        stats.out_of_bounds,
        stats.invalid_disparity,
        stats.depth_out_of_range,
        stats.desyncs
    );
}

pub fn run(events: &Path, manifest: &Path, calibration: Option<&Path>, out: &Path) -> Result<()> {
    let stream =
        load_events(events).with_context(|| format!("loading events {}", events.display()))?;
    let manifest_path = manifest;
    let manifest = PatternManifest::load(manifest_path)
        .with_context(|| format!("loading manifest {}", manifest_path.display()))?;
    let rig = Rig::load(calibration)?;
    let config = TaggerConfig::default();
    let (file, stats) = tag(&rig, &manifest, &stream, &config)?;
    let out = layout::create_dir(out)?;
    save_tagged(out.join(layout::TAGGED), &file)?;
    layout::write_json(&out.join(layout::TAG_STATS), &stats)?;
    layout::write_json(
        &out.join("tag.json"),
        &serde_json::json!({
            "events": events,
            "manifest": manifest_path,
            "calibration": calibration,
            "tagger": config,
        }),
    )?;
    report(&stats, stream.on_event_count());
    Ok(())
}
