use std::path::Path;

use anyhow::Result;
use evrgbd::io::save_events;
use evrgbd::patterns::PatternSequence;
use evrgbd::simulator::{render_events_with, EventStream, SceneModel};
use evrgbd::Execution;

use crate::config::{Rig, RunConfig};
use crate::layout;

pub fn render(
    cfg: &RunConfig,
    rig: &Rig,
    scene: &SceneModel,
    seq: &PatternSequence,
) -> Result<EventStream> {
    let b = &rig.bundle;
    Ok(render_events_with(
        scene,
        &b.camera,
        &b.projector,
        &b.extrinsics,
        seq,
        &cfg.noise,
        &cfg.render,
        Execution::default(),
    )?)
}

pub fn report(stream: &EventStream) {
    let rising = stream
        .triggers
        .iter()
        .filter(|t| t.edge == evrgbd::simulator::Edge::Rising)
        .count();
    println!(
        "events: {} ({} ON), triggers: {} ({} rising), span {}..{} us",
        stream.events.len(),
        stream.on_event_count(),
        stream.triggers.len(),
        rising,
        stream.start_time,
        stream.end_time()
    );
}

/// Renders into `out`: the event stream plus the patterns it used.
pub fn simulate_into(
    cfg: &RunConfig,
    rig: &Rig,
    out: &Path,
) -> Result<(PatternSequence, EventStream)> {
    let scene = cfg.load_scene()?;
    let seq = cfg.build_sequence(rig)?;
    super::patterns::write(&seq, &cfg.sequence, &out.join(layout::PATTERNS_DIR), false)?;
    let stream = render(cfg, rig, &scene, &seq)?;
    save_events(out.join(layout::EVENTS), &stream)?;
    Ok((seq, stream))
}

pub fn run(cfg: &RunConfig) -> Result<()> {
    let out = layout::create_dir(cfg.out_dir()?)?;
    let rig = cfg.load_rig()?;
    let (_, stream) = simulate_into(cfg, &rig, &out)?;
    cfg.save(&out.join(layout::RUN_CONFIG))?;
    report(&stream);
    Ok(())
}
