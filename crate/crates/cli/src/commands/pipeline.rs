use anyhow::{Context, Result};
use evrgbd::io::save_tagged;
use evrgbd::metrics::MetricsReport;
use evrgbd::patterns::PatternManifest;

use super::{evaluate, oracle, reconstruct, simulate, tag};
use crate::config::RunConfig;
use crate::layout;

pub fn run(cfg: &RunConfig) -> Result<()> {
    let out = layout::create_dir(cfg.out_dir()?)?;
    cfg.save(&out.join(layout::RUN_CONFIG))?;
    let rig = cfg.load_rig()?;
    let scene = cfg.load_scene()?;

    let (seq, stream) = simulate::simulate_into(cfg, &rig, &out).context("simulate")?;
    let manifest = PatternManifest::from_sequence(&seq, None);
    let (tagged, stats) = tag::tag(&rig, &manifest, &stream, &cfg.tagger).context("tag")?;
    save_tagged(out.join(layout::TAGGED), &tagged)?;
    layout::write_json(&out.join(layout::TAG_STATS), &stats)?;

    let window = cfg.window_for(&seq);
    let frames = reconstruct::reconstruct(
        &tagged,
        &rig,
        window,
        cfg.policy,
        cfg.render.k_max,
        &out.join(layout::FRAMES_DIR),
    )
    .context("reconstruct")?;

    let gt = oracle::ground_truth(cfg, &rig, &scene, &seq).context("oracle")?;
    oracle::write(&gt, &out.join(layout::GT_DIR))?;
    let reports = frames
        .iter()
        .enumerate()
        .map(|(i, f)| MetricsReport::evaluate(i, &f.depth, &gt.depth, Some((&f.color, &gt.color))))
        .collect::<evrgbd::Result<Vec<_>>>()
        .context("evaluate")?;
    anyhow::ensure!(
        !reports.is_empty(),
        "no frames reconstructed: the stream has no tagged events"
    );
    let metrics = evaluate::write_metrics(&out.join(layout::METRICS), reports)?;

    let summary = format!(
        "mode: {}\nn: {}\nwindow_us: {window}\nevents: {}\ntagged: {}\n{}",
        seq.mode.number(),
        seq.n,
        stream.events.len(),
        stats.tagged,
        metrics.summary.to_text()
    );
    std::fs::write(out.join(layout::SUMMARY), &summary)?;
    print!("{summary}");
    Ok(())
}
