use std::path::Path;

use anyhow::Result;
use evrgbd::io::{save_color_png, save_depth_png};
use evrgbd::patterns::PatternSequence;
use evrgbd::recon::{ColorFrame, DepthFrame};
use evrgbd::simulator::{depth_support, ground_truth_color, ground_truth_depth_with, SceneModel};
use evrgbd::Execution;

use crate::config::{Rig, RunConfig};
use crate::layout;

pub struct GroundTruth {
    /// Oracle depth restricted to pixels the sequence can light; empty for
    /// color-only sequences.
    pub depth: DepthFrame,
    pub depth_full: DepthFrame,
    pub color: ColorFrame,
}

pub fn ground_truth(
    cfg: &RunConfig,
    rig: &Rig,
    scene: &SceneModel,
    seq: &PatternSequence,
) -> Result<GroundTruth> {
    let b = &rig.bundle;
    let exec = Execution::default();
    let depth_full = ground_truth_depth_with(scene, &b.camera, exec);
    let support = depth_support(
        scene,
        &b.camera,
        &b.projector,
        &b.extrinsics,
        seq,
        cfg.render.k_max,
        exec,
    )?;
    Ok(GroundTruth {
        depth: depth_full.masked(&support),
        depth_full,
        color: ground_truth_color(scene, &b.camera),
    })
}

pub fn write(gt: &GroundTruth, dir: &Path) -> Result<()> {
    layout::create_dir(dir)?;
    save_depth_png(dir.join(layout::GT_DEPTH), &gt.depth)?;
    save_depth_png(dir.join(layout::GT_DEPTH_FULL), &gt.depth_full)?;
    save_color_png(dir.join(layout::GT_COLOR), &gt.color)?;
    Ok(())
}

pub fn run(cfg: &RunConfig) -> Result<()> {
    let out = layout::create_dir(cfg.out_dir()?)?;
    let rig = cfg.load_rig()?;
    let scene = cfg.load_scene()?;
    let seq = cfg.build_sequence(&rig)?;
    let gt = ground_truth(cfg, &rig, &scene, &seq)?;
    write(&gt, &out)?;
    cfg.save(&out.join(layout::RUN_CONFIG))?;
    println!(
        "ground truth: {} pixels with depth, {} reachable by the sequence, {} with color",
        gt.depth_full.data_pixel_count(),
        gt.depth.data_pixel_count(),
        gt.color.valid_count()
    );
    Ok(())
}
