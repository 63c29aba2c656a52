use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use evrgbd::io::{
    load_tagged, save_color_png, save_depth_png, save_ply, save_temporal_png, TaggedFile,
};
use evrgbd::recon::{
    accumulate_color, accumulate_depth, build_point_cloud, frame_windows, temporal_map, ColorFrame,
    DepthFrame, DepthPolicy,
};
use serde::Serialize;

use crate::config::Rig;
use crate::layout;

pub struct Options {
    pub tagged: PathBuf,
    pub calibration: Option<PathBuf>,
    pub window_us: u64,
    pub policy: DepthPolicy,
    pub k_max: u32,
    pub out: PathBuf,
}

pub struct Frame {
    pub depth: DepthFrame,
    pub color: ColorFrame,
}

#[derive(Serialize)]
struct WindowRecord {
    index: usize,
    start_us: u64,
    end_us: u64,
    depth_pixels: usize,
    color_pixels: usize,
}

/// Writes one depth / color / temporal / PLY set per window into `dir`.
pub fn reconstruct(
    tagged: &TaggedFile,
    rig: &Rig,
    window_us: u64,
    policy: DepthPolicy,
    k_max: u32,
    dir: &Path,
) -> Result<Vec<Frame>> {
    layout::create_dir(dir)?;
    let dims = (tagged.width as usize, tagged.height as usize);
    let windows = frame_windows(&tagged.events, tagged.start_time, window_us);
    let mut frames = Vec::with_capacity(windows.len());
    let mut records = Vec::with_capacity(windows.len());
    for (index, &window) in windows.iter().enumerate() {
        let events = &tagged.events;
        let depth = accumulate_depth(events, dims, window, policy);
        let color = accumulate_color(events, dims, window, k_max);
        let temporal = temporal_map(events, dims, window);
        let cloud = build_point_cloud(&depth, &color, &rig.rig, &rig.bundle.camera)?;
        save_depth_png(dir.join(layout::frame_depth(index)), &depth)?;
        save_color_png(dir.join(layout::frame_color(index)), &color)?;
        save_temporal_png(dir.join(layout::frame_temporal(index)), &temporal)?;
        save_ply(dir.join(layout::frame_cloud(index)), &cloud)?;
        records.push(WindowRecord {
            index,
            start_us: window.0,
            end_us: window.1,
            depth_pixels: depth.data_pixel_count(),
            color_pixels: color.valid_count(),
        });
        frames.push(Frame { depth, color });
    }
    layout::write_json(&dir.join(layout::WINDOWS), &records)?;
    Ok(frames)
}

pub fn run(opts: &Options) -> Result<()> {
    let tagged = load_tagged(&opts.tagged)
        .with_context(|| format!("loading tagged events {}", opts.tagged.display()))?;
    let rig = Rig::load(opts.calibration.as_deref())?;
    anyhow::ensure!(opts.window_us > 0, "window must be positive");
    let frames = reconstruct(
        &tagged,
        &rig,
        opts.window_us,
        opts.policy,
        opts.k_max,
        &opts.out,
    )?;
    layout::write_json(
        &opts.out.join("reconstruct.json"),
        &serde_json::json!({
            "tagged": opts.tagged,
            "calibration": opts.calibration,
            "window_us": opts.window_us,
            "policy": opts.policy,
            "k_max": opts.k_max,
        }),
    )?;
    println!(
        "{} frame set(s) from {} tagged events, window {} us",
        frames.len(),
        tagged.events.len(),
        opts.window_us
    );
    Ok(())
}
