//! File names inside output directories.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

pub const RUN_CONFIG: &str = "run.toml";
pub const MANIFEST: &str = "manifest.json";
pub const PATTERNS_DIR: &str = "patterns";
pub const EVENTS: &str = "events.evst";
pub const TAGGED: &str = "tagged.evtg";
pub const TAG_STATS: &str = "tag_stats.json";
pub const FRAMES_DIR: &str = "frames";
pub const WINDOWS: &str = "windows.json";
pub const GT_DIR: &str = "gt";
pub const GT_DEPTH: &str = "gt_depth.png";
pub const GT_DEPTH_FULL: &str = "gt_depth_full.png";
pub const GT_COLOR: &str = "gt_color.png";
pub const METRICS: &str = "metrics.json";
pub const SUMMARY: &str = "summary.txt";

pub fn dmd_bitmap(index: usize) -> String {
    format!("dmd_{index:03}.png")
}

pub fn frame_depth(index: usize) -> String {
    format!("frame_{index:04}_depth.png")
}

pub fn frame_color(index: usize) -> String {
    format!("frame_{index:04}_color.png")
}

pub fn frame_temporal(index: usize) -> String {
    format!("frame_{index:04}_temporal.png")
}

pub fn frame_cloud(index: usize) -> String {
    format!("frame_{index:04}.ply")
}

/// Window index of a `frame_NNNN_depth.png` name.
pub fn depth_frame_index(name: &str) -> Option<usize> {
    name.strip_prefix("frame_")?
        .strip_suffix("_depth.png")?
        .parse()
        .ok()
}

pub fn create_dir(dir: &Path) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(dir.to_path_buf())
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value).context("serializing JSON")?;
    std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}
