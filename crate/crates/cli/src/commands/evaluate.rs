use std::path::Path;

use anyhow::{bail, Context, Result};
use evrgbd::io::{load_color_png, load_depth_png};
use evrgbd::metrics::{MetricsReport, MetricsSummary};
use serde::{Deserialize, Serialize};

use crate::layout;

#[derive(Debug, Serialize, Deserialize)]
pub struct MetricsFile {
    pub frames: Vec<MetricsReport>,
    pub summary: MetricsSummary,
}

#[derive(Deserialize)]
struct WindowRecord {
    index: usize,
    start_us: u64,
    end_us: u64,
}

/// `dir/name` if present, else `dir/fallback`.
fn pick(dir: &Path, name: &str, fallback: &str) -> Option<std::path::PathBuf> {
    [name, fallback]
        .into_iter()
        .map(|n| dir.join(n))
        .find(|p| p.is_file())
}

/// Pairs `frame_NNNN_depth.png` files in `frames` with the same name in
/// `gt`, falling back to a single static `gt_depth.png`.
pub fn evaluate_dirs(frames: &Path, gt: &Path) -> Result<Vec<MetricsReport>> {
    let mut indices: Vec<usize> = std::fs::read_dir(frames)
        .with_context(|| format!("listing {}", frames.display()))?
        .filter_map(|e| e.ok())
        .filter_map(|e| layout::depth_frame_index(&e.file_name().to_string_lossy()))
        .collect();
    indices.sort_unstable();
    let windows: Vec<WindowRecord> = match std::fs::read_to_string(frames.join(layout::WINDOWS)) {
        Ok(text) => serde_json::from_str(&text).context("parsing windows.json")?,
        Err(_) => Vec::new(),
    };

    let mut reports = Vec::new();
    for index in indices {
        let Some(gt_depth) = pick(gt, &layout::frame_depth(index), layout::GT_DEPTH) else {
            continue;
        };
        let mut depth = load_depth_png(frames.join(layout::frame_depth(index)))?;
        if let Some(w) = windows.iter().find(|w| w.index == index) {
            depth.window = (w.start_us, w.end_us);
        }
        let gt_depth = load_depth_png(&gt_depth)?;
        let color_path = frames.join(layout::frame_color(index));
        let color = match (
            color_path.is_file(),
            pick(gt, &layout::frame_color(index), layout::GT_COLOR),
        ) {
            (true, Some(g)) => Some((load_color_png(&color_path)?, load_color_png(g)?)),
            _ => None,
        };
        let report = MetricsReport::evaluate(
            index,
            &depth,
            &gt_depth,
            color.as_ref().map(|(c, g)| (c, g)),
        )
        .with_context(|| format!("frame {index}"))?;
        reports.push(report);
    }
    if reports.is_empty() {
        bail!(
            "no frame in {} has ground truth in {}",
            frames.display(),
            gt.display()
        );
    }
    Ok(reports)
}

pub fn write_metrics(path: &Path, reports: Vec<MetricsReport>) -> Result<MetricsFile> {
    let summary = MetricsSummary::from_reports(&reports)?;
    let file = MetricsFile {
        frames: reports,
        summary,
    };
    layout::write_json(path, &file)?;
    Ok(file)
}

pub fn run(frames: &Path, gt: &Path, out: Option<&Path>) -> Result<()> {
    let reports = evaluate_dirs(frames, gt)?;
    let out = layout::create_dir(out.unwrap_or(frames))?;
    let file = write_metrics(&out.join(layout::METRICS), reports)?;
    for r in &file.frames {
        println!(
            "frame {}: FR {} RMSE {} mm",
            r.index,
            r.fill_rate.map_or("n/a".into(), |v| format!("{v:.2}%")),
            r.rmse.map_or("n/a".into(), |v| format!("{v:.3}"))
        );
    }
    print!("{}", file.summary.to_text());
    Ok(())
}
