use serde::{Deserialize, Serialize};

use super::frames::{ColorFrame, DepthFrame, TemporalMap};
use crate::tagger::TaggedEvent;

/// How several depth samples at one pixel are combined.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum DepthPolicy {
    Last,
    Mean,
    #[default]
    Median,
}

impl std::str::FromStr for DepthPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "last" => Ok(DepthPolicy::Last),
            "mean" => Ok(DepthPolicy::Mean),
            "median" => Ok(DepthPolicy::Median),
            _ => Err(format!("unknown depth policy `{s}` (last, mean, median)")),
        }
    }
}

fn in_window(e: &TaggedEvent, window: (u64, u64)) -> bool {
    e.t >= window.0 && e.t < window.1
}

fn index(e: &TaggedEvent, dims: (usize, usize)) -> Option<usize> {
    let (x, y) = (e.x as usize, e.y as usize);
    (x < dims.0 && y < dims.1).then_some(y * dims.0 + x)
}

/// Depth frame from the depth-carrying events with `t` in `[t0, t1)`.
pub fn accumulate_depth(
    events: &[TaggedEvent],
    dims: (usize, usize),
    window: (u64, u64),
    policy: DepthPolicy,
) -> DepthFrame {
    let mut frame = DepthFrame::zeros(dims.0, dims.1);
    frame.window = window;
    let samples = events
        .iter()
        .filter(|e| e.depth > 0.0 && in_window(e, window))
        .filter_map(|e| index(e, dims).map(|i| (i, e.depth)));
    match policy {
        DepthPolicy::Last => {
            for (i, d) in samples {
                frame.data[i] = d;
            }
        }
        DepthPolicy::Mean => {
            let mut count = vec![0u32; frame.data.len()];
            for (i, d) in samples {
                frame.data[i] += d;
                count[i] += 1;
            }
            for (v, c) in frame.data.iter_mut().zip(count) {
                if c > 0 {
                    *v /= c as f64;
                }
            }
        }
        DepthPolicy::Median => {
            let mut all: Vec<(usize, f64)> = samples.collect();
            all.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
            for group in all.chunk_by(|a, b| a.0 == b.0) {
                let k = group.len();
                let mid = if k % 2 == 1 {
                    group[k / 2].1
                } else {
                    0.5 * (group[k / 2 - 1].1 + group[k / 2].1)
                };
                frame.data[group[0].0] = mid;
            }
        }
    }
    frame
}

/// Color frame from per-channel event counts: `255 · min(count / k_max, 1)`,
/// rounded half away from zero.
pub fn accumulate_color(
    events: &[TaggedEvent],
    dims: (usize, usize),
    window: (u64, u64),
    k_max: u32,
) -> ColorFrame {
    let mut counts = vec![[0u32; 3]; dims.0 * dims.1];
    for e in events.iter().filter(|e| in_window(e, window)) {
        if let (Some(ch), Some(i)) = (e.channel, index(e, dims)) {
            counts[i][ch.index()] += 1;
        }
    }
    let mut frame = ColorFrame::empty(dims.0, dims.1);
    let k = k_max.max(1) as f64;
    for (i, c) in counts.iter().enumerate() {
        if c.iter().any(|&v| v > 0) {
            frame.data[i] = c.map(|v| (255.0 * (v as f64 / k).min(1.0)).round() as u8);
            frame.mask[i] = true;
        }
    }
    frame
}

/// Per pixel, the column index of the latest depth-carrying event.
pub fn temporal_map(
    events: &[TaggedEvent],
    dims: (usize, usize),
    window: (u64, u64),
) -> TemporalMap {
    let mut data = vec![0u16; dims.0 * dims.1];
    for e in events
        .iter()
        .filter(|e| e.column > 0 && in_window(e, window))
    {
        if let Some(i) = index(e, dims) {
            data[i] = e.column;
        }
    }
    TemporalMap {
        width: dims.0,
        height: dims.1,
        data,
    }
}

/// Consecutive `[t0, t1)` windows of `length` µs starting at `start` that
/// cover every event. No events, no windows.
pub fn frame_windows(events: &[TaggedEvent], start: u64, length: u64) -> Vec<(u64, u64)> {
    let Some(last) = events.iter().map(|e| e.t).max() else {
        return Vec::new();
    };
    let length = length.max(1);
    let count = last.saturating_sub(start) / length + 1;
    (0..count)
        .map(|k| (start + k * length, start + (k + 1) * length))
        .collect()
}
