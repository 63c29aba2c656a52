//! Fill rate, RMSE, PSNR and multi-scan ground truth.

use serde::{Deserialize, Serialize};

use crate::recon::{ColorFrame, DepthFrame};
use crate::{Error, Result};

fn same_dims(a: (usize, usize), b: (usize, usize)) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(format!(
            "{}x{} vs {}x{}",
            a.0, a.1, b.0, b.1
        )))
    }
}

/// Percentage of ground-truth data pixels that also carry data in `frame`.
pub fn fill_rate(frame: &DepthFrame, gt: &DepthFrame) -> Result<f64> {
    frame.same_dims(gt)?;
    let mut support = 0usize;
    let mut filled = 0usize;
    for (&f, &g) in frame.data.iter().zip(&gt.data) {
        if g != 0.0 {
            support += 1;
            if f != 0.0 {
                filled += 1;
            }
        }
    }
    if support == 0 {
        return Err(Error::Empty("ground-truth frame"));
    }
    Ok(100.0 * filled as f64 / support as f64)
}

/// Pixels where both frames carry data.
pub fn intersection_mask(frame: &DepthFrame, gt: &DepthFrame) -> Result<Vec<bool>> {
    frame.same_dims(gt)?;
    Ok(frame
        .data
        .iter()
        .zip(&gt.data)
        .map(|(&f, &g)| f != 0.0 && g != 0.0)
        .collect())
}

/// Root mean squared difference over `mask`.
pub fn rmse_masked(frame: &DepthFrame, gt: &DepthFrame, mask: &[bool]) -> Result<f64> {
    frame.same_dims(gt)?;
    if mask.len() != frame.data.len() {
        return Err(Error::DimensionMismatch(
            "mask size differs from frame".into(),
        ));
    }
    let (sum, n) = frame
        .data
        .iter()
        .zip(&gt.data)
        .zip(mask)
        .filter(|(_, &m)| m)
        .fold((0.0, 0usize), |(s, n), ((f, g), _)| {
            (s + (f - g) * (f - g), n + 1)
        });
    if n == 0 {
        return Err(Error::Empty("evaluation mask"));
    }
    Ok((sum / n as f64).sqrt())
}

/// RMSE over the pixels where both frames carry data.
pub fn rmse(frame: &DepthFrame, gt: &DepthFrame) -> Result<f64> {
    rmse_masked(frame, gt, &intersection_mask(frame, gt)?)
}

/// RMSE in 8-bit levels over both validity masks, squared error averaged
/// over the three channels.
pub fn color_rmse(frame: &ColorFrame, gt: &ColorFrame) -> Result<f64> {
    same_dims((frame.width, frame.height), (gt.width, gt.height))?;
    let mut sum = 0.0;
    let mut n = 0usize;
    for i in 0..frame.data.len() {
        if frame.mask[i] && gt.mask[i] {
            for c in 0..3 {
                let d = frame.data[i][c] as f64 - gt.data[i][c] as f64;
                sum += d * d;
            }
            n += 1;
        }
    }
    if n == 0 {
        return Err(Error::Empty("evaluation mask"));
    }
    Ok((sum / (3 * n) as f64).sqrt())
}

/// `20 · log10(255 / rmse)`; `+inf` for identical frames.
pub fn psnr_from_rmse(rmse: f64) -> f64 {
    if rmse == 0.0 {
        f64::INFINITY
    } else {
        20.0 * (255.0 / rmse).log10()
    }
}

pub fn psnr(frame: &ColorFrame, gt: &ColorFrame) -> Result<f64> {
    color_rmse(frame, gt).map(psnr_from_rmse)
}

/// Per-pixel mean over the scans that have data there; 0 where none do.
pub fn average_ground_truth(scans: &[DepthFrame]) -> Result<DepthFrame> {
    let first = scans.first().ok_or(Error::Empty("scan list"))?;
    for s in scans {
        first.same_dims(s)?;
    }
    let data = (0..first.data.len())
        .map(|i| {
            let (sum, n) = scans
                .iter()
                .map(|s| s.data[i])
                .filter(|&d| d != 0.0)
                .fold((0.0, 0u32), |(s, n), d| (s + d, n + 1));
            if n == 0 {
                0.0
            } else {
                sum / n as f64
            }
        })
        .collect();
    let t0 = scans.iter().map(|s| s.window.0).min().unwrap_or(0);
    let t1 = scans.iter().map(|s| s.window.1).max().unwrap_or(0);
    Ok(DepthFrame {
        width: first.width,
        height: first.height,
        data,
        window: (t0, t1),
    })
}

mod inf_as_string {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(x) if x.is_infinite() => s.serialize_str(if *x > 0.0 { "inf" } else { "-inf" }),
            Some(x) => s.serialize_f64(*x),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        match Option::<Repr>::deserialize(d)? {
            None => Ok(None),
            Some(Repr::Num(x)) => Ok(Some(x)),
            Some(Repr::Text(t)) => t.parse().map(Some).map_err(serde::de::Error::custom),
        }
    }
}

/// Metrics of one frame window. PSNR of `+inf` is written as `"inf"` in JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub index: usize,
    pub window: (u64, u64),
    /// `None` when the ground truth has no depth (color-only runs).
    pub fill_rate: Option<f64>,
    /// Depth RMSE, mm; `None` when no pixel overlaps the ground truth.
    pub rmse: Option<f64>,
    /// Color RMSE, 8-bit levels.
    pub color_rmse: Option<f64>,
    #[serde(with = "inf_as_string")]
    pub psnr: Option<f64>,
    /// Pixels entering the depth RMSE.
    pub pixel_count_evaluated: usize,
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".into(), |x| format!("{x:.4}"))
}

impl MetricsReport {
    /// Compares a depth frame (and optionally a color frame) against ground
    /// truth.
    pub fn evaluate(
        index: usize,
        depth: &DepthFrame,
        gt_depth: &DepthFrame,
        color: Option<(&ColorFrame, &ColorFrame)>,
    ) -> Result<Self> {
        let fill_rate = match fill_rate(depth, gt_depth) {
            Ok(v) => Some(v),
            Err(Error::Empty(_)) => None,
            Err(e) => return Err(e),
        };
        let mask = intersection_mask(depth, gt_depth)?;
        let pixel_count_evaluated = mask.iter().filter(|&&m| m).count();
        let rmse = (pixel_count_evaluated > 0)
            .then(|| rmse_masked(depth, gt_depth, &mask))
            .transpose()?;
        let color_rmse = match color {
            Some((c, g)) => match color_rmse(c, g) {
                Ok(v) => Some(v),
                Err(Error::Empty(_)) => None,
                Err(e) => return Err(e),
            },
            None => None,
        };
        Ok(Self {
            index,
            window: depth.window,
            fill_rate,
            rmse,
            color_rmse,
            psnr: color_rmse.map(psnr_from_rmse),
            pixel_count_evaluated,
        })
    }

    /// `key: value` lines.
    pub fn to_text(&self) -> String {
        format!(
            "index: {}\nwindow_us: {}..{}\nfill_rate: {}\nrmse: {}\ncolor_rmse: {}\npsnr: {}\npixel_count_evaluated: {}\n",
            self.index,
            self.window.0,
            self.window.1,
            fmt_opt(self.fill_rate),
            fmt_opt(self.rmse),
            fmt_opt(self.color_rmse),
            self.psnr.map_or_else(|| "n/a".into(), |p| if p.is_infinite() { "inf".into() } else { format!("{p:.4}") }),
            self.pixel_count_evaluated,
        )
    }
}

/// Mean of every defined field across frames.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsSummary {
    pub frames: usize,
    pub fill_rate: Option<f64>,
    pub rmse: Option<f64>,
    pub color_rmse: Option<f64>,
    #[serde(with = "inf_as_string")]
    pub psnr: Option<f64>,
}

impl MetricsSummary {
    pub fn from_reports(reports: &[MetricsReport]) -> Result<Self> {
        if reports.is_empty() {
            return Err(Error::Empty("metrics reports"));
        }
        let mean = |vals: Vec<f64>| {
            (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
        };
        Ok(Self {
            frames: reports.len(),
            fill_rate: mean(reports.iter().filter_map(|r| r.fill_rate).collect()),
            rmse: mean(reports.iter().filter_map(|r| r.rmse).collect()),
            color_rmse: mean(reports.iter().filter_map(|r| r.color_rmse).collect()),
            psnr: mean(reports.iter().filter_map(|r| r.psnr).collect()),
        })
    }

    pub fn to_text(&self) -> String {
        format!(
            "frames: {}\nfill_rate: {}\nrmse: {}\ncolor_rmse: {}\npsnr: {}\n",
            self.frames,
            fmt_opt(self.fill_rate),
            fmt_opt(self.rmse),
            fmt_opt(self.color_rmse),
            self.psnr.map_or_else(
                || "n/a".into(),
                |p| if p.is_infinite() {
                    "inf".into()
                } else {
                    format!("{p:.4}")
                }
            ),
        )
    }
}
