use serde::{Deserialize, Serialize};

use super::{
    blank_for_duration, build_sequence, generate_dot_pattern, generate_line_pattern, DepthSet,
    PatternImage, PatternSequence, SequenceMode, Timing, DEFAULT_EXPOSURE_US, DEFAULT_LINE_WIDTH,
    DEFAULT_SPAN,
};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DepthKind {
    #[default]
    Lines,
    Dots,
}

/// Everything needed to build a [`PatternSequence`] for a projector grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SequenceParams {
    pub mode: SequenceMode,
    /// Depth patterns per channel; ignored in mode 1.
    pub n: usize,
    pub kind: DepthKind,
    pub line_width: usize,
    pub dot_rows: usize,
    pub dot_size: usize,
    /// First and last column centers, logical projector pixels.
    pub span: (usize, usize),
    pub exposure_us: u32,
    pub blank_us: f64,
    /// When set, overrides `blank_us` with the blank that stretches one
    /// sequence to this total, µs.
    pub target_duration_us: Option<f64>,
}

impl Default for SequenceParams {
    fn default() -> Self {
        Self {
            mode: SequenceMode::DepthOnly,
            n: 23,
            kind: DepthKind::Lines,
            line_width: DEFAULT_LINE_WIDTH,
            dot_rows: 60,
            dot_size: 3,
            span: DEFAULT_SPAN,
            exposure_us: DEFAULT_EXPOSURE_US,
            blank_us: 0.0,
            target_duration_us: None,
        }
    }
}

impl SequenceParams {
    pub fn new(mode: SequenceMode, n: usize) -> Self {
        Self {
            mode,
            n,
            ..Self::default()
        }
    }

    pub fn build(&self, grid: (usize, usize)) -> Result<PatternSequence> {
        let depth = if self.mode.uses_depth() {
            if self.n == 0 {
                return Err(Error::param("n", "must be > 0"));
            }
            let (patterns, columns) = match self.kind {
                DepthKind::Lines => {
                    generate_line_pattern(grid, self.n, self.line_width, self.span)?
                }
                DepthKind::Dots => {
                    generate_dot_pattern(grid, self.n, self.dot_rows, self.dot_size, self.span)?
                }
            };
            Some(DepthSet { patterns, columns })
        } else {
            None
        };
        let color = matches!(
            self.mode,
            SequenceMode::ColorOnly | SequenceMode::DepthThenColor
        )
        .then(|| PatternImage::solid(grid.0, grid.1));
        let timing = Timing {
            exposure_us: self.exposure_us,
            blank_us: self.blank_us,
        };
        let seq = build_sequence(self.mode, depth, color, timing)?;
        match self.target_duration_us {
            None => Ok(seq),
            Some(target) => {
                let blank = blank_for_duration(&seq, target);
                if blank < 0.0 {
                    return Err(Error::param(
                        "target_duration_us",
                        format!("{target} µs is shorter than the unpadded sequence"),
                    ));
                }
                Ok(PatternSequence {
                    timing: Timing {
                        blank_us: blank,
                        ..seq.timing
                    },
                    ..seq
                })
            }
        }
    }
}
