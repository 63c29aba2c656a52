use serde::{Deserialize, Serialize};

use crate::geometry::{RectificationLut, RectifiedRig};
use crate::patterns::{Channel, ColumnTable, PatternSequence, Role, SequenceMode};
use crate::simulator::{EventRecord, Polarity};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TaggerConfig {
    /// Accepted deviation of a measured ID exposure, µs.
    pub tol_id_us: u64,
    /// Accepted deviation of a depth/color exposure, µs.
    pub tol_entry_us: u64,
    pub min_depth_mm: f64,
    pub max_depth_mm: f64,
    /// Subtracted from event timestamps before looking up the active entry,
    /// so sensor latency does not push late events into the next entry.
    pub latency_compensation_us: u64,
}

impl Default for TaggerConfig {
    fn default() -> Self {
        Self {
            tol_id_us: 5,
            tol_entry_us: 5,
            min_depth_mm: 200.0,
            max_depth_mm: 5000.0,
            latency_compensation_us: 150,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ActiveRole {
    Idle,
    Id,
    Depth,
    Color,
}

/// Position in the sequence. Constant between two triggers, so copies of it
/// are all a window of events needs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cursor {
    pub mode: Option<SequenceMode>,
    /// Slot index within the mode layout (0 = ID).
    pub slot: usize,
    /// 1-based depth pattern index; 0 outside depth entries.
    pub m: usize,
    pub role: ActiveRole,
    pub channel: Option<Channel>,
}

impl Cursor {
    pub const IDLE: Cursor = Cursor {
        mode: None,
        slot: 0,
        m: 0,
        role: ActiveRole::Idle,
        channel: None,
    };
}

/// Rectified line of one projector column, stored as `x = x_top + (y - y_top) · slope`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineEndpoints {
    /// `LUT_p(column, H)`.
    pub top: [f64; 2],
    /// `LUT_p(column, 0)`.
    pub bottom: [f64; 2],
    slope: f64,
}

impl LineEndpoints {
    fn new(top: [f64; 2], bottom: [f64; 2]) -> Result<Self> {
        let dy = bottom[1] - top[1];
        if dy.abs() < 1e-9 {
            return Err(Error::DegenerateExtrinsics(
                "projector column maps to a horizontal rectified line".into(),
            ));
        }
        let dx = bottom[0] - top[0];
        Ok(Self {
            top,
            bottom,
            slope: if dx == 0.0 { 0.0 } else { dx / dy },
        })
    }

    /// Rectified projector x where the line crosses row `y`.
    #[inline(always)]
    pub fn x_at(&self, y: f64) -> f64 {
        self.top[0] + (y - self.top[1]) * self.slope
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TaggedEvent {
    pub x: u16,
    pub y: u16,
    /// Event time minus the configured latency compensation, µs.
    pub t: u64,
    /// Millimeters; 0 when the event carries no depth.
    pub depth: f64,
    pub channel: Option<Channel>,
    pub disparity: f64,
    /// 1-based depth pattern index; 0 for color-only events.
    pub column: u16,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rejection {
    OffPolarity,
    Idle,
    IdPattern,
    OutOfBounds,
    InvalidDisparity,
    DepthOutOfRange,
}

/// A trigger pair that fits neither an ID nor the expected next entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Desync {
    pub exposure_us: u64,
}

/// The stream-side state machine.
///
/// Holds the immutable calibration data by reference and a [`Cursor`]
/// that [`on_trigger`](Self::on_trigger) advances.
#[derive(Clone, Debug)]
pub struct TaggerState<'a> {
    pub rig: &'a RectifiedRig,
    pub lut: &'a RectificationLut,
    pub columns: Option<ColumnTable>,
    pub line_endpoints: Vec<LineEndpoints>,
    pub exposure_us: u32,
    pub config: TaggerConfig,
    pub cursor: Cursor,
    focal_baseline: f64,
}

/// [`TaggerState::new`] with the columns and exposure of `seq`.
pub fn init_tagger<'a>(
    rig: &'a RectifiedRig,
    lut: &'a RectificationLut,
    seq: &PatternSequence,
) -> Result<TaggerState<'a>> {
    TaggerState::new(
        rig,
        lut,
        seq.columns.clone(),
        seq.timing.exposure_us,
        TaggerConfig::default(),
    )
}

impl<'a> TaggerState<'a> {
    pub fn new(
        rig: &'a RectifiedRig,
        lut: &'a RectificationLut,
        columns: Option<ColumnTable>,
        exposure_us: u32,
        config: TaggerConfig,
    ) -> Result<Self> {
        if !(config.min_depth_mm >= 0.0 && config.min_depth_mm < config.max_depth_mm) {
            return Err(Error::param(
                "depth gate",
                "need 0 <= min_depth < max_depth",
            ));
        }
        let h = rig.projector_size.1 as f64;
        let line_endpoints = columns
            .iter()
            .flat_map(|c| c.as_slice())
            .map(|&c| LineEndpoints::new(lut.projector(c, h)?, lut.projector(c, 0.0)?))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            rig,
            lut,
            columns,
            line_endpoints,
            exposure_us,
            config,
            cursor: Cursor::IDLE,
            focal_baseline: rig.focal * rig.baseline,
        })
    }

    pub fn n(&self) -> usize {
        self.line_endpoints.len()
    }

    /// Applies one rising/falling trigger pair.
    ///
    /// An ID exposure always (re)starts a sequence. Any other exposure must
    /// match the next slot of the current mode; otherwise the state drops to
    /// IDLE until the next ID.
    pub fn on_trigger(&mut self, rising_t: u64, falling_t: u64) -> std::result::Result<(), Desync> {
        match self.next_cursor(self.cursor, falling_t.saturating_sub(rising_t)) {
            Ok(c) => {
                self.cursor = c;
                Ok(())
            }
            Err(d) => {
                self.cursor = Cursor::IDLE;
                Err(d)
            }
        }
    }

    /// Pure form of [`on_trigger`](Self::on_trigger). On desync returns the
    /// error; the caller decides to go IDLE.
    pub fn next_cursor(&self, cur: Cursor, exposure: u64) -> std::result::Result<Cursor, Desync> {
        let desync = Err(Desync {
            exposure_us: exposure,
        });
        if let Some(mode) = SequenceMode::from_id_exposure(exposure, self.config.tol_id_us) {
            if mode.uses_depth() && self.n() == 0 {
                return desync;
            }
            return Ok(Cursor {
                mode: Some(mode),
                slot: 0,
                m: 0,
                role: ActiveRole::Id,
                channel: None,
            });
        }
        let Some(mode) = cur.mode.filter(|_| cur.role != ActiveRole::Idle) else {
            return desync;
        };
        if exposure.abs_diff(self.exposure_us as u64) > self.config.tol_entry_us {
            return desync;
        }
        let slot = cur.slot + 1;
        let Some(s) = mode.slot(self.n(), slot) else {
            return desync;
        };
        Ok(Cursor {
            mode: Some(mode),
            slot,
            m: s.column.map_or(0, |c| c + 1),
            role: match s.role {
                Role::Id => ActiveRole::Id,
                Role::Depth => ActiveRole::Depth,
                Role::Color => ActiveRole::Color,
            },
            channel: s.channel,
        })
    }

    /// Tags `e` under the current cursor.
    #[inline]
    pub fn tag_event(&self, e: &EventRecord) -> std::result::Result<TaggedEvent, Rejection> {
        self.tag_with(&self.cursor, e)
    }

    /// Tags `e` under `cur`. Depends on nothing but the event and `cur`.
    #[inline]
    pub fn tag_with(
        &self,
        cur: &Cursor,
        e: &EventRecord,
    ) -> std::result::Result<TaggedEvent, Rejection> {
        if e.polarity == Polarity::Off {
            return Err(Rejection::OffPolarity);
        }
        match cur.role {
            ActiveRole::Idle => return Err(Rejection::Idle),
            ActiveRole::Id => return Err(Rejection::IdPattern),
            _ => {}
        }
        let [x_e, y_e] = self.lut.camera(e.x, e.y).ok_or(Rejection::OutOfBounds)?;
        let mut out = TaggedEvent {
            x: e.x,
            y: e.y,
            t: e.t.saturating_sub(self.config.latency_compensation_us),
            depth: 0.0,
            channel: cur.channel,
            disparity: 0.0,
            column: 0,
        };
        if cur.role == ActiveRole::Depth {
            let line = &self.line_endpoints[cur.m - 1];
            let disparity = line.x_at(y_e) - x_e;
            if !(disparity > 0.0) {
                return Err(Rejection::InvalidDisparity);
            }
            let depth = self.focal_baseline / disparity;
            if depth < self.config.min_depth_mm || depth > self.config.max_depth_mm {
                return Err(Rejection::DepthOutOfRange);
            }
            out.depth = depth;
            out.disparity = disparity;
            out.column = cur.m as u16;
        }
        Ok(out)
    }
}
