use std::fmt;

use serde::{Deserialize, Serialize};

use super::{ColumnTable, PatternImage};
use crate::{Error, Result};

/// Exposure of every depth and color pattern on the reference projector.
pub const DEFAULT_EXPOSURE_US: u32 = 235;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Channel {
    #[serde(rename = "R")]
    Red,
    #[serde(rename = "G")]
    Green,
    #[serde(rename = "B")]
    Blue,
}

impl Channel {
    pub const ALL: [Channel; 3] = [Channel::Red, Channel::Green, Channel::Blue];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Wire code: 0 = none, 1..=3 = R, G, B.
    pub fn code(channel: Option<Channel>) -> u8 {
        channel.map_or(0, |c| c as u8 + 1)
    }

    pub fn from_code(code: u8) -> Option<Option<Channel>> {
        match code {
            0 => Some(None),
            1 => Some(Some(Channel::Red)),
            2 => Some(Some(Channel::Green)),
            3 => Some(Some(Channel::Blue)),
            _ => None,
        }
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Channel::Red => "R",
            Channel::Green => "G",
            Channel::Blue => "B",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Role {
    Id,
    Depth,
    Color,
}

/// The four projection sequences. The ID pattern that opens each sequence
/// is blank; its exposure tells the receiver which mode follows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum SequenceMode {
    /// `[ID, R, G, B]`
    ColorOnly = 1,
    /// `[ID, D1..Dn]`
    DepthOnly = 2,
    /// `[ID, D1..Dn, R, G, B]`
    DepthThenColor = 3,
    /// `[ID, (D1..Dn) × {R, G, B}]`
    DepthAndColor = 4,
}

impl TryFrom<u8> for SequenceMode {
    type Error = String;

    fn try_from(v: u8) -> std::result::Result<Self, String> {
        Ok(match v {
            1 => SequenceMode::ColorOnly,
            2 => SequenceMode::DepthOnly,
            3 => SequenceMode::DepthThenColor,
            4 => SequenceMode::DepthAndColor,
            _ => return Err(format!("sequence mode must be 1..=4, got {v}")),
        })
    }
}

impl From<SequenceMode> for u8 {
    fn from(m: SequenceMode) -> u8 {
        m as u8
    }
}

/// One position of a mode's layout.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Slot {
    pub role: Role,
    /// 0-based index into the [`ColumnTable`] for depth slots.
    pub column: Option<usize>,
    pub channel: Option<Channel>,
}

impl SequenceMode {
    pub const ALL: [SequenceMode; 4] = [
        SequenceMode::ColorOnly,
        SequenceMode::DepthOnly,
        SequenceMode::DepthThenColor,
        SequenceMode::DepthAndColor,
    ];

    pub fn number(self) -> u8 {
        self as u8
    }

    /// ID pattern exposure: 250, 260, 270, 280 µs for modes 1–4.
    pub fn id_exposure_us(self) -> u32 {
        240 + 10 * self as u32
    }

    /// Mode whose ID exposure is within `tolerance` of `exposure`.
    pub fn from_id_exposure(exposure: u64, tolerance: u64) -> Option<SequenceMode> {
        SequenceMode::ALL
            .into_iter()
            .find(|m| exposure.abs_diff(m.id_exposure_us() as u64) <= tolerance)
    }

    pub fn uses_depth(self) -> bool {
        self != SequenceMode::ColorOnly
    }

    /// Entries per sequence including the ID.
    pub fn entry_count(self, n: usize) -> usize {
        match self {
            SequenceMode::ColorOnly => 4,
            SequenceMode::DepthOnly => 1 + n,
            SequenceMode::DepthThenColor => 4 + n,
            SequenceMode::DepthAndColor => 1 + 3 * n,
        }
    }

    /// Slot `k` of the layout for `n` depth patterns (slot 0 is the ID).
    #[inline]
    pub fn slot(self, n: usize, k: usize) -> Option<Slot> {
        if k >= self.entry_count(n) {
            return None;
        }
        if k == 0 {
            return Some(Slot {
                role: Role::Id,
                column: None,
                channel: None,
            });
        }
        let color = |c: usize| Slot {
            role: Role::Color,
            column: None,
            channel: Some(Channel::ALL[c]),
        };
        let depth = |m: usize, channel| Slot {
            role: Role::Depth,
            column: Some(m),
            channel,
        };
        Some(match self {
            SequenceMode::ColorOnly => color(k - 1),
            SequenceMode::DepthOnly => depth(k - 1, None),
            SequenceMode::DepthThenColor if k <= n => depth(k - 1, None),
            SequenceMode::DepthThenColor => color(k - 1 - n),
            SequenceMode::DepthAndColor => {
                let (block, m) = ((k - 1) / n, (k - 1) % n);
                depth(m, Some(Channel::ALL[block]))
            }
        })
    }

    pub fn layout(self, n: usize) -> impl Iterator<Item = Slot> {
        (0..self.entry_count(n)).map(move |k| self.slot(n, k).expect("k in range"))
    }
}

impl fmt::Display for SequenceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "mode {}", self.number())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SequenceEntry {
    pub role: Role,
    pub exposure_us: u32,
    pub channel: Option<Channel>,
    pub column: Option<usize>,
    /// Index into [`PatternSequence::patterns`].
    pub pattern: usize,
}

/// Exposure and padding of a sequence.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Timing {
    pub exposure_us: u32,
    /// Dark padding after every entry, µs. May be fractional; schedules
    /// are rounded to whole microseconds.
    pub blank_us: f64,
}

impl Default for Timing {
    fn default() -> Self {
        Self {
            exposure_us: DEFAULT_EXPOSURE_US,
            blank_us: 0.0,
        }
    }
}

/// Depth patterns and the columns they carry.
#[derive(Clone, Debug)]
pub struct DepthSet {
    pub patterns: Vec<PatternImage>,
    pub columns: ColumnTable,
}

#[derive(Clone, Debug)]
pub struct PatternSequence {
    pub mode: SequenceMode,
    pub entries: Vec<SequenceEntry>,
    /// Depth patterns per channel (0 for mode 1).
    pub n: usize,
    pub timing: Timing,
    /// Empty for mode 1.
    pub columns: Option<ColumnTable>,
    /// `patterns[0]` is the blank ID pattern.
    pub patterns: Vec<PatternImage>,
}

/// Assembles the entry list for `mode`.
///
/// Mode 1 needs `color`; modes 2–4 need `depth`; mode 3 needs both.
/// Mode 4 reuses the depth patterns for every channel block.
pub fn build_sequence(
    mode: SequenceMode,
    depth: Option<DepthSet>,
    color: Option<PatternImage>,
    timing: Timing,
) -> Result<PatternSequence> {
    if !(timing.blank_us >= 0.0 && timing.blank_us.is_finite()) {
        return Err(Error::param(
            "blank",
            "must be a finite, non-negative duration",
        ));
    }
    if timing.exposure_us == 0 {
        return Err(Error::param("exposure", "must be > 0"));
    }
    let depth = match (mode.uses_depth(), depth) {
        (true, Some(d)) if d.patterns.is_empty() => {
            return Err(Error::Pattern(format!("{mode} needs depth patterns")))
        }
        (true, Some(d)) if d.patterns.len() != d.columns.len() => {
            return Err(Error::Pattern(
                "depth pattern count differs from column table length".into(),
            ))
        }
        (true, None) => return Err(Error::Pattern(format!("{mode} needs depth patterns"))),
        (true, d) => d,
        (false, _) => None,
    };
    let needs_color = matches!(mode, SequenceMode::ColorOnly | SequenceMode::DepthThenColor);
    if needs_color && color.is_none() {
        return Err(Error::Pattern(format!("{mode} needs a color pattern")));
    }

    let n = depth.as_ref().map_or(0, |d| d.patterns.len());
    let (grid_w, grid_h) = depth
        .as_ref()
        .map(|d| (d.patterns[0].width(), d.patterns[0].height()))
        .or_else(|| color.as_ref().map(|c| (c.width(), c.height())))
        .expect("at least one pattern present");
    let same_grid = |p: &PatternImage| p.width() == grid_w && p.height() == grid_h;
    let all_same = depth
        .as_ref()
        .is_none_or(|d| d.patterns.iter().all(same_grid))
        && color.as_ref().is_none_or(same_grid);
    if !all_same {
        return Err(Error::Pattern("patterns differ in grid size".into()));
    }

    let mut patterns = vec![PatternImage::blank(grid_w, grid_h)];
    let depth_base = patterns.len();
    let columns = depth.map(|d| {
        patterns.extend(d.patterns);
        d.columns
    });
    let color_index = color.map(|c| {
        patterns.push(c);
        patterns.len() - 1
    });

    let entries = mode
        .layout(n)
        .map(|slot| SequenceEntry {
            role: slot.role,
            exposure_us: match slot.role {
                Role::Id => mode.id_exposure_us(),
                _ => timing.exposure_us,
            },
            channel: slot.channel,
            column: slot.column,
            pattern: match (slot.role, slot.column) {
                (Role::Id, _) => 0,
                (Role::Depth, Some(m)) => depth_base + m,
                _ => color_index.expect("color slot has a color pattern"),
            },
        })
        .collect();

    Ok(PatternSequence {
        mode,
        entries,
        n,
        timing,
        columns,
        patterns,
    })
}

impl PatternSequence {
    pub fn grid(&self) -> (usize, usize) {
        (self.patterns[0].width(), self.patterns[0].height())
    }

    pub fn pattern(&self, entry: &SequenceEntry) -> &PatternImage {
        &self.patterns[entry.pattern]
    }

    /// Onset of each entry relative to the sequence start, µs (unrounded).
    pub fn onsets_us(&self) -> Vec<f64> {
        let mut t = 0.0;
        self.entries
            .iter()
            .map(|e| {
                let onset = t;
                t += e.exposure_us as f64 + self.timing.blank_us;
                onset
            })
            .collect()
    }
}

/// Sum of entry exposures plus one blank per entry, µs.
pub fn sequence_duration(seq: &PatternSequence) -> f64 {
    let exposures: u64 = seq.entries.iter().map(|e| e.exposure_us as u64).sum();
    exposures as f64 + seq.timing.blank_us * seq.entries.len() as f64
}

/// Blank that stretches `seq` to `target_us` in total.
pub fn blank_for_duration(seq: &PatternSequence, target_us: f64) -> f64 {
    let exposures: u64 = seq.entries.iter().map(|e| e.exposure_us as u64).sum();
    (target_us - exposures as f64) / seq.entries.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::patterns::generate_line_pattern;

    const GRID: (usize, usize) = (912, 1140);

    fn lines(n: usize) -> DepthSet {
        let (patterns, columns) = generate_line_pattern(GRID, n, 2, (56, 856)).unwrap();
        DepthSet { patterns, columns }
    }

    fn solid() -> PatternImage {
        PatternImage::solid(GRID.0, GRID.1)
    }

    #[test]
    fn mode_one_layout() {
        let seq = build_sequence(
            SequenceMode::ColorOnly,
            None,
            Some(solid()),
            Timing::default(),
        )
        .unwrap();
        let summary: Vec<_> = seq
            .entries
            .iter()
            .map(|e| (e.role, e.exposure_us, e.channel))
            .collect();
        assert_eq!(
            summary,
            vec![
                (Role::Id, 250, None),
                (Role::Color, 235, Some(Channel::Red)),
                (Role::Color, 235, Some(Channel::Green)),
                (Role::Color, 235, Some(Channel::Blue)),
            ]
        );
    }

    #[test]
    fn mode_four_cycles_channel_blocks() {
        let seq = build_sequence(
            SequenceMode::DepthAndColor,
            Some(lines(23)),
            None,
            Timing::default(),
        )
        .unwrap();
        assert_eq!(seq.entries.len(), 70);
        assert_eq!(seq.entries[0].exposure_us, 280);
        for (k, e) in seq.entries[1..].iter().enumerate() {
            assert_eq!(e.role, Role::Depth);
            assert_eq!(e.column, Some(k % 23));
            assert_eq!(e.channel, Some(Channel::ALL[k / 23]));
            assert_eq!(e.pattern, 1 + k % 23);
        }
    }

    #[test]
    fn mode_two_single_line_duration() {
        let seq = build_sequence(
            SequenceMode::DepthOnly,
            Some(lines(1)),
            None,
            Timing::default(),
        )
        .unwrap();
        assert_eq!(seq.entries.len(), 2);
        assert_eq!(sequence_duration(&seq), 495.0);
    }

    #[test]
    fn mode_three_requires_depth_and_color() {
        assert!(build_sequence(
            SequenceMode::DepthThenColor,
            None,
            Some(solid()),
            Timing::default()
        )
        .is_err());
        assert!(build_sequence(
            SequenceMode::DepthThenColor,
            Some(lines(3)),
            None,
            Timing::default()
        )
        .is_err());
        let empty = DepthSet {
            patterns: vec![],
            columns: lines(1).columns,
        };
        assert!(build_sequence(
            SequenceMode::DepthAndColor,
            Some(empty),
            None,
            Timing::default()
        )
        .is_err());
        let seq = build_sequence(
            SequenceMode::DepthThenColor,
            Some(lines(3)),
            Some(solid()),
            Timing::default(),
        )
        .unwrap();
        let roles: Vec<_> = seq.entries.iter().map(|e| (e.role, e.channel)).collect();
        assert_eq!(
            roles[4..],
            [
                (Role::Color, Some(Channel::Red)),
                (Role::Color, Some(Channel::Green)),
                (Role::Color, Some(Channel::Blue)),
            ]
        );
    }

    #[test]
    fn id_codes_resolve_within_tolerance() {
        assert_eq!(
            SequenceMode::from_id_exposure(270, 5),
            Some(SequenceMode::DepthThenColor)
        );
        assert_eq!(
            SequenceMode::from_id_exposure(268, 5),
            Some(SequenceMode::DepthThenColor)
        );
        assert_eq!(
            SequenceMode::from_id_exposure(255, 5),
            Some(SequenceMode::ColorOnly)
        );
        assert_eq!(SequenceMode::from_id_exposure(235, 5), None);
        assert_eq!(SequenceMode::from_id_exposure(400, 5), None);
    }

    #[test]
    fn blank_reaches_target_duration() {
        let mut seq = build_sequence(
            SequenceMode::DepthAndColor,
            Some(lines(23)),
            None,
            Timing::default(),
        )
        .unwrap();
        seq.timing.blank_us = blank_for_duration(&seq, 17_230.0);
        assert!((sequence_duration(&seq) - 17_230.0).abs() < 1e-9);
        let onsets = seq.onsets_us();
        assert_eq!(onsets[0], 0.0);
        assert!((onsets[1] - (280.0 + seq.timing.blank_us)).abs() < 1e-12);
    }
}
