//! Projector pattern generation and sequencing.

mod bitmap;
mod coverage;
mod diamond;
mod generate;
mod manifest;
mod params;
mod sequence;

pub use bitmap::PatternImage;
pub use coverage::{coverage_percentage, CoverageReport};
pub use diamond::{diamond_compensate, diamond_displayable, diamond_render};
pub use generate::{
    generate_dot_pattern, generate_line_pattern, ColumnTable, DEFAULT_LINE_WIDTH, DEFAULT_SPAN,
};
pub use manifest::{ManifestEntry, PatternManifest};
pub use params::{DepthKind, SequenceParams};
pub use sequence::{
    blank_for_duration, build_sequence, sequence_duration, Channel, DepthSet, PatternSequence,
    Role, SequenceEntry, SequenceMode, Slot, Timing, DEFAULT_EXPOSURE_US,
};
