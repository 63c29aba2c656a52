//! Trigger-driven event tagging.
//!
//! The projector's trigger pairs drive a small state machine: an ID
//! exposure selects the sequence mode and every following pair advances to
//! the next entry. Each ON event is then stamped from its own pixel and the
//! active entry alone: a color channel, and for depth entries the disparity
//! to the active projector column's rectified line and the resulting depth.

mod state;
mod stream;

pub use state::{
    init_tagger, ActiveRole, Cursor, Desync, LineEndpoints, Rejection, TaggedEvent, TaggerConfig,
    TaggerState,
};
pub use stream::{process_stream, process_stream_with, tag_outcomes_with, TagStats};
