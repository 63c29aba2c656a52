//! Frames and point clouds accumulated from tagged events.
//!
//! Frames are built over fixed half-open time windows, so a frame can be
//! published before a pattern sequence completes.

mod accumulate;
mod cloud;
mod frames;

pub use accumulate::{
    accumulate_color, accumulate_depth, frame_windows, temporal_map, DepthPolicy,
};
pub use cloud::build_point_cloud;
pub use frames::{ColorFrame, ColoredPoint, DepthFrame, PointCloud, TemporalMap};

#[cfg(test)]
mod tests;
