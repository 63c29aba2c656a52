//! Frameless structured-light RGB-D for event cameras.
//!
//! A DLP projector plays short binary pattern sequences (an ID pattern whose
//! exposure encodes the sequence mode, then line/dot depth patterns and/or
//! color patterns). Every camera event is stamped independently with a color
//! channel and, for depth patterns, a metric depth obtained by a direct
//! disparity lookup against the column currently being projected.
//!
//! Modules:
//!
//! - [`geometry`] – camera/projector models, stereo rectification lookup
//!   tables, disparity to depth and ray casting.
//! - [`patterns`] – line/dot pattern generation, the four sequence modes,
//!   coverage percentage and diamond-pixel DMD compensation.
//! - [`simulator`] – synthetic event streams from analytic scenes, plus the
//!   ray-cast ground-truth oracle.
//! - [`tagger`] – the trigger-driven state machine that stamps events.
//! - [`recon`] – depth/color/temporal frames and colored point clouds.
//! - [`metrics`] – fill rate, RMSE, PSNR and multi-scan ground truth.
//! - [`io`] – binary/CSV event files, PNG frames and PLY clouds.
//!
//! # Features
//!
//! - `parallel` *(default)* – data-parallel ray casting, rendering and
//!   window-partitioned tagging through `rayon`. Without it every
//!   [`Execution`] request runs sequentially; results are bit-identical
//!   either way.

// NaN-rejecting `!(x > 0.0)` checks are deliberate.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod exec;
pub mod geometry;
pub mod io;
pub mod metrics;
pub mod patterns;
pub mod recon;
pub mod simulator;
pub mod tagger;

pub use error::{Error, Result};
pub use exec::Execution;
