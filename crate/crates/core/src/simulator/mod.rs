//! Synthetic event camera and the ray-cast ground-truth oracle.

mod oracle;
mod render;
mod scene;

pub use oracle::{ground_truth_color, ground_truth_depth, ground_truth_depth_with, quantize};
pub use render::{
    depth_support, event_count, lit_pixels, render_events, render_events_with, Edge, EventRecord,
    EventStream, LitPixel, NoiseConfig, Polarity, RenderOptions, TriggerRecord,
};
pub use scene::{presets, Albedo, Background, Hit, PatchGrid, Primitive, SceneModel, SurfaceId};
