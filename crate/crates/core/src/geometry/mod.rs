//! Camera–projector stereo model: intrinsics, rectification tables,
//! disparity → depth and ray casting.

mod calibration;
mod camera;
mod ray;
mod rectify;

pub use calibration::CalibrationBundle;
pub use camera::{rotation_about_y, CameraIntrinsics, Extrinsics, ProjectorModel};
pub use ray::{cast_camera_ray, cast_projector_ray, Ray};
pub use rectify::{
    apply_homography, build_rectification, rectify_camera_pixel, PixelMap, RectificationLut,
    RectifiedRig,
};

use crate::{Error, Result};

/// Row-alignment tolerance (px) between rectified camera and projector
/// images of the same scene point.
pub const EPSILON_RECT: f64 = 0.5;

/// `Z = f · B / disparity`, millimeters.
#[inline]
pub fn depth_from_disparity(rig: &RectifiedRig, disparity: f64) -> Result<f64> {
    if disparity > 0.0 && disparity.is_finite() {
        Ok(rig.focal * rig.baseline / disparity)
    } else {
        Err(Error::InvalidDisparity(disparity))
    }
}
