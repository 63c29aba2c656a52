use nalgebra::Vector3;

use super::frames::{ColorFrame, ColoredPoint, DepthFrame, PointCloud};
use crate::geometry::{CameraIntrinsics, RectifiedRig};
use crate::{Error, Result};

/// Back-projects every nonzero depth pixel through the camera model.
///
/// Depth values are rectified depths, so each pixel's undistorted ray is
/// scaled until its rectified Z equals the stored depth. Pixels without a
/// valid color are white.
pub fn build_point_cloud(
    depth: &DepthFrame,
    color: &ColorFrame,
    rig: &RectifiedRig,
    cam: &CameraIntrinsics,
) -> Result<PointCloud> {
    if (depth.width, depth.height) != (color.width, color.height)
        || (depth.width, depth.height) != (cam.width, cam.height)
    {
        return Err(Error::DimensionMismatch(format!(
            "depth {}x{}, color {}x{}, camera {}x{}",
            depth.width, depth.height, color.width, color.height, cam.width, cam.height
        )));
    }
    let z_row = rig.camera_rotation.row(2).transpose();
    let mut points = Vec::new();
    for y in 0..depth.height {
        for x in 0..depth.width {
            let d = depth.get(x, y);
            if d <= 0.0 {
                continue;
            }
            let [xn, yn] = cam.normalize_pixel(x as f64, y as f64);
            let dir = Vector3::new(xn, yn, 1.0);
            let rz = z_row.dot(&dir);
            if rz <= 0.0 {
                continue;
            }
            let p = dir * (d / rz);
            points.push(ColoredPoint {
                x: p.x,
                y: p.y,
                z: p.z,
                rgb: color.get(x, y).unwrap_or([255; 3]),
            });
        }
    }
    Ok(PointCloud { points })
}
