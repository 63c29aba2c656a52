use nalgebra::Vector3;

use super::{CameraIntrinsics, Extrinsics, ProjectorModel};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ray {
    pub origin: Vector3<f64>,
    /// Unit length.
    pub direction: Vector3<f64>,
}

impl Ray {
    pub fn new(origin: Vector3<f64>, direction: Vector3<f64>) -> Self {
        Self {
            origin,
            direction: direction.normalize(),
        }
    }

    #[inline]
    pub fn at(&self, t: f64) -> Vector3<f64> {
        self.origin + self.direction * t
    }
}

fn check_bounds(k: &CameraIntrinsics, x: f64, y: f64) -> Result<()> {
    if k.contains(x, y) {
        Ok(())
    } else {
        Err(Error::OutOfBounds {
            x,
            y,
            width: k.width,
            height: k.height,
        })
    }
}

/// Ray from the camera center through pixel `(x, y)`, camera frame.
pub fn cast_camera_ray(cam: &CameraIntrinsics, x: f64, y: f64) -> Result<Ray> {
    check_bounds(cam, x, y)?;
    let [xn, yn] = cam.normalize_pixel(x, y);
    Ok(Ray::new(Vector3::zeros(), Vector3::new(xn, yn, 1.0)))
}

/// Ray from the projector center through logical pixel `(x, y)`, expressed
/// in the camera frame.
pub fn cast_projector_ray(proj: &ProjectorModel, ext: &Extrinsics, x: f64, y: f64) -> Result<Ray> {
    check_bounds(&proj.intrinsics, x, y)?;
    let [xn, yn] = proj.intrinsics.normalize_pixel(x, y);
    let dir = ext.rotation.transpose() * Vector3::new(xn, yn, 1.0);
    Ok(Ray::new(ext.projector_center(), dir))
}
