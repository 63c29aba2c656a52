use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

const UNDISTORT_ITERATIONS: usize = 50;

/// Pinhole intrinsics with a two-coefficient radial distortion model.
///
/// Pixel centers sit at integer coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CameraIntrinsics {
    pub focal_x: f64,
    pub focal_y: f64,
    pub principal_x: f64,
    pub principal_y: f64,
    /// `(k1, k2)` applied to normalized coordinates as `1 + k1 r² + k2 r⁴`.
    pub radial_distortion: [f64; 2],
    pub width: usize,
    pub height: usize,
}

impl Default for CameraIntrinsics {
    fn default() -> Self {
        Self {
            focal_x: 560.0,
            focal_y: 560.0,
            principal_x: 320.0,
            principal_y: 240.0,
            radial_distortion: [0.0, 0.0],
            width: 640,
            height: 480,
        }
    }
}

impl CameraIntrinsics {
    pub fn pinhole(focal: f64, principal: [f64; 2], width: usize, height: usize) -> Self {
        Self {
            focal_x: focal,
            focal_y: focal,
            principal_x: principal[0],
            principal_y: principal[1],
            radial_distortion: [0.0, 0.0],
            width,
            height,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.focal_x > 0.0 && self.focal_y > 0.0) {
            return Err(Error::param("focal", "focal lengths must be > 0"));
        }
        if self.width == 0 || self.height == 0 {
            return Err(Error::param("width/height", "image dimensions must be > 0"));
        }
        let inside = (0.0..=self.width as f64).contains(&self.principal_x)
            && (0.0..=self.height as f64).contains(&self.principal_y);
        if !inside {
            return Err(Error::param(
                "principal point",
                format!(
                    "({}, {}) outside {}x{}",
                    self.principal_x, self.principal_y, self.width, self.height
                ),
            ));
        }
        if self.radial_distortion.iter().any(|k| !k.is_finite()) {
            return Err(Error::param("radial_distortion", "non-finite coefficient"));
        }
        Ok(())
    }

    pub fn matrix(&self) -> Matrix3<f64> {
        Matrix3::new(
            self.focal_x,
            0.0,
            self.principal_x,
            0.0,
            self.focal_y,
            self.principal_y,
            0.0,
            0.0,
            1.0,
        )
    }

    pub fn has_distortion(&self) -> bool {
        self.radial_distortion != [0.0, 0.0]
    }

    #[inline]
    fn distortion_factor(&self, r2: f64) -> f64 {
        let [k1, k2] = self.radial_distortion;
        1.0 + k1 * r2 + k2 * r2 * r2
    }

    /// Sub-pixel coordinates inside the pixel-center grid `[0, w-1] × [0, h-1]`.
    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= 0.0 && y >= 0.0 && x <= (self.width - 1) as f64 && y <= (self.height - 1) as f64
    }

    /// Projects a point given in this device's frame. `None` behind the device.
    pub fn project(&self, p: &Vector3<f64>) -> Option<[f64; 2]> {
        if p.z <= 0.0 {
            return None;
        }
        let (xn, yn) = (p.x / p.z, p.y / p.z);
        let s = self.distortion_factor(xn * xn + yn * yn);
        Some([
            self.focal_x * xn * s + self.principal_x,
            self.focal_y * yn * s + self.principal_y,
        ])
    }

    /// Inverse of [`project`](Self::project): undistorted normalized
    /// coordinates `(x/z, y/z)` of the ray through pixel `(x, y)`.
    pub fn normalize_pixel(&self, x: f64, y: f64) -> [f64; 2] {
        let xd = (x - self.principal_x) / self.focal_x;
        let yd = (y - self.principal_y) / self.focal_y;
        if !self.has_distortion() {
            return [xd, yd];
        }
        let (mut xu, mut yu) = (xd, yd);
        for _ in 0..UNDISTORT_ITERATIONS {
            let s = self.distortion_factor(xu * xu + yu * yu);
            let (nx, ny) = (xd / s, yd / s);
            let delta = (nx - xu).abs() + (ny - yu).abs();
            xu = nx;
            yu = ny;
            if delta < 1e-15 {
                break;
            }
        }
        [xu, yu]
    }
}

/// DLP projector. Patterns are authored on the orthogonal logical grid
/// described by `intrinsics`; `native_*` is the DMD mirror array.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectorModel {
    pub native_width: usize,
    pub native_height: usize,
    pub diamond_layout: bool,
    pub intrinsics: CameraIntrinsics,
}

impl Default for ProjectorModel {
    fn default() -> Self {
        Self {
            native_width: 912,
            native_height: 1140,
            diamond_layout: true,
            intrinsics: CameraIntrinsics {
                focal_x: 900.0,
                focal_y: 1800.0,
                principal_x: 456.0,
                principal_y: 570.0,
                radial_distortion: [0.0, 0.0],
                width: 912,
                height: 1140,
            },
        }
    }
}

impl ProjectorModel {
    pub fn validate(&self) -> Result<()> {
        if self.native_width == 0 || self.native_height == 0 {
            return Err(Error::param("native dims", "must be > 0"));
        }
        self.intrinsics.validate()
    }

    /// Logical grid width (columns addressed by patterns).
    pub fn width(&self) -> usize {
        self.intrinsics.width
    }

    /// Logical grid height; `H` in the line-endpoint lookup.
    pub fn height(&self) -> usize {
        self.intrinsics.height
    }
}

/// Camera → projector rigid transform: `X_p = R · X_c + t` (millimeters).
#[derive(Clone, Debug, PartialEq)]
pub struct Extrinsics {
    pub rotation: Matrix3<f64>,
    pub translation: Vector3<f64>,
}

impl Extrinsics {
    pub fn new(rotation: Matrix3<f64>, translation: Vector3<f64>) -> Self {
        Self {
            rotation,
            translation,
        }
    }

    /// Projector placed at `center` (camera frame) with orientation `rotation`.
    pub fn from_projector_pose(rotation: Matrix3<f64>, center: Vector3<f64>) -> Self {
        Self {
            rotation,
            translation: -(rotation * center),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let err = (self.rotation.transpose() * self.rotation - Matrix3::identity())
            .abs()
            .max();
        if !(err <= 1e-9) {
            return Err(Error::NonOrthonormalRotation(err));
        }
        if self.rotation.determinant() < 0.0 {
            return Err(Error::NonOrthonormalRotation(f64::INFINITY));
        }
        let norm = self.translation.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::DegenerateExtrinsics(format!(
                "baseline norm {norm} mm"
            )));
        }
        Ok(())
    }

    /// Projector optical center in the camera frame.
    pub fn projector_center(&self) -> Vector3<f64> {
        -(self.rotation.transpose() * self.translation)
    }

    pub fn camera_to_projector(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * p + self.translation
    }
}

/// Rotation of `angle` radians about the camera's vertical (y) axis.
pub fn rotation_about_y(angle: f64) -> Matrix3<f64> {
    let (s, c) = angle.sin_cos();
    Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distortion_round_trip() {
        let cam = CameraIntrinsics {
            radial_distortion: [-0.08, 0.02],
            ..CameraIntrinsics::default()
        };
        for &(x, y) in &[(0.0, 0.0), (639.0, 479.0), (100.3, 400.7), (320.0, 10.0)] {
            let [xn, yn] = cam.normalize_pixel(x, y);
            let p = cam.project(&Vector3::new(xn * 2.0, yn * 2.0, 2.0)).unwrap();
            assert!((p[0] - x).abs() < 1e-9 && (p[1] - y).abs() < 1e-9, "{p:?}");
        }
    }

    #[test]
    fn rejects_bad_intrinsics() {
        let cam = CameraIntrinsics {
            focal_x: 0.0,
            ..CameraIntrinsics::default()
        };
        assert!(cam.validate().is_err());
        let cam = CameraIntrinsics {
            principal_x: 700.0,
            ..CameraIntrinsics::default()
        };
        assert!(cam.validate().is_err());
    }

    #[test]
    fn extrinsics_validation() {
        let ok = Extrinsics::new(rotation_about_y(0.1), Vector3::new(100.0, 0.0, 0.0));
        ok.validate().unwrap();
        let zero = Extrinsics::new(Matrix3::identity(), Vector3::zeros());
        assert!(matches!(
            zero.validate(),
            Err(Error::DegenerateExtrinsics(_))
        ));
        let mut skew = Matrix3::identity();
        skew[(0, 1)] = 1e-3;
        let bad = Extrinsics::new(skew, Vector3::new(100.0, 0.0, 0.0));
        assert!(matches!(
            bad.validate(),
            Err(Error::NonOrthonormalRotation(_))
        ));
    }

    #[test]
    fn projector_pose_round_trip() {
        let center = Vector3::new(-250.0, 3.0, 1.0);
        let ext = Extrinsics::from_projector_pose(rotation_about_y(0.2), center);
        assert!((ext.projector_center() - center).norm() < 1e-12);
        assert!(ext.camera_to_projector(&center).norm() < 1e-12);
    }
}
