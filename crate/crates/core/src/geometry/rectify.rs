use nalgebra::{Matrix3, Vector3};

use super::{CameraIntrinsics, Extrinsics, ProjectorModel};
use crate::{Error, Result};

/// Rectified camera–projector pair sharing one pinhole `(focal, principal)`.
///
/// Both devices are rotated into a common frame whose x axis is the
/// baseline direction, so corresponding points share a rectified row and
/// `disparity = x_projector - x_camera = focal · baseline / Z`.
#[derive(Clone, Debug)]
pub struct RectifiedRig {
    pub focal: f64,
    pub baseline: f64,
    pub principal: [f64; 2],
    pub camera_size: (usize, usize),
    pub projector_size: (usize, usize),
    /// Camera frame → rectified frame.
    pub camera_rotation: Matrix3<f64>,
    /// Projector frame → rectified frame.
    pub projector_rotation: Matrix3<f64>,
    /// Undistorted camera pixel → rectified pixel.
    pub camera_homography: Matrix3<f64>,
    /// Undistorted projector pixel → rectified pixel.
    pub projector_homography: Matrix3<f64>,
}

impl RectifiedRig {
    fn rectified_matrix(&self) -> Matrix3<f64> {
        Matrix3::new(
            self.focal,
            0.0,
            self.principal[0],
            0.0,
            self.focal,
            self.principal[1],
            0.0,
            0.0,
            1.0,
        )
    }

    /// Pixel of a rectified-frame direction; `None` if it points backwards.
    #[inline]
    fn rectified_pixel(&self, r: &Vector3<f64>) -> Option<[f64; 2]> {
        (r.z > 1e-12).then(|| {
            [
                self.focal * r.x / r.z + self.principal[0],
                self.focal * r.y / r.z + self.principal[1],
            ]
        })
    }

    /// Rectified image of a point in the camera frame (camera view).
    pub fn rectify_camera_point(&self, p: &Vector3<f64>) -> Option<[f64; 2]> {
        self.rectified_pixel(&(self.camera_rotation * p))
    }

    /// Rectified image of a point in the projector frame (projector view).
    pub fn rectify_projector_point(&self, p: &Vector3<f64>) -> Option<[f64; 2]> {
        self.rectified_pixel(&(self.projector_rotation * p))
    }

    /// Depth along the rectified optical axis of a camera-frame point.
    pub fn rectified_depth(&self, p: &Vector3<f64>) -> f64 {
        (self.camera_rotation * p).z
    }
}

/// Dense table of rectified coordinates sampled at integer positions.
#[derive(Clone, Debug, PartialEq)]
pub struct PixelMap {
    width: usize,
    height: usize,
    data: Vec<[f64; 2]>,
}

impl PixelMap {
    fn build<F>(width: usize, height: usize, f: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> Option<[f64; 2]>,
    {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                match f(x as f64, y as f64) {
                    Some(v) if v[0].is_finite() && v[1].is_finite() => data.push(v),
                    _ => {
                        return Err(Error::DegenerateExtrinsics(format!(
                            "pixel ({x}, {y}) does not map into the rectified frame"
                        )))
                    }
                }
            }
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// Number of samples along x.
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> [f64; 2] {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> Option<[f64; 2]> {
        (x < self.width && y < self.height).then(|| self.at(x, y))
    }

    /// Bilinear lookup; exact table value at integer coordinates.
    pub fn sample(&self, x: f64, y: f64) -> Result<[f64; 2]> {
        let max_x = (self.width - 1) as f64;
        let max_y = (self.height - 1) as f64;
        if !(x >= 0.0 && y >= 0.0 && x <= max_x && y <= max_y) {
            return Err(Error::OutOfBounds {
                x,
                y,
                width: self.width,
                height: self.height,
            });
        }
        let x0 = (x.floor() as usize).min(self.width.saturating_sub(2));
        let y0 = (y.floor() as usize).min(self.height.saturating_sub(2));
        let x1 = (x0 + 1).min(self.width - 1);
        let y1 = (y0 + 1).min(self.height - 1);
        let (fx, fy) = (x - x0 as f64, y - y0 as f64);
        let (a, b, c, d) = (
            self.at(x0, y0),
            self.at(x1, y0),
            self.at(x0, y1),
            self.at(x1, y1),
        );
        let lerp = |i: usize| {
            let top = a[i] + (b[i] - a[i]) * fx;
            let bottom = c[i] + (d[i] - c[i]) * fx;
            top + (bottom - top) * fy
        };
        Ok([lerp(0), lerp(1)])
    }
}

/// `LUT_c` and `LUT_p`: native pixel → rectified pixel for each device.
///
/// The camera table has one sample per pixel. The projector table covers the
/// closed range `[0, W] × [0, H]` so the line endpoint at row `H` is a plain
/// table read.
#[derive(Clone, Debug, PartialEq)]
pub struct RectificationLut {
    camera_map: PixelMap,
    projector_map: PixelMap,
}

impl RectificationLut {
    pub fn camera_map(&self) -> &PixelMap {
        &self.camera_map
    }

    pub fn projector_map(&self) -> &PixelMap {
        &self.projector_map
    }

    /// `LUT_c(x, y)` at an integer event pixel. Hot path.
    #[inline]
    pub fn camera(&self, x: u16, y: u16) -> Option<[f64; 2]> {
        self.camera_map.get(x as usize, y as usize)
    }

    /// `LUT_p(x, y)`, bilinear between samples.
    pub fn projector(&self, x: f64, y: f64) -> Result<[f64; 2]> {
        self.projector_map.sample(x, y)
    }
}

/// Builds the rectified rig and both lookup tables.
///
/// The rectified x axis is the projector→camera baseline direction; the
/// rectified optical axis is the mean of both device axes projected
/// perpendicular to it. The shared focal is the camera's mean focal and the
/// shared principal point is the camera's.
pub fn build_rectification(
    cam: &CameraIntrinsics,
    proj: &ProjectorModel,
    ext: &Extrinsics,
) -> Result<(RectifiedRig, RectificationLut)> {
    cam.validate()?;
    proj.validate()?;
    ext.validate()?;
    let t = ext.translation;
    if !(t.x.abs() > t.y.abs() && t.x.abs() > t.z.abs()) {
        return Err(Error::DegenerateExtrinsics(format!(
            "rig is not predominantly horizontal (translation {:?})",
            t.as_slice()
        )));
    }

    let r_t = ext.rotation.transpose();
    let e1 = (r_t * t).normalize();
    let mean_axis = Vector3::z() + r_t * Vector3::z();
    let e2 = mean_axis.cross(&e1);
    if e2.norm() < 1e-9 {
        return Err(Error::DegenerateExtrinsics(
            "baseline parallel to the optical axes".into(),
        ));
    }
    let e2 = e2.normalize();
    let e3 = e1.cross(&e2);
    let rect = Matrix3::from_rows(&[e1.transpose(), e2.transpose(), e3.transpose()]);

    let mut rig = RectifiedRig {
        focal: 0.5 * (cam.focal_x + cam.focal_y),
        baseline: t.norm(),
        principal: [cam.principal_x, cam.principal_y],
        camera_size: (cam.width, cam.height),
        projector_size: (proj.width(), proj.height()),
        camera_rotation: rect,
        projector_rotation: rect * r_t,
        camera_homography: Matrix3::identity(),
        projector_homography: Matrix3::identity(),
    };
    let k_rect = rig.rectified_matrix();
    let inverse = |k: Matrix3<f64>| {
        k.try_inverse()
            .ok_or_else(|| Error::param("intrinsics", "singular intrinsic matrix"))
    };
    rig.camera_homography = k_rect * rig.camera_rotation * inverse(cam.matrix())?;
    rig.projector_homography = k_rect * rig.projector_rotation * inverse(proj.intrinsics.matrix())?;

    let camera_map = PixelMap::build(cam.width, cam.height, |x, y| {
        let [xn, yn] = cam.normalize_pixel(x, y);
        rig.rectify_camera_point(&Vector3::new(xn, yn, 1.0))
    })?;
    let pk = &proj.intrinsics;
    let projector_map = PixelMap::build(pk.width + 1, pk.height + 1, |x, y| {
        let [xn, yn] = pk.normalize_pixel(x, y);
        rig.rectify_projector_point(&Vector3::new(xn, yn, 1.0))
    })?;

    Ok((
        rig,
        RectificationLut {
            camera_map,
            projector_map,
        },
    ))
}

/// `LUT_c` lookup for a (possibly sub-pixel) camera coordinate.
pub fn rectify_camera_pixel(lut: &RectificationLut, x: f64, y: f64) -> Result<[f64; 2]> {
    lut.camera_map.sample(x, y)
}

/// Applies a homography to a pixel.
pub fn apply_homography(h: &Matrix3<f64>, x: f64, y: f64) -> [f64; 2] {
    let v = h * Vector3::new(x, y, 1.0);
    [v.x / v.z, v.y / v.z]
}
