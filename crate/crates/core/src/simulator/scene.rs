use std::path::Path;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::geometry::Ray;
use crate::{Error, Result};

pub type Albedo = [f64; 3];

/// Grid of uniform color patches on a plane (a color-checker stand-in).
///
/// Plane-local axes: `u` follows the camera x axis and `v` the camera y
/// axis, both projected onto the plane. Patch `(col, row)` covers
/// `origin + [col, row] * pitch + [0, patch_size)`; outside the patches the
/// plane shows its base albedo.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatchGrid {
    pub origin: [f64; 2],
    pub pitch: [f64; 2],
    pub patch_size: [f64; 2],
    pub cols: usize,
    pub rows: usize,
    /// Row-major, `cols * rows` entries.
    pub colors: Vec<Albedo>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Primitive {
    /// Infinite plane through `point`.
    Plane {
        point: [f64; 3],
        normal: [f64; 3],
        albedo: Albedo,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        patches: Option<PatchGrid>,
    },
    Sphere {
        center: [f64; 3],
        radius: f64,
        albedo: Albedo,
    },
    /// Axis-aligned box. `face_albedo` order: -x, +x, -y, +y, -z, +z.
    Box {
        min: [f64; 3],
        max: [f64; 3],
        albedo: Albedo,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        face_albedo: Option<[Albedo; 6]>,
    },
}

/// Far fronto-parallel plane behind everything else.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Background {
    pub depth: f64,
    pub albedo: Albedo,
}

/// Analytic scene in the camera frame, millimeters.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneModel {
    pub primitives: Vec<Primitive>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub background: Option<Background>,
}

/// Identifies the smooth surface a hit lies on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SurfaceId {
    pub primitive: u32,
    pub face: u8,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hit {
    pub t: f64,
    pub point: Vector3<f64>,
    pub albedo: Albedo,
    pub surface: SurfaceId,
}

const MIN_T: f64 = 1e-9;

fn v3(a: [f64; 3]) -> Vector3<f64> {
    Vector3::from(a)
}

fn valid_albedo(a: &Albedo) -> bool {
    a.iter().all(|c| (0.0..=1.0).contains(c))
}

impl Primitive {
    pub fn fronto_plane(depth: f64, albedo: Albedo) -> Self {
        Primitive::Plane {
            point: [0.0, 0.0, depth],
            normal: [0.0, 0.0, -1.0],
            albedo,
            patches: None,
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |reason: &str| Err(Error::param("scene", reason.to_string()));
        match self {
            Primitive::Plane {
                normal,
                albedo,
                patches,
                ..
            } => {
                if v3(*normal).norm() == 0.0 {
                    return bad("plane normal is zero");
                }
                if !valid_albedo(albedo) {
                    return bad("albedo outside [0, 1]");
                }
                if let Some(g) = patches {
                    if g.colors.len() != g.cols * g.rows {
                        return bad("patch color count != cols * rows");
                    }
                    if !g.colors.iter().all(valid_albedo) {
                        return bad("patch albedo outside [0, 1]");
                    }
                }
            }
            Primitive::Sphere {
                center,
                radius,
                albedo,
            } => {
                if !(*radius > 0.0) {
                    return bad("sphere radius must be > 0");
                }
                if center[2] - radius <= 0.0 {
                    return bad("sphere is not in front of the camera");
                }
                if !valid_albedo(albedo) {
                    return bad("albedo outside [0, 1]");
                }
            }
            Primitive::Box {
                min,
                max,
                albedo,
                face_albedo,
            } => {
                if (0..3).any(|i| !(min[i] < max[i])) {
                    return bad("box min must be < max");
                }
                if min[2] <= 0.0 {
                    return bad("box is not in front of the camera");
                }
                if !valid_albedo(albedo) || !face_albedo.iter().flatten().all(valid_albedo) {
                    return bad("albedo outside [0, 1]");
                }
            }
        }
        Ok(())
    }

    /// Nearest hit with `t > MIN_T`: `(t, face, albedo)`.
    fn intersect(&self, ray: &Ray) -> Option<(f64, u8, Albedo)> {
        match self {
            Primitive::Plane {
                point,
                normal,
                albedo,
                patches,
            } => {
                let n = v3(*normal);
                let denom = n.dot(&ray.direction);
                if denom.abs() < 1e-15 {
                    return None;
                }
                let t = n.dot(&(v3(*point) - ray.origin)) / denom;
                if t <= MIN_T {
                    return None;
                }
                let albedo = match patches {
                    Some(grid) => patch_albedo(grid, point, &n, &ray.at(t)).unwrap_or(*albedo),
                    None => *albedo,
                };
                Some((t, 0, albedo))
            }
            Primitive::Sphere {
                center,
                radius,
                albedo,
            } => {
                let oc = ray.origin - v3(*center);
                let b = oc.dot(&ray.direction);
                let c = oc.norm_squared() - radius * radius;
                let disc = b * b - c;
                if disc < 0.0 {
                    return None;
                }
                let s = disc.sqrt();
                let t = if -b - s > MIN_T { -b - s } else { -b + s };
                (t > MIN_T).then_some((t, 0, *albedo))
            }
            Primitive::Box {
                min,
                max,
                albedo,
                face_albedo,
            } => {
                let (mut t0, mut t1) = (f64::NEG_INFINITY, f64::INFINITY);
                let (mut face0, mut face1) = (0u8, 0u8);
                for axis in 0..3 {
                    let o = ray.origin[axis];
                    let d = ray.direction[axis];
                    if d.abs() < 1e-15 {
                        if o < min[axis] || o > max[axis] {
                            return None;
                        }
                        continue;
                    }
                    let (mut a, mut b) = ((min[axis] - o) / d, (max[axis] - o) / d);
                    let (mut fa, mut fb) = (2 * axis as u8, 2 * axis as u8 + 1);
                    if a > b {
                        std::mem::swap(&mut a, &mut b);
                        std::mem::swap(&mut fa, &mut fb);
                    }
                    if a > t0 {
                        t0 = a;
                        face0 = fa;
                    }
                    if b < t1 {
                        t1 = b;
                        face1 = fb;
                    }
                }
                if t0 > t1 {
                    return None;
                }
                let (t, face) = if t0 > MIN_T { (t0, face0) } else { (t1, face1) };
                if t <= MIN_T {
                    return None;
                }
                let albedo = face_albedo.map_or(*albedo, |f| f[face as usize]);
                Some((t, face, albedo))
            }
        }
    }
}

fn plane_axes(n: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let n = n.normalize();
    let reject = |v: Vector3<f64>, onto: &[Vector3<f64>]| {
        onto.iter().fold(v, |acc, o| acc - o * o.dot(&acc))
    };
    let mut u = reject(Vector3::x(), &[n]);
    if u.norm() < 1e-9 {
        u = reject(Vector3::z(), &[n]);
    }
    let u = u.normalize();
    let mut v = reject(Vector3::y(), &[n, u]);
    if v.norm() < 1e-9 {
        v = n.cross(&u);
    }
    (u, v.normalize())
}

fn patch_albedo(
    grid: &PatchGrid,
    point: &[f64; 3],
    n: &Vector3<f64>,
    hit: &Vector3<f64>,
) -> Option<Albedo> {
    let (u, v) = plane_axes(n);
    let rel = hit - v3(*point);
    let a = rel.dot(&u) - grid.origin[0];
    let b = rel.dot(&v) - grid.origin[1];
    if a < 0.0 || b < 0.0 {
        return None;
    }
    let (col, row) = ((a / grid.pitch[0]).floor(), (b / grid.pitch[1]).floor());
    let (col, row) = (col as usize, row as usize);
    if col >= grid.cols || row >= grid.rows {
        return None;
    }
    let inside_x = a - col as f64 * grid.pitch[0] < grid.patch_size[0];
    let inside_y = b - row as f64 * grid.pitch[1] < grid.patch_size[1];
    (inside_x && inside_y).then(|| grid.colors[row * grid.cols + col])
}

impl SceneModel {
    pub fn new(primitives: Vec<Primitive>) -> Self {
        Self {
            primitives,
            background: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.primitives.is_empty() {
            return Err(Error::param("scene", "at least one primitive is required"));
        }
        for p in &self.primitives {
            p.validate()?;
        }
        if let Some(bg) = &self.background {
            if !(bg.depth > 0.0) || !valid_albedo(&bg.albedo) {
                return Err(Error::param("scene", "invalid background"));
            }
        }
        Ok(())
    }

    /// First surface along `ray`.
    pub fn intersect(&self, ray: &Ray) -> Option<Hit> {
        let mut best: Option<(f64, SurfaceId, Albedo)> = None;
        for (i, p) in self.primitives.iter().enumerate() {
            if let Some((t, face, albedo)) = p.intersect(ray) {
                if best.is_none_or(|b| t < b.0) {
                    best = Some((
                        t,
                        SurfaceId {
                            primitive: i as u32,
                            face,
                        },
                        albedo,
                    ));
                }
            }
        }
        if let Some(bg) = &self.background {
            let plane = Primitive::fronto_plane(bg.depth, bg.albedo);
            if let Some((t, _, albedo)) = plane.intersect(ray) {
                if best.is_none_or(|b| t < b.0) {
                    let id = SurfaceId {
                        primitive: u32::MAX,
                        face: 0,
                    };
                    best = Some((t, id, albedo));
                }
            }
        }
        best.map(|(t, surface, albedo)| Hit {
            t,
            point: ray.at(t),
            albedo,
            surface,
        })
    }

    pub fn from_toml_str(text: &str) -> std::result::Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("scene serializes")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let scene = Self::from_toml_str(&text).map_err(|reason| Error::Parse {
            path: path.into(),
            reason,
        })?;
        scene.validate()?;
        Ok(scene)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_toml_string()).map_err(|e| Error::io(path, e))
    }
}

/// Ready-made scenes used by examples and tests.
pub mod presets {
    use super::*;

    /// White fronto-parallel plane at `depth`.
    pub fn plane(depth: f64) -> SceneModel {
        SceneModel::new(vec![Primitive::fronto_plane(depth, [1.0; 3])])
    }

    /// Sphere of `radius` centered on the optical axis at `distance`, in
    /// front of a far wall.
    pub fn sphere(distance: f64, radius: f64) -> SceneModel {
        SceneModel {
            primitives: vec![Primitive::Sphere {
                center: [0.0, 0.0, distance],
                radius,
                albedo: [1.0; 3],
            }],
            background: Some(Background {
                depth: distance + 2.0 * radius,
                albedo: [1.0; 3],
            }),
        }
    }

    /// Two boxes side by side whose front faces sit at `near` (left) and
    /// `far` (right).
    pub fn staircase(near: f64, far: f64) -> SceneModel {
        SceneModel::new(vec![
            Primitive::Box {
                min: [-1500.0, -1200.0, near],
                max: [0.0, 1200.0, near + 300.0],
                albedo: [1.0; 3],
                face_albedo: None,
            },
            Primitive::Box {
                min: [0.0, -1200.0, far],
                max: [1500.0, 1200.0, far + 300.0],
                albedo: [1.0; 3],
                face_albedo: None,
            },
        ])
    }

    /// Fronto-parallel plane at `depth` split at x = 0 into two colors.
    pub fn split_plane(depth: f64, left: Albedo, right: Albedo) -> SceneModel {
        SceneModel::new(vec![Primitive::Plane {
            point: [0.0, 0.0, depth],
            normal: [0.0, 0.0, -1.0],
            albedo: right,
            patches: Some(PatchGrid {
                origin: [-10_000.0, -10_000.0],
                pitch: [10_000.0, 20_000.0],
                patch_size: [10_000.0, 20_000.0],
                cols: 1,
                rows: 1,
                colors: vec![left],
            }),
        }])
    }

    /// 6×4 color-checker plane at `depth`. Channel values are multiples of
    /// 1/4, so a transfer function with four events at full albedo
    /// reproduces them exactly.
    pub fn checker24(depth: f64) -> SceneModel {
        let levels = [0.0, 0.25, 0.5, 0.75, 1.0];
        let colors: Vec<Albedo> = (0..24)
            .map(|i| {
                [
                    levels[(i * 3 + 1) % 5],
                    levels[(i * 7 + 2) % 5],
                    levels[(i / 5 + i * 2 + 3) % 5],
                ]
            })
            .collect();
        let pitch = [200.0, 200.0];
        SceneModel::new(vec![Primitive::Plane {
            point: [0.0, 0.0, depth],
            normal: [0.0, 0.0, -1.0],
            albedo: [0.0; 3],
            patches: Some(PatchGrid {
                origin: [-600.0, -400.0],
                pitch,
                patch_size: [180.0, 180.0],
                cols: 6,
                rows: 4,
                colors,
            }),
        }])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ray(dir: [f64; 3]) -> Ray {
        Ray::new(Vector3::zeros(), v3(dir))
    }

    #[test]
    fn plane_sphere_box_hits() {
        let plane = presets::plane(1500.0);
        let hit = plane.intersect(&ray([0.1, -0.2, 1.0])).unwrap();
        assert!((hit.point.z - 1500.0).abs() < 1e-9);

        let sphere = presets::sphere(1500.0, 300.0);
        let hit = sphere.intersect(&ray([0.0, 0.0, 1.0])).unwrap();
        assert!((hit.point.z - 1200.0).abs() < 1e-9);
        assert_eq!(hit.surface.primitive, 0);

        let stairs = presets::staircase(1200.0, 1600.0);
        let left = stairs.intersect(&ray([-0.2, 0.0, 1.0])).unwrap();
        let right = stairs.intersect(&ray([0.2, 0.0, 1.0])).unwrap();
        assert!((left.point.z - 1200.0).abs() < 1e-9);
        assert!((right.point.z - 1600.0).abs() < 1e-9);
        assert_eq!(left.surface.face, 4, "front (-z) face");
    }

    #[test]
    fn patches_color_the_plane() {
        let scene = presets::split_plane(1000.0, [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]);
        assert_eq!(
            scene.intersect(&ray([-0.1, 0.0, 1.0])).unwrap().albedo,
            [1.0, 0.0, 0.0]
        );
        assert_eq!(
            scene.intersect(&ray([0.1, 0.0, 1.0])).unwrap().albedo,
            [0.0, 0.0, 1.0]
        );
    }

    #[test]
    fn validation() {
        assert!(SceneModel::default().validate().is_err());
        let mut s = presets::plane(1000.0);
        s.validate().unwrap();
        s.primitives.push(Primitive::Sphere {
            center: [0.0, 0.0, 100.0],
            radius: 200.0,
            albedo: [0.5; 3],
        });
        assert!(s.validate().is_err());
        let s = SceneModel::new(vec![Primitive::fronto_plane(1000.0, [1.2, 0.0, 0.0])]);
        assert!(s.validate().is_err());
    }

    #[test]
    fn toml_round_trip() {
        for s in [
            presets::checker24(1500.0),
            presets::sphere(1500.0, 300.0),
            presets::staircase(1200.0, 1600.0),
        ] {
            assert_eq!(SceneModel::from_toml_str(&s.to_toml_string()).unwrap(), s);
        }
    }
}
