use super::scene::SceneModel;
use crate::geometry::{cast_camera_ray, CameraIntrinsics};
use crate::recon::{ColorFrame, DepthFrame};
use crate::Execution;

/// Camera-frame depth (Z, mm) of the first surface behind every pixel
/// center; 0 where the ray escapes.
pub fn ground_truth_depth(scene: &SceneModel, cam: &CameraIntrinsics) -> DepthFrame {
    ground_truth_depth_with(scene, cam, Execution::default())
}

pub fn ground_truth_depth_with(
    scene: &SceneModel,
    cam: &CameraIntrinsics,
    exec: Execution,
) -> DepthFrame {
    let rows = exec.map_range(cam.height, |y| {
        (0..cam.width)
            .map(|x| {
                cast_camera_ray(cam, x as f64, y as f64)
                    .ok()
                    .and_then(|ray| scene.intersect(&ray))
                    .map_or(0.0, |h| h.point.z)
            })
            .collect::<Vec<_>>()
    });
    DepthFrame {
        width: cam.width,
        height: cam.height,
        data: rows.concat(),
        window: (0, 0),
    }
}

/// 8-bit albedo of the first surface behind every pixel center.
pub fn ground_truth_color(scene: &SceneModel, cam: &CameraIntrinsics) -> ColorFrame {
    let mut frame = ColorFrame::empty(cam.width, cam.height);
    for y in 0..cam.height {
        for x in 0..cam.width {
            let hit = cast_camera_ray(cam, x as f64, y as f64)
                .ok()
                .and_then(|ray| scene.intersect(&ray));
            if let Some(h) = hit {
                frame.set(x, y, quantize(h.albedo));
            }
        }
    }
    frame
}

/// Albedo in `[0, 1]` to 8-bit, round half away from zero.
pub fn quantize(albedo: [f64; 3]) -> [u8; 3] {
    albedo.map(|c| (c.clamp(0.0, 1.0) * 255.0).round() as u8)
}
