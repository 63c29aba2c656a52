use std::path::Path;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use super::{rotation_about_y, CameraIntrinsics, Extrinsics, ProjectorModel};
use crate::{Error, Result};

/// Everything the engine needs to know about the physical rig.
///
/// On disk this is a TOML document with `[camera]`, `[projector]`,
/// `[projector.intrinsics]` and `[extrinsics]` tables. Every field is
/// required; unknown fields are rejected.
#[derive(Clone, Debug, PartialEq)]
pub struct CalibrationBundle {
    pub camera: CameraIntrinsics,
    pub projector: ProjectorModel,
    pub extrinsics: Extrinsics,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExtrinsicsFile {
    /// Row-major camera → projector rotation.
    rotation: [f64; 9],
    /// Millimeters.
    translation: [f64; 3],
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CalibrationFile {
    camera: CameraIntrinsics,
    projector: ProjectorModel,
    extrinsics: ExtrinsicsFile,
}

impl CalibrationBundle {
    /// The rig used throughout the examples and tests: a 640×480 camera
    /// with mild barrel distortion and a 912×1140 projector 250 mm to its
    /// left, toed in so both optical axes meet at 1.5 m. The baseline is
    /// perpendicular to the camera's optical axis, so rectified depth
    /// equals camera-frame depth.
    pub fn reference() -> Self {
        let camera = CameraIntrinsics {
            radial_distortion: [-0.05, 0.01],
            ..CameraIntrinsics::default()
        };
        let projector = ProjectorModel::default();
        let toe_in = 250f64.atan2(1500.0);
        let extrinsics = Extrinsics::from_projector_pose(
            rotation_about_y(toe_in).transpose(),
            Vector3::new(-250.0, 0.0, 0.0),
        );
        Self {
            camera,
            projector,
            extrinsics,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.camera.validate()?;
        self.projector.validate()?;
        self.extrinsics.validate()
    }

    pub fn from_toml_str(text: &str) -> std::result::Result<Self, String> {
        let file: CalibrationFile = toml::from_str(text).map_err(|e| e.to_string())?;
        let r = file.extrinsics.rotation;
        Ok(Self {
            camera: file.camera,
            projector: file.projector,
            extrinsics: Extrinsics::new(
                Matrix3::from_row_slice(&r),
                Vector3::from(file.extrinsics.translation),
            ),
        })
    }

    pub fn to_toml_string(&self) -> String {
        let r = &self.extrinsics.rotation;
        let mut rotation = [0.0; 9];
        for i in 0..3 {
            for j in 0..3 {
                rotation[i * 3 + j] = r[(i, j)];
            }
        }
        let t = self.extrinsics.translation;
        let file = CalibrationFile {
            camera: self.camera.clone(),
            projector: self.projector.clone(),
            extrinsics: ExtrinsicsFile {
                rotation,
                translation: [t.x, t.y, t.z],
            },
        };
        toml::to_string(&file).expect("calibration serializes")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let bundle = Self::from_toml_str(&text).map_err(|reason| Error::Parse {
            path: path.into(),
            reason,
        })?;
        bundle.validate()?;
        Ok(bundle)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_toml_string()).map_err(|e| Error::io(path, e))
    }
}
