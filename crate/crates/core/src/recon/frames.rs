use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Per-pixel depth in millimeters; `0` means no data.
#[derive(Clone, Debug, PartialEq)]
pub struct DepthFrame {
    pub width: usize,
    pub height: usize,
    pub data: Vec<f64>,
    /// Half-open time window `[t0, t1)` in µs the frame was built from.
    pub window: (u64, u64),
}

impl DepthFrame {
    pub fn zeros(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            data: vec![0.0; width * height],
            window: (0, 0),
        }
    }

    pub fn from_data(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::DimensionMismatch(format!(
                "{} values for a {width}x{height} frame",
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            data,
            window: (0, 0),
        })
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: f64) {
        self.data[y * self.width + x] = v;
    }

    pub fn data_pixel_count(&self) -> usize {
        self.data.iter().filter(|&&d| d != 0.0).count()
    }

    pub fn same_dims(&self, other: &DepthFrame) -> Result<()> {
        if (self.width, self.height) == (other.width, other.height) {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.width, self.height, other.width, other.height
            )))
        }
    }

    /// Copy keeping only pixels where `mask` is set.
    pub fn masked(&self, mask: &[bool]) -> DepthFrame {
        let data = self
            .data
            .iter()
            .zip(mask)
            .map(|(&d, &m)| if m { d } else { 0.0 })
            .collect();
        DepthFrame {
            data,
            ..self.clone()
        }
    }
}

/// 8-bit RGB frame with a validity mask; invalid pixels are black.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColorFrame {
    pub width: usize,
    pub height: usize,
    pub data: Vec<[u8; 3]>,
    pub mask: Vec<bool>,
}

impl ColorFrame {
    pub fn empty(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            data: vec![[0; 3]; width * height],
            mask: vec![false; width * height],
        }
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> Option<[u8; 3]> {
        let i = y * self.width + x;
        self.mask[i].then(|| self.data[i])
    }

    pub fn set(&mut self, x: usize, y: usize, rgb: [u8; 3]) {
        let i = y * self.width + x;
        self.data[i] = rgb;
        self.mask[i] = true;
    }

    pub fn valid_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    /// Rebuilds a frame from pixels alone, treating black as invalid (the
    /// convention of exported PNGs).
    pub fn from_pixels(width: usize, height: usize, data: Vec<[u8; 3]>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::DimensionMismatch(format!(
                "{} pixels for a {width}x{height} frame",
                data.len()
            )));
        }
        let mask = data.iter().map(|p| *p != [0, 0, 0]).collect();
        Ok(Self {
            width,
            height,
            data,
            mask,
        })
    }
}

/// Per-pixel 1-based index of the column that lit the pixel; `0` = none.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TemporalMap {
    pub width: usize,
    pub height: usize,
    pub data: Vec<u16>,
}

/// A colored 3D point in the camera frame (mm).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ColoredPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub rgb: [u8; 3],
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct PointCloud {
    pub points: Vec<ColoredPoint>,
}

impl PointCloud {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}
