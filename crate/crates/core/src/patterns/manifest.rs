use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{
    sequence_duration, Channel, ColumnTable, CoverageReport, PatternSequence, Role, SequenceMode,
};
use crate::{Error, Result};

pub const MANIFEST_VERSION: u32 = 1;

/// JSON description of a pattern sequence as written by `patterns`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PatternManifest {
    pub version: u32,
    pub mode: SequenceMode,
    pub n: usize,
    /// Logical grid `[width, height]`.
    pub grid: [usize; 2],
    pub exposure_us: u32,
    pub blank_us: f64,
    pub id_exposure_us: u32,
    pub duration_us: f64,
    pub columns: Option<ColumnTable>,
    pub coverage: Option<CoverageReport>,
    pub entries: Vec<ManifestEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub index: usize,
    pub role: Role,
    pub exposure_us: u32,
    pub channel: Option<Channel>,
    pub column: Option<usize>,
    /// Bitmap file name relative to the manifest.
    pub bitmap: String,
}

impl PatternManifest {
    pub fn from_sequence(seq: &PatternSequence, coverage: Option<CoverageReport>) -> Self {
        let (w, h) = seq.grid();
        Self {
            version: MANIFEST_VERSION,
            mode: seq.mode,
            n: seq.n,
            grid: [w, h],
            exposure_us: seq.timing.exposure_us,
            blank_us: seq.timing.blank_us,
            id_exposure_us: seq.mode.id_exposure_us(),
            duration_us: sequence_duration(seq),
            columns: seq.columns.clone(),
            coverage,
            entries: seq
                .entries
                .iter()
                .enumerate()
                .map(|(index, e)| ManifestEntry {
                    index,
                    role: e.role,
                    exposure_us: e.exposure_us,
                    channel: e.channel,
                    column: e.column,
                    bitmap: Self::bitmap_name(index),
                })
                .collect(),
        }
    }

    pub fn bitmap_name(index: usize) -> String {
        format!("entry_{index:03}.png")
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let m: Self = serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.into(),
            reason: e.to_string(),
        })?;
        if m.version != MANIFEST_VERSION {
            return Err(Error::Format(format!(
                "manifest version {} (expected {MANIFEST_VERSION})",
                m.version
            )));
        }
        if m.entries.len() != m.mode.entry_count(m.n) {
            return Err(Error::Format(format!(
                "{} entries do not match {} with n = {}",
                m.entries.len(),
                m.mode,
                m.n
            )));
        }
        Ok(m)
    }
}
