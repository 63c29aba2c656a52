use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("rotation is not orthonormal (max |RᵀR - I| = {0:e})")]
    NonOrthonormalRotation(f64),

    #[error("degenerate extrinsics: {0}")]
    DegenerateExtrinsics(String),

    #[error("pixel ({x}, {y}) outside {width}x{height} grid")]
    OutOfBounds {
        x: f64,
        y: f64,
        width: usize,
        height: usize,
    },

    #[error("invalid disparity {0} px (must be > 0)")]
    InvalidDisparity(f64),

    #[error("pattern: {0}")]
    Pattern(String),

    #[error("stream is not time-ordered at index {index} (t = {t} after {prev})")]
    UnorderedStream { index: usize, t: u64, prev: u64 },

    #[error("malformed trigger sequence at index {index}: {reason}")]
    MalformedTriggers { index: usize, reason: String },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("format: {0}")]
    Format(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    IoBare(#[from] std::io::Error),

    #[error("parse {path}: {reason}")]
    Parse { path: PathBuf, reason: String },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
