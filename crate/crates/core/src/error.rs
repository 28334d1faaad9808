use std::path::PathBuf;

use thiserror::Error;

/// Errors raised across the descriptor pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid raster: {0}")]
    InvalidRaster(String),

    #[error("channel dimensions differ: {0}")]
    ChannelMismatch(String),

    #[error("image average {average:e} is too close to zero for a barycenter")]
    ZeroAverage { average: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("frequency ({x:.6}, {y:.6}) lies outside the representable band")]
    OutOfBand { x: f64, y: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("frequency window too small: the hexagonal grid is empty")]
    EmptyGrid,

    #[error("class {class} has {count} samples, at least {required} are required")]
    ClassTooSmall {
        class: usize,
        count: usize,
        required: usize,
    },

    #[error("empty input: {0}")]
    Empty(String),

    #[error("malformed {what}: {detail}")]
    Format { what: String, detail: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("image decoding failed for {path}: {detail}")]
    Decode { path: PathBuf, detail: String },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(what: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Format {
            what: what.into(),
            detail: detail.into(),
        }
    }
}
