use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the estimation engine and its file formats.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid vote {value} at position {position}")]
    InvalidVote { position: usize, value: i64 },

    #[error("invalid label {0}, expected -1 or +1")]
    InvalidLabel(i64),

    #[error("dimension mismatch: expected {expected} labelers, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("window {0} is not tracked by this bank")]
    UnknownWindow(usize),

    #[error("no observations yet")]
    Empty,

    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("correlation matrix is not symmetric with unit diagonal at ({row}, {col})")]
    MalformedCorrelation { row: usize, col: usize },

    #[error("step {t} precedes the smallest window {r_min}")]
    TooEarly { t: u64, r_min: usize },

    #[error("reports carry no ground-truth labels")]
    MissingTruth,

    #[error("accuracy profile unknown at step {0}")]
    UnknownAccuracy(u64),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
