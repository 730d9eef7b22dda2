use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("literal index {index} out of range 1..={max}")]
    LiteralIndex { index: usize, max: usize },

    #[error("example index {index} out of range for pool of {len}")]
    ExampleIndex { index: usize, len: usize },

    #[error("dimension mismatch: expected {expected} features, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("{path}: line {line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}: line {line}: expected {expected} fields, found {actual}")]
    Schema {
        path: PathBuf,
        line: usize,
        expected: usize,
        actual: usize,
    },

    #[error("{0}: dataset contains no examples")]
    EmptyPool(PathBuf),

    #[error("input error: {0}")]
    Input(String),

    #[error("model format error: {0}")]
    Format(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
