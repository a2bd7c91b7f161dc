//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration or arguments.
    #[error("{0}")]
    Validation(String),

    /// Malformed input file content, with a 1-based line number when known.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Training cannot proceed (empty set, degenerate targets, ...).
    #[error("training failed: {0}")]
    Training(String),

    /// Optimization produced a non-finite loss.
    #[error("non-finite loss: {0}")]
    NonFiniteLoss(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
