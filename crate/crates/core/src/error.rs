use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = CboError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum CboError {
    /// Malformed arguments: wrong lengths, non-finite inputs, violated preconditions.
    #[error("invalid input: {0}")]
    Input(String),

    /// Request outside the regime where a formula is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// The dynamics produced or evaluated a non-finite value.
    #[error("non-finite value at iteration {iteration}: {what} (point = {point:?})")]
    NonFinite {
        iteration: usize,
        what: String,
        point: Vec<f64>,
    },

    /// One or more configuration problems, reported together.
    #[error("invalid configuration:\n  - {}", .0.join("\n  - "))]
    Config(Vec<String>),

    #[error("I/O error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization error at {path}: {message}")]
    Serde { path: PathBuf, message: String },
}

impl CboError {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        CboError::Input(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CboError::Io {
            path: path.into(),
            source,
        }
    }
}

pub(crate) fn check_dim(expected: usize, got: usize, what: &str) -> Result<()> {
    if expected != got {
        return Err(CboError::Input(format!(
            "{what}: dimension mismatch (expected {expected}, got {got})"
        )));
    }
    Ok(())
}
