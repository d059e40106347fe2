use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// An input violated a documented precondition or type invariant.
    #[error("validation error: {0}")]
    Validation(String),

    /// A numerical routine failed to converge or produced a non-finite value.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// The correlation matrix vanishes, so no optimal settings exist.
    #[error("degenerate state: {0}")]
    Degenerate(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn validation(msg: impl Into<String>) -> Error {
    Error::Validation(msg.into())
}
