use thiserror::Error;

/// Errors produced by parsing, estimation, and rendering routines.
#[derive(Debug, Error)]
pub enum Error {
    /// Input text could not be parsed; `line` is 1-based.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Arguments violate a precondition of the called routine.
    #[error("invalid input: {0}")]
    Input(String),

    /// A numerical routine failed (singularity, divergence, non-finite value).
    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }
}
