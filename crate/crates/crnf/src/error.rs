use thiserror::Error;

/// Errors raised by the series engine and the pipelines built on it.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("space mismatch: {0}")]
    SpaceMismatch(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("series is not real")]
    NonReal,
    #[error("truncation budget exceeded: {0}")]
    Truncation(String),
    #[error("singular system: {0}")]
    Singular(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Singular(_) | Error::Truncation(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
