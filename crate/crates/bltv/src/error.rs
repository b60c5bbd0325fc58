//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by the library.
///
/// The variants are grouped so that callers (notably the CLI) can map them
/// onto coarse failure classes: bad arguments, I/O and file-format problems,
/// and numerical failures inside the solver.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is out of its documented range (zero dimension, even
    /// kernel size, non-positive penalty, ...).
    #[error("invalid argument: {0}")]
    Argument(String),

    /// Two containers that must agree in shape do not.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    /// A file exists but its contents are not what the format requires.
    #[error("invalid file format: {0}")]
    Format(String),

    /// The solver produced a non-finite iterate or another numeric fault.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn argument(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn dimension(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }
}
