//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by solvers, planners, and instance I/O.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The lattice search exhausted its window without reaching the goal.
    #[error("search exhausted: {0}")]
    SearchExhausted(String),

    /// Exact tour mode refused an instance above its documented size limit.
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),

    /// An instance or result document failed to parse.
    #[error("parse error: {0}")]
    Parse(String),

    /// An instance document declared an unsupported schema version.
    #[error("unsupported schema version {found} (expected {expected})")]
    Version { found: u32, expected: u32 },

    /// Underlying I/O failure.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
