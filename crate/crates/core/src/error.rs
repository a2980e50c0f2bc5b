//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by signal kernels, the codec, and the replay buffer.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside its documented domain.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// An input sequence is too short for the requested operation.
    #[error("sequence too short: {0}")]
    Length(String),

    /// A byte stream does not parse as a valid container or raw segment.
    #[error("format error at byte {offset}: {reason}")]
    Format { offset: usize, reason: String },

    /// Data violates a structural invariant (non-finite sample, shape mismatch, ...).
    #[error("invalid data: {0}")]
    InvalidData(String),

    /// A prediction log is missing records required by a metric.
    #[error("incomplete prediction log: {0}")]
    IncompleteLog(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parameter(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn length(msg: impl Into<String>) -> Self {
        Error::Length(msg.into())
    }

    pub(crate) fn format(offset: usize, reason: impl Into<String>) -> Self {
        Error::Format {
            offset,
            reason: reason.into(),
        }
    }
}
