//! Error types shared across the simulator.

use thiserror::Error;

/// Errors produced by geometry, channel, sweep, and ray-trace operations.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum SimError {
    /// An argument violated a precondition (empty list, bad dimensions, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Two poses coincide, so no link direction exists.
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    /// A value fell outside the mathematical domain of an operation.
    #[error("out of domain: {0}")]
    OutOfDomain(String),

    /// A scenario document could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),

    /// A parsed document violated a scenario invariant.
    #[error("validation error: field `{field}`: {message}")]
    Validation { field: String, message: String },

    /// File or stream I/O failed.
    #[error("io error: {0}")]
    Io(String),
}

impl SimError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        SimError::InvalidArgument(msg.into())
    }

    pub(crate) fn degenerate(msg: impl Into<String>) -> Self {
        SimError::DegenerateGeometry(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        SimError::OutOfDomain(msg.into())
    }

    pub(crate) fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        SimError::Validation {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for SimError {
    fn from(e: std::io::Error) -> Self {
        SimError::Io(e.to_string())
    }
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, SimError>;
