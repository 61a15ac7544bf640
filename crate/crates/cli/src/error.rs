//! Error-to-exit-code mapping.
//!
//! Problems with what the user handed us (unreadable files, malformed
//! records, invalid configuration) exit with 1. Violations the toolkit
//! detects in its own output — which indicate a bug, not bad input — exit
//! with 2.

use std::fmt;

use trackboost_core::formats::FormatError;

/// A command failure, classified by whose fault it is.
#[derive(Debug)]
pub enum CliError {
    /// Bad input: unreadable or malformed files, invalid flags or config.
    Input(anyhow::Error),
    /// A self-check on computed output failed.
    Internal(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Internal(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // `{:#}` renders the whole cause chain on one line.
        match self {
            CliError::Input(e) => write!(f, "{e:#}"),
            CliError::Internal(e) => write!(f, "internal error: {e:#}"),
        }
    }
}

/// Wraps an error as user-input failure (exit 1).
pub fn input(err: impl Into<anyhow::Error>) -> CliError {
    CliError::Input(err.into())
}

/// Wraps an error as an internal failure (exit 2).
pub fn internal(err: impl Into<anyhow::Error>) -> CliError {
    CliError::Internal(err.into())
}

/// Classifies an error from a format-layer *write* of computed results: an
/// invariant violation means our numbers are wrong (internal); anything
/// else is an environment problem such as an unwritable path (input).
pub fn from_write(err: FormatError) -> CliError {
    match err {
        FormatError::InvariantViolation(_) => internal(err),
        other => input(other),
    }
}
