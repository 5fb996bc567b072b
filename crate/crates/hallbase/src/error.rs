//! Error type shared across the crate.
//!
//! The variants mirror the CLI exit codes: usage problems exit 1, blown
//! enumeration budgets exit 2, and violated mathematical invariants exit 3.
//! Library callers match on the variant instead.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HallError {
    /// Malformed input: bad shorthand, bad dimension string, bad JSON.
    #[error("invalid input: {0}")]
    Usage(String),

    /// A finite-field enumeration would exceed the configured budget.
    #[error("enumeration budget exceeded: {0}")]
    Budget(String),

    /// A mathematical invariant failed.  This is always a bug (or a wrong
    /// hypothesis) and is never silently ignored.
    #[error("invariant violated: {0}")]
    Invariant(String),

    /// Malformed serialized data.
    #[error("bad JSON data: {0}")]
    Json(String),

    /// I/O while reading or writing cache files.
    #[error("cache i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl HallError {
    /// Process exit code for the CLI: usage 1, budget 2, invariant 3.
    pub fn exit_code(&self) -> i32 {
        match self {
            HallError::Usage(_) | HallError::Json(_) | HallError::Io(_) => 1,
            HallError::Budget(_) => 2,
            HallError::Invariant(_) => 3,
        }
    }
}

/// Shorthand for fallible crate functions.
pub type Result<T> = std::result::Result<T, HallError>;
