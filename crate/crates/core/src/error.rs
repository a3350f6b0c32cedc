//! Error type shared by every module in the crate.

use thiserror::Error;

/// Errors surfaced by circuit construction, simulation, scoring, and the
/// benchmark harness.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on an argument was violated.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The request exceeds a configured resource cap (e.g. the qubit cap).
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    /// An instance document is missing a required key or has a malformed field.
    #[error("schema error: missing or malformed key `{0}`")]
    Schema(String),

    /// The instance document names a benchmark family this harness does not run.
    #[error("unsupported family: {0}")]
    UnsupportedFamily(String),

    /// An input is technically well-formed but numerically degenerate
    /// (e.g. a zero reference VaR).
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// A backend failed to produce a histogram.
    #[error("backend failure: {0}")]
    Backend(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
