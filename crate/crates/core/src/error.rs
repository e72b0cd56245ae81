use thiserror::Error;

/// Errors raised by the core operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation (unknown state,
    /// non-measurable set, mismatched universes, ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// A documented precondition does not hold (non-symmetric relation,
    /// invalid model, probabilistic model passed to a Dirac-only check, ...).
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// The request is well formed but outside what this toolkit decides.
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    #[error("{line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn precondition(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}
