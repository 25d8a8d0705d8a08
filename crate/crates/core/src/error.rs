//! Error taxonomy shared by the library and the CLI exit-code contract.

use thiserror::Error;

/// Library-wide error type.
///
/// The CLI maps variants onto its exit codes: `Parse`/`Usage`/`Domain` are
/// configuration problems (exit 2), `Numerical` is a solver failure (exit 3);
/// tolerance failures are not errors but report verdicts (exit 1).
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on physical or numerical inputs is violated.
    #[error("domain error: {0}")]
    Domain(String),

    /// The API was called in a way that can never be valid.
    #[error("usage error: {0}")]
    Usage(String),

    /// A grid cannot resolve the requested state.
    #[error("resolution error: {0}")]
    Resolution(String),

    /// An iterative solver failed to converge.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// Scenario text could not be parsed; `line` is 1-based.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }
}
