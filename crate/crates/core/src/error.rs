use thiserror::Error;

/// Errors raised by the engine.
///
/// Validation problems (`DimensionMismatch`, `InvalidInput`, `Parse`) are
/// separated from violated modelling assumptions and from internal
/// consistency failures, so callers can map them onto distinct exit paths.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("assumption violated: {0}")]
    AssumptionViolated(String),

    #[error("set is empty: {0}")]
    EmptySet(String),

    #[error("not a cone: {0}")]
    NotACone(String),

    #[error("internal consistency failure: {0}")]
    Inconsistent(String),
}

impl Error {
    pub(crate) fn dims(context: &'static str, expected: usize, found: usize) -> Self {
        Error::DimensionMismatch {
            context,
            expected,
            found,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
