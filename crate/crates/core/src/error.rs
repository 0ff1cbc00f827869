use thiserror::Error;

/// Errors shared across the crate.
///
/// Arithmetic preconditions (mismatched fields, division by zero, inexact
/// division) are reported as errors rather than panics so the CLI can map
/// them to exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("extension degree must be at least 1")]
    ZeroDegree,

    #[error("operands belong to different fields")]
    FieldMismatch,

    #[error("operands have different variable lists")]
    VarMismatch,

    #[error("division by zero")]
    DivisionByZero,

    #[error("element is not invertible: {0}")]
    NotInvertible(String),

    #[error("valuation of the zero element is undefined")]
    ZeroValuation,

    #[error("{0} is not irreducible")]
    NotIrreducible(String),

    #[error("division left a nonzero remainder: {0}")]
    InexactDivision(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("serialization error: {0}")]
    Serialization(String),

    #[error("arithmetic overflow: {0}")]
    Overflow(String),
}

impl Error {
    /// Shorthand for a precondition failure with a formatted message.
    pub fn pre(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}
