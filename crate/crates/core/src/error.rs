use thiserror::Error;

/// Errors raised by the expansion pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("unsupported dimension {0}; supported dimensions are 1..=4")]
    UnsupportedDimension(usize),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid term {term}: {reason}")]
    Validation { term: String, reason: String },

    #[error("not in Bochner form: term {term} {reason}")]
    NotBochner { term: String, reason: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("insufficient jet: {context} needs total degree {needed}, jet has {available}")]
    InsufficientJet {
        needed: u32,
        available: u32,
        context: String,
    },

    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    #[error("resource limit exceeded: {0}")]
    Resource(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
