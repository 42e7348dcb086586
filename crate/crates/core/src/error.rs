use thiserror::Error;

/// Errors raised by fermikit operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A pattern, operator or label does not live on the expected mode set.
    #[error("domain error: {0}")]
    Domain(String),
    /// Parts are empty, overlapping, or do not cover the mode set.
    #[error("partition error: {0}")]
    Partition(String),
    /// Matrix dimensions disagree with the mode sets involved.
    #[error("shape error: {0}")]
    Shape(String),
    /// A parity sector does not match its partition.
    #[error("sector error: {0}")]
    Sector(String),
    /// Operand violates a documented precondition (e.g. not Hermitian).
    #[error("input error: {0}")]
    Input(String),
    /// A matrix claimed to be a density matrix fails the state invariants.
    #[error("state error: {0}")]
    State(String),
    /// Size cap exceeded.
    #[error("size cap exceeded: {0}")]
    Cap(String),
    /// Textual syntax could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
    /// An internal cross-check disagreed beyond tolerance.
    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    /// True for numeric-invariant failures, as opposed to malformed input.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::State(_) | Error::Invariant(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
