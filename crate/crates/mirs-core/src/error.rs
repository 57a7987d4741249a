//! Error taxonomy shared by every exact-arithmetic module.
//!
//! Three failure classes are kept apart because callers react differently to
//! each: bad input data, a parameter choice that makes an exact comparison
//! ambiguous, and an internal law that should never break.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or out-of-contract input (bad slot, missing moment, ...).
    #[error("validation: {0}")]
    Validation(String),

    /// Two structurally distinct linear forms evaluate to the same rational,
    /// or a discounted value lands on an integer: the chosen rational
    /// parameters fail the genericity the calculus relies on.
    #[error("non-generic parameters: {0}")]
    NonGenericParameters(String),

    /// A structural law the engine itself guarantees was violated; this is a
    /// bug or a corrupted invariant, never a user error.
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub fn non_generic(msg: impl Into<String>) -> Self {
        Error::NonGenericParameters(msg.into())
    }

    pub fn inconsistency(msg: impl Into<String>) -> Self {
        Error::InternalInconsistency(msg.into())
    }
}
