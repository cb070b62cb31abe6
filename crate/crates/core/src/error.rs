//! Error type shared by every module of the crate.

use thiserror::Error;

/// Everything that can go wrong while building rings, ideals, coverings or
/// expansions. Variants carry enough context to map onto CLI exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid discriminant {0}: must be negative and congruent to 0 or 1 mod 4")]
    InvalidDiscriminant(i64),

    #[error("mismatched radicand: {0} vs {1}")]
    RadicandMismatch(u64, u64),

    #[error("mismatched discriminant: {0} vs {1}")]
    RingMismatch(i64, i64),

    #[error("division by zero")]
    DivisionByZero,

    #[error("value is not an element of the quadratic field over the ring")]
    NotInField,

    #[error("zero module: no nonzero generators")]
    ZeroModule,

    #[error("ideal is not invertible in its order")]
    NonInvertibleIdeal,

    #[error("ideal is not integral")]
    NotIntegral,

    #[error("matrix column is zero")]
    ZeroColumn,

    #[error("denominator set is invalid: {0}")]
    InvalidSet(String),

    #[error("epsilon out of range: eps^2 = {0} must lie strictly inside (0, 1)")]
    EpsOutOfRange(String),

    #[error("search bound exceeded: no admissible set with mu^2 <= {bound}")]
    SearchBoundExceeded { bound: u64 },

    #[error("scripted coefficient at index {index} rejected: {reason}")]
    InvalidScript { index: usize, reason: String },

    #[error("floating-point precision exhausted at step {step}: {detail}")]
    PrecisionExhausted { step: usize, detail: String },

    #[error("vertex budget {budget} exceeded; partial graph retained")]
    BudgetExceeded { budget: usize },

    #[error("oracle bound {bound} too small: expansion contains |q|^2 = {needed}")]
    InsufficientOracleBound { bound: u64, needed: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("precondition violated: {0}")]
    Precondition(String),
}
