//! Library-wide error type.

use thiserror::Error;

/// Errors surfaced by the library. CLI exit codes map from these variants.
#[derive(Debug, Error)]
pub enum NgError {
    /// Invalid configuration, architecture, or argument.
    #[error("config error: {0}")]
    Config(String),
    /// Operand shapes or variable counts disagree.
    #[error("shape mismatch: {0}")]
    Shape(String),
    /// The chosen prime divides a denominator; the caller should re-sample.
    #[error("prime {0} divides a denominator; re-sample")]
    BadPrime(u64),
    /// Rank trials disagreed beyond the retry cap.
    #[error("rank trials inconclusive: {0}")]
    Inconclusive(String),
    /// A stated theorem check failed on a concrete instance.
    #[error("theorem check mismatch: {0}")]
    TheoremMismatch(String),
    /// An expansion exceeds the configured monomial budget.
    #[error("degree budget exceeded: need {needed} monomial slots, budget {budget}")]
    Budget { needed: u128, budget: u128 },
    /// Internal invariant violated; indicates a bug.
    #[error("internal error: {0}")]
    Internal(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
