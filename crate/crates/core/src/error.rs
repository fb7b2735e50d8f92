use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("expected a positive integer, got 0")]
    Zero,

    #[error("input {value} exceeds the supported bound {max}")]
    InputTooLarge { value: u128, max: u128 },

    #[error("{what} overflows 128-bit arithmetic (needs about {required_bits} bits)")]
    Overflow { what: String, required_bits: u32 },

    #[error("memory budget exceeded: {requested} bytes requested, {allowed} allowed")]
    MemoryBudget { requested: u64, allowed: u64 },

    #[error("brute-force guard exceeded: {terms} terms requested, limit is {limit}")]
    GuardExceeded { terms: u128, limit: u128 },

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("zeta({0}) diverges; need z >= 2")]
    Divergent(u32),

    #[error("prime cutoff {cutoff} is below the largest prime factor {needed} of m")]
    PrimeCutoffTooSmall { cutoff: u64, needed: u64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Floating evaluation of an exact integer quantity drifted. Indicates a bug.
    #[error("rounding assertion failed: sum = {re} + {im}i is not within 1e-6 of an integer")]
    RoundingAssertion { re: f64, im: f64 },

    /// An identity that must hold by construction was violated. Indicates a bug.
    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("malformed sieve cache: {0}")]
    CacheFormat(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for failures that signal a defect in this library rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(
            self,
            Error::RoundingAssertion { .. } | Error::Consistency(_)
        )
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
