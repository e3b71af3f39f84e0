use num_bigint::BigInt;
use thiserror::Error;

/// Errors shared across the solver modules.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A denominator vanished at an integer index inside a product interval.
    #[error("denominator vanishes at index {index} inside the product interval")]
    SingularPoint { index: BigInt },

    /// A denominator residue vanished mod p; the caller should resample the prime.
    #[error("denominator vanishes mod {p} inside the product interval")]
    SingularModP { p: u64 },

    /// The leading coefficient has an integer root in the unrolling range.
    #[error("0 is not an ordinary point: leading coefficient vanishes at {index}")]
    NonOrdinary { index: BigInt },

    /// An expansion or evaluation would materialize more than the configured
    /// number of coefficients.
    #[error("degree bound {requested} exceeds the expansion limit {limit}")]
    DegreeLimitExceeded { requested: BigInt, limit: u64 },

    /// Zero input where a nonzero polynomial is required.
    #[error("zero polynomial not allowed: {context}")]
    ZeroInput { context: &'static str },

    /// Structurally invalid input (bad order, empty coefficient list, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Probabilistic path kept hitting unlucky primes or specializations.
    #[error("random choices kept degenerating after {attempts} attempts: {context}")]
    UnluckyRandomness { attempts: u32, context: &'static str },

    /// Zeilberger ran out of candidate telescoper orders.
    #[error("no telescoper found up to order {max_order}")]
    MaxOrderExhausted { max_order: u32 },
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
