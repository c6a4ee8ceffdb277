use thiserror::Error;

/// Errors surfaced by precondition checks across the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a valid imaginary quadratic discriminant (need D < 0 and D = 0,1 mod 4)")]
    InvalidDiscriminant(i64),

    #[error("{0} is not a fundamental discriminant")]
    NotFundamental(i64),

    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("prime level {0} must exceed {1}")]
    LevelTooSmall(u64, u64),

    #[error("exhaustive enumeration is capped at N <= {cap}, got N = {n}")]
    EnumerationCap { n: u64, cap: u64 },

    #[error("operation requires a {expected} context, got {actual}")]
    WrongSplitType {
        expected: &'static str,
        actual: &'static str,
    },

    #[error("expected an integer, got {0}")]
    NonIntegral(String),

    #[error("arguments {0} and {1} are not coprime")]
    NotCoprime(u64, u64),

    #[error("{0}")]
    Domain(&'static str),
}
