use thiserror::Error;

/// Errors raised by the permutation-poset engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("not a bijection of [n]: {0}")]
    NotABijection(String),
    #[error("empty permutation")]
    Empty,
    #[error("cannot parse permutation `{0}`")]
    Parse(String),
    #[error("size {size} exceeds the configured cap of {cap}")]
    SizeCapExceeded { size: usize, cap: usize },
    #[error("permutation {0} does not have exactly one inverse descent")]
    NotSingleInverseDescent(String),
    #[error("invalid t/b word `{0}`")]
    InvalidWord(String),
    #[error("empty position set")]
    EmptySet,
    #[error("position {position} out of range 1..={size}")]
    OutOfRange { position: usize, size: usize },
    #[error("f(pi) must equal 1, got {0}")]
    FNotNormalized(String),
    #[error("inverse-descent counts differ: {sigma} vs {pi}")]
    IdesMismatch { sigma: usize, pi: usize },
    #[error("descent counts differ: {sigma} vs {pi}")]
    DesMismatch { sigma: usize, pi: usize },
    #[error("input {0} is excluded (must not be 1 or 12)")]
    ExcludedInput(String),
    #[error("{0} contains 321")]
    Contains321(String),
    #[error("{lam} is not in the half-open interval [21, {host})")]
    NotInInterval { lam: String, host: String },
    #[error("bad family parameter: {0}")]
    BadParam(String),
    #[error("cache was created for the {expected} strategy, used by {actual}")]
    CacheStrategyMismatch {
        expected: &'static str,
        actual: &'static str,
    },
    #[error("internal consistency error: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;
