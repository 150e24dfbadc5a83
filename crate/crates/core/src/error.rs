use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Two observations share a value; the model assumes a continuous law.
    #[error("tie between observations at indices {first} and {second}")]
    Tie { first: usize, second: usize },

    /// A value that cannot be ordered (NaN).
    #[error("observation at index {index} is not comparable")]
    Incomparable { index: usize },

    #[error("domain error: {0}")]
    Domain(String),

    /// The request exceeds a configured size guard.
    #[error("capacity exceeded: {what} is {requested}, limit is {limit}")]
    Capacity {
        what: &'static str,
        requested: u128,
        limit: u128,
    },

    #[error("simulation stopped early: {completed} of {trials} trials completed")]
    PartialResult { completed: u64, trials: u64 },

    #[error("invariant violated (seed {seed}, trial {trial}, step {step}): {detail}")]
    InvariantViolation {
        seed: u64,
        trial: u64,
        step: usize,
        detail: String,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
