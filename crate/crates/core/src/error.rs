use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// The exact walk sampler ran out of its jump budget before the queue
    /// emptied. The partial time is *not* a sample of ζ(k).
    #[error("step budget exceeded after {steps_taken} jumps (partial time {partial_time})")]
    BudgetExceeded { steps_taken: u64, partial_time: f64 },

    /// An exact-mode step needed a Poisson mean beyond the exact-integer range.
    #[error("exact horizon exceeded at step {step}: Poisson mean {mean:e} above {limit:e}")]
    HorizonExceeded { step: u64, mean: f64, limit: f64 },

    #[error("query {query} outside simulated range [0, {limit}]")]
    OutOfRange { query: f64, limit: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
