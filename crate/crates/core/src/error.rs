use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The truncated Fock space cannot hold the requested state faithfully.
    #[error("truncation: {detail} (n_max = {n_max}, required >= {required})")]
    Truncation {
        detail: String,
        n_max: usize,
        required: usize,
    },

    #[error("displacement order k = {order} exceeds the configured maximum {max}")]
    UnsupportedOrder { order: u32, max: u32 },

    #[error("post-selection outcome has probability {probability:e}; conditional state undefined")]
    DegenerateOutcome { probability: f64 },

    #[error("integration did not converge: step-halving difference {difference:e} > {tolerance:e}")]
    Convergence { difference: f64, tolerance: f64 },

    #[error("too many ions: N = {n} exceeds the limit {max}")]
    TooManyIons { n: usize, max: usize },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
