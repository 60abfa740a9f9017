use thiserror::Error;

/// Partial bounds carried by a search that ran out of budget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialBounds {
    pub lower: String,
    pub upper: String,
    pub nodes: u64,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("search budget of {budget} nodes exceeded (best bounds: lower {}, upper {})", .bounds.lower, .bounds.upper)]
    BudgetExceeded { budget: u64, bounds: PartialBounds },

    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),

    #[error("rejection sampler gave up after {0} attempts")]
    RetryBudget(u64),

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
