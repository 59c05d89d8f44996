use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("coordinate {index} = {value} lies outside [0, 1]")]
    Domain { index: usize, value: f64 },

    #[error("point has dimension {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("query budget of {budget} evaluations exhausted")]
    BudgetExhausted { budget: u64 },

    #[error("need at least {needed} interpolation nodes, got {got}")]
    InsufficientNodes { needed: usize, got: usize },

    #[error("interpolation nodes must be strictly increasing and inside [0, 1]")]
    UnsortedNodes,

    #[error("f(z*) = 0: recovery needs a point where the function does not vanish")]
    ZeroCenter,

    #[error("|f(z*)| = {value:e} is below the configured threshold {threshold:e}")]
    CenterTooSmall { value: f64, threshold: f64 },

    #[error("phase-2 budget {budget} too small: need at least {needed} for d = {d}")]
    RecoveryBudget { budget: u64, needed: u64, d: usize },

    #[error("instance too large for exact search ({cost:e} candidate steps > {limit:e})")]
    TooLarge { cost: f64, limit: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// True for errors that stem from a query budget or a theorem's
    /// precondition rather than from malformed input.
    pub fn is_budget_or_precondition(&self) -> bool {
        matches!(
            self,
            Error::BudgetExhausted { .. }
                | Error::RecoveryBudget { .. }
                | Error::Precondition(_)
                | Error::TooLarge { .. }
                | Error::ZeroCenter
                | Error::CenterTooSmall { .. }
        )
    }
}
