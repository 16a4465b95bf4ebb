use thiserror::Error;

/// Errors produced by the estimators, probability routines and simulation harness.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty sample")]
    EmptySample,

    #[error("serial numbers must be positive, got {0}")]
    NonPositiveSerial(u64),

    #[error("duplicate serial number {0}")]
    DuplicateSerial(u64),

    #[error("serial numbers must be strictly increasing")]
    NotSorted,

    #[error("{estimator} needs at least {needed} samples, got {got}")]
    InsufficientSample {
        estimator: &'static str,
        needed: usize,
        got: usize,
    },

    #[error("invalid range: {0}")]
    InvalidRange(String),

    #[error("too few samples: {samples} samples cannot be split into {factories} factories")]
    TooFewSamples { samples: usize, factories: usize },

    #[error("degenerate split: first sub-sample is a singleton with unknown minimum and no other sub-sample has two or more serials")]
    DegenerateSplit,

    #[error("serial {0} is not a valid serial of the layout")]
    InvalidSerial(u64),

    #[error("layout has {sizes} factories but {gaps} gaps (expected {expected})")]
    DimensionMismatch {
        sizes: usize,
        gaps: usize,
        expected: usize,
    },

    #[error("factory {index} has non-positive size")]
    NonPositiveSize { index: usize },

    #[error("first serial must be at least 1")]
    InvalidStart,

    #[error("cannot draw {requested} serials from a layout with only {available}")]
    Oversample { requested: u64, available: u64 },

    #[error("invalid regime points (k = {offending:?}): {reason}")]
    InvalidRegimePoints { offending: Vec<u64>, reason: String },

    #[error("enumeration needs {count} subsets, budget is {budget}")]
    BudgetExceeded { count: String, budget: u64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Budget and regime failures are distinguished from ordinary input validation
    /// so front ends can map them to a different exit status.
    pub fn is_budget_or_regime(&self) -> bool {
        matches!(
            self,
            Error::BudgetExceeded { .. } | Error::InvalidRegimePoints { .. }
        )
    }
}
