use thiserror::Error;

use crate::sim::InfectionStatus;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("Dorfman testing needs an even test budget, got T = {0}")]
    OddTestBudget(usize),

    #[error("test budget {tests} exceeds the population size {n}")]
    BudgetExceedsPopulation { tests: usize, n: usize },

    #[error("test matrix shape mismatch: {0}")]
    Shape(String),

    #[error("cannot isolate individual {index}: status is {status:?}, expected Infected")]
    IsolateNonInfected {
        index: usize,
        status: InfectionStatus,
    },

    #[error("no non-isolated individuals to evaluate")]
    EmptyPopulation,

    #[error("configuration mismatch: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
