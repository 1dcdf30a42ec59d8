use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Population size, initial infection probability, per-pair spread
/// probability and per-step test budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub n: usize,
    pub p: f64,
    pub q: f64,
    pub tests: usize,
}

impl ModelParams {
    pub fn new(n: usize, p: f64, q: f64, tests: usize) -> Result<Self> {
        let params = Self { n, p, q, tests };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::param(
                "n",
                "population must have at least one individual",
            ));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::param(
                "p",
                format!("{} is not a probability", self.p),
            ));
        }
        if !(0.0..=1.0).contains(&self.q) {
            return Err(Error::param(
                "q",
                format!("{} is not a probability", self.q),
            ));
        }
        if self.tests == 0 {
            return Err(Error::param(
                "tests",
                "at least one test per step is required",
            ));
        }
        Ok(())
    }

    /// Half the budget; errors when the budget is odd.
    pub fn half_tests(&self) -> Result<usize> {
        if !self.tests.is_multiple_of(2) {
            return Err(Error::OddTestBudget(self.tests));
        }
        Ok(self.tests / 2)
    }

    /// Mean-field growth factor `1 + n q (1 - p)` of the infected fraction.
    pub fn spread_factor(&self) -> f64 {
        1.0 + self.n as f64 * self.q * (1.0 - self.p)
    }
}
