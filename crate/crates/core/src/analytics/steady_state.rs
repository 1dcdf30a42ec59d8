use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::{pow_one_minus, ModelParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteadyStateResult {
    /// `(1 - T_eff/n)(1 + n q (1 - p))`.
    pub growth_factor: f64,
    /// `growth_factor < 1`.
    pub convergent: bool,
    /// Limiting expected number of susceptibles; 0 when not convergent.
    pub limit_alpha: f64,
}

/// Steady state of the mean-field curve for a constant per-step detection
/// probability `effective_tests / n`.
fn steady_state(params: &ModelParams, effective_tests: usize) -> Result<SteadyStateResult> {
    params.validate()?;
    if effective_tests > params.n {
        return Err(Error::BudgetExceedsPopulation {
            tests: effective_tests,
            n: params.n,
        });
    }
    let n = params.n as f64;
    let growth_factor = (1.0 - effective_tests as f64 / n) * params.spread_factor();
    let convergent = growth_factor < 1.0;
    let limit_alpha = if convergent {
        let exponent = n * params.p / (1.0 - growth_factor);
        (n * (1.0 - params.p) * pow_one_minus(params.q, exponent)).clamp(0.0, n)
    } else {
        0.0
    };
    Ok(SteadyStateResult {
        growth_factor,
        convergent,
        limit_alpha,
    })
}

/// Limit of the expected susceptibles under weak individual testing, a
/// lower bound for plain individual testing.
pub fn steady_state_weak_individual(params: &ModelParams) -> Result<SteadyStateResult> {
    steady_state(params, params.tests)
}

/// Limit of the expected susceptibles under weak Dorfman testing, a lower
/// bound for Dorfman testing.
pub fn steady_state_weak_dorfman(params: &ModelParams) -> Result<SteadyStateResult> {
    let half = params.half_tests()?;
    steady_state(params, half)
}
