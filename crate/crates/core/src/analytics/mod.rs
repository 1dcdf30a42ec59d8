//! Closed-form approximations: mean-field trajectories, steady-state limits
//! of the weak policies, and per-step expected detections.

mod detection;
mod steady_state;
mod trajectory;

use serde::{Deserialize, Serialize};

pub use detection::{
    advantage, binomial_ratio, dorfman_advantage, expected_detections_dorfman,
    expected_detections_individual, state_conditional_p_prime, Advantage, DorfmanBranch,
    DorfmanExpectation,
};
pub use steady_state::{
    steady_state_weak_dorfman, steady_state_weak_individual, SteadyStateResult,
};
pub use trajectory::{
    expected_alpha_curve, p_infected_trajectory, p_susceptible_trajectory, ApproxCurve,
};

/// Probability that an infected individual is *not* identified in one
/// testing phase. Always within `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DetectionProbability(f64);

impl DetectionProbability {
    pub const CERTAIN_MISS: Self = Self(1.0);

    /// Clamps `value` into `[0, 1]`; NaN maps to 1.
    pub fn new(value: f64) -> Self {
        if value.is_nan() {
            return Self::CERTAIN_MISS;
        }
        Self(value.clamp(0.0, 1.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<f64> for DetectionProbability {
    fn from(value: f64) -> Self {
        Self::new(value)
    }
}
