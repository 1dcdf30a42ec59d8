//! Population state and the two per-step phases: infection spread and
//! pooled testing followed by isolation.

mod params;
mod pooling;
mod state;

pub use params::ModelParams;
pub use pooling::{run_tests, TestMatrix, TestResults};
pub use state::{Counts, InfectionStatus, PhaseSnapshot, PopulationState};

/// `(1 - q)^x` evaluated as `exp(x * ln(1 - q))`.
pub fn pow_one_minus(q: f64, x: f64) -> f64 {
    if x == 0.0 || q == 0.0 {
        return 1.0;
    }
    if q >= 1.0 {
        return 0.0;
    }
    (x * (-q).ln_1p()).exp()
}
