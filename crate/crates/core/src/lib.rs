//! Simulation and analysis of infection spread under a fixed per-step
//! testing budget.
//!
//! Individuals are susceptible, infected, or isolated. Each time step
//! spreads the infection from every non-isolated infected individual and
//! then spends `T` tests, individually or in Dorfman pools, to find and
//! isolate infections. [`harness`] runs Monte Carlo ensembles of such paths
//! and [`analytics`] evaluates the matching mean-field approximations.

pub mod analytics;
pub mod error;
pub mod harness;
pub mod policies;
pub mod rng;
pub mod sim;

pub use error::{Error, Result};
pub use harness::{
    compare_policies, run_ensemble, run_ensemble_with, run_path, EnsembleResult, Execution,
    PolicyComparison, SamplePath, SimConfig,
};
pub use policies::{policy_step, PolicyKind, StepReport};
pub use rng::RngStream;
pub use sim::{InfectionStatus, ModelParams, PhaseSnapshot, PopulationState};
