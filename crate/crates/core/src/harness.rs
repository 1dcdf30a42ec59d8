//! Sample paths and Monte Carlo ensembles.
//!
//! A path alternates spread and testing for `horizon` steps. Ensembles run
//! `iterations` independent paths, in parallel when the `parallel` feature
//! is enabled, and reduce them in path-index order so results never depend
//! on the number of workers.

use serde::{Deserialize, Serialize};

use crate::analytics::{expected_alpha_curve, state_conditional_p_prime, DetectionProbability};
use crate::error::{Error, Result};
use crate::policies::{policy_step, PolicyKind};
use crate::rng::{RngStream, DYNAMICS_STREAM, TESTING_STREAM};
use crate::sim::{Counts, ModelParams, PhaseSnapshot, PopulationState};

pub const DEFAULT_HORIZON: usize = 500;
pub const DEFAULT_ITERATIONS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub params: ModelParams,
    pub policy: PolicyKind,
    pub horizon: usize,
    pub iterations: usize,
    pub master_seed: u64,
    pub record_snapshots: bool,
}

impl SimConfig {
    pub fn new(params: ModelParams, policy: PolicyKind, master_seed: u64) -> Self {
        Self {
            params,
            policy,
            horizon: DEFAULT_HORIZON,
            iterations: DEFAULT_ITERATIONS,
            master_seed,
            record_snapshots: false,
        }
    }

    pub fn with_horizon(mut self, horizon: usize) -> Self {
        self.horizon = horizon;
        self
    }

    pub fn with_iterations(mut self, iterations: usize) -> Self {
        self.iterations = iterations;
        self
    }

    pub fn with_policy(mut self, policy: PolicyKind) -> Self {
        self.policy = policy;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.policy.check(&self.params)?;
        if self.horizon == 0 {
            return Err(Error::param("horizon", "must be at least 1"));
        }
        if self.iterations == 0 {
            return Err(Error::param("iterations", "must be at least 1"));
        }
        if self.horizon > u32::MAX as usize || self.params.n > u32::MAX as usize {
            return Err(Error::param("horizon", "too large"));
        }
        Ok(())
    }
}

/// One realization of the count processes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplePath {
    /// Index 0 is the post-initialization state; index `t` is after the
    /// testing phase of step `t`.
    pub alpha: Vec<u32>,
    pub lambda: Vec<u32>,
    pub gamma: Vec<u32>,
    /// `detections[t - 1]` individuals were isolated at step `t`.
    pub detections: Vec<u32>,
    /// `p_prime_estimates[t - 1]` is the miss probability implied by the
    /// counts before testing at step `t`.
    pub p_prime_estimates: Vec<DetectionProbability>,
    /// First `t` with no non-isolated infection, if reached.
    pub control_time: Option<u32>,
    /// Pre-testing counts per step, when requested.
    pub snapshots: Option<Vec<PhaseSnapshot>>,
}

/// Drives a single path step by step.
#[derive(Debug, Clone)]
pub struct PathRunner {
    params: ModelParams,
    policy: PolicyKind,
    state: PopulationState,
    dynamics: RngStream,
    testing: RngStream,
}

/// Result of one [`PathRunner::step`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub snapshot: PhaseSnapshot,
    pub detected: usize,
    pub p_prime: DetectionProbability,
}

impl PathRunner {
    pub fn new(config: &SimConfig, path_index: u64) -> Result<Self> {
        config.validate()?;
        let mut dynamics = RngStream::derive(config.master_seed, DYNAMICS_STREAM, path_index);
        let testing = RngStream::derive(config.master_seed, TESTING_STREAM, path_index);
        let state = PopulationState::initialize(&config.params, &mut dynamics)?;
        Ok(Self {
            params: config.params,
            policy: config.policy,
            state,
            dynamics,
            testing,
        })
    }

    pub fn state(&self) -> &PopulationState {
        &self.state
    }

    /// Runs one time instance: spread, snapshot, testing, isolation. Once no
    /// infection remains both phases are skipped and only time advances.
    pub fn step(&mut self) -> Result<StepOutcome> {
        let detected = if self.state.counts().infected == 0 {
            self.state.tick();
            0
        } else {
            self.state.spread(self.params.q, &mut self.dynamics);
            let snapshot = self.state.snapshot();
            let report = policy_step(self.policy, &self.state, &self.params, &mut self.testing)?;
            debug_assert_eq!(report.snapshot, snapshot);
            self.state.isolate(&report.detected)?;
            report.detected.len()
        };
        // the pre-testing counts are recoverable: testing only moves
        // detected individuals from infected to isolated
        let counts = self.state.counts();
        let snapshot = PhaseSnapshot::new(
            counts.susceptible,
            counts.infected + detected,
            counts.isolated - detected,
        );
        let p_prime = state_conditional_p_prime(self.policy, &snapshot, self.params.tests)?;
        Ok(StepOutcome {
            snapshot,
            detected,
            p_prime,
        })
    }
}

fn push_counts(path: &mut SamplePath, c: Counts) {
    path.alpha.push(c.susceptible as u32);
    path.lambda.push(c.infected as u32);
    path.gamma.push(c.isolated as u32);
}

/// Runs path `path_index` of `config`; deterministic in
/// `(master_seed, path_index)`.
pub fn run_path(config: &SimConfig, path_index: u64) -> Result<SamplePath> {
    let mut runner = PathRunner::new(config, path_index)?;
    let h = config.horizon;
    let mut path = SamplePath {
        alpha: Vec::with_capacity(h + 1),
        lambda: Vec::with_capacity(h + 1),
        gamma: Vec::with_capacity(h + 1),
        detections: Vec::with_capacity(h),
        p_prime_estimates: Vec::with_capacity(h),
        control_time: None,
        snapshots: config.record_snapshots.then(|| Vec::with_capacity(h)),
    };
    let initial = runner.state().counts();
    push_counts(&mut path, initial);
    if initial.infected == 0 {
        path.control_time = Some(0);
    }
    for t in 1..=h {
        let outcome = runner.step()?;
        let counts = runner.state().counts();
        push_counts(&mut path, counts);
        path.detections.push(outcome.detected as u32);
        path.p_prime_estimates.push(outcome.p_prime);
        if let Some(s) = path.snapshots.as_mut() {
            s.push(outcome.snapshot);
        }
        if path.control_time.is_none() && counts.infected == 0 {
            path.control_time = Some(t as u32);
        }
    }
    Ok(path)
}

/// How an ensemble distributes its paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// Rayon pool with the given worker count, or the global pool. Falls
    /// back to sequential execution without the `parallel` feature.
    #[default]
    Parallel,
    Workers(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleResult {
    pub n: usize,
    pub horizon: usize,
    pub iterations: usize,
    pub mean_alpha: Vec<f64>,
    pub mean_lambda: Vec<f64>,
    pub mean_gamma: Vec<f64>,
    /// Standard error of the mean of each count process.
    pub se_alpha: Vec<f64>,
    pub se_lambda: Vec<f64>,
    pub se_gamma: Vec<f64>,
    /// Average over paths of each path's mean-field susceptible curve.
    pub mean_approx_alpha: Vec<f64>,
    /// `alpha[horizon]` of every path, in path order.
    pub final_alpha: Vec<u32>,
    pub controlled_paths: usize,
    pub uncontrolled_paths: usize,
    /// Mean control time over controlled paths.
    pub mean_control_time: Option<f64>,
    /// Mean `γ(t̄)` over controlled paths.
    pub mean_total_isolated: Option<f64>,
    /// Mean `γ(horizon)` over paths still uncontrolled at the horizon.
    pub mean_gamma_uncontrolled: Option<f64>,
}

impl EnsembleResult {
    pub fn steady_alpha(&self) -> f64 {
        self.mean_alpha[self.horizon]
    }

    pub fn steady_se_alpha(&self) -> f64 {
        self.se_alpha[self.horizon]
    }
}

struct PathSummary {
    path: SamplePath,
    approx: Vec<f64>,
}

fn summarize(config: &SimConfig, index: usize) -> Result<PathSummary> {
    let path = run_path(config, index as u64)?;
    let approx = expected_alpha_curve(&config.params, &path.p_prime_estimates, config.horizon)?;
    Ok(PathSummary {
        path,
        approx: approx.values,
    })
}

fn collect_paths(config: &SimConfig, exec: Execution) -> Result<Vec<PathSummary>> {
    let run_seq = || {
        (0..config.iterations)
            .map(|i| summarize(config, i))
            .collect()
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        let run_par = || {
            (0..config.iterations)
                .into_par_iter()
                .map(|i| summarize(config, i))
                .collect::<Result<Vec<_>>>()
        };
        match exec {
            Execution::Sequential => run_seq(),
            Execution::Parallel => run_par(),
            Execution::Workers(w) => rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
                .map_err(|e| Error::Config(e.to_string()))?
                .install(run_par),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = exec;
        run_seq()
    }
}

fn mean_and_se(sum: u64, sum_sq: u64, k: usize) -> (f64, f64) {
    let k = k as f64;
    let mean = sum as f64 / k;
    if k < 2.0 {
        return (mean, 0.0);
    }
    let var = ((sum_sq as f64 - k * mean * mean) / (k - 1.0)).max(0.0);
    (mean, (var / k).sqrt())
}

fn aggregate(config: &SimConfig, paths: &[PathSummary]) -> EnsembleResult {
    let len = config.horizon + 1;
    let k = paths.len();
    let mut sums = [vec![0u64; len], vec![0u64; len], vec![0u64; len]];
    let mut squares = [vec![0u64; len], vec![0u64; len], vec![0u64; len]];
    let mut approx = vec![0.0f64; len];
    let (mut controlled, mut control_sum, mut isolated_sum) = (0usize, 0u64, 0u64);
    let (mut uncontrolled_gamma, mut final_alpha) = (0u64, Vec::with_capacity(k));

    for summary in paths {
        let p = &summary.path;
        for (series, (sum, sq)) in [&p.alpha, &p.lambda, &p.gamma]
            .into_iter()
            .zip(sums.iter_mut().zip(squares.iter_mut()))
        {
            for t in 0..len {
                let v = series[t] as u64;
                sum[t] += v;
                sq[t] += v * v;
            }
        }
        for (acc, v) in approx.iter_mut().zip(&summary.approx) {
            *acc += v;
        }
        match p.control_time {
            Some(tc) => {
                controlled += 1;
                control_sum += tc as u64;
                isolated_sum += p.gamma[tc as usize] as u64;
            }
            None => uncontrolled_gamma += p.gamma[config.horizon] as u64,
        }
        final_alpha.push(p.alpha[config.horizon]);
    }

    let split = |i: usize| -> (Vec<f64>, Vec<f64>) {
        (0..len)
            .map(|t| mean_and_se(sums[i][t], squares[i][t], k))
            .unzip()
    };
    let (mean_alpha, se_alpha) = split(0);
    let (mean_lambda, se_lambda) = split(1);
    let (mean_gamma, se_gamma) = split(2);
    let uncontrolled = k - controlled;
    EnsembleResult {
        n: config.params.n,
        horizon: config.horizon,
        iterations: k,
        mean_alpha,
        mean_lambda,
        mean_gamma,
        se_alpha,
        se_lambda,
        se_gamma,
        mean_approx_alpha: approx.into_iter().map(|v| v / k as f64).collect(),
        final_alpha,
        controlled_paths: controlled,
        uncontrolled_paths: uncontrolled,
        mean_control_time: (controlled > 0).then(|| control_sum as f64 / controlled as f64),
        mean_total_isolated: (controlled > 0).then(|| isolated_sum as f64 / controlled as f64),
        mean_gamma_uncontrolled: (uncontrolled > 0)
            .then(|| uncontrolled_gamma as f64 / uncontrolled as f64),
    }
}

pub fn run_ensemble(config: &SimConfig) -> Result<EnsembleResult> {
    run_ensemble_with(config, Execution::default())
}

pub fn run_ensemble_with(config: &SimConfig, exec: Execution) -> Result<EnsembleResult> {
    config.validate()?;
    let paths = collect_paths(config, exec)?;
    Ok(aggregate(config, &paths))
}

/// One policy's ensemble within a comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyComparison {
    pub policy: PolicyKind,
    pub ensemble: EnsembleResult,
}

/// Runs the same experiment under several policies. The configs must agree
/// on everything but the policy, so all runs share their initialization
/// and spread streams.
pub fn compare_policies(configs: &[SimConfig], exec: Execution) -> Result<Vec<PolicyComparison>> {
    let Some(first) = configs.first() else {
        return Err(Error::Config("no policies to compare".into()));
    };
    for c in &configs[1..] {
        if c.params != first.params
            || c.horizon != first.horizon
            || c.iterations != first.iterations
            || c.master_seed != first.master_seed
        {
            return Err(Error::Config(format!(
                "policy `{}` does not share the experiment settings of `{}`",
                c.policy, first.policy
            )));
        }
    }
    configs
        .iter()
        .map(|c| {
            Ok(PolicyComparison {
                policy: c.policy,
                ensemble: run_ensemble_with(c, exec)?,
            })
        })
        .collect()
}

/// Mean and standard error of the per-path difference `a - b` of final
/// susceptible counts. Both ensembles must come from the same seeds.
pub fn paired_final_difference(a: &EnsembleResult, b: &EnsembleResult) -> (f64, f64) {
    assert_eq!(a.final_alpha.len(), b.final_alpha.len());
    let k = a.final_alpha.len() as f64;
    let diffs: Vec<f64> = a
        .final_alpha
        .iter()
        .zip(&b.final_alpha)
        .map(|(&x, &y)| x as f64 - y as f64)
        .collect();
    let mean = diffs.iter().sum::<f64>() / k;
    if k < 2.0 {
        return (mean, 0.0);
    }
    let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}
