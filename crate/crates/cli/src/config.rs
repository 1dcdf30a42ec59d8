//! Run parameters from flags and an optional JSON file.

use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::Args;
use dyngt::harness::{DEFAULT_HORIZON, DEFAULT_ITERATIONS};
use dyngt::{ModelParams, PolicyKind, SimConfig};
use serde::{Deserialize, Serialize};

use crate::UsageError;

/// Keys shared by the command line and the `--config` file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub policy: Option<PolicyKind>,
    pub n: Option<usize>,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub tests: Option<usize>,
    pub horizon: Option<usize>,
    pub iterations: Option<usize>,
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Population size
    #[arg(long)]
    pub n: Option<usize>,
    /// Initial infection probability
    #[arg(long)]
    pub p: Option<f64>,
    /// Per-contact infection probability
    #[arg(long)]
    pub q: Option<f64>,
    /// Tests available per time step
    #[arg(long)]
    pub tests: Option<usize>,
    /// Time steps per path [default: 500]
    #[arg(long)]
    pub horizon: Option<usize>,
    /// Number of sample paths [default: 1000]
    #[arg(long)]
    pub iterations: Option<usize>,
    /// Master seed [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; results do not depend on it [default: all cores]
    #[arg(long)]
    pub workers: Option<usize>,
    /// Output directory
    #[arg(long)]
    pub out: PathBuf,
    /// JSON file with the same keys as the flags; flags take precedence
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Fully resolved run settings.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub params: ModelParams,
    pub horizon: usize,
    pub iterations: usize,
    pub seed: u64,
    pub workers: Option<usize>,
}

impl Resolved {
    pub fn sim_config(&self, policy: PolicyKind) -> SimConfig {
        SimConfig::new(self.params, policy, self.seed)
            .with_horizon(self.horizon)
            .with_iterations(self.iterations)
    }

    /// The settings in config-file form, with every default filled in.
    pub fn echo(&self, policy: Option<PolicyKind>) -> RunFile {
        RunFile {
            policy,
            n: Some(self.params.n),
            p: Some(self.params.p),
            q: Some(self.params.q),
            tests: Some(self.params.tests),
            horizon: Some(self.horizon),
            iterations: Some(self.iterations),
            seed: Some(self.seed),
            workers: None,
        }
    }
}

pub fn read_run_file(path: &Path) -> anyhow::Result<RunFile> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config file {}", path.display()))?;
    serde_json::from_str(&text)
        .map_err(|e| UsageError(format!("invalid config file {}: {e}", path.display())).into())
}

fn required<T>(value: Option<T>, name: &str) -> anyhow::Result<T> {
    value
        .ok_or_else(|| UsageError(format!("missing --{name} (flag or config key `{name}`)")).into())
}

/// Merges flags over the config file; `policy` comes from the caller since
/// not every command takes one.
pub fn resolve(
    args: &RunArgs,
    policy: Option<PolicyKind>,
) -> anyhow::Result<(Resolved, Option<PolicyKind>)> {
    let file = match &args.config {
        Some(path) => read_run_file(path)?,
        None => RunFile::default(),
    };
    let merged = RunFile {
        policy: policy.or(file.policy),
        n: args.n.or(file.n),
        p: args.p.or(file.p),
        q: args.q.or(file.q),
        tests: args.tests.or(file.tests),
        horizon: args.horizon.or(file.horizon),
        iterations: args.iterations.or(file.iterations),
        seed: args.seed.or(file.seed),
        workers: args.workers.or(file.workers),
    };
    let params = ModelParams::new(
        required(merged.n, "n")?,
        required(merged.p, "p")?,
        required(merged.q, "q")?,
        required(merged.tests, "tests")?,
    )
    .map_err(|e| UsageError(e.to_string()))?;
    if merged.workers == Some(0) {
        return Err(UsageError("--workers must be at least 1".into()).into());
    }
    let resolved = Resolved {
        params,
        horizon: merged.horizon.unwrap_or(DEFAULT_HORIZON),
        iterations: merged.iterations.unwrap_or(DEFAULT_ITERATIONS),
        seed: merged.seed.unwrap_or(0),
        workers: merged.workers,
    };
    Ok((resolved, merged.policy))
}
