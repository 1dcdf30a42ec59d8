use std::time::Instant;

use anyhow::Result;
use clap::{Args, Subcommand, ValueEnum};
use dyngt::analytics::{
    advantage, expected_detections_dorfman, expected_detections_individual,
    steady_state_weak_dorfman, steady_state_weak_individual, Advantage, DorfmanExpectation,
    SteadyStateResult,
};
use dyngt::harness::{compare_policies, run_ensemble_with, Execution};
use dyngt::{EnsembleResult, ModelParams, PhaseSnapshot, PolicyKind};
use serde::Serialize;

use crate::config::{resolve, Resolved, RunArgs, RunFile};
use crate::output::{
    checkpoints, curves_csv, sig6, to_json, Checkpoint, OutputSet, CENSORING_NOTE,
};
use crate::UsageError;

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// individual, dorfman, weak-individual or weak-dorfman
    #[arg(long)]
    pub policy: Option<PolicyKind>,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Subcommand)]
pub enum AnalyticsCommand {
    /// Closed-form steady state of a weak policy
    SteadyState {
        #[arg(long)]
        variant: WeakVariant,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        q: f64,
        #[arg(long)]
        tests: usize,
    },
    /// Expected detections in one testing phase
    Detections {
        #[arg(long)]
        variant: OriginalVariant,
        #[arg(long)]
        alpha: usize,
        #[arg(long)]
        lambda: usize,
        #[arg(long)]
        tests: usize,
    },
    /// Whether Dorfman testing detects more than individual testing
    Advantage {
        #[arg(long)]
        alpha: usize,
        #[arg(long)]
        lambda: usize,
        #[arg(long)]
        tests: usize,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeakVariant {
    WeakIndividual,
    WeakDorfman,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OriginalVariant {
    Individual,
    Dorfman,
}

fn execution(workers: Option<usize>) -> Execution {
    workers.map_or(Execution::Parallel, Execution::Workers)
}

#[derive(Serialize)]
struct ClosedForm {
    weak_individual: Option<SteadyStateResult>,
    weak_dorfman: Option<SteadyStateResult>,
}

impl ClosedForm {
    /// Steady states of whichever weak policies the budget admits.
    fn for_params(params: &ModelParams) -> Self {
        Self {
            weak_individual: PolicyKind::WeakIndividual
                .check(params)
                .and_then(|_| steady_state_weak_individual(params))
                .ok(),
            weak_dorfman: PolicyKind::WeakDorfman
                .check(params)
                .and_then(|_| steady_state_weak_dorfman(params))
                .ok(),
        }
    }

    fn of(&self, policy: PolicyKind) -> Option<SteadyStateResult> {
        match policy {
            PolicyKind::WeakIndividual => self.weak_individual,
            PolicyKind::WeakDorfman => self.weak_dorfman,
            _ => None,
        }
    }
}

#[derive(Serialize)]
struct Summary<'a> {
    policy: PolicyKind,
    n: usize,
    horizon: usize,
    iterations: usize,
    steady_mean_alpha: f64,
    steady_se_alpha: f64,
    steady_mean_lambda: f64,
    steady_mean_gamma: f64,
    steady_approx_alpha: f64,
    controlled_paths: usize,
    uncontrolled_paths: usize,
    mean_control_time: Option<f64>,
    mean_total_isolated: Option<f64>,
    mean_gamma_uncontrolled: Option<f64>,
    standard_errors: Vec<Checkpoint>,
    closed_form: &'a ClosedForm,
}

fn summary<'a>(policy: PolicyKind, e: &EnsembleResult, closed_form: &'a ClosedForm) -> Summary<'a> {
    let h = e.horizon;
    Summary {
        policy,
        n: e.n,
        horizon: h,
        iterations: e.iterations,
        steady_mean_alpha: e.mean_alpha[h],
        steady_se_alpha: e.se_alpha[h],
        steady_mean_lambda: e.mean_lambda[h],
        steady_mean_gamma: e.mean_gamma[h],
        steady_approx_alpha: e.mean_approx_alpha[h],
        controlled_paths: e.controlled_paths,
        uncontrolled_paths: e.uncontrolled_paths,
        mean_control_time: e.mean_control_time,
        mean_total_isolated: e.mean_total_isolated,
        mean_gamma_uncontrolled: e.mean_gamma_uncontrolled,
        standard_errors: checkpoints(e),
        closed_form,
    }
}

#[derive(Serialize)]
struct Manifest {
    software: String,
    command: &'static str,
    config: RunFile,
    record_snapshots: bool,
    master_seed: u64,
    workers: Option<usize>,
    wall_clock_seconds: f64,
    censoring: &'static str,
    files: Vec<String>,
}

fn manifest(
    command: &'static str,
    r: &Resolved,
    policy: Option<PolicyKind>,
    files: Vec<String>,
    started: Instant,
) -> Manifest {
    Manifest {
        software: concat!("dyngt ", env!("CARGO_PKG_VERSION")).to_string(),
        command,
        config: r.echo(policy),
        record_snapshots: false,
        master_seed: r.seed,
        workers: r.workers,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
        censoring: CENSORING_NOTE,
        files,
    }
}

pub fn simulate(args: &SimulateArgs) -> Result<()> {
    let started = Instant::now();
    let (resolved, policy) = resolve(&args.run, args.policy)?;
    let policy = policy
        .ok_or_else(|| UsageError("missing --policy (flag or config key `policy`)".into()))?;
    let config = resolved.sim_config(policy);
    config.validate()?;
    let ensemble = run_ensemble_with(&config, execution(resolved.workers))?;
    let closed_form = ClosedForm::for_params(&resolved.params);

    let mut out = OutputSet::create(&args.run.out)?;
    out.write("curves.csv", &curves_csv(&ensemble))?;
    out.write(
        "summary.json",
        &to_json(&summary(policy, &ensemble, &closed_form))?,
    )?;
    let mut files = out.names();
    files.push("manifest.json".into());
    out.write(
        "manifest.json",
        &to_json(&manifest(
            "simulate",
            &resolved,
            Some(policy),
            files,
            started,
        ))?,
    )?;
    for path in out.commit() {
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

pub const COMPARE_HEADER: &str = "policy,steady_mean_alpha,steady_se_alpha,steady_approx_alpha,\
controlled_paths,uncontrolled_paths,mean_control_time,mean_total_isolated,mean_gamma_uncontrolled,\
closed_form_limit,closed_form_convergent";

fn optional(x: Option<f64>) -> String {
    x.map(sig6).unwrap_or_default()
}

pub fn compare(run: &RunArgs) -> Result<()> {
    let started = Instant::now();
    let (resolved, _) = resolve(run, None)?;
    let configs: Vec<_> = PolicyKind::ALL
        .iter()
        .map(|&k| resolved.sim_config(k))
        .collect();
    for c in &configs {
        c.validate()?;
    }
    let table = compare_policies(&configs, execution(resolved.workers))?;
    let closed_form = ClosedForm::for_params(&resolved.params);

    let mut csv = String::from(COMPARE_HEADER);
    csv.push('\n');
    for row in &table {
        let e = &row.ensemble;
        let limit = closed_form.of(row.policy);
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            row.policy,
            sig6(e.steady_alpha()),
            sig6(e.steady_se_alpha()),
            sig6(e.mean_approx_alpha[e.horizon]),
            e.controlled_paths,
            e.uncontrolled_paths,
            optional(e.mean_control_time),
            optional(e.mean_total_isolated),
            optional(e.mean_gamma_uncontrolled),
            optional(limit.map(|l| l.limit_alpha)),
            limit.map(|l| l.convergent.to_string()).unwrap_or_default(),
        ));
    }

    let mut out = OutputSet::create(&run.out)?;
    out.write("compare.csv", &csv)?;
    for row in &table {
        out.write(
            &format!("curves_{}.csv", row.policy),
            &curves_csv(&row.ensemble),
        )?;
    }
    let mut files = out.names();
    files.push("manifest.json".into());
    out.write(
        "manifest.json",
        &to_json(&manifest("compare", &resolved, None, files, started))?,
    )?;
    for path in out.commit() {
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

#[derive(Serialize)]
struct SteadyStateReport {
    variant: WeakVariant,
    n: usize,
    p: f64,
    q: f64,
    tests: usize,
    growth_factor: f64,
    convergent: bool,
    limit: f64,
}

#[derive(Serialize)]
struct DetectionsReport {
    variant: OriginalVariant,
    alpha: usize,
    lambda: usize,
    tests: usize,
    value: f64,
    /// Value limited to what one step can detect.
    capped: f64,
    #[serde(flatten, skip_serializing_if = "Option::is_none")]
    dorfman: Option<DorfmanExpectationFields>,
}

#[derive(Serialize)]
struct DorfmanExpectationFields {
    branch: dyngt::analytics::DorfmanBranch,
    group_size: f64,
    approximate: bool,
    lower_bound: bool,
    ratio: f64,
}

impl From<DorfmanExpectation> for DorfmanExpectationFields {
    fn from(d: DorfmanExpectation) -> Self {
        Self {
            branch: d.branch,
            group_size: d.group_size,
            approximate: d.approximate,
            lower_bound: d.lower_bound,
            ratio: d.ratio,
        }
    }
}

#[derive(Serialize)]
struct AdvantageReport {
    alpha: usize,
    lambda: usize,
    tests: usize,
    #[serde(flatten)]
    result: Advantage,
}

pub fn analytics(cmd: &AnalyticsCommand) -> Result<()> {
    let json = match *cmd {
        AnalyticsCommand::SteadyState {
            variant,
            n,
            p,
            q,
            tests,
        } => {
            let params = ModelParams::new(n, p, q, tests)?;
            let r = match variant {
                WeakVariant::WeakIndividual => steady_state_weak_individual(&params)?,
                WeakVariant::WeakDorfman => steady_state_weak_dorfman(&params)?,
            };
            to_json(&SteadyStateReport {
                variant,
                n,
                p,
                q,
                tests,
                growth_factor: r.growth_factor,
                convergent: r.convergent,
                limit: r.limit_alpha,
            })?
        }
        AnalyticsCommand::Detections {
            variant,
            alpha,
            lambda,
            tests,
        } => {
            let snapshot = PhaseSnapshot::new(alpha, lambda, 0);
            let (value, capped, dorfman) = match variant {
                OriginalVariant::Individual => {
                    let v = expected_detections_individual(&snapshot, tests)?;
                    (v, v.min(lambda as f64), None)
                }
                OriginalVariant::Dorfman => {
                    let d = expected_detections_dorfman(&snapshot, tests)?;
                    (d.value, d.capped(&snapshot, tests), Some(d.into()))
                }
            };
            to_json(&DetectionsReport {
                variant,
                alpha,
                lambda,
                tests,
                value,
                capped,
                dorfman,
            })?
        }
        AnalyticsCommand::Advantage {
            alpha,
            lambda,
            tests,
        } => to_json(&AdvantageReport {
            alpha,
            lambda,
            tests,
            result: advantage(&PhaseSnapshot::new(alpha, lambda, 0), tests)?,
        })?,
    };
    print!("{json}");
    Ok(())
}
