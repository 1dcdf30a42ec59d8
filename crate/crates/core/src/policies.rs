//! Testing policies. Each consumes a post-spread state and decides which
//! tests to run with the per-step budget and whom to isolate.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::sim::{run_tests, ModelParams, PhaseSnapshot, PopulationState, TestMatrix, TestResults};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolicyKind {
    /// Test `T` uniformly chosen non-isolated individuals.
    Individual,
    /// `T/2` pooled tests over a random partition, then `T/2` individual
    /// tests inside positive pools.
    Dorfman,
    /// Test `T` individuals drawn from everyone, isolated included.
    WeakIndividual,
    /// Spend `T/2` on discarded pools and test `T/2` individuals drawn from
    /// everyone.
    WeakDorfman,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 4] = [
        PolicyKind::Individual,
        PolicyKind::Dorfman,
        PolicyKind::WeakIndividual,
        PolicyKind::WeakDorfman,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PolicyKind::Individual => "individual",
            PolicyKind::Dorfman => "dorfman",
            PolicyKind::WeakIndividual => "weak-individual",
            PolicyKind::WeakDorfman => "weak-dorfman",
        }
    }

    pub fn is_dorfman(self) -> bool {
        matches!(self, PolicyKind::Dorfman | PolicyKind::WeakDorfman)
    }

    pub fn is_weak(self) -> bool {
        matches!(self, PolicyKind::WeakIndividual | PolicyKind::WeakDorfman)
    }

    /// Checks the budget constraints this policy places on `params`.
    pub fn check(self, params: &ModelParams) -> Result<()> {
        params.validate()?;
        match self {
            PolicyKind::Individual => Ok(()),
            PolicyKind::Dorfman => params.half_tests().map(|_| ()),
            PolicyKind::WeakIndividual => {
                if params.tests > params.n {
                    Err(Error::BudgetExceedsPopulation {
                        tests: params.tests,
                        n: params.n,
                    })
                } else {
                    Ok(())
                }
            }
            PolicyKind::WeakDorfman => {
                let half = params.half_tests()?;
                if half > params.n {
                    Err(Error::BudgetExceedsPopulation {
                        tests: half,
                        n: params.n,
                    })
                } else {
                    Ok(())
                }
            }
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PolicyKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::param("policy", format!("unknown policy `{s}`")))
    }
}

/// What one testing phase did.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepReport {
    pub tests_used: usize,
    pub group_tests_used: usize,
    pub individual_tests_used: usize,
    /// Indices found infected, ascending.
    pub detected: Vec<usize>,
    pub snapshot: PhaseSnapshot,
    /// Tests whose outcomes were used. The first `group_rows` rows are
    /// pooled tests, the rest single-member tests.
    pub matrix: TestMatrix,
    pub results: TestResults,
    pub group_rows: usize,
}

impl StepReport {
    fn empty(state: &PopulationState) -> Self {
        Self {
            tests_used: 0,
            group_tests_used: 0,
            individual_tests_used: 0,
            detected: Vec::new(),
            snapshot: state.snapshot(),
            matrix: TestMatrix::new(state.len()),
            results: TestResults::default(),
            group_rows: 0,
        }
    }
}

/// Tests each index on its own and reports the positives.
fn test_individually(
    state: &PopulationState,
    chosen: &[usize],
) -> Result<(TestMatrix, TestResults, Vec<usize>)> {
    let mut matrix = TestMatrix::new(state.len());
    for &i in chosen {
        matrix.push_individual(i)?;
    }
    let results = run_tests(&matrix, state)?;
    let mut detected: Vec<usize> = chosen
        .iter()
        .zip(&results.0)
        .filter(|(_, pos)| **pos)
        .map(|(&i, _)| i)
        .collect();
    detected.sort_unstable();
    Ok((matrix, results, detected))
}

fn individual_report(
    state: &PopulationState,
    chosen: &[usize],
    group_tests_charged: usize,
) -> Result<StepReport> {
    let (matrix, results, detected) = test_individually(state, chosen)?;
    Ok(StepReport {
        tests_used: group_tests_charged + chosen.len(),
        group_tests_used: group_tests_charged,
        individual_tests_used: chosen.len(),
        detected,
        snapshot: state.snapshot(),
        matrix,
        results,
        group_rows: 0,
    })
}

pub fn individual_step(
    state: &PopulationState,
    params: &ModelParams,
    rng: &mut RngStream,
) -> Result<StepReport> {
    let mut pool = state.non_isolated_indices();
    let take = params.tests.min(pool.len());
    rng.partial_shuffle(&mut pool, take);
    individual_report(state, &pool[..take], 0)
}

pub fn weak_individual_step(
    state: &PopulationState,
    params: &ModelParams,
    rng: &mut RngStream,
) -> Result<StepReport> {
    PolicyKind::WeakIndividual.check(params)?;
    let mut everyone: Vec<usize> = (0..state.len()).collect();
    rng.partial_shuffle(&mut everyone, params.tests);
    individual_report(state, &everyone[..params.tests], 0)
}

pub fn weak_dorfman_step(
    state: &PopulationState,
    params: &ModelParams,
    rng: &mut RngStream,
) -> Result<StepReport> {
    PolicyKind::WeakDorfman.check(params)?;
    let half = params.tests / 2;
    let mut everyone: Vec<usize> = (0..state.len()).collect();
    rng.partial_shuffle(&mut everyone, half);
    individual_report(state, &everyone[..half], half)
}

/// Splits `members` (already shuffled) into `groups` consecutive blocks
/// whose sizes differ by at most one; larger blocks come last. Empty
/// blocks are dropped.
pub fn partition_blocks(members: &[usize], groups: usize) -> Vec<Vec<usize>> {
    let m = members.len();
    if groups == 0 || m == 0 {
        return Vec::new();
    }
    let base = m / groups;
    let larger = m % groups;
    let mut out = Vec::with_capacity(groups.min(m));
    let mut start = 0;
    for g in 0..groups {
        let size = if g < groups - larger { base } else { base + 1 };
        if size > 0 {
            out.push(members[start..start + size].to_vec());
        }
        start += size;
    }
    out
}

pub fn dorfman_step(
    state: &PopulationState,
    params: &ModelParams,
    rng: &mut RngStream,
) -> Result<StepReport> {
    let half = params.half_tests()?;
    let mut members = state.non_isolated_indices();
    if members.is_empty() {
        return Ok(StepReport::empty(state));
    }
    rng.shuffle(&mut members);
    let groups = partition_blocks(&members, half);

    let mut matrix = TestMatrix::new(state.len());
    for g in &groups {
        matrix.push_pool(g.clone())?;
    }
    let mut results = run_tests(&matrix, state)?;
    let group_rows = groups.len();

    let mut positive: Vec<usize> = (0..groups.len()).filter(|&g| results.0[g]).collect();
    let mut chosen = Vec::with_capacity(half);
    let mut budget = half;
    let mut remaining = positive.len();
    // draw positive groups uniformly without replacement until the
    // individual budget is spent
    while budget > 0 && remaining > 0 {
        let pick = rng.uniform_below(remaining);
        positive.swap(pick, remaining - 1);
        remaining -= 1;
        let mut group = groups[positive[remaining]].clone();
        if group.len() <= budget {
            budget -= group.len();
            chosen.extend(group);
        } else {
            rng.partial_shuffle(&mut group, budget);
            chosen.extend_from_slice(&group[..budget]);
            budget = 0;
        }
    }

    let (second, second_results, detected) = test_individually(state, &chosen)?;
    matrix.append(second)?;
    results.extend(second_results);
    Ok(StepReport {
        tests_used: group_rows + chosen.len(),
        group_tests_used: group_rows,
        individual_tests_used: chosen.len(),
        detected,
        snapshot: state.snapshot(),
        matrix,
        results,
        group_rows,
    })
}

/// Uniform entry point used by the simulation harness.
pub fn policy_step(
    kind: PolicyKind,
    state: &PopulationState,
    params: &ModelParams,
    rng: &mut RngStream,
) -> Result<StepReport> {
    match kind {
        PolicyKind::Individual => individual_step(state, params, rng),
        PolicyKind::Dorfman => dorfman_step(state, params, rng),
        PolicyKind::WeakIndividual => weak_individual_step(state, params, rng),
        PolicyKind::WeakDorfman => weak_dorfman_step(state, params, rng),
    }
}
