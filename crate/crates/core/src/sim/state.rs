use serde::{Deserialize, Serialize};

use super::{pow_one_minus, ModelParams};
use crate::error::{Error, Result};
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InfectionStatus {
    Susceptible,
    Infected,
    /// Detected and removed from the population for good.
    Isolated,
}

/// Tallies `(α, λ, γ)` of susceptible, non-isolated infected and isolated
/// individuals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Counts {
    pub susceptible: usize,
    pub infected: usize,
    pub isolated: usize,
}

impl Counts {
    pub fn total(&self) -> usize {
        self.susceptible + self.infected + self.isolated
    }

    pub fn non_isolated(&self) -> usize {
        self.susceptible + self.infected
    }
}

/// Counts captured after the spread phase and before testing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseSnapshot {
    pub alpha_tilde: usize,
    pub lambda_tilde: usize,
    pub gamma: usize,
}

impl PhaseSnapshot {
    pub fn new(alpha_tilde: usize, lambda_tilde: usize, gamma: usize) -> Self {
        Self {
            alpha_tilde,
            lambda_tilde,
            gamma,
        }
    }

    pub fn n(&self) -> usize {
        self.alpha_tilde + self.lambda_tilde + self.gamma
    }

    pub fn non_isolated(&self) -> usize {
        self.alpha_tilde + self.lambda_tilde
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PopulationState {
    statuses: Vec<InfectionStatus>,
    time: u32,
    counts: Counts,
}

impl PopulationState {
    /// Builds a state from explicit statuses at time 0.
    pub fn from_statuses(statuses: Vec<InfectionStatus>) -> Self {
        let counts = tally(&statuses);
        Self {
            statuses,
            time: 0,
            counts,
        }
    }

    /// Time-0 state: each individual infected independently with
    /// probability `p`, in index order.
    pub fn initialize(params: &ModelParams, rng: &mut RngStream) -> Result<Self> {
        params.validate()?;
        let statuses = (0..params.n)
            .map(|_| {
                if rng.bernoulli(params.p) {
                    InfectionStatus::Infected
                } else {
                    InfectionStatus::Susceptible
                }
            })
            .collect();
        Ok(Self::from_statuses(statuses))
    }

    pub fn statuses(&self) -> &[InfectionStatus] {
        &self.statuses
    }

    pub fn status(&self, index: usize) -> InfectionStatus {
        self.statuses[index]
    }

    pub fn len(&self) -> usize {
        self.statuses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.statuses.is_empty()
    }

    pub fn time(&self) -> u32 {
        self.time
    }

    pub fn counts(&self) -> Counts {
        self.counts
    }

    /// Recounts from scratch; always equal to [`counts`](Self::counts).
    pub fn tally(&self) -> Counts {
        tally(&self.statuses)
    }

    pub fn snapshot(&self) -> PhaseSnapshot {
        PhaseSnapshot::new(
            self.counts.susceptible,
            self.counts.infected,
            self.counts.isolated,
        )
    }

    /// Indices of everyone not yet isolated, ascending.
    pub fn non_isolated_indices(&self) -> Vec<usize> {
        self.statuses
            .iter()
            .enumerate()
            .filter(|(_, s)| **s != InfectionStatus::Isolated)
            .map(|(i, _)| i)
            .collect()
    }

    /// Infection spread phase; advances time by one.
    ///
    /// Every susceptible is infected with probability `1 - (1 - q)^λ`, drawn
    /// in index order, where λ is the infected count before the phase.
    pub fn spread(&mut self, q: f64, rng: &mut RngStream) {
        self.time += 1;
        let prob = 1.0 - pow_one_minus(q, self.counts.infected as f64);
        if prob <= 0.0 || self.counts.susceptible == 0 {
            return;
        }
        let mut newly = 0;
        for status in self.statuses.iter_mut() {
            if *status == InfectionStatus::Susceptible && rng.bernoulli(prob) {
                *status = InfectionStatus::Infected;
                newly += 1;
            }
        }
        self.counts.susceptible -= newly;
        self.counts.infected += newly;
    }

    /// Isolates every detected index. All of them must be infected; the
    /// state is left untouched on error.
    pub fn isolate(&mut self, detected: &[usize]) -> Result<()> {
        let mut seen = std::collections::HashSet::with_capacity(detected.len());
        for &index in detected {
            let status = *self
                .statuses
                .get(index)
                .ok_or_else(|| Error::Shape(format!("index {index} out of range")))?;
            if status != InfectionStatus::Infected {
                return Err(Error::IsolateNonInfected { index, status });
            }
            if !seen.insert(index) {
                // listed twice: the second isolation would hit an isolated individual
                let status = InfectionStatus::Isolated;
                return Err(Error::IsolateNonInfected { index, status });
            }
        }
        for &index in detected {
            self.statuses[index] = InfectionStatus::Isolated;
        }
        self.counts.infected -= detected.len();
        self.counts.isolated += detected.len();
        Ok(())
    }

    /// Advances time without running either phase.
    pub(crate) fn tick(&mut self) {
        self.time += 1;
    }
}

fn tally(statuses: &[InfectionStatus]) -> Counts {
    statuses.iter().fold(Counts::default(), |mut c, s| {
        match s {
            InfectionStatus::Susceptible => c.susceptible += 1,
            InfectionStatus::Infected => c.infected += 1,
            InfectionStatus::Isolated => c.isolated += 1,
        }
        c
    })
}
