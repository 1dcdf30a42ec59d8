use serde::{Deserialize, Serialize};

use super::DetectionProbability;
use crate::error::{Error, Result};
use crate::sim::{pow_one_minus, ModelParams};

/// Values indexed by time `t = 0..=horizon`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproxCurve {
    pub values: Vec<f64>,
}

impl ApproxCurve {
    pub fn horizon(&self) -> usize {
        self.values.len().saturating_sub(1)
    }

    pub fn at(&self, t: usize) -> f64 {
        self.values[t]
    }
}

fn check_p_prime(p_prime: &[DetectionProbability], horizon: usize) -> Result<()> {
    if p_prime.len() < horizon {
        return Err(Error::param(
            "p_prime",
            format!("{} values cannot cover horizon {horizon}", p_prime.len()),
        ));
    }
    Ok(())
}

/// `P(U(t) = 1) ≈ p g^t Π_{j=1..t} p'(j)` with `g = 1 + n q (1 - p)`.
///
/// `p_prime[j - 1]` holds `p'(j)`.
pub fn p_infected_trajectory(
    params: &ModelParams,
    p_prime: &[DetectionProbability],
    horizon: usize,
) -> Result<ApproxCurve> {
    params.validate()?;
    check_p_prime(p_prime, horizon)?;
    let growth = params.spread_factor();
    let mut values = Vec::with_capacity(horizon + 1);
    let mut current = params.p;
    values.push(current);
    for pp in &p_prime[..horizon] {
        current *= growth * pp.value();
        values.push(current.clamp(0.0, 1.0));
    }
    Ok(ApproxCurve { values })
}

/// `P(U(t) = 0) ≈ (1 - p)(1 - q)^{n Σ_{j<t} P(U(j) = 1)}`.
pub fn p_susceptible_trajectory(
    params: &ModelParams,
    infected: &ApproxCurve,
    horizon: usize,
) -> Result<ApproxCurve> {
    params.validate()?;
    if infected.values.len() < horizon {
        return Err(Error::param(
            "infected",
            format!(
                "curve of length {} cannot cover times 0..{horizon}",
                infected.values.len()
            ),
        ));
    }
    let n = params.n as f64;
    let mut values = Vec::with_capacity(horizon + 1);
    let mut cumulative = 0.0;
    values.push(1.0 - params.p);
    for &p1 in &infected.values[..horizon] {
        cumulative += p1;
        values.push(((1.0 - params.p) * pow_one_minus(params.q, n * cumulative)).clamp(0.0, 1.0));
    }
    Ok(ApproxCurve { values })
}

/// Mean-field approximation of the expected number of susceptibles:
///
/// `E[α(t)] ≈ n (1 - p) (1 - q)^{n p Σ_{i=0}^{t-1} g^i Π_{j=1..i} p'(j)}`,
/// clamped to `[0, n]`.
pub fn expected_alpha_curve(
    params: &ModelParams,
    p_prime: &[DetectionProbability],
    horizon: usize,
) -> Result<ApproxCurve> {
    params.validate()?;
    check_p_prime(p_prime, horizon)?;
    let n = params.n as f64;
    let growth = params.spread_factor();
    let scale = n * (1.0 - params.p);
    let mut values = Vec::with_capacity(horizon + 1);
    values.push(scale);
    // term_i = g^i Π_{j<=i} p'(j); sum accumulates terms 0..t-1
    let mut term = 1.0;
    let mut sum = 0.0;
    for t in 1..=horizon {
        sum += term;
        values.push((scale * pow_one_minus(params.q, n * params.p * sum)).clamp(0.0, n));
        term *= growth * p_prime[t - 1].value();
    }
    Ok(ApproxCurve { values })
}
