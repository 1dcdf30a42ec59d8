use serde::{Deserialize, Serialize};

use super::DetectionProbability;
use crate::error::{Error, Result};
use crate::policies::PolicyKind;
use crate::sim::PhaseSnapshot;

/// `C(alpha, k) / C(total, k) = Π_{i<k} (alpha - i) / (total - i)`,
/// accumulated in log space. Zero when `k > alpha`.
pub fn binomial_ratio(alpha: usize, total: usize, k: usize) -> f64 {
    debug_assert!(alpha <= total);
    if k > alpha {
        return 0.0;
    }
    let log: f64 = (0..k)
        .map(|i| ((alpha - i) as f64).ln() - ((total - i) as f64).ln())
        .sum();
    log.exp()
}

/// Expected detections of individual testing, `T λ̃ / (α̃ + λ̃)`.
///
/// Exceeds λ̃ when `T > α̃ + λ̃`; callers cap it there.
pub fn expected_detections_individual(snapshot: &PhaseSnapshot, tests: usize) -> Result<f64> {
    let m = snapshot.non_isolated();
    if m == 0 {
        return Err(Error::EmptyPopulation);
    }
    let lambda = snapshot.lambda_tilde as f64;
    Ok(tests as f64 * lambda / m as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DorfmanBranch {
    /// α̃ ≥ C: the tested group is conditioned on holding an infection.
    SingleGroup,
    /// α̃ < C: every group of size C holds an infection.
    SmallSusceptible,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DorfmanExpectation {
    /// Closed-form value, not capped.
    pub value: f64,
    pub branch: DorfmanBranch,
    /// Nominal group size `C = 2(α̃ + λ̃)/T`.
    pub group_size: f64,
    /// `C` is not an integer; the ratio used `⌊C⌋` factors.
    pub approximate: bool,
    /// `α̃ + λ̃ < T²/4`: individual tests spill over several groups and the
    /// value only bounds the expectation from below.
    pub lower_bound: bool,
    /// `C(α̃, C) / C(α̃ + λ̃, C)`.
    pub ratio: f64,
}

/// Expected detections of Dorfman testing given the pre-testing counts.
///
/// With `C = 2(α̃ + λ̃)/T` and base `T λ̃ / (2(α̃ + λ̃))`, the value is
/// `base / (1 - C(α̃, C)/C(α̃ + λ̃, C))` when `α̃ ≥ C` and `base` otherwise.
pub fn expected_detections_dorfman(
    snapshot: &PhaseSnapshot,
    tests: usize,
) -> Result<DorfmanExpectation> {
    if !tests.is_multiple_of(2) {
        return Err(Error::OddTestBudget(tests));
    }
    if tests == 0 {
        return Err(Error::param("tests", "at least two tests are required"));
    }
    let m = snapshot.non_isolated();
    if m == 0 {
        return Err(Error::EmptyPopulation);
    }
    let half = tests / 2;
    let alpha = snapshot.alpha_tilde;
    let lambda = snapshot.lambda_tilde as f64;
    let group_size = m as f64 / half as f64;
    let factors = (m / half).max(1);
    let ratio = binomial_ratio(alpha, m, factors);
    let base = half as f64 * lambda / m as f64;
    let branch = if alpha as f64 >= group_size {
        DorfmanBranch::SingleGroup
    } else {
        DorfmanBranch::SmallSusceptible
    };
    let value = match branch {
        _ if snapshot.lambda_tilde == 0 => 0.0,
        DorfmanBranch::SingleGroup => base / (1.0 - ratio),
        DorfmanBranch::SmallSusceptible => base,
    };
    Ok(DorfmanExpectation {
        value,
        branch,
        group_size,
        approximate: !m.is_multiple_of(half),
        lower_bound: 4 * m < tests * tests,
        ratio,
    })
}

impl DorfmanExpectation {
    /// The value capped at what one step can physically detect:
    /// `min(λ̃, T/2)`.
    pub fn capped(&self, snapshot: &PhaseSnapshot, tests: usize) -> f64 {
        let cap = (snapshot.lambda_tilde as f64).min((tests / 2) as f64);
        self.value.clamp(0.0, cap)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Advantage {
    pub ratio: f64,
    pub group_size: f64,
    pub approximate: bool,
    /// α̃ ≥ C.
    pub first_branch: bool,
    pub dorfman_advantage: bool,
    pub expected_individual: f64,
    pub expected_dorfman: f64,
}

/// Evaluates the condition under which Dorfman testing detects more
/// infections on average than individual testing: `α̃ ≥ C` and
/// `C(α̃, C)/C(α̃ + λ̃, C) > 1/2`.
pub fn advantage(snapshot: &PhaseSnapshot, tests: usize) -> Result<Advantage> {
    let dorfman = expected_detections_dorfman(snapshot, tests)?;
    let individual = expected_detections_individual(snapshot, tests)?;
    let first_branch = dorfman.branch == DorfmanBranch::SingleGroup;
    Ok(Advantage {
        ratio: dorfman.ratio,
        group_size: dorfman.group_size,
        approximate: dorfman.approximate,
        first_branch,
        dorfman_advantage: snapshot.lambda_tilde > 0 && first_branch && dorfman.ratio > 0.5,
        expected_individual: individual,
        expected_dorfman: dorfman.value,
    })
}

pub fn dorfman_advantage(snapshot: &PhaseSnapshot, tests: usize) -> Result<bool> {
    advantage(snapshot, tests).map(|a| a.dorfman_advantage)
}

/// Per-infected miss probability `p'` implied by the current counts.
///
/// Individual: `1 - min(1, T/(n - γ))`. Weak individual: `1 - T/n`.
/// Dorfman: `1 - E[detections]/λ̃`. Weak Dorfman: `1 - T/(2n)`.
///
/// With no infected left the original policies report 0: a controlled path
/// stays controlled, so its infection term must vanish rather than regrow
/// through the spread factor. An empty non-isolated population gives 1.
pub fn state_conditional_p_prime(
    kind: PolicyKind,
    snapshot: &PhaseSnapshot,
    tests: usize,
) -> Result<DetectionProbability> {
    let n = snapshot.n() as f64;
    let m = snapshot.non_isolated();
    let t = tests as f64;
    let value = match kind {
        PolicyKind::WeakIndividual => 1.0 - t / n,
        PolicyKind::WeakDorfman => {
            if !tests.is_multiple_of(2) {
                return Err(Error::OddTestBudget(tests));
            }
            1.0 - t / (2.0 * n)
        }
        _ if m == 0 => 1.0,
        _ if snapshot.lambda_tilde == 0 => 0.0,
        PolicyKind::Individual => 1.0 - (t / m as f64).min(1.0),
        PolicyKind::Dorfman => {
            let e = expected_detections_dorfman(snapshot, tests)?;
            1.0 - e.capped(snapshot, tests) / snapshot.lambda_tilde as f64
        }
    };
    Ok(DetectionProbability::new(value))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn snap(alpha: usize, lambda: usize) -> PhaseSnapshot {
        PhaseSnapshot::new(alpha, lambda, 0)
    }

    #[test]
    fn binomial_ratio_small_values() {
        assert!((binomial_ratio(14, 16, 8) - 3003.0 / 12870.0).abs() < 1e-14);
        assert!((binomial_ratio(98, 100, 10) - 90.0 * 89.0 / (100.0 * 99.0)).abs() < 1e-14);
        assert_eq!(binomial_ratio(3, 10, 4), 0.0);
        assert_eq!(binomial_ratio(5, 10, 0), 1.0);
        // large arguments stay finite
        let r = binomial_ratio(900, 1000, 400);
        assert!(r.is_finite() && r > 0.0 && r < 1e-10);
    }

    #[test]
    fn individual_examples() {
        assert_eq!(expected_detections_individual(&snap(9, 0), 5).unwrap(), 0.0);
        assert!((expected_detections_individual(&snap(9, 1), 5).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(
            expected_detections_individual(&snap(0, 10), 3).unwrap(),
            3.0
        );
        assert_eq!(expected_detections_individual(&snap(0, 5), 3).unwrap(), 3.0);
        // beyond the lemma's regime the raw value exceeds λ̃
        assert!(
            (expected_detections_individual(&snap(1, 2), 10).unwrap() - 20.0 / 3.0).abs() < 1e-12
        );
        assert_eq!(
            expected_detections_individual(&PhaseSnapshot::new(0, 0, 4), 3),
            Err(Error::EmptyPopulation)
        );
    }

    #[test]
    fn dorfman_examples() {
        let e = expected_detections_dorfman(&snap(14, 2), 4).unwrap();
        assert_eq!(e.branch, DorfmanBranch::SingleGroup);
        assert_eq!(e.group_size, 8.0);
        assert!(!e.approximate);
        assert!((e.ratio - 3003.0 / 12870.0).abs() < 1e-14);
        let expected = 0.25 / (1.0 - 3003.0 / 12870.0);
        assert!((e.value - expected).abs() < 1e-12);
        assert!((e.value - 0.32609).abs() < 1e-5);

        let e = expected_detections_dorfman(&snap(2, 2), 2).unwrap();
        assert_eq!(e.branch, DorfmanBranch::SmallSusceptible);
        assert!((e.value - 0.5).abs() < 1e-15);

        assert_eq!(
            expected_detections_dorfman(&snap(20, 0), 4).unwrap().value,
            0.0
        );
        assert_eq!(
            expected_detections_dorfman(&snap(14, 2), 3),
            Err(Error::OddTestBudget(3))
        );
    }

    #[test]
    fn dorfman_flags() {
        // 15 people, T/2 = 2: C = 7.5 is not an integer
        let e = expected_detections_dorfman(&snap(13, 2), 4).unwrap();
        assert!(e.approximate);
        assert!(!e.lower_bound);
        // 20 people, T = 10: 20 < 25
        let e = expected_detections_dorfman(&snap(18, 2), 10).unwrap();
        assert!(e.lower_bound);
        // fewer people than pools
        let s = snap(1, 2);
        let e = expected_detections_dorfman(&s, 8).unwrap();
        assert!(e.capped(&s, 8) <= 2.0);
    }

    #[test]
    fn advantage_examples() {
        let a = advantage(&snap(98, 2), 20).unwrap();
        assert_eq!(a.group_size, 10.0);
        assert!((a.ratio - 0.809090909).abs() < 1e-8);
        assert!(a.dorfman_advantage);
        assert!((a.expected_dorfman - 0.2 / (1.0 - a.ratio)).abs() < 1e-12);
        assert!((a.expected_dorfman - 1.048).abs() < 1e-3);
        assert!((a.expected_individual - 0.4).abs() < 1e-15);

        let a = advantage(&snap(14, 2), 4).unwrap();
        assert!(!a.dorfman_advantage);
        assert!(a.expected_dorfman < a.expected_individual);

        let a = advantage(&snap(0, 12), 4).unwrap();
        assert_eq!(a.ratio, 0.0);
        assert!(!a.dorfman_advantage);

        assert!(!dorfman_advantage(&snap(30, 0), 6).unwrap());
    }

    #[test]
    fn p_prime_examples() {
        let s = snap(7, 3);
        assert!(
            (state_conditional_p_prime(PolicyKind::WeakIndividual, &s, 4)
                .unwrap()
                .value()
                - 0.6)
                .abs()
                < 1e-15
        );
        let s = PhaseSnapshot::new(900, 100, 0);
        assert!(
            (state_conditional_p_prime(PolicyKind::Individual, &s, 80)
                .unwrap()
                .value()
                - 0.92)
                .abs()
                < 1e-15
        );
        let s = snap(14, 2);
        let pp = state_conditional_p_prime(PolicyKind::Dorfman, &s, 4)
            .unwrap()
            .value();
        assert!((pp - (1.0 - 0.25 / (1.0 - 3003.0 / 12870.0) / 2.0)).abs() < 1e-12);
        assert!((pp - 0.83696).abs() < 1e-5);
        let s = PhaseSnapshot::new(6, 0, 4);
        assert!(
            (state_conditional_p_prime(PolicyKind::WeakDorfman, &s, 4)
                .unwrap()
                .value()
                - 0.8)
                .abs()
                < 1e-15
        );
    }

    #[test]
    fn p_prime_with_nothing_to_test() {
        let s = PhaseSnapshot::new(0, 0, 10);
        let pp = state_conditional_p_prime(PolicyKind::Individual, &s, 4).unwrap();
        assert_eq!(pp.value(), 1.0);
    }

    #[test]
    fn p_prime_after_control_is_zero() {
        let s = PhaseSnapshot::new(900, 0, 100);
        for kind in [PolicyKind::Individual, PolicyKind::Dorfman] {
            assert_eq!(
                state_conditional_p_prime(kind, &s, 80).unwrap().value(),
                0.0
            );
        }
        let weak = state_conditional_p_prime(PolicyKind::WeakIndividual, &s, 80).unwrap();
        assert!((weak.value() - 0.92).abs() < 1e-15);
    }
}
