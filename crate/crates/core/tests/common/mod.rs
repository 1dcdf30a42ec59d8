//! Brute-force expectation oracles in exact rational arithmetic.
//!
//! Everything here enumerates equally likely outcomes directly and shares
//! no code with the library's formulas.

#![allow(dead_code)]

use num_rational::Ratio;

pub type Q = Ratio<i128>;

pub fn to_f64(q: Q) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

/// Calls `visit` with every `k`-subset of `0..n` in lexicographic order.
pub fn for_each_subset(n: usize, k: usize, visit: &mut dyn FnMut(&[usize])) {
    fn rec(
        start: usize,
        n: usize,
        k: usize,
        cur: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[usize]),
    ) {
        if cur.len() == k {
            visit(cur);
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, visit);
            cur.pop();
        }
    }
    rec(0, n, k, &mut Vec::with_capacity(k), visit);
}

/// Average number of infected among a uniform `k`-subset of a group with
/// `infected` infected members out of `size`.
fn subset_mean(size: usize, infected: usize, k: usize) -> Q {
    let (mut total, mut count) = (0i128, 0i128);
    for_each_subset(size, k, &mut |s| {
        total += s.iter().filter(|&&i| i < infected).count() as i128;
        count += 1;
    });
    Q::new(total, count)
}

/// Expected infected among `tests` individuals drawn uniformly from
/// `alpha + lambda` people, by enumerating every subset.
pub fn individual_detections(alpha: usize, lambda: usize, tests: usize) -> Q {
    subset_mean(alpha + lambda, lambda, tests.min(alpha + lambda))
}

/// Expected infected among `tests/2` individuals drawn from a uniform
/// group of `c = 2m/tests` people, conditioned on the group holding at
/// least one infection. Requires `c` to be an integer.
pub fn conditioned_group_detections(alpha: usize, lambda: usize, tests: usize) -> Q {
    let m = alpha + lambda;
    let half = tests / 2;
    assert_eq!(m % half, 0, "group size must be integral");
    let c = m / half;
    let (mut total, mut count) = (Q::from_integer(0), 0i128);
    for_each_subset(m, c, &mut |group| {
        let k = group.iter().filter(|&&i| i < lambda).count();
        if k > 0 {
            total += subset_mean(c, k, half.min(c));
            count += 1;
        }
    });
    if count == 0 {
        return Q::from_integer(0);
    }
    total / Q::from_integer(count)
}

/// Block sizes of a shuffled list of `m` people split into `groups` pools.
pub fn block_sizes(m: usize, groups: usize) -> Vec<usize> {
    let base = m / groups;
    let larger = m % groups;
    (0..groups)
        .map(|g| if g < groups - larger { base } else { base + 1 })
        .filter(|&s| s > 0)
        .collect()
}

/// Expected detections of the full Dorfman protocol: uniform partition,
/// pooled tests, then positive groups drawn uniformly without replacement
/// and tested individually until `tests/2` individual tests are spent.
///
/// A uniform shuffle places the infected on a uniform `lambda`-subset of
/// the shuffled positions, so enumerating those subsets covers every
/// partition with its exact weight.
pub fn dorfman_protocol_detections(alpha: usize, lambda: usize, tests: usize) -> Q {
    let m = alpha + lambda;
    let half = tests / 2;
    let sizes = block_sizes(m, half);
    let starts: Vec<usize> = sizes
        .iter()
        .scan(0, |acc, s| {
            let start = *acc;
            *acc += s;
            Some(start)
        })
        .collect();
    let (mut total, mut count) = (Q::from_integer(0), 0i128);
    for_each_subset(m, lambda, &mut |positions| {
        let infected: Vec<usize> = starts
            .iter()
            .zip(&sizes)
            .map(|(&st, &sz)| {
                positions
                    .iter()
                    .filter(|&&p| p >= st && p < st + sz)
                    .count()
            })
            .collect();
        let positive: Vec<(usize, usize)> = sizes
            .iter()
            .zip(&infected)
            .filter(|(_, &k)| k > 0)
            .map(|(&s, &k)| (s, k))
            .collect();
        total += selection_value(&positive, half);
        count += 1;
    });
    total / Q::from_integer(count)
}

/// Expected infected found when groups `(size, infected)` are drawn
/// uniformly one after another until `budget` individual tests are spent.
fn selection_value(groups: &[(usize, usize)], budget: usize) -> Q {
    if budget == 0 || groups.is_empty() {
        return Q::from_integer(0);
    }
    let mut acc = Q::from_integer(0);
    for (i, &(size, k)) in groups.iter().enumerate() {
        let value = if size <= budget {
            let rest: Vec<_> = groups
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, g)| *g)
                .collect();
            Q::from_integer(k as i128) + selection_value(&rest, budget - size)
        } else {
            subset_mean(size, k, budget)
        };
        acc += value;
    }
    acc / Q::from_integer(groups.len() as i128)
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    (a - b).abs() / a.abs().max(b.abs())
}
