//! Independent oracles shared by the integration tests. None of these call
//! the solvers they check.

#![allow(dead_code)]

use ofdma_alloc::{Matrix, SystemInstance};
use rand::Rng;

pub fn log2_1p(x: f64) -> f64 {
    x.ln_1p() / std::f64::consts::LN_2
}

/// Capped water-filling by bisection on the level: maximizes
/// `Σ log2(1 + g p)` s.t. `Σ p ≤ budget`, `0 ≤ p ≤ cap`. Returns `(value, powers)`.
pub fn bisection_waterfill(gains: &[f64], caps: &[f64], budget: f64) -> (f64, Vec<f64>) {
    let powers_at = |level: f64| -> Vec<f64> {
        gains
            .iter()
            .zip(caps)
            .map(|(&g, &c)| {
                if g > 0.0 {
                    (level - 1.0 / g).clamp(0.0, c)
                } else {
                    0.0
                }
            })
            .collect()
    };
    let top = gains
        .iter()
        .zip(caps)
        .filter(|(g, _)| **g > 0.0)
        .map(|(g, c)| 1.0 / g + c)
        .fold(0.0, f64::max);
    let full = powers_at(top);
    let powers = if full.iter().sum::<f64>() <= budget {
        full
    } else {
        let (mut lo, mut hi) = (0.0, top);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if powers_at(mid).iter().sum::<f64>() > budget {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        powers_at(lo)
    };
    let value = gains
        .iter()
        .zip(&powers)
        .map(|(&g, &p)| log2_1p(g * p))
        .sum();
    (value, powers)
}

/// Exhaustive sum-rate optimum: every `K^N` assignment, water-filled by
/// bisection. Returns the mean rate.
pub fn exhaustive_sumrate(instance: &SystemInstance) -> f64 {
    let k = instance.num_receivers();
    let n = instance.num_subcarriers();
    let budget = instance.total_budget.unwrap();
    let mut assignment = vec![0usize; n];
    let mut best = f64::NEG_INFINITY;
    loop {
        let gains: Vec<f64> = (0..n)
            .map(|j| instance.gains.get(assignment[j], j) / instance.noises.get(assignment[j], j))
            .collect();
        let (value, _) = bisection_waterfill(&gains, &instance.subcarrier_caps, budget);
        best = best.max(value);
        // Odometer increment.
        let mut pos = 0;
        loop {
            if pos == n {
                return best / k as f64;
            }
            assignment[pos] += 1;
            if assignment[pos] < k {
                break;
            }
            assignment[pos] = 0;
            pos += 1;
        }
    }
}

pub fn instance_from(
    gains: Vec<f64>,
    noises: Vec<f64>,
    k: usize,
    n: usize,
    caps: Vec<f64>,
) -> SystemInstance {
    SystemInstance {
        gains: Matrix::from_vec(k, n, gains).unwrap(),
        noises: Matrix::from_vec(k, n, noises).unwrap(),
        subcarrier_caps: caps,
        total_budget: None,
        rate_targets: None,
    }
}

/// Random instance with exponential gains, uniform noises and caps.
pub fn random_instance<R: Rng>(rng: &mut R, k: usize, n: usize) -> SystemInstance {
    let gains = (0..k * n).map(|_| exp1(rng)).collect();
    let noises = (0..k * n).map(|_| rng.random_range(0.5..2.0)).collect();
    let caps = (0..n).map(|_| rng.random_range(0.1..3.0)).collect();
    instance_from(gains, noises, k, n, caps)
}

pub fn exp1<R: Rng>(rng: &mut R) -> f64 {
    -(1.0 - rng.random::<f64>()).ln()
}

/// Every nondecreasing 3-partition instance with `K` groups, bound `B`, and
/// items at most `max_item`.
pub fn partition_instances(groups: usize, bound: u64, max_item: u64) -> Vec<Vec<u64>> {
    let lo = bound / 4 + 1;
    let hi = ((bound - 1) / 2).min(max_item);
    let len = 3 * groups;
    let total = groups as u64 * bound;
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(len);
    fn rec(
        lo: u64,
        hi: u64,
        len: usize,
        remaining: u64,
        current: &mut Vec<u64>,
        out: &mut Vec<Vec<u64>>,
    ) {
        let left = len - current.len();
        if left == 0 {
            if remaining == 0 {
                out.push(current.clone());
            }
            return;
        }
        let start = current.last().copied().unwrap_or(lo).max(lo);
        for a in start..=hi {
            if a * left as u64 > remaining {
                break;
            }
            if hi * (left as u64) < remaining {
                break;
            }
            current.push(a);
            rec(lo, hi, len, remaining - a, current, out);
            current.pop();
        }
    }
    if lo <= hi {
        rec(lo, hi, len, total, &mut current, &mut out);
    }
    out
}
