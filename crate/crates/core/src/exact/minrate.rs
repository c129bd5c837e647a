//! Max-min rate for a fixed assignment by bisection on the common target.
//!
//! `feasible(t)` holds when the per-receiver minimum powers for target `t`
//! fit in the budget. Those powers grow with `t`, so feasibility is monotone.

use crate::waterfill::{inverse_waterfill_capped, ChannelVector};

pub(crate) const TOLERANCE: f64 = 1e-9;

pub(crate) struct MinRateSolution {
    pub t_star: f64,
    /// Power on each subcarrier, indexed like the full subcarrier set.
    pub powers: Vec<f64>,
}

/// `members[k]` lists the subcarriers of receiver `k`; `channels[k]` holds
/// their ratios and caps in the same order.
pub(crate) fn bisect(
    members: &[Vec<usize>],
    channels: &[ChannelVector],
    subcarriers: usize,
    budget: f64,
) -> MinRateSolution {
    let zero = || MinRateSolution {
        t_star: 0.0,
        powers: vec![0.0; subcarriers],
    };
    if members.iter().any(Vec::is_empty) {
        return zero();
    }
    let upper = channels
        .iter()
        .map(ChannelVector::saturated_rate)
        .fold(f64::INFINITY, f64::min);
    if upper.is_nan() || upper <= 0.0 {
        return zero();
    }

    let powers_for = |t: f64| -> Option<Vec<f64>> {
        let mut powers = vec![0.0; subcarriers];
        let mut total = 0.0;
        for (set, channel) in members.iter().zip(channels) {
            let solved = inverse_waterfill_capped(channel, t).ok()?.solved()?;
            total += solved.total_power;
            if total > budget {
                return None;
            }
            for (&n, &p) in set.iter().zip(&solved.powers) {
                powers[n] = p;
            }
        }
        Some(powers)
    };

    if let Some(powers) = powers_for(upper) {
        return MinRateSolution {
            t_star: upper,
            powers,
        };
    }
    let mut best = zero();
    let mut hi = upper;
    while hi - best.t_star > TOLERANCE {
        let mid = 0.5 * (best.t_star + hi);
        match powers_for(mid) {
            Some(powers) => {
                best = MinRateSolution {
                    t_star: mid,
                    powers,
                }
            }
            None => hi = mid,
        }
    }
    best
}
