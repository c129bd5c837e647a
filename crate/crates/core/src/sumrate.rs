//! Two-stage polynomial-time solver for sum-rate maximization.
//!
//! Stage one gives each subcarrier to the receiver with the largest
//! gain-to-noise ratio; stage two water-fills the total budget over the
//! resulting single-user channel. Any OFDMA-feasible allocation is dominated
//! term by term once every subcarrier uses its best ratio, and the capped
//! water-filling is optimal for that channel, so the result is globally
//! optimal in `O(NK + N log N)`.

use serde::{Deserialize, Serialize};

use crate::clock::Stopwatch;
use crate::error::{Error, Result};
use crate::model::{bits, ensure_valid, Allocation, Problem, RateVector, SystemInstance};
use crate::report::{OpCounters, SolveReport, Status};
use crate::waterfill::{waterfill_capped, ChannelVector};

/// Serving receiver of every subcarrier.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Assignment {
    pub serving_receiver: Vec<usize>,
}

impl Assignment {
    pub fn new(serving_receiver: Vec<usize>) -> Self {
        Assignment { serving_receiver }
    }

    pub fn len(&self) -> usize {
        self.serving_receiver.len()
    }

    pub fn is_empty(&self) -> bool {
        self.serving_receiver.is_empty()
    }

    /// Subcarriers served by `receiver`, ascending.
    pub fn subcarriers_of(&self, receiver: usize) -> Vec<usize> {
        self.serving_receiver
            .iter()
            .enumerate()
            .filter(|&(_, &k)| k == receiver)
            .map(|(n, _)| n)
            .collect()
    }

    pub(crate) fn check(&self, receivers: usize, subcarriers: usize) -> Result<()> {
        if self.len() != subcarriers {
            return Err(Error::Dimension(format!(
                "assignment covers {} subcarriers, instance has {subcarriers}",
                self.len()
            )));
        }
        if let Some(&k) = self.serving_receiver.iter().find(|&&k| k >= receivers) {
            return Err(Error::Dimension(format!(
                "assignment names receiver {k}, instance has {receivers}"
            )));
        }
        Ok(())
    }
}

/// Best ratio per subcarrier, smallest receiver index on ties.
///
/// Scans row by row so the `K x N` matrices stream through memory.
fn best_ratios(instance: &SystemInstance) -> (Vec<usize>, Vec<f64>) {
    let n_count = instance.num_subcarriers();
    let mut serving = vec![0usize; n_count];
    let mut best = vec![f64::NEG_INFINITY; n_count];
    for k in 0..instance.num_receivers() {
        let gains = instance.gains.row(k);
        let noises = instance.noises.row(k);
        for n in 0..n_count {
            let ratio = gains[n] / noises[n];
            if ratio > best[n] {
                best[n] = ratio;
                serving[n] = k;
            }
        }
    }
    (serving, best)
}

/// `π(n) = argmax_k α_k^n / η_k^n`.
pub fn best_receiver_assignment(instance: &SystemInstance) -> Assignment {
    Assignment::new(best_ratios(instance).0)
}

/// Globally optimal sum-rate allocation under the total budget.
///
/// `value` is the mean rate `(1/K) Σ R_k`. With a single receiver all four
/// utilities coincide, so this also solves the other utilities when `K = 1`.
pub fn solve_sumrate(instance: &SystemInstance) -> Result<SolveReport> {
    ensure_valid(instance, Problem::MaxUtility)?;
    let clock = Stopwatch::start();
    let (k_count, n_count) = (instance.num_receivers(), instance.num_subcarriers());
    let budget = instance
        .total_budget
        .ok_or(Error::NonPositiveBudget(f64::NAN))?;

    let (serving, ratios) = best_ratios(instance);
    let channel = ChannelVector::new(ratios, instance.subcarrier_caps.clone())?;
    let filled = waterfill_capped(&channel, budget)?;

    let mut rates = vec![0.0; k_count];
    for (n, &k) in serving.iter().enumerate() {
        rates[k] += bits(channel.gains()[n] * filled.powers[n]);
    }
    let allocation = Allocation::scatter(k_count, &serving, &filled.powers);
    let active = channel.gains().iter().filter(|&&g| g > 0.0).count() as u64;

    Ok(SolveReport {
        status: Status::Optimal,
        value: rates.iter().sum::<f64>() / k_count as f64,
        allocation,
        assignment: Assignment::new(serving),
        rates: RateVector::new(rates),
        total_power: filled.total_power,
        assignments_explored: 1,
        counters: OpCounters {
            ratio_comparisons: (k_count * n_count) as u64,
            breakpoints: 2 * active,
        },
        elapsed: clock.seconds(),
    })
}
