//! Exact solvers for desk-scale instances.
//!
//! Power minimization and the fairness utilities are NP-hard in general, so
//! these oracles enumerate all `K^N` assignments and solve the convex
//! per-assignment subproblem for each one. The `N = K` power minimization is
//! solved in polynomial time as a min-cost perfect matching.

mod concave;
mod matching;
mod minrate;
mod search;

use serde::{Deserialize, Serialize};

use crate::clock::Stopwatch;
use crate::error::{Error, Result};
use crate::model::{
    bits, compute_rates, ensure_valid, Allocation, Matrix, Problem, RateVector, SystemInstance,
    Utility,
};
use crate::report::{OpCounters, SolveReport, Status};
use crate::sumrate::Assignment;
use crate::waterfill::{inverse_waterfill_capped, waterfill_capped, ChannelVector};

use concave::FairProblem;
use search::{search, Candidate, Prune};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExactOptions {
    /// Largest `K^N` the enumeration accepts.
    pub enumeration_limit: u64,
    /// Enumeration workers; results do not depend on this.
    pub threads: usize,
    /// Projected-gradient iteration cap per assignment.
    pub max_iterations: usize,
    /// Projected-gradient stationarity threshold.
    pub gradient_tolerance: f64,
}

impl Default for ExactOptions {
    fn default() -> Self {
        ExactOptions {
            enumeration_limit: 10_000_000,
            threads: 1,
            max_iterations: 100_000,
            gradient_tolerance: 1e-8,
        }
    }
}

fn check_limit(instance: &SystemInstance, limit: u64) -> Result<()> {
    let (k, n) = (instance.num_receivers(), instance.num_subcarriers());
    let count = u32::try_from(n)
        .ok()
        .and_then(|n| (k as u64).checked_pow(n));
    match count {
        Some(c) if c <= limit => Ok(()),
        _ => Err(Error::EnumerationLimit {
            receivers: k,
            subcarriers: n,
            limit,
        }),
    }
}

fn ratio_matrix(instance: &SystemInstance) -> Matrix {
    let (k_count, n_count) = (instance.num_receivers(), instance.num_subcarriers());
    let mut ratios = Matrix::zeros(k_count, n_count);
    for k in 0..k_count {
        for n in 0..n_count {
            ratios.set(k, n, instance.ratio(k, n));
        }
    }
    ratios
}

/// Splits an assignment into per-receiver subcarrier lists and channels.
fn receiver_channels(
    ratios: &Matrix,
    caps: &[f64],
    assignment: &[usize],
) -> (Vec<Vec<usize>>, Vec<ChannelVector>) {
    let mut members = vec![Vec::new(); ratios.rows()];
    for (n, &k) in assignment.iter().enumerate() {
        members[k].push(n);
    }
    let channels = members
        .iter()
        .enumerate()
        .map(|(k, set)| {
            ChannelVector::new(
                set.iter().map(|&n| ratios.get(k, n)).collect(),
                set.iter().map(|&n| caps[n]).collect(),
            )
            .expect("validated instance yields valid channels")
        })
        .collect();
    (members, channels)
}

fn finish(
    instance: &SystemInstance,
    status: Status,
    value: f64,
    assignment: Vec<usize>,
    powers: &[f64],
    explored: u64,
    clock: &Stopwatch,
) -> Result<SolveReport> {
    let allocation = Allocation::scatter(instance.num_receivers(), &assignment, powers);
    let rates = compute_rates(instance, &allocation)?;
    Ok(SolveReport {
        status,
        value,
        total_power: allocation.total_power(),
        allocation,
        assignment: Assignment::new(assignment),
        rates,
        assignments_explored: explored,
        counters: OpCounters::default(),
        elapsed: clock.seconds(),
    })
}

pub fn exact_min_total_power(instance: &SystemInstance) -> Result<SolveReport> {
    exact_min_total_power_with(instance, &ExactOptions::default())
}

/// Minimum total power meeting every rate target, by enumeration.
///
/// Each assignment decomposes into one inverse water-filling per receiver.
/// Branches where a receiver can no longer reach its target even with all
/// remaining subcarriers at their caps are pruned. Ties go to the
/// lexicographically smallest assignment.
pub fn exact_min_total_power_with(
    instance: &SystemInstance,
    options: &ExactOptions,
) -> Result<SolveReport> {
    ensure_valid(instance, Problem::MinPower)?;
    check_limit(instance, options.enumeration_limit)?;
    let clock = Stopwatch::start();
    let (k_count, n_count) = (instance.num_receivers(), instance.num_subcarriers());
    let targets = instance.rate_targets.as_deref().unwrap_or_default();
    let caps = &instance.subcarrier_caps;
    let ratios = ratio_matrix(instance);
    let mut cap_bits = Matrix::zeros(k_count, n_count);
    for k in 0..k_count {
        for (n, &cap) in caps.iter().enumerate() {
            cap_bits.set(k, n, bits(ratios.get(k, n) * cap));
        }
    }

    // Positive targets mean every receiver needs a subcarrier.
    let prune = Prune {
        targets: Some((&cap_bits, targets)),
        cover_all: true,
    };
    let outcome = search(
        k_count,
        n_count,
        options.threads,
        &prune,
        |assignment, best| {
            let (members, channels) = receiver_channels(&ratios, caps, assignment);
            let mut powers = vec![0.0; n_count];
            let mut total = 0.0;
            for ((set, channel), &target) in members.iter().zip(&channels).zip(targets) {
                let solved = inverse_waterfill_capped(channel, target).ok()?.solved()?;
                total += solved.total_power;
                if best.is_some_and(|b| total > b) {
                    return None;
                }
                for (&n, &p) in set.iter().zip(&solved.powers) {
                    powers[n] = p;
                }
            }
            Some(Candidate {
                score: total,
                data: powers,
            })
        },
    );

    match outcome.best {
        Some((assignment, candidate)) => finish(
            instance,
            Status::Optimal,
            candidate.score,
            assignment,
            &candidate.data,
            outcome.explored,
            &clock,
        ),
        None => {
            let mut report = SolveReport::infeasible(k_count, n_count, outcome.explored);
            report.elapsed = clock.seconds();
            Ok(report)
        }
    }
}

pub fn exact_max_utility(instance: &SystemInstance, kind: Utility) -> Result<SolveReport> {
    exact_max_utility_with(instance, kind, &ExactOptions::default())
}

struct UtilityLeaf {
    powers: Vec<f64>,
    hit_limit: bool,
}

/// Maximum utility under the total budget, by enumeration.
///
/// Per assignment: the mean rate uses capped water-filling, the minimum rate
/// uses [`minrate_max_bisection`], and the geometric and harmonic means use
/// projected gradient ascent. Assignments whose saturated-rate bound cannot
/// beat the incumbent are skipped.
pub fn exact_max_utility_with(
    instance: &SystemInstance,
    kind: Utility,
    options: &ExactOptions,
) -> Result<SolveReport> {
    ensure_valid(instance, Problem::MaxUtility)?;
    check_limit(instance, options.enumeration_limit)?;
    let clock = Stopwatch::start();
    let (k_count, n_count) = (instance.num_receivers(), instance.num_subcarriers());
    let budget = instance.total_budget.unwrap_or_default();
    let caps = &instance.subcarrier_caps;
    let ratios = ratio_matrix(instance);

    // An unserved receiver zeroes every utility except the mean.
    let prune = Prune {
        targets: None,
        cover_all: kind != Utility::SumRate,
    };
    let outcome = search(
        k_count,
        n_count,
        options.threads,
        &prune,
        |assignment, best| {
            let (members, channels) = receiver_channels(&ratios, caps, assignment);
            let assigned: Vec<f64> = assignment
                .iter()
                .enumerate()
                .map(|(n, &k)| ratios.get(k, n))
                .collect();
            let (value, leaf) = match kind {
                Utility::SumRate => {
                    let channel = ChannelVector::new(assigned, caps.clone()).ok()?;
                    let filled = waterfill_capped(&channel, budget).ok()?;
                    (
                        filled.value / k_count as f64,
                        UtilityLeaf {
                            powers: filled.powers,
                            hit_limit: false,
                        },
                    )
                }
                _ => {
                    let saturated = RateVector::new(
                        channels.iter().map(ChannelVector::saturated_rate).collect(),
                    );
                    let bound = crate::model::utility(&saturated, kind).ok()?;
                    if best.is_some_and(|b| -bound >= b) {
                        return None;
                    }
                    if kind == Utility::MinRate {
                        let sol = minrate::bisect(&members, &channels, n_count, budget);
                        (
                            sol.t_star,
                            UtilityLeaf {
                                powers: sol.powers,
                                hit_limit: false,
                            },
                        )
                    } else {
                        let sol = FairProblem {
                            ratios: &assigned,
                            serving: assignment,
                            caps,
                            budget,
                            receivers: k_count,
                            kind,
                        }
                        .solve(options.max_iterations, options.gradient_tolerance);
                        (
                            sol.value,
                            UtilityLeaf {
                                powers: sol.powers,
                                hit_limit: sol.hit_limit,
                            },
                        )
                    }
                }
            };
            Some(Candidate {
                score: -value,
                data: leaf,
            })
        },
    );

    let (assignment, value, leaf) = match outcome.best {
        Some((assignment, candidate)) => (assignment, -candidate.score, candidate.data),
        None => (
            vec![0; n_count],
            0.0,
            UtilityLeaf {
                powers: vec![0.0; n_count],
                hit_limit: false,
            },
        ),
    };
    let status = if leaf.hit_limit {
        Status::IterLimit
    } else {
        Status::Optimal
    };
    finish(
        instance,
        status,
        value,
        assignment,
        &leaf.powers,
        outcome.explored,
        &clock,
    )
}

/// Largest common rate `t*` reachable under the total budget with the given
/// assignment, within `1e-9` absolute, and an allocation attaining it.
///
/// A receiver without subcarriers forces `t* = 0`.
pub fn minrate_max_bisection(
    instance: &SystemInstance,
    assignment: &Assignment,
) -> Result<(f64, Allocation)> {
    ensure_valid(instance, Problem::MaxUtility)?;
    let (k_count, n_count) = (instance.num_receivers(), instance.num_subcarriers());
    assignment.check(k_count, n_count)?;
    let ratios = ratio_matrix(instance);
    let (members, channels) = receiver_channels(
        &ratios,
        &instance.subcarrier_caps,
        &assignment.serving_receiver,
    );
    let budget = instance.total_budget.unwrap_or_default();
    let sol = minrate::bisect(&members, &channels, n_count, budget);
    Ok((
        sol.t_star,
        Allocation::scatter(k_count, &assignment.serving_receiver, &sol.powers),
    ))
}

/// Power minimization when `N = K`, as a min-cost perfect matching.
///
/// With `N = K` and positive targets every receiver needs its own
/// subcarrier, and on a single subcarrier the cheapest power meeting `γ_k`
/// is `η (2^γ_k - 1) / α`. Pairs with zero gain or a required power above
/// the cap are forbidden.
pub fn min_power_matching(instance: &SystemInstance) -> Result<SolveReport> {
    ensure_valid(instance, Problem::MinPower)?;
    let (k_count, n_count) = (instance.num_receivers(), instance.num_subcarriers());
    if k_count != n_count {
        return Err(Error::NotSquare {
            receivers: k_count,
            subcarriers: n_count,
        });
    }
    let clock = Stopwatch::start();
    let targets = instance.rate_targets.as_deref().unwrap_or_default();

    let cost: Vec<Vec<f64>> = (0..k_count)
        .map(|k| {
            (0..n_count)
                .map(|n| {
                    let alpha = instance.gains.get(k, n);
                    if alpha <= 0.0 {
                        return f64::INFINITY;
                    }
                    let power = instance.noises.get(k, n)
                        * (targets[k] * std::f64::consts::LN_2).exp_m1()
                        / alpha;
                    if power > instance.subcarrier_caps[n] {
                        f64::INFINITY
                    } else {
                        power
                    }
                })
                .collect()
        })
        .collect();

    let max_finite = cost
        .iter()
        .flatten()
        .copied()
        .filter(|c| c.is_finite())
        .fold(0.0, f64::max);
    let sentinel = k_count as f64 * max_finite + 1.0;
    let bounded: Vec<Vec<f64>> = cost
        .iter()
        .map(|row| {
            row.iter()
                .map(|&c| if c.is_finite() { c } else { sentinel })
                .collect()
        })
        .collect();
    let row_to_col = matching::hungarian(&bounded);
    if row_to_col
        .iter()
        .enumerate()
        .any(|(k, &n)| !cost[k][n].is_finite())
    {
        let mut report = SolveReport::infeasible(k_count, n_count, 1);
        report.elapsed = clock.seconds();
        return Ok(report);
    }

    let mut serving = vec![0; n_count];
    let mut powers = vec![0.0; n_count];
    for (k, &n) in row_to_col.iter().enumerate() {
        serving[n] = k;
        powers[n] = cost[k][n];
    }
    let total: f64 = powers.iter().sum();
    finish(
        instance,
        Status::Optimal,
        total,
        serving,
        &powers,
        1,
        &clock,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::check_allocation;

    fn instance(gains: &[Vec<f64>], caps: Vec<f64>) -> SystemInstance {
        let g = Matrix::from_rows(gains).unwrap();
        SystemInstance {
            noises: Matrix::filled(g.rows(), g.cols(), 1.0),
            gains: g,
            subcarrier_caps: caps,
            total_budget: None,
            rate_targets: None,
        }
    }

    #[test]
    fn matching_two_by_two() {
        let mut inst = instance(&[vec![1.0, 2.0], vec![2.0, 1.0]], vec![10.0, 10.0]);
        inst.rate_targets = Some(vec![1.0, 1.0]);
        let report = min_power_matching(&inst).unwrap();
        assert_eq!(report.status, Status::Optimal);
        assert_eq!(report.assignment.serving_receiver, vec![1, 0]);
        assert!((report.value - 1.0).abs() < 1e-15);
        let exact = exact_min_total_power(&inst).unwrap();
        assert!((exact.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn matching_single_pair() {
        let mut inst = instance(&[vec![1.0]], vec![10.0]);
        inst.rate_targets = Some(vec![1.0]);
        let report = min_power_matching(&inst).unwrap();
        assert_eq!(report.value, 1.0);
    }

    #[test]
    fn matching_zero_row_is_infeasible() {
        let mut inst = instance(&[vec![0.0, 0.0], vec![2.0, 1.0]], vec![10.0, 10.0]);
        inst.rate_targets = Some(vec![1.0, 1.0]);
        assert_eq!(
            min_power_matching(&inst).unwrap().status,
            Status::Infeasible
        );
        assert_eq!(
            exact_min_total_power(&inst).unwrap().status,
            Status::Infeasible
        );
    }

    #[test]
    fn matching_respects_caps() {
        // Receiver 0 needs power 3 on subcarrier 0 and 1.5 on subcarrier 1; cap 2 forbids the first.
        let mut inst = instance(&[vec![1.0, 2.0], vec![4.0, 4.0]], vec![2.0, 2.0]);
        inst.rate_targets = Some(vec![2.0, 1.0]);
        let report = min_power_matching(&inst).unwrap();
        assert_eq!(report.assignment.serving_receiver, vec![1, 0]);
        assert!((report.value - 1.75).abs() < 1e-15);
    }

    #[test]
    fn matching_requires_square() {
        let mut inst = instance(&[vec![1.0, 1.0]], vec![1.0, 1.0]);
        inst.rate_targets = Some(vec![1.0]);
        assert!(matches!(
            min_power_matching(&inst),
            Err(Error::NotSquare { .. })
        ));
    }

    #[test]
    fn single_receiver_min_power_is_inverse_waterfill() {
        let mut inst = instance(&[vec![1.0, 3.0]], vec![10.0, 10.0]);
        inst.rate_targets = Some(vec![(25.0f64 / 3.0).log2()]);
        let report = exact_min_total_power(&inst).unwrap();
        assert!((report.value - 2.0).abs() < 1e-12);
        assert_eq!(report.assignments_explored, 1);
    }

    #[test]
    fn enumeration_limit_is_enforced() {
        let mut inst = instance(&[vec![1.0; 30], vec![1.0; 30]], vec![1.0; 30]);
        inst.rate_targets = Some(vec![1.0, 1.0]);
        assert!(matches!(
            exact_min_total_power(&inst),
            Err(Error::EnumerationLimit { .. })
        ));
        inst.total_budget = Some(1.0);
        assert!(matches!(
            exact_max_utility(&inst, Utility::MinRate),
            Err(Error::EnumerationLimit { .. })
        ));
    }

    #[test]
    fn symmetric_pair_min_rate_splits_subcarriers() {
        let mut inst = instance(&[vec![1.0, 1.0], vec![1.0, 1.0]], vec![10.0, 10.0]);
        inst.total_budget = Some(2.0);
        let report = exact_max_utility(&inst, Utility::MinRate).unwrap();
        assert_eq!(report.assignment.serving_receiver, vec![0, 1]);
        assert!((report.value - 1.0).abs() < 1e-9);
        assert!((report.rates.rates[0] - report.rates.rates[1]).abs() < 1e-9);
    }

    #[test]
    fn bisection_two_receivers_one_subcarrier_each() {
        let mut inst = instance(&[vec![1.0, 1.0], vec![1.0, 1.0]], vec![10.0, 10.0]);
        inst.total_budget = Some(2.0);
        let (t, alloc) = minrate_max_bisection(&inst, &Assignment::new(vec![0, 1])).unwrap();
        assert!((t - 1.0).abs() < 1e-9);
        assert!((alloc.get(0, 0) - 1.0).abs() < 1e-8);
        assert!((alloc.get(1, 1) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn bisection_with_unserved_receiver_is_zero() {
        let mut inst = instance(&[vec![1.0, 1.0], vec![1.0, 1.0]], vec![10.0, 10.0]);
        inst.total_budget = Some(2.0);
        let (t, alloc) = minrate_max_bisection(&inst, &Assignment::new(vec![0, 0])).unwrap();
        assert_eq!(t, 0.0);
        assert_eq!(alloc.total_power(), 0.0);
    }

    #[test]
    fn single_receiver_utilities_coincide() {
        let mut inst = instance(&[vec![0.7, 2.5, 1.1]], vec![1.0, 0.8, 2.0]);
        inst.total_budget = Some(1.7);
        let reference = crate::sumrate::solve_sumrate(&inst).unwrap().value;
        for kind in Utility::ALL {
            let report = exact_max_utility(&inst, kind).unwrap();
            assert_eq!(report.status, Status::Optimal);
            assert!((report.value - reference).abs() < 1e-8, "{kind}");
            let check = check_allocation(&inst, &report.allocation, 1e-9).unwrap();
            assert!(check.all_ok());
        }
    }

    #[test]
    fn thread_count_does_not_change_result() {
        let mut inst = instance(
            &[
                vec![0.5, 1.5, 0.2, 1.0, 0.9],
                vec![1.1, 0.4, 0.8, 0.6, 1.3],
                vec![0.3, 0.9, 1.4, 0.7, 0.2],
            ],
            vec![1.0, 2.0, 1.5, 0.7, 1.2],
        );
        inst.rate_targets = Some(vec![0.8, 0.6, 0.9]);
        inst.total_budget = Some(3.0);
        let serial = ExactOptions::default();
        let parallel = ExactOptions {
            threads: 3,
            ..serial
        };
        let a = exact_min_total_power_with(&inst, &serial).unwrap();
        let b = exact_min_total_power_with(&inst, &parallel).unwrap();
        assert_eq!(a.assignment, b.assignment);
        assert_eq!(a.value, b.value);
        assert_eq!(a.assignments_explored, b.assignments_explored);
        for kind in [Utility::MinRate, Utility::ProportionalFair] {
            let a = exact_max_utility_with(&inst, kind, &serial).unwrap();
            let b = exact_max_utility_with(&inst, kind, &parallel).unwrap();
            assert_eq!(a.assignment, b.assignment);
            assert_eq!(a.value, b.value);
            assert_eq!(a.assignments_explored, b.assignments_explored);
        }
    }
}
