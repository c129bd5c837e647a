mod common;

use ofdma_alloc::reduction::ThreePartitionInstance;
use ofdma_alloc::{
    certificate_to_allocation, check_allocation, compute_rates, decode_partition, encode,
    exact_max_utility, exact_min_total_power, inverse_waterfill_capped, solve_sumrate, utility,
    waterfill_capped, Allocation, ChannelVector, Decoded, Partition, RateVector, Status, Utility,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn channel_strategy() -> impl Strategy<Value = ChannelVector> {
    (1usize..12).prop_flat_map(|m| {
        (
            prop::collection::vec(prop_oneof![1 => Just(0.0), 6 => 0.01f64..20.0], m),
            prop::collection::vec(0.05f64..5.0, m),
        )
            .prop_map(|(g, c)| ChannelVector::new(g, c).unwrap())
    })
}

fn kkt_holds(channel: &ChannelVector, powers: &[f64], level: f64) -> bool {
    channel
        .gains()
        .iter()
        .zip(channel.caps())
        .zip(powers)
        .all(|((&g, &c), &p)| {
            if g == 0.0 {
                return p == 0.0;
            }
            p >= 0.0
                && p <= c
                && (p == 0.0 || p == c || (1.0 / g + p - level).abs() <= 1e-9 * level.max(1.0))
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn raising_one_power_only_helps_its_receiver(seed in any::<u64>(), k in 1usize..4, extra in 1usize..4, bump in 0.0f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = k + extra;
        let inst = common::random_instance(&mut rng, k, n);
        let rows: Vec<Vec<f64>> = (0..k).map(|_| (0..n).map(|_| rng.random_range(0.0..1.0)).collect()).collect();
        let alloc = Allocation::from_rows(&rows).unwrap();
        let (kk, nn) = (rng.random_range(0..k), rng.random_range(0..n));
        let mut bumped = alloc.clone();
        bumped.powers.set(kk, nn, alloc.get(kk, nn) + bump);
        let before = compute_rates(&inst, &alloc).unwrap();
        let after = compute_rates(&inst, &bumped).unwrap();
        for j in 0..k {
            if j == kk {
                prop_assert!(after.rates[j] >= before.rates[j]);
            } else {
                prop_assert_eq!(after.rates[j], before.rates[j]);
            }
        }
    }

    #[test]
    fn rates_invariant_under_receiver_scaling(seed in any::<u64>(), scale in 1e-3f64..1e3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = common::random_instance(&mut rng, 2, 4);
        let rows: Vec<Vec<f64>> = (0..2).map(|_| (0..4).map(|_| rng.random_range(0.0..1.0)).collect()).collect();
        let alloc = Allocation::from_rows(&rows).unwrap();
        let mut scaled = inst.clone();
        for n in 0..4 {
            scaled.gains.set(1, n, inst.gains.get(1, n) * scale);
            scaled.noises.set(1, n, inst.noises.get(1, n) * scale);
        }
        let a = compute_rates(&inst, &alloc).unwrap();
        let b = compute_rates(&scaled, &alloc).unwrap();
        for (x, y) in a.rates.iter().zip(&b.rates) {
            prop_assert!((x - y).abs() <= 1e-12 * x.max(1.0));
        }
    }

    #[test]
    fn utility_chain(rates in prop::collection::vec(prop_oneof![1 => Just(0.0), 8 => 0.0f64..50.0], 1..10)) {
        let r = RateVector::new(rates.clone());
        let h: Vec<f64> = Utility::ALL.iter().map(|&u| utility(&r, u).unwrap()).collect();
        let scale = h[0].max(1.0);
        prop_assert!(h[3] <= h[2] + 1e-12 * scale);
        prop_assert!(h[2] <= h[1] + 1e-12 * scale);
        prop_assert!(h[1] <= h[0] + 1e-12 * scale);
    }

    #[test]
    fn waterfill_kkt_and_budget(channel in channel_strategy(), budget in 0.01f64..20.0) {
        let r = waterfill_capped(&channel, budget).unwrap();
        prop_assert!(kkt_holds(&channel, &r.powers, r.water_level));
        let usable: f64 = channel.gains().iter().zip(channel.caps()).filter(|(g, _)| **g > 0.0).map(|(_, c)| c).sum();
        if usable <= budget {
            prop_assert!(r.total_power <= budget);
        } else {
            prop_assert!((r.total_power - budget).abs() <= 1e-10 * budget);
        }
    }

    #[test]
    fn waterfill_matches_bisection_oracle(channel in channel_strategy(), budget in 0.01f64..20.0) {
        let r = waterfill_capped(&channel, budget).unwrap();
        let (oracle, _) = common::bisection_waterfill(channel.gains(), channel.caps(), budget);
        prop_assert!((r.value - oracle).abs() <= 1e-9 * oracle.max(1.0));
    }

    #[test]
    fn waterfill_is_permutation_invariant(channel in channel_strategy(), budget in 0.01f64..20.0, seed in any::<u64>()) {
        let m = channel.len();
        let mut order: Vec<usize> = (0..m).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in (1..m).rev() {
            order.swap(i, rng.random_range(0..=i));
        }
        let permuted = ChannelVector::new(
            order.iter().map(|&i| channel.gains()[i]).collect(),
            order.iter().map(|&i| channel.caps()[i]).collect(),
        ).unwrap();
        let a = waterfill_capped(&channel, budget).unwrap();
        let b = waterfill_capped(&permuted, budget).unwrap();
        for (j, &i) in order.iter().enumerate() {
            prop_assert!((b.powers[j] - a.powers[i]).abs() <= 1e-12 * budget.max(1.0));
        }
    }

    #[test]
    fn waterfill_value_is_monotone_and_concave(channel in channel_strategy(), lo in 0.01f64..10.0, width in 0.01f64..10.0) {
        let hi = lo + width;
        let mid = 0.5 * (lo + hi);
        let v = |b| waterfill_capped(&channel, b).unwrap().value;
        let (a, m, c) = (v(lo), v(mid), v(hi));
        prop_assert!(a <= m + 1e-12 && m <= c + 1e-12);
        prop_assert!(m >= 0.5 * (a + c) - 1e-10);
    }

    #[test]
    fn inverse_undoes_forward(channel in channel_strategy(), fraction in 0.05f64..0.95) {
        let usable: f64 = channel.gains().iter().zip(channel.caps()).filter(|(g, _)| **g > 0.0).map(|(_, c)| c).sum();
        prop_assume!(usable > 0.0);
        let budget = fraction * usable;
        let forward = waterfill_capped(&channel, budget).unwrap();
        let inverse = inverse_waterfill_capped(&channel, forward.value).unwrap().solved().unwrap();
        prop_assert!((inverse.total_power - budget).abs() <= 1e-8 * budget);
        prop_assert!((inverse.value - forward.value).abs() <= 1e-10 * forward.value.max(1.0));
        prop_assert!(kkt_holds(&channel, &inverse.powers, inverse.water_level));
    }

    #[test]
    fn sumrate_output_is_feasible_and_invariant_under_scaling(seed in any::<u64>(), k in 1usize..5, extra in 0usize..6, scale in 1e-2f64..1e2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = k + extra;
        let mut inst = common::random_instance(&mut rng, k, n);
        inst.total_budget = Some(rng.random_range(0.2..6.0));
        let report = solve_sumrate(&inst).unwrap();
        let check = check_allocation(&inst, &report.allocation, 1e-12 * inst.max_cap()).unwrap();
        prop_assert!(check.ofdma_ok && check.caps_ok && check.budget_ok == Some(true));

        let row = rng.random_range(0..k);
        let mut scaled = inst.clone();
        for j in 0..n {
            scaled.gains.set(row, j, inst.gains.get(row, j) * scale);
            scaled.noises.set(row, j, inst.noises.get(row, j) * scale);
        }
        let other = solve_sumrate(&scaled).unwrap();
        prop_assert_eq!(&other.assignment, &report.assignment);
        prop_assert!((other.value - report.value).abs() <= 1e-12 * report.value.max(1.0));
    }

    #[test]
    fn min_power_is_monotone_in_targets(seed in any::<u64>(), k in 1usize..3, extra in 0usize..3, raise in 0.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = k + extra;
        let mut inst = common::random_instance(&mut rng, k, n);
        inst.rate_targets = Some((0..k).map(|_| rng.random_range(0.1..1.5)).collect());
        let base = exact_min_total_power(&inst).unwrap();
        let mut harder = inst.clone();
        let who = rng.random_range(0..k);
        harder.rate_targets.as_mut().unwrap()[who] += raise;
        let raised = exact_min_total_power(&harder).unwrap();
        match (base.status, raised.status) {
            (Status::Optimal, Status::Optimal) => prop_assert!(raised.value >= base.value - 1e-12 * base.value),
            (Status::Infeasible, s) => prop_assert_eq!(s, Status::Infeasible),
            _ => {}
        }
    }

    #[test]
    fn exact_optima_follow_utility_chain(seed in any::<u64>(), k in 1usize..4, extra in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = k + extra;
        let mut inst = common::random_instance(&mut rng, k, n);
        inst.total_budget = Some(rng.random_range(0.2..4.0));
        let h4 = exact_max_utility(&inst, Utility::MinRate).unwrap();
        let h3 = exact_max_utility(&inst, Utility::HarmonicMean).unwrap();
        let h2 = exact_max_utility(&inst, Utility::ProportionalFair).unwrap();
        let h1 = solve_sumrate(&inst).unwrap();
        prop_assert_eq!(h2.status, Status::Optimal);
        prop_assert_eq!(h3.status, Status::Optimal);
        prop_assert!(h4.value <= h3.value + 1e-7);
        prop_assert!(h3.value <= h2.value + 1e-7);
        prop_assert!(h2.value <= h1.value + 1e-9);
        for report in [&h4, &h3, &h2] {
            let check = check_allocation(&inst, &report.allocation, 1e-9).unwrap();
            prop_assert!(check.all_ok(), "{:?}", check);
        }
    }

    #[test]
    fn exact_reports_are_deterministic(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut inst = common::random_instance(&mut rng, 2, 4);
        inst.total_budget = Some(2.0);
        inst.rate_targets = Some(vec![0.7, 0.9]);
        let a = exact_max_utility(&inst, Utility::ProportionalFair).unwrap();
        let b = exact_max_utility(&inst, Utility::ProportionalFair).unwrap();
        prop_assert_eq!((a.value, a.assignment, a.allocation), (b.value, b.assignment, b.allocation));
        let a = exact_min_total_power(&inst).unwrap();
        let b = exact_min_total_power(&inst).unwrap();
        prop_assert_eq!((a.value, a.assignment), (b.value, b.assignment));
    }

    #[test]
    fn partition_round_trip_and_rate_identity(seed in any::<u64>(), k in 1usize..5, bound in 40u64..60) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut order: Vec<usize> = (0..3 * k).collect();
        for i in (1..order.len()).rev() {
            order.swap(i, rng.random_range(0..=i));
        }
        let groups: Vec<Vec<usize>> = order.chunks(3).map(<[usize]>::to_vec).collect();
        let (lo, hi) = (bound / 4 + 1, (bound - 1) / 2);
        let mut items = vec![0u64; 3 * k];
        for group in &groups {
            // Draw a triple summing to B with every entry strictly inside (B/4, B/2).
            loop {
                let a = rng.random_range(lo..=hi);
                let b = rng.random_range(lo..=hi);
                let Some(c) = bound.checked_sub(a + b) else { continue };
                if (lo..=hi).contains(&c) {
                    items[group[0]] = a;
                    items[group[1]] = b;
                    items[group[2]] = c;
                    break;
                }
            }
        }
        let partition = Partition::new(groups).unwrap();
        let tpi = ThreePartitionInstance::new(items, bound, k).unwrap();
        prop_assert!(partition.is_certificate(&tpi));
        let alloc = certificate_to_allocation(&tpi, &partition).unwrap();
        prop_assert_eq!(decode_partition(&alloc, 1e-6).unwrap(), Decoded::Partition(partition.clone()));
        let rates = compute_rates(&encode(&tpi).unwrap(), &alloc).unwrap();
        for r in &rates.rates {
            prop_assert_eq!(*r, bound as f64);
        }
    }
}

#[test]
fn sumrate_dominates_random_feasible_allocations() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..10 {
        let mut inst = common::random_instance(&mut rng, 3, 6);
        let budget = rng.random_range(0.5..5.0);
        inst.total_budget = Some(budget);
        let best = solve_sumrate(&inst).unwrap().value;
        for _ in 0..1000 {
            let mut alloc = Allocation::zeros(3, 6);
            for n in 0..6 {
                let k = rng.random_range(0..3);
                alloc
                    .powers
                    .set(k, n, rng.random_range(0.0..1.0) * inst.subcarrier_caps[n]);
            }
            let total = alloc.total_power();
            if total > budget {
                for v in alloc.powers.row_mut(0).iter_mut() {
                    *v *= budget / total;
                }
                for k in 1..3 {
                    for v in alloc.powers.row_mut(k).iter_mut() {
                        *v *= budget / total;
                    }
                }
            }
            let rates = compute_rates(&inst, &alloc).unwrap();
            assert!(utility(&rates, Utility::SumRate).unwrap() <= best + 1e-9);
        }
    }
}

#[test]
fn min_power_solution_decodes_on_encoded_yes_instance() {
    let tpi = ThreePartitionInstance::new(vec![6, 6, 7, 7, 7, 7], 20, 2).unwrap();
    let inst = encode(&tpi).unwrap();
    let report = exact_min_total_power(&inst).unwrap();
    assert_eq!(report.status, Status::Optimal);
    assert_eq!(report.value, 6.0);
    match decode_partition(&report.allocation, 1e-6).unwrap() {
        Decoded::Partition(p) => assert!(p.is_certificate(&tpi)),
        Decoded::NotBinary => panic!("solver output is not binary"),
    }
}

#[test]
fn sumrate_never_exceeds_bound_on_encoded_instances() {
    for items in common::partition_instances(2, 20, 12) {
        let tpi = ThreePartitionInstance::new(items, 20, 2).unwrap();
        let report = solve_sumrate(&encode(&tpi).unwrap()).unwrap();
        assert!(report.value <= 20.0 + 1e-9);
    }
}

#[test]
fn encoded_yes_instance_min_rate_equals_bound() {
    let tpi = ThreePartitionInstance::new(vec![6, 6, 7, 7, 7, 7], 20, 2).unwrap();
    let inst = encode(&tpi).unwrap();
    let report = exact_max_utility(&inst, Utility::MinRate).unwrap();
    assert!((report.value - 20.0).abs() < 1e-9);
    let (t, _) = ofdma_alloc::minrate_max_bisection(
        &inst,
        &ofdma_alloc::Assignment::new(vec![0, 1, 0, 0, 1, 1]),
    )
    .unwrap();
    assert_eq!(t, 20.0);
}
