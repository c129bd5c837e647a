//! 3-partition hardness workbench.
//!
//! A 3-partition instance `(a_1..a_3K, B)` becomes an OFDMA instance with
//! `K` identical receivers, `3K` subcarriers, gains `2^{a_n} - 1`, unit
//! noise, unit caps, rate targets `B` and total budget `3K`. A yes-certificate
//! maps to the 0/1 allocation that powers each group's subcarriers for its
//! receiver, and a feasible allocation of the encoded instance decodes back to
//! a certificate. [`verify_reduction`] checks both directions against
//! independent exhaustive oracles.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::exact_min_total_power;
use crate::model::{check_allocation, Allocation, Matrix, SystemInstance};
use crate::report::Status;
use crate::sumrate::solve_sumrate;

/// Largest item for which `2^a - 1` and `log2(2^a)` are exact in `f64`.
pub const MAX_EXACT_ITEM: u64 = 52;
/// Largest `K` accepted by the backtracking oracle.
pub const MAX_BRUTEFORCE_GROUPS: usize = 4;
/// Tolerance used when decoding solver output.
pub const DECODE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThreePartitionInstance {
    items: Vec<u64>,
    bound: u64,
    groups: usize,
}

impl ThreePartitionInstance {
    /// Checks `|items| = 3K`, `B/4 < a_n < B/2` and `Σ a_n = K·B`.
    pub fn new(items: Vec<u64>, bound: u64, groups: usize) -> Result<Self> {
        if groups == 0 {
            return Err(Error::ThreePartition(
                "at least one group is required".into(),
            ));
        }
        if items.len() != 3 * groups {
            return Err(Error::ThreePartition(format!(
                "{} items for {groups} groups, expected {}",
                items.len(),
                3 * groups
            )));
        }
        if let Some((n, a)) = items
            .iter()
            .enumerate()
            .find(|(_, &a)| !(4 * a > bound && 2 * a < bound))
        {
            return Err(Error::ThreePartition(format!(
                "item {a} at index {n} is not strictly between B/4 and B/2 (B = {bound})"
            )));
        }
        let total: u64 = items.iter().sum();
        if total != groups as u64 * bound {
            return Err(Error::ThreePartition(format!(
                "items sum to {total}, expected K·B = {}",
                groups as u64 * bound
            )));
        }
        Ok(ThreePartitionInstance {
            items,
            bound,
            groups,
        })
    }

    pub fn items(&self) -> &[u64] {
        &self.items
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn groups(&self) -> usize {
        self.groups
    }
}

/// `K` disjoint triples of item indices; group `k` belongs to receiver `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    groups: Vec<Vec<usize>>,
}

impl Partition {
    /// Validates that the groups are triples covering `0..3K` exactly once.
    /// Each group is stored sorted.
    pub fn new(mut groups: Vec<Vec<usize>>) -> Result<Self> {
        let items = 3 * groups.len();
        let mut seen = vec![false; items];
        for (k, group) in groups.iter_mut().enumerate() {
            if group.len() != 3 {
                return Err(Error::MalformedPartition(format!(
                    "group {k} has {} members, expected 3",
                    group.len()
                )));
            }
            group.sort_unstable();
            for &n in group.iter() {
                if n >= items {
                    return Err(Error::MalformedPartition(format!(
                        "index {n} out of range for {items} items"
                    )));
                }
                if std::mem::replace(&mut seen[n], true) {
                    return Err(Error::MalformedPartition(format!(
                        "index {n} appears twice"
                    )));
                }
            }
        }
        Ok(Partition { groups })
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn group_sums(&self, tpi: &ThreePartitionInstance) -> Vec<u64> {
        self.groups
            .iter()
            .map(|g| g.iter().map(|&n| tpi.items[n]).sum())
            .collect()
    }

    /// Every group sums to `B`.
    pub fn is_certificate(&self, tpi: &ThreePartitionInstance) -> bool {
        self.groups.len() == tpi.groups && self.group_sums(tpi).iter().all(|&s| s == tpi.bound)
    }
}

/// Builds the OFDMA instance for a 3-partition instance.
pub fn encode(tpi: &ThreePartitionInstance) -> Result<SystemInstance> {
    if let Some((index, &value)) = tpi
        .items
        .iter()
        .enumerate()
        .find(|(_, &a)| a > MAX_EXACT_ITEM)
    {
        return Err(Error::Precision { index, value });
    }
    let k = tpi.groups;
    let n = tpi.items.len();
    let row: Vec<f64> = tpi
        .items
        .iter()
        .map(|&a| ((1u64 << a) - 1) as f64)
        .collect();
    let gains = Matrix::from_vec(k, n, row.repeat(k))?;
    Ok(SystemInstance {
        gains,
        noises: Matrix::filled(k, n, 1.0),
        subcarrier_caps: vec![1.0; n],
        total_budget: Some(n as f64),
        rate_targets: Some(vec![tpi.bound as f64; k]),
    })
}

/// Unit power on each group's subcarriers for its receiver, zero elsewhere.
pub fn certificate_to_allocation(
    tpi: &ThreePartitionInstance,
    partition: &Partition,
) -> Result<Allocation> {
    if partition.groups.len() != tpi.groups {
        return Err(Error::MalformedPartition(format!(
            "{} groups for an instance with K = {}",
            partition.groups.len(),
            tpi.groups
        )));
    }
    let mut alloc = Allocation::zeros(tpi.groups, tpi.items.len());
    for (k, group) in partition.groups.iter().enumerate() {
        for &n in group {
            alloc.powers.set(k, n, 1.0);
        }
    }
    Ok(alloc)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Decoded {
    Partition(Partition),
    /// Some entry is not within tolerance of 0 or 1, or the unit entries do
    /// not form a partition into triples.
    NotBinary,
}

/// `S_k = { n : p_k^n ≈ 1 }`.
pub fn decode_partition(alloc: &Allocation, tol: f64) -> Result<Decoded> {
    let (k_count, n_count) = (alloc.num_receivers(), alloc.num_subcarriers());
    if n_count != 3 * k_count {
        return Err(Error::Dimension(format!(
            "expected a K x 3K allocation, got {k_count}x{n_count}"
        )));
    }
    let mut groups = vec![Vec::new(); k_count];
    for (k, group) in groups.iter_mut().enumerate() {
        for n in 0..n_count {
            let p = alloc.get(k, n);
            if (p - 1.0).abs() <= tol {
                group.push(n);
            } else if p.abs() > tol {
                return Ok(Decoded::NotBinary);
            }
        }
    }
    Ok(Partition::new(groups).map_or(Decoded::NotBinary, Decoded::Partition))
}

/// Exhaustive backtracking for `K ≤ 4`.
///
/// The group holding the smallest unused index is filled first, with its
/// other two members tried in increasing order, so the first certificate
/// found is the lexicographically first one.
pub fn solve_3partition_bruteforce(tpi: &ThreePartitionInstance) -> Result<Option<Partition>> {
    if tpi.groups > MAX_BRUTEFORCE_GROUPS {
        return Err(Error::TooManyGroups {
            groups: tpi.groups,
            limit: MAX_BRUTEFORCE_GROUPS,
        });
    }
    fn fill(items: &[u64], bound: u64, used: &mut [bool], groups: &mut Vec<Vec<usize>>) -> bool {
        let Some(first) = used.iter().position(|u| !u) else {
            return true;
        };
        used[first] = true;
        for second in first + 1..items.len() {
            if used[second] || items[first] + items[second] >= bound {
                continue;
            }
            used[second] = true;
            let need = bound - items[first] - items[second];
            for third in second + 1..items.len() {
                if used[third] || items[third] != need {
                    continue;
                }
                used[third] = true;
                groups.push(vec![first, second, third]);
                if fill(items, bound, used, groups) {
                    return true;
                }
                groups.pop();
                used[third] = false;
            }
            used[second] = false;
        }
        used[first] = false;
        false
    }

    let mut used = vec![false; tpi.items.len()];
    let mut groups = Vec::with_capacity(tpi.groups);
    if fill(&tpi.items, tpi.bound, &mut used, &mut groups) {
        Ok(Some(Partition::new(groups)?))
    } else {
        Ok(None)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    /// The backtracking oracle found a certificate.
    pub partition_yes: bool,
    /// The encoded power-minimization instance is feasible.
    pub allocation_feasible: bool,
    /// `partition_yes == allocation_feasible`, and a feasible allocation
    /// decodes to a valid certificate.
    pub agree: bool,
    pub partition_certificate: Option<Partition>,
    /// Certificate decoded from the exact solver's allocation.
    pub decoded_certificate: Option<Partition>,
    pub minimum_power: Option<f64>,
    /// Optimal mean rate of the encoded instance with budget `3K`.
    pub sumrate_value: f64,
    pub sumrate_power: f64,
    pub bound: u64,
    pub groups: usize,
    /// `sumrate_value = B` within `1e-9`.
    pub bound_ok: bool,
    /// `sumrate_power = 3K` within `1e-9`.
    pub full_power_ok: bool,
}

impl EquivalenceReport {
    pub fn passed(&self) -> bool {
        self.agree && self.bound_ok && self.full_power_ok
    }
}

/// Runs both oracles on `tpi` and cross-checks the results.
pub fn verify_reduction(tpi: &ThreePartitionInstance) -> Result<EquivalenceReport> {
    let partition = solve_3partition_bruteforce(tpi)?;
    let instance = encode(tpi)?;
    let exact = exact_min_total_power(&instance)?;
    let allocation_feasible = exact.status == Status::Optimal;

    let decoded = if allocation_feasible {
        match decode_partition(&exact.allocation, DECODE_TOLERANCE)? {
            Decoded::Partition(p) => Some(p),
            Decoded::NotBinary => None,
        }
    } else {
        None
    };
    let decoded_ok = !allocation_feasible
        || decoded.as_ref().is_some_and(|p| {
            p.is_certificate(tpi)
                && check_allocation(&instance, &exact.allocation, DECODE_TOLERANCE)
                    .is_ok_and(|c| c.all_ok())
        });

    let sumrate = solve_sumrate(&instance)?;
    let bound = tpi.bound as f64;
    let full = tpi.items.len() as f64;
    Ok(EquivalenceReport {
        partition_yes: partition.is_some(),
        allocation_feasible,
        agree: partition.is_some() == allocation_feasible && decoded_ok,
        partition_certificate: partition,
        decoded_certificate: decoded,
        minimum_power: allocation_feasible.then_some(exact.value),
        sumrate_value: sumrate.value,
        sumrate_power: sumrate.total_power,
        bound: tpi.bound,
        groups: tpi.groups,
        bound_ok: (sumrate.value - bound).abs() <= 1e-9,
        full_power_ok: (sumrate.total_power - full).abs() <= 1e-9,
    })
}
