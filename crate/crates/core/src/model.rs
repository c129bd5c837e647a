//! Problem data, achievable rates, constraint checks and system utilities.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense row-major matrix; rows are receivers, columns are subcarriers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::filled(rows, cols, 0.0)
    }

    pub fn filled(rows: usize, cols: usize, value: f64) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries cannot form a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some((k, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != cols) {
            return Err(Error::Dimension(format!(
                "row {k} has {} entries, expected {cols}",
                row.len()
            )));
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.data[row * self.cols + col] = value;
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn row_mut(&mut self, row: usize) -> &mut [f64] {
        &mut self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

/// Which of the two formulations an instance is meant for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Problem {
    /// Minimize total transmit power subject to per-receiver rate targets.
    MinPower,
    /// Maximize a system utility subject to a total power budget.
    MaxUtility,
}

/// Downlink OFDMA instance with `K` receivers and `N` subcarriers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemInstance {
    /// Channel power gains, `K x N`, nonnegative.
    pub gains: Matrix,
    /// Noise powers, `K x N`, strictly positive.
    pub noises: Matrix,
    /// Per-subcarrier power caps, length `N`.
    pub subcarrier_caps: Vec<f64>,
    /// Total transmit power budget (utility maximization).
    pub total_budget: Option<f64>,
    /// Per-receiver rate targets in bits/s/Hz (power minimization).
    pub rate_targets: Option<Vec<f64>>,
}

impl SystemInstance {
    pub fn num_receivers(&self) -> usize {
        self.gains.rows()
    }

    pub fn num_subcarriers(&self) -> usize {
        self.gains.cols()
    }

    /// Gain-to-noise ratio `α/η` of receiver `k` on subcarrier `n`.
    #[inline]
    pub fn ratio(&self, k: usize, n: usize) -> f64 {
        self.gains.get(k, n) / self.noises.get(k, n)
    }

    pub fn max_cap(&self) -> f64 {
        self.subcarrier_caps.iter().copied().fold(0.0, f64::max)
    }
}

/// `K x N` transmit powers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Allocation {
    pub powers: Matrix,
}

impl Allocation {
    pub fn zeros(receivers: usize, subcarriers: usize) -> Self {
        Allocation {
            powers: Matrix::zeros(receivers, subcarriers),
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Ok(Allocation {
            powers: Matrix::from_rows(rows)?,
        })
    }

    /// Places `powers[n]` on row `serving[n]` of column `n`.
    pub fn scatter(receivers: usize, serving: &[usize], powers: &[f64]) -> Self {
        let mut alloc = Allocation::zeros(receivers, serving.len());
        for (n, (&k, &p)) in serving.iter().zip(powers).enumerate() {
            alloc.powers.set(k, n, p);
        }
        alloc
    }

    pub fn num_receivers(&self) -> usize {
        self.powers.rows()
    }

    pub fn num_subcarriers(&self) -> usize {
        self.powers.cols()
    }

    pub fn get(&self, k: usize, n: usize) -> f64 {
        self.powers.get(k, n)
    }

    pub fn total_power(&self) -> f64 {
        self.powers.as_slice().iter().sum()
    }
}

/// Per-receiver achievable rates in bits/s/Hz.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateVector {
    pub rates: Vec<f64>,
}

impl RateVector {
    pub fn new(rates: Vec<f64>) -> Self {
        RateVector { rates }
    }

    pub fn sum(&self) -> f64 {
        self.rates.iter().sum()
    }
}

/// `log2(1 + x)` for `x ≥ 0`.
///
/// Below 0.5 the natural-log `ln_1p` path keeps relative accuracy; above it
/// `1 + x` is formed exactly enough that `log2` is used directly, which keeps
/// `log2(1 + (2^a - 1)) == a` exact for integer `a`.
#[inline]
pub fn bits(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else if x < 0.5 {
        x.ln_1p() * std::f64::consts::LOG2_E
    } else {
        (1.0 + x).log2()
    }
}

fn check_dims(instance: &SystemInstance, alloc: &Allocation) -> Result<()> {
    let (k, n) = (instance.num_receivers(), instance.num_subcarriers());
    if alloc.num_receivers() != k || alloc.num_subcarriers() != n {
        return Err(Error::Dimension(format!(
            "allocation is {}x{}, instance is {k}x{n}",
            alloc.num_receivers(),
            alloc.num_subcarriers()
        )));
    }
    if instance.noises.rows() != k || instance.noises.cols() != n {
        return Err(Error::Dimension(format!(
            "noise matrix is {}x{}, gains are {k}x{n}",
            instance.noises.rows(),
            instance.noises.cols()
        )));
    }
    Ok(())
}

/// `R_k = Σ_n log2(1 + α_k^n p_k^n / η_k^n)` for every receiver.
pub fn compute_rates(instance: &SystemInstance, alloc: &Allocation) -> Result<RateVector> {
    check_dims(instance, alloc)?;
    let rates = (0..instance.num_receivers())
        .map(|k| {
            let gains = instance.gains.row(k);
            let noises = instance.noises.row(k);
            alloc
                .powers
                .row(k)
                .iter()
                .zip(gains.iter().zip(noises))
                .map(|(&p, (&a, &eta))| {
                    if p == 0.0 || a == 0.0 {
                        0.0
                    } else {
                        bits(a * p / eta)
                    }
                })
                .sum()
        })
        .collect();
    Ok(RateVector { rates })
}

/// Independent constraint checks for an allocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintReport {
    pub nonnegative_ok: bool,
    /// Every subcarrier carries power above `tol` for at most one receiver.
    pub ofdma_ok: bool,
    pub caps_ok: bool,
    /// `None` when the instance has no rate targets.
    pub qos_ok: Option<bool>,
    /// `None` when the instance has no total budget.
    pub budget_ok: Option<bool>,
    pub total_power: f64,
    pub rates: RateVector,
}

impl ConstraintReport {
    pub fn all_ok(&self) -> bool {
        self.nonnegative_ok
            && self.ofdma_ok
            && self.caps_ok
            && self.qos_ok.unwrap_or(true)
            && self.budget_ok.unwrap_or(true)
    }
}

/// Default entrywise tolerance: `1e-12 · max cap`.
pub fn default_tolerance(instance: &SystemInstance) -> f64 {
    1e-12 * instance.max_cap().max(f64::MIN_POSITIVE)
}

/// Checks nonnegativity, OFDMA exclusivity, per-subcarrier caps, rate
/// targets (if present) and the total budget (if present).
///
/// Entrywise checks use `tol` directly. The two aggregate checks also allow
/// `N · ε` relative summation error on top of `tol`.
pub fn check_allocation(
    instance: &SystemInstance,
    alloc: &Allocation,
    tol: f64,
) -> Result<ConstraintReport> {
    let rates = compute_rates(instance, alloc)?;
    let (k_count, n_count) = (instance.num_receivers(), instance.num_subcarriers());
    if instance.subcarrier_caps.len() != n_count {
        return Err(Error::Dimension(format!(
            "{} caps for {n_count} subcarriers",
            instance.subcarrier_caps.len()
        )));
    }

    let nonnegative_ok = alloc.powers.as_slice().iter().all(|&p| p >= 0.0);
    let mut ofdma_ok = true;
    let mut caps_ok = true;
    for n in 0..n_count {
        let mut active = 0;
        for k in 0..k_count {
            let p = alloc.get(k, n);
            if p > tol {
                active += 1;
            }
            if p > instance.subcarrier_caps[n] + tol {
                caps_ok = false;
            }
        }
        if active > 1 {
            ofdma_ok = false;
        }
    }

    let slack = n_count as f64 * f64::EPSILON;
    let total_power = alloc.total_power();
    let qos_ok = instance.rate_targets.as_ref().map(|targets| {
        targets.len() == k_count
            && rates
                .rates
                .iter()
                .zip(targets)
                .all(|(&r, &g)| r >= g - tol - slack * g)
    });
    let budget_ok = instance
        .total_budget
        .map(|budget| total_power <= budget + tol + slack * budget);

    Ok(ConstraintReport {
        nonnegative_ok,
        ofdma_ok,
        caps_ok,
        qos_ok,
        budget_ok,
        total_power,
        rates,
    })
}

/// System utility of a rate vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Utility {
    /// Arithmetic mean of the rates (`H1`).
    SumRate,
    /// Geometric mean (`H2`).
    ProportionalFair,
    /// Harmonic mean (`H3`).
    HarmonicMean,
    /// Minimum rate (`H4`).
    MinRate,
}

impl Utility {
    pub const ALL: [Utility; 4] = [
        Utility::SumRate,
        Utility::ProportionalFair,
        Utility::HarmonicMean,
        Utility::MinRate,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Utility::SumRate => "h1",
            Utility::ProportionalFair => "h2",
            Utility::HarmonicMean => "h3",
            Utility::MinRate => "h4",
        }
    }

    pub fn from_label(label: &str) -> Option<Self> {
        Utility::ALL
            .into_iter()
            .find(|u| u.label().eq_ignore_ascii_case(label))
    }
}

impl fmt::Display for Utility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Evaluates a system utility. A zero rate makes the geometric and harmonic
/// means zero (their limits as that rate goes to zero).
pub fn utility(rates: &RateVector, kind: Utility) -> Result<f64> {
    let r = &rates.rates;
    if r.is_empty() {
        return Err(Error::EmptyRates);
    }
    if let Some((receiver, &rate)) = r.iter().enumerate().find(|(_, &x)| x.is_nan() || x < 0.0) {
        return Err(Error::NegativeRate { receiver, rate });
    }
    let k = r.len() as f64;
    let any_zero = r.contains(&0.0);
    Ok(match kind {
        Utility::SumRate => r.iter().sum::<f64>() / k,
        Utility::ProportionalFair if any_zero => 0.0,
        Utility::ProportionalFair => (r.iter().map(|x| x.ln()).sum::<f64>() / k).exp(),
        Utility::HarmonicMean if any_zero => 0.0,
        Utility::HarmonicMean => k / r.iter().map(|x| x.recip()).sum::<f64>(),
        Utility::MinRate => r.iter().copied().fold(f64::INFINITY, f64::min),
    })
}

/// A single instance-validation failure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ValidationIssue {
    NoReceivers,
    TooFewSubcarriers {
        receivers: usize,
        subcarriers: usize,
    },
    NoiseShape {
        rows: usize,
        cols: usize,
    },
    CapsLength {
        expected: usize,
        got: usize,
    },
    TargetsLength {
        expected: usize,
        got: usize,
    },
    NegativeGain {
        receiver: usize,
        subcarrier: usize,
    },
    NonPositiveNoise {
        receiver: usize,
        subcarrier: usize,
    },
    NonPositiveCap {
        subcarrier: usize,
    },
    NonPositiveTarget {
        receiver: usize,
    },
    NonPositiveBudget,
    MissingTargets,
    MissingBudget,
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ValidationIssue::*;
        match self {
            NoReceivers => write!(f, "at least one receiver is required"),
            TooFewSubcarriers {
                receivers,
                subcarriers,
            } => write!(
                f,
                "subcarriers must be at least receivers (K = {receivers}, N = {subcarriers})"
            ),
            NoiseShape { rows, cols } => {
                write!(f, "noise matrix shape {rows}x{cols} does not match gains")
            }
            CapsLength { expected, got } => write!(f, "expected {expected} caps, got {got}"),
            TargetsLength { expected, got } => {
                write!(f, "expected {expected} rate targets, got {got}")
            }
            NegativeGain {
                receiver,
                subcarrier,
            } => write!(
                f,
                "gain must be nonnegative (receiver {receiver}, subcarrier {subcarrier})"
            ),
            NonPositiveNoise {
                receiver,
                subcarrier,
            } => write!(
                f,
                "noise must be positive (receiver {receiver}, subcarrier {subcarrier})"
            ),
            NonPositiveCap { subcarrier } => {
                write!(f, "cap must be positive (subcarrier {subcarrier})")
            }
            NonPositiveTarget { receiver } => {
                write!(f, "rate target must be positive (receiver {receiver})")
            }
            NonPositiveBudget => write!(f, "total budget must be positive"),
            MissingTargets => write!(f, "rate_targets required"),
            MissingBudget => write!(f, "total_budget required"),
        }
    }
}

/// Collects every invariant violation for `problem`; never panics.
pub fn validate_instance(
    instance: &SystemInstance,
    problem: Problem,
) -> std::result::Result<(), Vec<ValidationIssue>> {
    use ValidationIssue::*;
    let mut issues = Vec::new();
    let (k_count, n_count) = (instance.num_receivers(), instance.num_subcarriers());
    if k_count == 0 {
        issues.push(NoReceivers);
    }
    if n_count < k_count {
        issues.push(TooFewSubcarriers {
            receivers: k_count,
            subcarriers: n_count,
        });
    }
    let noise_shape_ok = instance.noises.rows() == k_count && instance.noises.cols() == n_count;
    if !noise_shape_ok {
        issues.push(NoiseShape {
            rows: instance.noises.rows(),
            cols: instance.noises.cols(),
        });
    }
    if instance.subcarrier_caps.len() != n_count {
        issues.push(CapsLength {
            expected: n_count,
            got: instance.subcarrier_caps.len(),
        });
    }
    for k in 0..k_count {
        for n in 0..n_count {
            let a = instance.gains.get(k, n);
            if !(a >= 0.0 && a.is_finite()) {
                issues.push(NegativeGain {
                    receiver: k,
                    subcarrier: n,
                });
            }
            if noise_shape_ok {
                let eta = instance.noises.get(k, n);
                if !(eta > 0.0 && eta.is_finite()) {
                    issues.push(NonPositiveNoise {
                        receiver: k,
                        subcarrier: n,
                    });
                }
            }
        }
    }
    for (n, &c) in instance.subcarrier_caps.iter().enumerate() {
        if !(c > 0.0 && c.is_finite()) {
            issues.push(NonPositiveCap { subcarrier: n });
        }
    }
    if let Some(targets) = &instance.rate_targets {
        if targets.len() != k_count {
            issues.push(TargetsLength {
                expected: k_count,
                got: targets.len(),
            });
        }
        for (k, &g) in targets.iter().enumerate() {
            if !(g > 0.0 && g.is_finite()) {
                issues.push(NonPositiveTarget { receiver: k });
            }
        }
    }
    if let Some(budget) = instance.total_budget {
        if !(budget > 0.0 && budget.is_finite()) {
            issues.push(NonPositiveBudget);
        }
    }
    match problem {
        Problem::MinPower if instance.rate_targets.is_none() => issues.push(MissingTargets),
        Problem::MaxUtility if instance.total_budget.is_none() => issues.push(MissingBudget),
        _ => {}
    }
    if issues.is_empty() {
        Ok(())
    } else {
        Err(issues)
    }
}

pub(crate) fn ensure_valid(instance: &SystemInstance, problem: Problem) -> Result<()> {
    validate_instance(instance, problem).map_err(Error::Invalid)
}
