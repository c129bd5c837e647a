//! Projected gradient ascent for the geometric- and harmonic-mean utilities
//! with a fixed assignment.
//!
//! With the assignment fixed each rate is concave in the powers, so
//! `Σ ln R_k` and `-Σ 1/R_k` are concave and maximizing them maximizes the
//! geometric and harmonic means. The feasible set is the capped simplex
//! `{0 ≤ p ≤ cap, Σ p ≤ P}`.

use crate::model::{bits, utility, RateVector, Utility};
use crate::waterfill::project_capped_simplex;

const ARMIJO: f64 = 1e-4;
const MIN_STEP: f64 = 1e-20;

pub(crate) struct FairProblem<'a> {
    /// Gain-to-noise ratio of each subcarrier towards its serving receiver.
    pub ratios: &'a [f64],
    pub serving: &'a [usize],
    pub caps: &'a [f64],
    pub budget: f64,
    pub receivers: usize,
    pub kind: Utility,
}

pub(crate) struct FairSolution {
    pub powers: Vec<f64>,
    pub value: f64,
    pub hit_limit: bool,
}

impl FairProblem<'_> {
    fn rates(&self, powers: &[f64]) -> Vec<f64> {
        let mut rates = vec![0.0; self.receivers];
        for ((&k, &g), &p) in self.serving.iter().zip(self.ratios).zip(powers) {
            rates[k] += bits(g * p);
        }
        rates
    }

    fn objective(&self, rates: &[f64]) -> f64 {
        if rates.iter().any(|&r| r.is_nan() || r <= 0.0) {
            return f64::NEG_INFINITY;
        }
        match self.kind {
            Utility::HarmonicMean => -rates.iter().map(|r| r.recip()).sum::<f64>(),
            _ => rates.iter().map(|r| r.ln()).sum(),
        }
    }

    fn gradient(&self, powers: &[f64], rates: &[f64]) -> Vec<f64> {
        self.serving
            .iter()
            .zip(self.ratios)
            .zip(powers)
            .map(|((&k, &g), &p)| {
                let weight = match self.kind {
                    Utility::HarmonicMean => rates[k].powi(-2),
                    _ => rates[k].recip(),
                };
                weight * g / ((1.0 + g * p) * std::f64::consts::LN_2)
            })
            .collect()
    }

    fn project(&self, point: &[f64]) -> Vec<f64> {
        let mut projected = project_capped_simplex(point, self.caps, self.budget);
        for (p, &g) in projected.iter_mut().zip(self.ratios) {
            if g <= 0.0 {
                *p = 0.0;
            }
        }
        projected
    }

    pub(crate) fn solve(&self, max_iterations: usize, tolerance: f64) -> FairSolution {
        let m = self.ratios.len();
        let active = self.ratios.iter().filter(|&&g| g > 0.0).count();
        let mut served = vec![false; self.receivers];
        for (&k, &g) in self.serving.iter().zip(self.ratios) {
            served[k] |= g > 0.0;
        }
        if active == 0 || served.iter().any(|s| !s) {
            // Some receiver can never get a positive rate.
            return FairSolution {
                powers: vec![0.0; m],
                value: 0.0,
                hit_limit: false,
            };
        }

        let share = self.budget / active as f64;
        let mut powers: Vec<f64> = self
            .ratios
            .iter()
            .zip(self.caps)
            .map(|(&g, &c)| if g > 0.0 { share.min(c) } else { 0.0 })
            .collect();
        let mut rates = self.rates(&powers);
        let mut current = self.objective(&rates);
        let mut step = 1.0;
        let mut iterations = 0;
        let mut converged = false;

        while iterations < max_iterations {
            let grad = self.gradient(&powers, &rates);
            let unit: Vec<f64> = powers.iter().zip(&grad).map(|(p, g)| p + g).collect();
            let residual = self
                .project(&unit)
                .iter()
                .zip(&powers)
                .map(|(q, p)| (q - p).powi(2))
                .sum::<f64>()
                .sqrt();
            if residual < tolerance {
                converged = true;
                break;
            }
            iterations += 1;

            let mut accepted = false;
            while step > MIN_STEP {
                let trial: Vec<f64> = powers
                    .iter()
                    .zip(&grad)
                    .map(|(p, g)| p + step * g)
                    .collect();
                let trial = self.project(&trial);
                if trial == powers {
                    break;
                }
                let trial_rates = self.rates(&trial);
                let value = self.objective(&trial_rates);
                let predicted: f64 = grad
                    .iter()
                    .zip(trial.iter().zip(&powers))
                    .map(|(g, (q, p))| g * (q - p))
                    .sum();
                if value > current && value >= current + ARMIJO * predicted {
                    powers = trial;
                    rates = trial_rates;
                    current = value;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if !accepted {
                // No ascent left at machine precision.
                converged = true;
                break;
            }
            step = (step * 2.0).min(1e12);
        }

        let value = utility(&RateVector::new(rates), self.kind).unwrap_or(0.0);
        FairSolution {
            powers,
            value,
            hit_limit: !converged,
        }
    }
}
