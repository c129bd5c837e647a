//! Seeded random instances.
//!
//! Gains are i.i.d. exponential with mean 1 (the power of a unit Rayleigh
//! fading coefficient); noises are 1. Streams are ChaCha8 seeded from a
//! `u64`, so an instance is a pure function of its configuration.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Matrix, SystemInstance};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub receivers: usize,
    pub subcarriers: usize,
    pub seed: u64,
    pub budget: Option<f64>,
    pub targets: Option<Vec<f64>>,
    /// Per-subcarrier cap; defaults to `4·P/N` with a budget, else 4.
    pub cap: Option<f64>,
}

impl GeneratorConfig {
    pub fn new(receivers: usize, subcarriers: usize, seed: u64) -> Self {
        GeneratorConfig {
            receivers,
            subcarriers,
            seed,
            budget: None,
            targets: None,
            cap: None,
        }
    }

    pub fn with_budget(mut self, budget: f64) -> Self {
        self.budget = Some(budget);
        self
    }

    pub fn with_targets(mut self, targets: Vec<f64>) -> Self {
        self.targets = Some(targets);
        self
    }

    pub fn with_cap(mut self, cap: f64) -> Self {
        self.cap = Some(cap);
        self
    }

    fn default_cap(&self) -> f64 {
        match self.budget {
            Some(p) => 4.0 * p / self.subcarriers as f64,
            None => 4.0,
        }
    }
}

pub fn random_instance(config: &GeneratorConfig) -> Result<SystemInstance> {
    let (k, n) = (config.receivers, config.subcarriers);
    if k == 0 || n < k {
        return Err(Error::Dimension(format!(
            "need 1 <= K <= N, got K = {k}, N = {n}"
        )));
    }
    let targets = match &config.targets {
        Some(t) if t.len() == 1 && k > 1 => Some(vec![t[0]; k]),
        other => other.clone(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let gains: Vec<f64> = (0..k * n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    Ok(SystemInstance {
        gains: Matrix::from_vec(k, n, gains)?,
        noises: Matrix::filled(k, n, 1.0),
        subcarrier_caps: vec![config.cap.unwrap_or_else(|| config.default_cap()); n],
        total_budget: config.budget,
        rate_targets: targets,
    })
}
