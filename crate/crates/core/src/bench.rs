//! Runtime sweep for the two-stage solver.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::generate::{random_instance, GeneratorConfig};
use crate::sumrate::solve_sumrate;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub subcarriers: usize,
    pub receivers: usize,
    /// Best of the repeats, seconds.
    pub seconds: f64,
    pub ratio_comparisons: u64,
    pub breakpoints: u64,
    pub value: f64,
}

/// Times `solve_sumrate` on one random instance per `N`, budget `N`.
pub fn sweep(
    subcarriers: &[usize],
    receivers: usize,
    seed: u64,
    repeats: usize,
) -> Result<Vec<BenchRow>> {
    subcarriers
        .iter()
        .map(|&n| {
            let instance =
                random_instance(&GeneratorConfig::new(receivers, n, seed).with_budget(n as f64))?;
            let mut best: Option<BenchRow> = None;
            for _ in 0..repeats.max(1) {
                let report = solve_sumrate(&instance)?;
                if best.as_ref().is_none_or(|b| report.elapsed < b.seconds) {
                    best = Some(BenchRow {
                        subcarriers: n,
                        receivers,
                        seconds: report.elapsed,
                        ratio_comparisons: report.counters.ratio_comparisons,
                        breakpoints: report.counters.breakpoints,
                        value: report.value,
                    });
                }
            }
            Ok(best.expect("at least one repeat"))
        })
        .collect()
}

/// Least-squares slope of `log(seconds)` against `log(N)`.
pub fn loglog_slope(rows: &[BenchRow]) -> f64 {
    let points: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| ((r.subcarriers as f64).ln(), r.seconds.max(1e-9).ln()))
        .collect();
    let m = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / m;
    let my = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
