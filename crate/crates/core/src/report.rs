use serde::{Deserialize, Serialize};

use crate::model::{Allocation, RateVector};
use crate::sumrate::Assignment;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Optimal,
    Infeasible,
    /// An inner iterative solve stopped at its iteration cap.
    IterLimit,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Optimal => "optimal",
            Status::Infeasible => "infeasible",
            Status::IterLimit => "iter_limit",
        }
    }
}

/// Work counters, used by the complexity benchmarks.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpCounters {
    /// Ratio comparisons in the subcarrier assignment scan.
    pub ratio_comparisons: u64,
    /// Breakpoints handled by water-filling.
    pub breakpoints: u64,
}

/// Result of any solver in this crate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub status: Status,
    /// Objective: utility in bits/s/Hz, or total power in watts
    /// (`+inf` when infeasible).
    pub value: f64,
    pub allocation: Allocation,
    pub assignment: Assignment,
    pub rates: RateVector,
    pub total_power: f64,
    pub assignments_explored: u64,
    pub counters: OpCounters,
    /// Wall-clock seconds.
    pub elapsed: f64,
}

impl SolveReport {
    pub(crate) fn infeasible(receivers: usize, subcarriers: usize, explored: u64) -> Self {
        SolveReport {
            status: Status::Infeasible,
            value: f64::INFINITY,
            allocation: Allocation::zeros(receivers, subcarriers),
            assignment: Assignment::new(vec![0; subcarriers]),
            rates: RateVector::new(vec![0.0; receivers]),
            total_power: 0.0,
            assignments_explored: explored,
            counters: OpCounters::default(),
            elapsed: 0.0,
        }
    }
}
