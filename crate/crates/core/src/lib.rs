//! Joint subcarrier and power allocation for a single-cell downlink OFDMA
//! system.
//!
//! One transmitter serves `K` receivers over `N ≥ K` subcarriers; each
//! subcarrier carries power for at most one receiver. The crate provides:
//!
//! * [`model`]: instance data, achievable rates, constraint checks and the
//!   four system utilities (mean, geometric mean, harmonic mean, minimum).
//! * [`waterfill`]: capped water-filling and its inverse for one receiver.
//! * [`sumrate`]: the polynomial-time two-stage sum-rate solver.
//! * [`exact`]: enumeration oracles for the NP-hard formulations, the
//!   max-min bisection, and the `N = K` matching solver.
//! * [`reduction`]: 3-partition encoding, certificate mapping and an
//!   empirical check that the encoding preserves yes/no answers.
//! * [`io`] and [`generate`]: file formats and random instances.
//!
//! Receiver and subcarrier indices are 0-based throughout.

pub mod bench;
pub mod error;
pub mod exact;
pub mod generate;
pub mod io;
pub mod model;
pub mod reduction;
pub mod report;
pub mod sumrate;
pub mod waterfill;

mod clock;

pub use error::{Error, Result};
pub use exact::{
    exact_max_utility, exact_max_utility_with, exact_min_total_power, exact_min_total_power_with,
    min_power_matching, minrate_max_bisection, ExactOptions,
};
pub use model::{
    check_allocation, compute_rates, utility, validate_instance, Allocation, ConstraintReport,
    Matrix, Problem, RateVector, SystemInstance, Utility, ValidationIssue,
};
pub use reduction::{
    certificate_to_allocation, decode_partition, encode, solve_3partition_bruteforce,
    verify_reduction, Decoded, EquivalenceReport, Partition, ThreePartitionInstance,
};
pub use report::{OpCounters, SolveReport, Status};
pub use sumrate::{best_receiver_assignment, solve_sumrate, Assignment};
pub use waterfill::{
    inverse_waterfill_capped, waterfill_capped, ChannelVector, InverseOutcome, WaterfillResult,
};
