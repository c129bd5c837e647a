use thiserror::Error;

use crate::model::ValidationIssue;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid instance: {}", join_issues(.0))]
    Invalid(Vec<ValidationIssue>),

    #[error("rate of receiver {receiver} is negative ({rate})")]
    NegativeRate { receiver: usize, rate: f64 },

    #[error("rate vector is empty")]
    EmptyRates,

    #[error("power budget must be positive and finite, got {0}")]
    NonPositiveBudget(f64),

    #[error("rate target must be positive and finite, got {0}")]
    NonPositiveTarget(f64),

    #[error("invalid channel vector: {0}")]
    Channel(String),

    #[error(
        "enumeration limit exceeded: {receivers}^{subcarriers} assignments exceeds the limit of {limit}; \
         use the matching solver (N = K) or the two-stage solver (sum-rate utility)"
    )]
    EnumerationLimit {
        receivers: usize,
        subcarriers: usize,
        limit: u64,
    },

    #[error("the matching solver requires N = K, got K = {receivers}, N = {subcarriers}")]
    NotSquare {
        receivers: usize,
        subcarriers: usize,
    },

    #[error("item {value} at index {index} exceeds 52; 2^a - 1 is not exact in f64")]
    Precision { index: usize, value: u64 },

    #[error("invalid 3-partition instance: {0}")]
    ThreePartition(String),

    #[error("malformed partition: {0}")]
    MalformedPartition(String),

    #[error("brute-force 3-partition is limited to K <= {limit}, got K = {groups}")]
    TooManyGroups { groups: usize, limit: usize },

    #[error("{0}")]
    Format(String),
}

fn join_issues(issues: &[ValidationIssue]) -> String {
    issues
        .iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
