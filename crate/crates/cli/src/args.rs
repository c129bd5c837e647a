use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "ofdma",
    version,
    about = "Subcarrier and power allocation for downlink OFDMA"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve an instance file and write the allocation as CSV.
    Solve(SolveArgs),
    /// Encode a 3-partition instance as a power-minimization instance.
    Reduce(ReduceArgs),
    /// Run both oracles on a 3-partition instance and cross-check them.
    VerifyReduction(VerifyArgs),
    /// Generate a random instance.
    Gen(GenArgs),
    /// Time the two-stage solver over a range of N.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Auto,
    TwoStage,
    Exact,
    Matching,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, value_enum, default_value_t = Method::Auto)]
    pub method: Method,
    /// Constraint tolerance used to re-validate the allocation
    /// [default: 1e-12 x largest cap].
    #[arg(long)]
    pub tol: Option<f64>,
    /// Enumeration workers for the exact solvers.
    #[arg(long, env = "ALLOC_THREADS", default_value_t = 1)]
    pub threads: usize,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReduceArgs {
    #[arg(long)]
    pub partition_instance: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub partition_instance: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum UtilityArg {
    H1,
    H2,
    H3,
    H4,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("constraint").required(true).args(["budget", "targets"]))]
pub struct GenArgs {
    #[arg(long)]
    pub receivers: usize,
    #[arg(long)]
    pub subcarriers: usize,
    #[arg(long)]
    pub seed: u64,
    /// Total power budget; produces a utility-maximization instance.
    #[arg(long)]
    pub budget: Option<f64>,
    /// Rate targets, one per receiver or a single shared value; produces a
    /// power-minimization instance.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub targets: Option<Vec<f64>>,
    /// Per-subcarrier cap [default: 4 x budget / N, or 4].
    #[arg(long)]
    pub cap: Option<f64>,
    #[arg(long, value_enum)]
    pub utility: Option<UtilityArg>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// `lo:hi` in powers of ten, e.g. `1e3:1e6`, or a comma list.
    #[arg(long, default_value = "1e3:1e6")]
    pub sweep_n: String,
    #[arg(long, default_value_t = 100)]
    pub receivers: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Timed runs per N; the fastest is reported.
    #[arg(long, default_value_t = 3)]
    pub repeats: usize,
}
