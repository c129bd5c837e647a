//! `ofdma`: solve allocation instances, generate random ones, benchmark the
//! two-stage solver and exercise the 3-partition reduction.
//!
//! Exit codes: 0 optimal or verified, 1 verification disagreement or
//! internal failure, 2 infeasible, 3 invalid input, 4 limit exceeded.

mod args;
mod commands;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use commands::{EXIT_INVALID, EXIT_OK};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_INVALID,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match &cli.command {
        Command::Solve(a) => commands::solve(a),
        Command::Reduce(a) => commands::reduce(a),
        Command::VerifyReduction(a) => commands::verify(a),
        Command::Gen(a) => commands::generate(a),
        Command::Bench(a) => commands::bench(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
