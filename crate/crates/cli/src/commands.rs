use std::fs;
use std::io::Write;
use std::path::Path;

use ofdma_alloc::bench::{loglog_slope, sweep};
use ofdma_alloc::generate::{random_instance, GeneratorConfig};
use ofdma_alloc::io::{summary_line, write_report_csv, InstanceFile, PartitionFile};
use ofdma_alloc::model::default_tolerance;
use ofdma_alloc::{
    check_allocation, encode, exact_max_utility_with, exact_min_total_power_with,
    min_power_matching, solve_sumrate, validate_instance, verify_reduction, Error, ExactOptions,
    Partition, Problem, SolveReport, Status, SystemInstance, Utility,
};

use crate::args::{BenchArgs, GenArgs, Method, ReduceArgs, SolveArgs, UtilityArg, VerifyArgs};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILED: u8 = 1;
pub const EXIT_INFEASIBLE: u8 = 2;
pub const EXIT_INVALID: u8 = 3;
pub const EXIT_LIMIT: u8 = 4;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn invalid(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INVALID,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::EnumerationLimit { .. } | Error::TooManyGroups { .. } => EXIT_LIMIT,
            _ => EXIT_INVALID,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type Outcome = Result<u8, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure {
            code: EXIT_FAILED,
            message: format!("{}: {e}", p.display()),
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn dispatch(
    instance: &SystemInstance,
    problem: Problem,
    utility: Utility,
    method: Method,
    options: &ExactOptions,
) -> Result<(SolveReport, &'static str), Failure> {
    let square = instance.num_receivers() == instance.num_subcarriers();
    match (problem, method) {
        (Problem::MaxUtility, Method::Auto | Method::TwoStage) if utility == Utility::SumRate => {
            Ok((solve_sumrate(instance)?, "two-stage"))
        }
        (Problem::MaxUtility, Method::TwoStage) => Err(Failure::invalid(format!(
            "the two-stage solver is optimal for the sum-rate utility (h1) only, not {}; use --method exact",
            utility.label()
        ))),
        (Problem::MaxUtility, Method::Auto | Method::Exact) => {
            Ok((exact_max_utility_with(instance, utility, options)?, "exact"))
        }
        (Problem::MaxUtility, Method::Matching) => Err(Failure::invalid(
            "the matching solver handles min_power instances only",
        )),
        (Problem::MinPower, Method::Matching) => Ok((min_power_matching(instance)?, "matching")),
        (Problem::MinPower, Method::Auto) if square => {
            Ok((min_power_matching(instance)?, "matching"))
        }
        (Problem::MinPower, Method::Auto | Method::Exact) => {
            Ok((exact_min_total_power_with(instance, options)?, "exact"))
        }
        (Problem::MinPower, Method::TwoStage) => Err(Failure::invalid(
            "the two-stage solver handles max_utility instances only; use --method exact or matching",
        )),
    }
}

/// Checks the constraints that define feasibility for `problem`.
fn revalidate(
    instance: &SystemInstance,
    problem: Problem,
    report: &SolveReport,
    tol: f64,
) -> Result<(), Failure> {
    let check = check_allocation(instance, &report.allocation, tol)?;
    let specific = match problem {
        Problem::MinPower => check.qos_ok.unwrap_or(false),
        Problem::MaxUtility => check.budget_ok.unwrap_or(false),
    };
    if check.nonnegative_ok && check.ofdma_ok && check.caps_ok && specific {
        Ok(())
    } else {
        Err(Failure {
            code: EXIT_FAILED,
            message: format!("allocation failed re-validation at tolerance {tol:e}: {check:?}"),
        })
    }
}

pub fn solve(args: &SolveArgs) -> Outcome {
    let file = InstanceFile::from_json(&read(&args.instance)?)?;
    let instance = file.to_instance()?;
    let problem = file.problem();
    let options = ExactOptions {
        threads: args.threads.max(1),
        ..ExactOptions::default()
    };
    let (report, method) = dispatch(&instance, problem, file.utility(), args.method, &options)?;

    let tol = args.tol.unwrap_or_else(|| default_tolerance(&instance));
    if tol.is_nan() || tol < 0.0 {
        return Err(Failure::invalid(format!(
            "--tol must be nonnegative, got {tol}"
        )));
    }
    if report.status != Status::Infeasible {
        revalidate(&instance, problem, &report, tol)?;
    }

    let mut csv = Vec::new();
    write_report_csv(&mut csv, &instance, &report, method).expect("writing to memory");
    let csv = String::from_utf8(csv).expect("CSV is UTF-8");
    emit(args.out.as_deref(), &csv)?;
    if args.out.is_some() {
        println!("{}", summary_line(&report, method));
    }
    Ok(match report.status {
        Status::Optimal => EXIT_OK,
        Status::Infeasible => EXIT_INFEASIBLE,
        Status::IterLimit => EXIT_LIMIT,
    })
}

pub fn reduce(args: &ReduceArgs) -> Outcome {
    let tpi = PartitionFile::from_json(&read(&args.partition_instance)?)?.to_instance()?;
    let instance = encode(&tpi)?;
    let file = InstanceFile::from_instance(&instance, Problem::MinPower, None);
    emit(args.out.as_deref(), &file.to_json_canonical())?;
    Ok(EXIT_OK)
}

fn groups(p: &Partition) -> String {
    p.groups()
        .iter()
        .map(|g| {
            let members: Vec<String> = g.iter().map(|n| n.to_string()).collect();
            format!("{{{}}}", members.join(","))
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "FAILED"
    }
}

pub fn verify(args: &VerifyArgs) -> Outcome {
    let tpi = PartitionFile::from_json(&read(&args.partition_instance)?)?.to_instance()?;
    let r = verify_reduction(&tpi)?;
    println!("items: {:?}, B={}, K={}", tpi.items(), r.bound, r.groups);
    match &r.partition_certificate {
        Some(p) => println!("partition: yes {}", groups(p)),
        None => println!("partition: no"),
    }
    match (r.minimum_power, &r.decoded_certificate) {
        (Some(power), Some(p)) => println!(
            "allocation: feasible, power {power}, decodes to {}",
            groups(p)
        ),
        (Some(power), None) => println!("allocation: feasible, power {power}, not binary"),
        (None, _) => println!("allocation: infeasible"),
    }
    println!(
        "sum-rate: value {} at power {}",
        r.sumrate_value, r.sumrate_power
    );
    println!(
        "agree: {}, fact1: B={} {}, fact2: 3K={} {}",
        yes_no(r.agree),
        r.bound,
        ok(r.bound_ok),
        3 * r.groups,
        ok(r.full_power_ok)
    );
    Ok(if r.passed() { EXIT_OK } else { EXIT_FAILED })
}

pub fn generate(args: &GenArgs) -> Outcome {
    let mut config = GeneratorConfig::new(args.receivers, args.subcarriers, args.seed);
    let problem = match (args.budget, &args.targets) {
        (Some(b), _) => {
            config = config.with_budget(b);
            Problem::MaxUtility
        }
        (None, Some(t)) => {
            if t.len() != 1 && t.len() != args.receivers {
                return Err(Failure::invalid(format!(
                    "--targets needs 1 or {} values, got {}",
                    args.receivers,
                    t.len()
                )));
            }
            config = config.with_targets(t.clone());
            Problem::MinPower
        }
        (None, None) => unreachable!("clap requires --budget or --targets"),
    };
    if let Some(c) = args.cap {
        config = config.with_cap(c);
    }
    let utility = match (problem, args.utility) {
        (Problem::MinPower, Some(_)) => {
            return Err(Failure::invalid(
                "--utility applies to --budget instances only",
            ))
        }
        (_, u) => u.map(|u| match u {
            UtilityArg::H1 => Utility::SumRate,
            UtilityArg::H2 => Utility::ProportionalFair,
            UtilityArg::H3 => Utility::HarmonicMean,
            UtilityArg::H4 => Utility::MinRate,
        }),
    };
    let instance = random_instance(&config)?;
    validate_instance(&instance, problem).map_err(Error::Invalid)?;
    let file = InstanceFile::from_instance(&instance, problem, utility);
    emit(args.out.as_deref(), &file.to_json_canonical())?;
    Ok(EXIT_OK)
}

/// `lo:hi` expands to the powers of ten in between; otherwise a comma list.
pub fn parse_sweep(spec: &str) -> Result<Vec<usize>, Failure> {
    let number = |s: &str| -> Result<usize, Failure> {
        let x: f64 = s
            .trim()
            .parse()
            .map_err(|_| Failure::invalid(format!("bad number {s:?} in --sweep-n")))?;
        if x >= 1.0 && x.fract() == 0.0 && x <= 1e12 {
            Ok(x as usize)
        } else {
            Err(Failure::invalid(format!(
                "--sweep-n entries must be positive integers, got {s}"
            )))
        }
    };
    if let Some((lo, hi)) = spec.split_once(':') {
        let (lo, hi) = (number(lo)?, number(hi)?);
        if hi < lo {
            return Err(Failure::invalid("--sweep-n range is empty"));
        }
        let mut out = Vec::new();
        let mut n = lo;
        while n <= hi {
            out.push(n);
            n *= 10;
        }
        Ok(out)
    } else {
        spec.split(',').map(number).collect()
    }
}

pub fn bench(args: &BenchArgs) -> Outcome {
    let ns = parse_sweep(&args.sweep_n)?;
    if let Some(&n) = ns.iter().find(|&&n| n < args.receivers) {
        return Err(Failure::invalid(format!(
            "N = {n} is below K = {}",
            args.receivers
        )));
    }
    let rows = sweep(&ns, args.receivers, args.seed, args.repeats)?;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let _ = writeln!(out, "N,K,seconds,ratio_comparisons,breakpoints,value");
    for r in &rows {
        let _ = writeln!(
            out,
            "{},{},{:.6},{},{},{}",
            r.subcarriers, r.receivers, r.seconds, r.ratio_comparisons, r.breakpoints, r.value
        );
    }
    if rows.len() >= 2 {
        let _ = writeln!(out, "# loglog_slope={:.3}", loglog_slope(&rows));
    }
    Ok(EXIT_OK)
}
