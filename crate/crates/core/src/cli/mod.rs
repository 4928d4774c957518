//! The `nlheat` experiment runner.
//!
//! Exit codes: 0 success or pass, 2 configuration or input error, 3 a
//! numerical-reliability flag was raised, 4 comparison failed, 1 anything else.

pub mod commands;
pub mod compare;
pub mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::error::{Error, Result};
pub use commands::{read_values, RunReport, ValueRow};
pub use compare::{CompareReport, Tolerance};

#[derive(Debug, Parser)]
#[command(name = "nlheat", version, about = "Heat flow with non-local dynamic boundary conditions")]
pub struct Cli {
    /// Worker threads for Monte Carlo (results do not depend on it).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides the seed in the config.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Run directory; created if missing.
    #[arg(long, default_value = "nlheat-run")]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Subordinator, inverse and B• sample paths.
    Simulate(RunArgs),
    /// Monte Carlo estimates of the solution on a (t, x) grid.
    Estimate(RunArgs),
    /// Finite-difference solution.
    Solve(RunArgs),
    /// Laplace-domain reference values.
    Oracle(RunArgs),
    /// Compare two runs on a shared (t, x) grid.
    Compare {
        run_a: PathBuf,
        run_b: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        abs: f64,
        #[arg(long, default_value_t = 0.02)]
        rel: f64,
        #[arg(long, default_value_t = 3.0)]
        se_multiple: f64,
        /// Also write compare.json here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Serialize)]
struct Manifest<'a, C: Serialize> {
    command: &'a str,
    version: String,
    seed: Option<u64>,
    config: &'a C,
}

pub fn version() -> String {
    format!("v{}", env!("CARGO_PKG_VERSION"))
}

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_)
        | Error::InvalidParameter(_)
        | Error::Json(_)
        | Error::GridMismatch(_)
        | Error::Stability { .. }
        | Error::CutoffTooSmall { .. } => 2,
        Error::Quadrature { .. } | Error::Consistency(_) | Error::Unreliable { .. } | Error::HorizonTooShort { .. } => 3,
        Error::Io(_) | Error::Csv(_) => 1,
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

fn run_in<C, F>(name: &str, args: &RunArgs, seed_slot: impl FnOnce(&mut C) -> Option<&mut Option<u64>>, body: F) -> Result<RunReport>
where
    C: serde::de::DeserializeOwned + Serialize,
    F: FnOnce(&C, &Path) -> Result<RunReport>,
{
    let mut cfg: C = config::load(&args.config)?;
    let mut seed = None;
    if let Some(slot) = seed_slot(&mut cfg) {
        if args.seed.is_some() {
            *slot = args.seed;
        }
        seed = *slot;
    }
    std::fs::create_dir_all(&args.out)?;
    write_json(
        &args.out.join("manifest.json"),
        &Manifest {
            command: name,
            version: version(),
            seed,
            config: &cfg,
        },
    )?;
    let report = body(&cfg, &args.out)?;
    write_json(&args.out.join("report.json"), &report)?;
    Ok(report)
}

/// Runs one parsed invocation and returns the process exit code.
pub fn execute(cli: Cli) -> u8 {
    if let Some(n) = cli.threads {
        // A second call in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let outcome = match &cli.command {
        Command::Simulate(a) => run_in("simulate", a, |c: &mut config::SimulateConfig| Some(&mut c.seed), commands::simulate),
        Command::Estimate(a) => run_in("estimate", a, |c: &mut config::EstimateConfig| Some(&mut c.seed), commands::estimate),
        Command::Solve(a) => run_in("solve", a, |_: &mut config::SolveConfig| None, commands::solve),
        Command::Oracle(a) => run_in("oracle", a, |_: &mut config::OracleConfig| None, commands::oracle),
        Command::Compare {
            run_a,
            run_b,
            abs,
            rel,
            se_multiple,
            out,
        } => {
            let tol = Tolerance {
                abs: *abs,
                rel: *rel,
                se_multiple: *se_multiple,
            };
            return match run_compare(run_a, run_b, &tol, out.as_deref()) {
                Ok(r) => {
                    println!("{}", serde_json::to_string_pretty(&r).expect("plain data"));
                    if r.pass {
                        0
                    } else {
                        4
                    }
                }
                Err(e) => {
                    eprintln!("nlheat: {e}");
                    exit_code(&e)
                }
            };
        }
    };
    match outcome {
        Ok(report) => {
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            if report.reliability_flag {
                3
            } else {
                0
            }
        }
        Err(e) => {
            eprintln!("nlheat: {e}");
            exit_code(&e)
        }
    }
}

pub fn run_compare(a: &Path, b: &Path, tol: &Tolerance, out: Option<&Path>) -> Result<CompareReport> {
    let report = compare::compare(&read_values(a)?, &read_values(b)?, tol)?;
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        write_json(&dir.join("compare.json"), &report)?;
    }
    Ok(report)
}

pub fn main() -> ExitCode {
    ExitCode::from(execute(Cli::parse()))
}
