//! `airy-edge`: evaluation, sampling, simulation and verification at the
//! soft edge from the command line.
//!
//! Exit codes: 0 when every artifact was written and every verdict passed,
//! 1 on numeric failures or failed verdicts, 2 on usage errors.

mod commands;
mod config;
mod output;

use std::fmt;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde_json::Value;

use commands::*;
use output::{emit, RunInfo};

/// Bad invocation (exit code 2).
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub const THREADS_ENV: &str = "AIRY_EDGE_THREADS";

#[derive(Parser, Debug)]
#[command(name = "airy-edge", version, about = "Soft-edge kernels, samplers, SDEs and verification suites")]
struct Cli {
    /// JSON object of flags for the subcommand; flags on the command line win.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Worker threads, capped by AIRY_EDGE_THREADS.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Kernel values on a grid (CSV).
    #[command(args_override_self = true)]
    Kernel(KernelArgs),
    /// k-point correlation function (JSON).
    #[command(args_override_self = true)]
    Corr(CorrArgs),
    /// One-point density against the semicircle reference (CSV).
    #[command(args_override_self = true)]
    Density(DensityArgs),
    /// Drift terms and logarithmic derivatives (CSV).
    #[command(args_override_self = true)]
    Drift(DriftArgs),
    /// Tridiagonal β-ensemble samples (CSV).
    #[command(args_override_self = true)]
    Sample(SampleArgs),
    /// Determinantal samples from a discretised kernel (CSV).
    #[command(args_override_self = true)]
    Dpp(DppArgs),
    /// Euler–Maruyama paths of the finite or frozen-tail dynamics (CSV).
    #[command(args_override_self = true)]
    Simulate(SimulateArgs),
    /// Girsanov densities of Brownian paths against the frozen-tail drift (JSON).
    #[command(args_override_self = true)]
    Girsanov(GirsanovArgs),
    /// Edge gap probability by Fredholm determinant (JSON).
    #[command(args_override_self = true)]
    Gap(GapArgs),
    /// Run a verification suite (JSON report).
    #[command(args_override_self = true)]
    Verify(VerifyArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Kernel(_) => "kernel",
            Command::Corr(_) => "corr",
            Command::Density(_) => "density",
            Command::Drift(_) => "drift",
            Command::Sample(_) => "sample",
            Command::Dpp(_) => "dpp",
            Command::Simulate(_) => "simulate",
            Command::Girsanov(_) => "girsanov",
            Command::Gap(_) => "gap",
            Command::Verify(_) => "verify",
        }
    }

    fn dest(&self) -> &OutArgs {
        match self {
            Command::Kernel(a) => &a.dest,
            Command::Corr(a) => &a.dest,
            Command::Density(a) => &a.dest,
            Command::Drift(a) => &a.dest,
            Command::Sample(a) => &a.dest,
            Command::Dpp(a) => &a.dest,
            Command::Simulate(a) => &a.dest,
            Command::Girsanov(a) => &a.dest,
            Command::Gap(a) => &a.dest,
            Command::Verify(a) => &a.dest,
        }
    }

    fn params(&self) -> serde_json::Result<Value> {
        match self {
            Command::Kernel(a) => serde_json::to_value(a),
            Command::Corr(a) => serde_json::to_value(a),
            Command::Density(a) => serde_json::to_value(a),
            Command::Drift(a) => serde_json::to_value(a),
            Command::Sample(a) => serde_json::to_value(a),
            Command::Dpp(a) => serde_json::to_value(a),
            Command::Simulate(a) => serde_json::to_value(a),
            Command::Girsanov(a) => serde_json::to_value(a),
            Command::Gap(a) => serde_json::to_value(a),
            Command::Verify(a) => serde_json::to_value(a),
        }
    }

    /// The artifact and whether its verdict (if any) passed.
    fn execute(&self) -> anyhow::Result<(output::Artifact, bool)> {
        let plain = |r: anyhow::Result<output::Artifact>| r.map(|a| (a, true));
        match self {
            Command::Kernel(a) => plain(kernel(a)),
            Command::Corr(a) => plain(corr(a)),
            Command::Density(a) => plain(density(a)),
            Command::Drift(a) => plain(drift(a)),
            Command::Sample(a) => plain(sample(a)),
            Command::Dpp(a) => plain(dpp(a)),
            Command::Simulate(a) => plain(simulate(a)),
            Command::Girsanov(a) => plain(girsanov(a)),
            Command::Gap(a) => plain(gap(a)),
            Command::Verify(a) => verify_suite(a),
        }
    }
}

/// Smallest of the flag and the environment cap; all cores when neither is set.
fn thread_count(flag: Option<usize>) -> Result<usize, UsageError> {
    let env = match std::env::var(THREADS_ENV) {
        Ok(v) => Some(v.trim().parse::<usize>().map_err(|_| UsageError(format!("{THREADS_ENV}={v:?} is not a count")))?),
        Err(_) => None,
    };
    let n = [flag, env].into_iter().flatten().min().unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if n == 0 {
        return Err(UsageError("thread count must be positive".into()));
    }
    Ok(n)
}

fn usage(e: impl fmt::Display) -> i32 {
    eprintln!("error: {e}");
    2
}

fn run(argv: Vec<String>) -> i32 {
    let expanded = match config::expand(argv) {
        Ok(e) => e,
        Err(e) => return usage(e),
    };
    let cli = match Cli::try_parse_from(&expanded.args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let threads = match thread_count(cli.threads) {
        Ok(t) => t,
        Err(e) => return usage(e),
    };
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
        eprintln!("error: thread pool: {e}");
        return 1;
    }
    let params = match cli.command.params() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let result = cli.command.execute().and_then(|(artifact, passed)| {
        let info = RunInfo { command: cli.command.name(), argv: &expanded.args, params, config: expanded.config.as_deref(), threads };
        emit(&cli.command.dest().destination(), &artifact, &info)?;
        Ok(passed)
    });
    match result {
        Ok(true) => 0,
        Ok(false) => {
            eprintln!("verdict: not passed");
            1
        }
        Err(e) if e.is::<UsageError>() => usage(e),
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

fn main() {
    std::process::exit(run(std::env::args().collect()));
}
