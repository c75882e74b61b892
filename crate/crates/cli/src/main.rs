//! `torus-ising`: one binary exposing the whole laboratory — exact
//! enumeration, transfer matrices, Onsager closed forms, Monte Carlo,
//! torus topology, and block renormalization — as subcommands that emit
//! self-describing CSV.

// Range guards are written `if !(x > bound)` on purpose: unlike `x <= bound`,
// the negated form also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod report;
mod settings;

use clap::Parser;
use torus_ising::selftest::{all_passed, run_selftest};

/// CLI-level error: either a usage problem of the harness itself or an
/// error propagated from the library, which carries the exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(torus_ising::Error),
}

impl From<torus_ising::Error> for CliError {
    fn from(e: torus_ising::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Core(torus_ising::Error::Io(e.to_string()))
    }
}

impl CliError {
    /// Exit codes: 0 ok, 2 usage, 3 resource guard, 4 numerical failure,
    /// 5 invariant violation.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(e) => e.exit_code(),
        }
    }

    /// Short machine-readable kind: the library variant name, or `Usage`.
    pub fn kind(&self) -> String {
        match self {
            CliError::Usage(_) => "Usage".into(),
            CliError::Core(e) => {
                let dbg = format!("{e:?}");
                dbg.split('(').next().unwrap_or("Error").to_string()
            }
        }
    }

    pub fn message(&self) -> String {
        match self {
            CliError::Usage(m) => m.clone(),
            CliError::Core(e) => e.to_string(),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn run(cli: args::Cli) -> CliResult<()> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot configure thread pool: {e}")))?;
    }

    if cli.selftest {
        if cli.command.is_some() {
            return Err(CliError::Usage(
                "--selftest runs alone, without a subcommand".into(),
            ));
        }
        let lines = run_selftest();
        for line in &lines {
            let tag = if line.passed { "PASS" } else { "FAIL" };
            println!("[{tag}] {}: {}", line.name, line.detail);
        }
        return if all_passed(&lines) {
            Ok(())
        } else {
            Err(CliError::Core(torus_ising::Error::InvariantViolation(
                "self-test failed; see the [FAIL] lines above".into(),
            )))
        };
    }

    match cli.command {
        Some(args::Command::Exact(a)) => commands::exact::run(a),
        Some(args::Command::Transfer(a)) => commands::transfer::run(a),
        Some(args::Command::Onsager(a)) => commands::onsager::run(a),
        Some(args::Command::Mc(a)) => commands::mc::run(a),
        Some(args::Command::McScan(a)) => commands::mc_scan::run(a),
        Some(args::Command::Topo(a)) => commands::topo::run(a),
        Some(args::Command::Rg(a)) => commands::rg::run(a),
        Some(args::Command::DeltafScan(a)) => commands::deltaf::run(a),
        None => Err(CliError::Usage(
            "no subcommand given; try --help or --selftest".into(),
        )),
    }
}

fn main() {
    let cli = args::Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!(
            "error: kind={} exit={} message={}",
            e.kind(),
            e.exit_code(),
            e.message()
        );
        std::process::exit(e.exit_code());
    }
}
