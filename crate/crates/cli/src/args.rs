//! Command-line surface. Physics parameters are carried as raw strings and
//! parsed in one place (`settings`), so flags and config-file entries go
//! through identical validation. Every value left unset here may instead
//! come from `--config`; flags always win.

use std::path::PathBuf;

use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "torus-ising",
    version,
    about = "Exact, transfer-matrix, Monte Carlo, and topology tools \
             for the 2D Ising model on open and toroidal lattices",
    after_help = "Output is CSV with a '#'-prefixed header block echoing the tool \
                  version and every resolved parameter, so a run can be reproduced \
                  from its own artifact. Exit codes: 0 ok, 2 usage, 3 resource \
                  guard, 4 numerical failure, 5 invariant violation.\n\
                  The environment variable TORUS_ISING_CACHE_DIR, when set, caches \
                  density-of-states tables for `exact` between runs."
)]
pub struct Cli {
    /// Run the built-in oracle suite (enumeration vs transfer matrix vs
    /// closed forms, plus topology and dynamics spot checks) and exit.
    #[arg(long)]
    pub selftest: bool,

    /// Cap the worker-thread count (default: one per CPU).
    #[arg(long, value_name = "N")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact partition split Q = Q1 + Q2 by enumeration
    Exact(ExactArgs),
    /// Transfer-matrix log Z, log Q1, and the free-energy gap
    Transfer(TransferArgs),
    /// Onsager closed forms: critical point and f, u, m tables
    Onsager(OnsagerArgs),
    /// Monte Carlo chains with jackknife estimates
    Mc(McArgs),
    /// Monte Carlo over a coupling grid; Binder-cumulant tables
    #[command(name = "mc-scan")]
    McScan(McScanArgs),
    /// Loop winding classes and spin-projection field reports
    Topo(TopoArgs),
    /// Majority-rule block renormalization flow
    Rg(RgArgs),
    /// Free-energy gap vs system size, with a power-law fit
    #[command(name = "deltaf-scan")]
    DeltafScan(DeltafScanArgs),
}

#[derive(Debug, clap::Args)]
pub struct ExactArgs {
    /// Side lengths, comma-separated (e.g. 2,3,4)
    #[arg(long = "L", value_name = "LIST")]
    pub l: Option<String>,
    /// Couplings K = J/(k_B T), comma-separated
    #[arg(long = "K", value_name = "LIST")]
    pub k: Option<String>,
    /// Temperatures (J = k_B = 1); alternative to --K
    #[arg(long = "T", value_name = "LIST")]
    pub t: Option<String>,
    /// Bond sets to weight with: open-h, torus-h, or both (default: both)
    #[arg(long, value_name = "LIST")]
    pub mode: Option<String>,
    /// Enumeration guard: refuse lattices with more sites than this
    /// (default 25; raising it toward 36 makes runs take hours)
    #[arg(long = "max-sites", value_name = "N")]
    pub max_sites: Option<u32>,
    /// Flat key = value config file; flags override its entries
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Write the CSV here instead of stdout
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct TransferArgs {
    /// Side lengths, comma-separated
    #[arg(long = "L", value_name = "LIST")]
    pub l: Option<String>,
    /// Couplings K, comma-separated
    #[arg(long = "K", value_name = "LIST")]
    pub k: Option<String>,
    /// Temperatures (J = k_B = 1); alternative to --K
    #[arg(long = "T", value_name = "LIST")]
    pub t: Option<String>,
    /// Boundary conditions: open, torus, or both (default: both)
    #[arg(long, value_name = "LIST")]
    pub bc: Option<String>,
    /// Width guard: refuse strips wider than this (default 14, hard cap 20)
    #[arg(long = "max-width", value_name = "N")]
    pub max_width: Option<u32>,
    /// Flat key = value config file; flags override its entries
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Write the CSV here instead of stdout
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct OnsagerArgs {
    /// Smallest tabulated coupling (default 0.05)
    #[arg(long = "k-min", value_name = "K")]
    pub k_min: Option<f64>,
    /// Largest tabulated coupling (default 1.0)
    #[arg(long = "k-max", value_name = "K")]
    pub k_max: Option<f64>,
    /// Number of grid points (default 20)
    #[arg(long = "k-steps", value_name = "N")]
    pub k_steps: Option<usize>,
    /// Flat key = value config file; flags override its entries
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Write the CSV here instead of stdout
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct McArgs {
    /// Side length
    #[arg(long = "L", value_name = "N")]
    pub l: Option<usize>,
    /// Boundary condition: open or torus
    #[arg(long, value_name = "BC")]
    pub bc: Option<String>,
    /// Coupling K = J/(k_B T)
    #[arg(long = "K", value_name = "K")]
    pub k: Option<f64>,
    /// Temperature (J = k_B = 1); alternative to --K
    #[arg(long = "T", value_name = "T")]
    pub t: Option<f64>,
    /// Update dynamics: metropolis or wolff
    #[arg(long, value_name = "ALGO")]
    pub algo: Option<String>,
    /// Measurement sweeps after burn-in (default 10000)
    #[arg(long, value_name = "N")]
    pub sweeps: Option<u64>,
    /// Discarded equilibration sweeps (default 1000)
    #[arg(long = "burn-in", value_name = "N")]
    pub burn_in: Option<u64>,
    /// Keep one sample every this many sweeps (default 1)
    #[arg(long, value_name = "N")]
    pub thin: Option<u64>,
    /// Base RNG seed; chain i uses stream i of this seed (default 0)
    #[arg(long, value_name = "SEED")]
    pub seed: Option<u64>,
    /// Number of independent chains (default 1)
    #[arg(long, value_name = "N")]
    pub chains: Option<u32>,
    /// Emit the raw per-sample series instead of estimate rows
    #[arg(long)]
    pub series: bool,
    /// Flat key = value config file; flags override its entries
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Write the CSV here instead of stdout
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct McScanArgs {
    /// Side lengths, comma-separated (two or more enable the crossing fit)
    #[arg(long = "L", value_name = "LIST")]
    pub l: Option<String>,
    /// Boundary condition: open or torus
    #[arg(long, value_name = "BC")]
    pub bc: Option<String>,
    /// Explicit coupling grid, comma-separated; alternative to k-min/max/steps
    #[arg(long = "K", value_name = "LIST")]
    pub k: Option<String>,
    /// Start of a uniform coupling grid
    #[arg(long = "k-min", value_name = "K")]
    pub k_min: Option<f64>,
    /// End of a uniform coupling grid
    #[arg(long = "k-max", value_name = "K")]
    pub k_max: Option<f64>,
    /// Number of grid points (at least 2)
    #[arg(long = "k-steps", value_name = "N")]
    pub k_steps: Option<usize>,
    /// Update dynamics: metropolis or wolff
    #[arg(long, value_name = "ALGO")]
    pub algo: Option<String>,
    /// Measurement sweeps after burn-in (default 10000)
    #[arg(long, value_name = "N")]
    pub sweeps: Option<u64>,
    /// Discarded equilibration sweeps (default 1000)
    #[arg(long = "burn-in", value_name = "N")]
    pub burn_in: Option<u64>,
    /// Keep one sample every this many sweeps (default 1)
    #[arg(long, value_name = "N")]
    pub thin: Option<u64>,
    /// Base seed; each grid point derives its own seed from it (default 0)
    #[arg(long, value_name = "SEED")]
    pub seed: Option<u64>,
    /// Flat key = value config file; flags override its entries
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Write the CSV here instead of stdout
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct TopoArgs {
    /// Classify this step string (letters R, L, U, D) as a torus loop
    #[arg(long = "loop", value_name = "STEPS")]
    pub loop_steps: Option<String>,
    /// Side length of the torus grid the loop lives on
    #[arg(long = "L", value_name = "N")]
    pub l: Option<usize>,
    /// Spin configuration file (first line "L bc", then +/- rows)
    #[arg(long = "spin-config", value_name = "FILE")]
    pub spin_config: Option<PathBuf>,
    /// Arrow orientation for the field report: x, y, or normal
    #[arg(long, value_name = "AXIS")]
    pub orientation: Option<String>,
    /// |Σ field|/N ratio above which a direction counts as defined
    /// (default 0.5)
    #[arg(long, value_name = "RATIO")]
    pub threshold: Option<f64>,
    /// Major radius of the embedding torus (default 2)
    #[arg(long = "major-radius", value_name = "R")]
    pub major_radius: Option<f64>,
    /// Minor radius of the embedding torus (default 1)
    #[arg(long = "minor-radius", value_name = "R")]
    pub minor_radius: Option<f64>,
    /// Flat key = value config file; flags override its entries
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Write the CSV here instead of stdout
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct RgArgs {
    /// Spin configuration file to flow (first line "L bc", then +/- rows)
    #[arg(long = "spin-config", value_name = "FILE")]
    pub spin_config: Option<PathBuf>,
    /// Side length for a sampled snapshot; alternative to --spin-config
    #[arg(long = "L", value_name = "N")]
    pub l: Option<usize>,
    /// Boundary condition of the sampling dynamics: open or torus
    #[arg(long, value_name = "BC")]
    pub bc: Option<String>,
    /// Coupling of the sampling dynamics
    #[arg(long = "K", value_name = "K")]
    pub k: Option<f64>,
    /// Temperature (J = k_B = 1); alternative to --K
    #[arg(long = "T", value_name = "T")]
    pub t: Option<f64>,
    /// Sampling dynamics: metropolis or wolff
    #[arg(long, value_name = "ALGO")]
    pub algo: Option<String>,
    /// Equilibration sweeps before the snapshot (default 1000)
    #[arg(long, value_name = "N")]
    pub sweeps: Option<u64>,
    /// RNG seed for the snapshot (default 0)
    #[arg(long, value_name = "SEED")]
    pub seed: Option<u64>,
    /// Block side (default 3; odd sides never tie)
    #[arg(long, value_name = "N")]
    pub b: Option<usize>,
    /// Tie policy for even blocks: plus, minus, or random
    #[arg(long = "tie-rule", value_name = "RULE")]
    pub tie_rule: Option<String>,
    /// Seed for the random tie policy (default 0)
    #[arg(long = "tie-seed", value_name = "SEED")]
    pub tie_seed: Option<u64>,
    /// Flat key = value config file; flags override its entries
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Write the CSV here instead of stdout
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct DeltafScanArgs {
    /// Side lengths, comma-separated (two or more enable the fit)
    #[arg(long = "L", value_name = "LIST")]
    pub l: Option<String>,
    /// Couplings K, comma-separated
    #[arg(long = "K", value_name = "LIST")]
    pub k: Option<String>,
    /// Temperatures (J = k_B = 1); alternative to --K
    #[arg(long = "T", value_name = "LIST")]
    pub t: Option<String>,
    /// Boundary conditions: open, torus, or both (default: both)
    #[arg(long, value_name = "LIST")]
    pub bc: Option<String>,
    /// Width guard: refuse strips wider than this (default 14, hard cap 20)
    #[arg(long = "max-width", value_name = "N")]
    pub max_width: Option<u32>,
    /// Flat key = value config file; flags override its entries
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Write the CSV here instead of stdout
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}
