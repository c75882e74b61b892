//! `mc`: seeded Monte Carlo chains. Default body is one estimate row per
//! chain (jackknife errors, Binder cumulant, integrated autocorrelation
//! time); `--series` switches to the raw thinned series instead. Chain `i`
//! always runs on RNG stream `i` of the base seed, so results are identical
//! whatever the thread count.

use torus_ising::lattice::BoundaryCondition;
use torus_ising::mc::{estimate, run_chains, Algorithm, ChainParams, EstimateReport};

use crate::args::McArgs;
use crate::report::{f, Csv};
use crate::settings::{coupling_from, require, FileConfig};
use crate::CliResult;

pub const ESTIMATE_COLUMNS: [&str; 10] = [
    "chain",
    "n_samples",
    "e_per_site",
    "e_err",
    "c_v",
    "m_abs",
    "m_abs_err",
    "chi",
    "u4",
    "tau_int",
];

pub fn push_estimate_row(csv: &mut Csv, chain: impl ToString, r: &EstimateReport) {
    csv.row(&[
        chain.to_string(),
        r.n_samples.to_string(),
        f(r.e_per_site),
        f(r.e_err),
        f(r.c_v),
        f(r.m_abs),
        f(r.m_abs_err),
        f(r.chi),
        f(r.u4),
        f(r.tau_int),
    ]);
}

/// Run-parameter block shared by `mc` and `mc-scan` (everything but the
/// grid): dynamics and chain-length settings with echoed defaults.
pub struct RunSettings {
    pub algorithm: Algorithm,
    pub sweeps: u64,
    pub burn_in: u64,
    pub thin: u64,
    pub seed: u64,
}

impl RunSettings {
    pub fn resolve(
        cfg: &mut FileConfig,
        algo: Option<String>,
        sweeps: Option<u64>,
        burn_in: Option<u64>,
        thin: Option<u64>,
        seed: Option<u64>,
    ) -> CliResult<Self> {
        Ok(RunSettings {
            algorithm: require(cfg.resolve_parse::<Algorithm>(algo, "algo")?, "--algo")?,
            sweeps: cfg.resolve(sweeps, "sweeps")?.unwrap_or(10_000),
            burn_in: cfg.resolve(burn_in, "burn-in")?.unwrap_or(1_000),
            thin: cfg.resolve(thin, "thin")?.unwrap_or(1),
            seed: cfg.resolve(seed, "seed")?.unwrap_or(0),
        })
    }

    pub fn echo(&self, csv: &mut Csv) {
        csv.kv("algo", self.algorithm.as_str());
        csv.kv("sweeps", self.sweeps);
        csv.kv("burn-in", self.burn_in);
        csv.kv("thin", self.thin);
        csv.kv("seed", self.seed);
    }

    pub fn chain_params(&self, l: usize, bc: BoundaryCondition, k: f64, seed: u64) -> ChainParams {
        ChainParams {
            l,
            bc,
            k,
            algorithm: self.algorithm,
            sweeps: self.sweeps,
            burn_in: self.burn_in,
            thin: self.thin,
            seed,
        }
    }
}

pub fn run(args: McArgs) -> CliResult<()> {
    let mut cfg = FileConfig::load(args.config.as_deref())?;
    let l = require(cfg.resolve(args.l, "L")?, "--L")?;
    let bc = require(
        cfg.resolve_parse::<BoundaryCondition>(args.bc, "bc")?,
        "--bc",
    )?;
    let k = coupling_from(cfg.resolve(args.k, "K")?, cfg.resolve(args.t, "T")?)?;
    let run = RunSettings::resolve(
        &mut cfg,
        args.algo,
        args.sweeps,
        args.burn_in,
        args.thin,
        args.seed,
    )?;
    let chains = cfg.resolve(args.chains, "chains")?.unwrap_or(1u32);
    let series = cfg.resolve_flag(args.series, "series")?;
    let out = cfg.resolve(args.out, "out")?;
    cfg.finish()?;

    let params = run.chain_params(l, bc, k, run.seed);
    params.validate()?;

    let mut csv = Csv::new("mc");
    csv.kv("L", l);
    csv.kv("bc", bc.as_str());
    csv.kv("K", k);
    run.echo(&mut csv);
    csv.kv("chains", chains);
    csv.kv("series", series);

    let results = run_chains(&params, chains)?;
    if series {
        csv.columns(&["chain", "index", "E", "M"]);
        for s in &results {
            for (i, (&e, &m)) in s.energy.iter().zip(&s.magnetization).enumerate() {
                csv.row(&[
                    s.chain_index.to_string(),
                    i.to_string(),
                    f(e),
                    m.to_string(),
                ]);
            }
        }
    } else {
        csv.columns(&ESTIMATE_COLUMNS);
        for s in &results {
            let r = estimate(s)?;
            push_estimate_row(&mut csv, s.chain_index, &r);
        }
    }
    csv.write(out.as_deref())
}
