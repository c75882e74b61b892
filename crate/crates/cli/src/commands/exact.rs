//! `exact`: enumerate the partition split `Q = Q1 + Q2` and the free-energy
//! gap at each requested size and coupling.
//!
//! Columns: `L,K,mode,logQ,logQ1,logQ2,F,F1,deltaF,q2_underflow`. The free
//! energies use `T = 1/K` (reduced units), so rows at `K = 0` leave those
//! cells empty. When `Q2` is too small to recover from `log Q − log Q1` in
//! double precision, `logQ2` reports `-inf` and the flag column says so —
//! never a silently wrong number.

use torus_ising::enumerate::{
    enumerate_tables_with_guard, free_energies, DensityOfStates, DosCache, HamiltonianMode,
    PartitionSplit, DEFAULT_MAX_SITES,
};

use crate::args::ExactArgs;
use crate::report::{f, Csv};
use crate::settings::{couplings_from, echo_list, parse_list, require, FileConfig};
use crate::{CliError, CliResult};

pub const CACHE_ENV: &str = "TORUS_ISING_CACHE_DIR";

/// Loads the full and restricted bond-sum tables, through the disk cache
/// when `TORUS_ISING_CACHE_DIR` is set.
fn load_tables(
    l: usize,
    mode: HamiltonianMode,
    max_sites: u32,
) -> CliResult<(DensityOfStates, DensityOfStates)> {
    if let Some(dir) = std::env::var_os(CACHE_ENV) {
        let cache = DosCache::new(std::path::PathBuf::from(dir));
        let full = cache.load_or_compute(l, mode.bc(), false, max_sites)?;
        let restricted = cache.load_or_compute(l, mode.bc(), true, max_sites)?;
        return Ok((full, restricted));
    }
    let tables = enumerate_tables_with_guard(l, mode.bc(), max_sites)?;
    Ok((
        tables.unrestricted.bond_marginal(),
        tables.restricted.bond_marginal(),
    ))
}

/// The modes to tabulate: both where the lattice allows it by default, or
/// exactly what the user asked for.
fn modes_from(raw: Option<String>, l: usize) -> CliResult<Vec<HamiltonianMode>> {
    match raw {
        None => Ok(if l >= 3 {
            vec![HamiltonianMode::OpenH, HamiltonianMode::TorusH]
        } else {
            vec![HamiltonianMode::OpenH]
        }),
        Some(raw) if raw.trim().eq_ignore_ascii_case("both") => {
            Ok(vec![HamiltonianMode::OpenH, HamiltonianMode::TorusH])
        }
        Some(raw) => parse_list::<HamiltonianMode>(&raw, "mode").map_err(|e| match e {
            CliError::Usage(m) => {
                CliError::Usage(format!("{m} (expected open-h, torus-h, or both)"))
            }
            other => other,
        }),
    }
}

pub fn run(args: ExactArgs) -> CliResult<()> {
    let mut cfg = FileConfig::load(args.config.as_deref())?;
    let ls = require(cfg.resolve_list::<usize>(args.l, "L")?, "--L")?;
    let ks = couplings_from(
        cfg.resolve_list::<f64>(args.k, "K")?,
        cfg.resolve_list::<f64>(args.t, "T")?,
    )?;
    let mode_raw = cfg.resolve(args.mode, "mode")?;
    let max_sites = cfg
        .resolve(args.max_sites, "max-sites")?
        .unwrap_or(DEFAULT_MAX_SITES);
    let out = cfg.resolve(args.out, "out")?;
    cfg.finish()?;

    if max_sites > DEFAULT_MAX_SITES {
        eprintln!(
            "warning: enumeration over {max_sites} sites walks 2^{max_sites} states; \
             expect minutes to hours beyond {DEFAULT_MAX_SITES}"
        );
    }

    let mut csv = Csv::new("exact");
    csv.kv("L", echo_list(&ls));
    csv.kv("K", echo_list(&ks));
    csv.kv("mode", mode_raw.clone().unwrap_or_else(|| "both".into()));
    csv.kv("max-sites", max_sites);
    if let Some(dir) = std::env::var_os(CACHE_ENV) {
        csv.kv("cache-dir", std::path::PathBuf::from(dir).display());
    }
    csv.columns(&[
        "L",
        "K",
        "mode",
        "logQ",
        "logQ1",
        "logQ2",
        "F",
        "F1",
        "deltaF",
        "q2_underflow",
    ]);

    for &l in &ls {
        for mode in modes_from(mode_raw.clone(), l)? {
            let (full, restricted) = load_tables(l, mode, max_sites)?;
            for &k in &ks {
                let split = PartitionSplit::from_tables(&full, &restricted, k, mode)?;
                let (fe, fe1, dfe) = if k > 0.0 {
                    let e = free_energies(&split, 1.0 / k, 1.0)?;
                    (f(e.f), f(e.f1), f(e.delta_f))
                } else {
                    (String::new(), String::new(), String::new())
                };
                csv.row(&[
                    l.to_string(),
                    f(k),
                    mode.as_str().to_string(),
                    f(split.log_q),
                    f(split.log_q1),
                    f(split.log_q2),
                    fe,
                    fe1,
                    dfe,
                    split.q2_underflow.to_string(),
                ]);
            }
        }
    }
    csv.write(out.as_deref())
}
