//! `transfer`: transfer-matrix `log Z`, `log Q1`, and the free-energy gap,
//! row per `(L, bc, K)`.

use torus_ising::lattice::BoundaryCondition;
use torus_ising::transfer::{deltaf_scan, DeltaFScanRow, DEFAULT_MAX_WIDTH};

use crate::args::TransferArgs;
use crate::report::{f, Csv};
use crate::settings::{bc_list, couplings_from, echo_list, require, FileConfig};
use crate::CliResult;

pub const COLUMNS: [&str; 8] = [
    "L",
    "bc",
    "K",
    "logZ",
    "logQ1",
    "deltaF_total",
    "deltaF_per_site",
    "f_per_site",
];

pub fn push_row(csv: &mut Csv, row: &DeltaFScanRow<f64>) {
    csv.row(&[
        row.l.to_string(),
        row.bc.as_str().to_string(),
        f(row.k),
        f(row.log_z),
        f(row.log_q1),
        f(row.delta_f_total),
        f(row.delta_f_per_site),
        f(row.f_per_site),
    ]);
}

/// Shared parameter block of `transfer` and `deltaf-scan`.
pub struct ScanParams {
    pub ls: Vec<usize>,
    pub ks: Vec<f64>,
    pub bcs: Vec<BoundaryCondition>,
    pub bc_explicit: bool,
    pub max_width: u32,
}

impl ScanParams {
    /// Skips torus rows for sides its lattice cannot hold (`L < 3`) when the
    /// boundary list was defaulted rather than asked for.
    pub fn bcs_for(&self, l: usize) -> Vec<BoundaryCondition> {
        self.bcs
            .iter()
            .copied()
            .filter(|&bc| self.bc_explicit || bc == BoundaryCondition::Open || l >= 3)
            .collect()
    }

    pub fn echo(&self, csv: &mut Csv) {
        csv.kv("L", echo_list(&self.ls));
        csv.kv("K", echo_list(&self.ks));
        csv.kv(
            "bc",
            echo_list(&self.bcs.iter().map(|b| b.as_str()).collect::<Vec<_>>()),
        );
        csv.kv("max-width", self.max_width);
    }
}

pub fn resolve_scan_params(
    cfg: &mut FileConfig,
    l: Option<String>,
    k: Option<String>,
    t: Option<String>,
    bc: Option<String>,
    max_width: Option<u32>,
) -> CliResult<ScanParams> {
    let ls = require(cfg.resolve_list::<usize>(l, "L")?, "--L")?;
    let ks = couplings_from(
        cfg.resolve_list::<f64>(k, "K")?,
        cfg.resolve_list::<f64>(t, "T")?,
    )?;
    let bc_raw = cfg.resolve(bc, "bc")?;
    let bc_explicit = bc_raw.is_some();
    let bcs = bc_list(bc_raw)?;
    let max_width = cfg
        .resolve(max_width, "max-width")?
        .unwrap_or(DEFAULT_MAX_WIDTH);
    Ok(ScanParams {
        ls,
        ks,
        bcs,
        bc_explicit,
        max_width,
    })
}

pub fn run(args: TransferArgs) -> CliResult<()> {
    let mut cfg = FileConfig::load(args.config.as_deref())?;
    let params = resolve_scan_params(&mut cfg, args.l, args.k, args.t, args.bc, args.max_width)?;
    let out = cfg.resolve(args.out, "out")?;
    cfg.finish()?;

    let mut csv = Csv::new("transfer");
    params.echo(&mut csv);
    csv.columns(&COLUMNS);
    for &k in &params.ks {
        for &bc in &params.bcs {
            let ls: Vec<usize> = params
                .ls
                .iter()
                .copied()
                .filter(|&l| params.bcs_for(l).contains(&bc))
                .collect();
            for row in deltaf_scan(&ls, k, bc, params.max_width)? {
                push_row(&mut csv, &row);
            }
        }
    }
    csv.write(out.as_deref())
}
