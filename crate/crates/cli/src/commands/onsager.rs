//! `onsager`: the infinite-lattice closed forms. The critical point goes in
//! the header; the body tabulates the free energy `βf(K)`, internal energy
//! `u(K)`, and spontaneous magnetization `m(K)` over a coupling grid.
//!
//! Grid points closer than the library's stencil guard to `K_c` fail with a
//! clear error rather than a degraded number; the default grid avoids them.

use torus_ising::onsager::{
    critical_coupling, critical_temperature_over_j, free_energy_density, internal_energy_density,
    spontaneous_magnetization,
};

use crate::args::OnsagerArgs;
use crate::report::{f, Csv};
use crate::settings::FileConfig;
use crate::{CliError, CliResult};

pub fn run(args: OnsagerArgs) -> CliResult<()> {
    let mut cfg = FileConfig::load(args.config.as_deref())?;
    let k_min = cfg.resolve(args.k_min, "k-min")?.unwrap_or(0.05);
    let k_max = cfg.resolve(args.k_max, "k-max")?.unwrap_or(1.0);
    let k_steps = cfg.resolve(args.k_steps, "k-steps")?.unwrap_or(20usize);
    let out = cfg.resolve(args.out, "out")?;
    cfg.finish()?;

    if !(k_min > 0.0) || !(k_max >= k_min) {
        return Err(CliError::Usage(
            "need 0 < k-min ≤ k-max for the coupling grid".into(),
        ));
    }
    if k_steps < 1 {
        return Err(CliError::Usage("k-steps must be at least 1".into()));
    }

    let mut csv = Csv::new("onsager");
    csv.kv("k-min", k_min);
    csv.kv("k-max", k_max);
    csv.kv("k-steps", k_steps);
    csv.kv("kc", f(critical_coupling::<f64>()));
    csv.kv("tc_over_j", f(critical_temperature_over_j::<f64>()));
    csv.columns(&["K", "beta_f", "u", "m"]);

    for i in 0..k_steps {
        let k = if k_steps == 1 {
            k_min
        } else {
            k_min + (k_max - k_min) * i as f64 / (k_steps - 1) as f64
        };
        csv.row(&[
            f(k),
            f(free_energy_density(k)?),
            f(internal_energy_density(k)?),
            f(spontaneous_magnetization(k)?),
        ]);
    }
    csv.write(out.as_deref())
}
