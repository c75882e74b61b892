//! `rg`: majority-rule block renormalization down to one site. The input is
//! either a spin-configuration file or a single seeded Monte Carlo snapshot
//! equilibrated in place. Rows report the average spin and its magnitude at
//! every level of the flow.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use torus_ising::lattice::{build_lattice, BoundaryCondition, SpinConfig};
use torus_ising::mc::{metropolis_sweep, wolff_step, Algorithm};
use torus_ising::onsager::critical_coupling;
use torus_ising::renorm::{rg_flow, BlockRule, TieRule};

use crate::args::RgArgs;
use crate::report::{f, Csv};
use crate::settings::{coupling_from, require, FileConfig};
use crate::{CliError, CliResult};

fn tie_rule_from(raw: Option<String>, seed: u64) -> CliResult<Option<TieRule>> {
    match raw.as_deref() {
        None => Ok(None),
        Some("plus") => Ok(Some(TieRule::PlusWins)),
        Some("minus") => Ok(Some(TieRule::MinusWins)),
        Some("random") => Ok(Some(TieRule::RandomTie(seed))),
        Some(other) => Err(CliError::Usage(format!(
            "--tie-rule: unknown rule '{other}' (expected plus, minus, or random)"
        ))),
    }
}

struct McSnapshot {
    l: usize,
    bc: BoundaryCondition,
    k: f64,
    algorithm: Algorithm,
    sweeps: u64,
    seed: u64,
}

impl McSnapshot {
    /// Equilibrates a fresh configuration and returns it: cold start in the
    /// ordered phase, hot start otherwise, matching the chain runner.
    fn sample(&self) -> CliResult<SpinConfig> {
        let lattice = build_lattice(self.l, self.bc)?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut config = if self.k > critical_coupling::<f64>() {
            SpinConfig::all_up(self.l)
        } else {
            SpinConfig::random(self.l, &mut rng)
        };
        for _ in 0..self.sweeps {
            match self.algorithm {
                Algorithm::Metropolis => metropolis_sweep(&mut config, &lattice, self.k, &mut rng)?,
                Algorithm::Wolff => {
                    wolff_step(&mut config, &lattice, self.k, &mut rng)?;
                }
            }
        }
        Ok(config)
    }
}

pub fn run(args: RgArgs) -> CliResult<()> {
    let mut cfg = FileConfig::load(args.config.as_deref())?;
    let spin_config = cfg.resolve(args.spin_config, "spin-config")?;
    let l = cfg.resolve(args.l, "L")?;
    let bc = cfg.resolve_parse::<BoundaryCondition>(args.bc, "bc")?;
    let k_flag = cfg.resolve(args.k, "K")?;
    let t_flag = cfg.resolve(args.t, "T")?;
    let algo = cfg.resolve_parse::<Algorithm>(args.algo, "algo")?;
    let sweeps = cfg.resolve(args.sweeps, "sweeps")?.unwrap_or(1_000);
    let seed = cfg.resolve(args.seed, "seed")?.unwrap_or(0);
    let b = cfg.resolve(args.b, "b")?.unwrap_or(3);
    let tie_seed = cfg.resolve(args.tie_seed, "tie-seed")?.unwrap_or(0);
    let tie_rule = tie_rule_from(cfg.resolve(args.tie_rule, "tie-rule")?, tie_seed)?;
    let out = cfg.resolve(args.out, "out")?;
    cfg.finish()?;

    let mut csv = Csv::new("rg");
    let config = match (&spin_config, l) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)?;
            let (config, _bc) = SpinConfig::parse(&text)?;
            csv.kv("spin-config", path.display());
            config
        }
        (None, Some(l)) => {
            let snapshot = McSnapshot {
                l,
                bc: require(bc, "--bc")?,
                k: coupling_from(k_flag, t_flag)?,
                algorithm: require(algo, "--algo")?,
                sweeps,
                seed,
            };
            csv.kv("L", snapshot.l);
            csv.kv("bc", snapshot.bc.as_str());
            csv.kv("K", snapshot.k);
            csv.kv("algo", snapshot.algorithm.as_str());
            csv.kv("sweeps", snapshot.sweeps);
            csv.kv("seed", snapshot.seed);
            snapshot.sample()?
        }
        (Some(_), Some(_)) => {
            return Err(CliError::Usage(
                "give either --spin-config or --L (with sampling flags), not both".into(),
            ));
        }
        (None, None) => {
            return Err(CliError::Usage(
                "an input is required: --spin-config FILE, or --L with \
                 --bc/--K/--algo to sample one"
                    .into(),
            ));
        }
    };

    csv.kv("b", b);
    if let Some(rule) = tie_rule {
        csv.kv(
            "tie-rule",
            match rule {
                TieRule::PlusWins => "plus".to_string(),
                TieRule::MinusWins => "minus".to_string(),
                TieRule::RandomTie(s) => format!("random (tie-seed = {s})"),
            },
        );
    }

    let rule = BlockRule::new(b, tie_rule)?;
    let flow = rg_flow(&config, &rule)?;
    csv.columns(&["level", "side", "avg_s", "abs_avg_s"]);
    for (level, (config, &avg)) in flow.configs.iter().zip(&flow.avg_spins).enumerate() {
        csv.row(&[
            level.to_string(),
            config.side().to_string(),
            f(avg),
            f(avg.abs()),
        ]);
    }
    csv.write(out.as_deref())
}
