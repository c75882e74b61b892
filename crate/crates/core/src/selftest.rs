//! A fast built-in check suite wiring every module against a small oracle.
//!
//! Each check is independent and cheap (the whole suite runs in well under a
//! second); the result is a list of named pass/fail lines for front-ends to
//! print verbatim.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::enumerate::{enumerate_tables, partition_split, HamiltonianMode};
use crate::lattice::{build_lattice, BoundaryCondition, SpinConfig};
use crate::mc::{metropolis_sweep, run_chain, wolff_step, Algorithm, ChainParams};
use crate::onsager::{critical_coupling, free_energy_density, spontaneous_magnetization};
use crate::renorm::{block_spin, BlockRule};
use crate::topology::{loop_class, LatticeLoop, TorusEmbedding, WindingPair};
use crate::transfer::TransferOperator;

/// One named check outcome.
#[derive(Debug, Clone)]
pub struct CheckLine {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(
    lines: &mut Vec<CheckLine>,
    name: &'static str,
    run: impl FnOnce() -> Result<String, String>,
) {
    let (passed, detail) = match run() {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    lines.push(CheckLine {
        name,
        passed,
        detail,
    });
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

/// Runs the whole suite; failures never panic, they are reported as lines.
pub fn run_selftest() -> Vec<CheckLine> {
    let mut lines = Vec::new();

    check(&mut lines, "enumerate.l2-closed-form", || {
        let k = 0.3f64;
        let split = partition_split(2, k, HamiltonianMode::OpenH).map_err(|e| e.to_string())?;
        let exact = (2.0 * (4.0 * k).exp() + 12.0 + 2.0 * (-4.0 * k).exp()).ln();
        if close(split.log_q, exact, 1e-12) {
            Ok(format!("log Q = {:.12}", split.log_q))
        } else {
            Err(format!("log Q = {} expected {}", split.log_q, exact))
        }
    });

    check(&mut lines, "enumerate.matched-count", || {
        let tables = enumerate_tables(3, BoundaryCondition::Torus).map_err(|e| e.to_string())?;
        let total = tables.restricted.total();
        if total == 1 << 4 {
            Ok(format!("2^((L-1)^2) = {total}"))
        } else {
            Err(format!("matched count {total}, expected 16"))
        }
    });

    check(&mut lines, "enumerate.gap-positive", || {
        let split = partition_split(3, 0.5, HamiltonianMode::TorusH).map_err(|e| e.to_string())?;
        let gap = split.log_q - split.log_q1;
        if gap > 1e-12 {
            Ok(format!("log Q − log Q1 = {gap:.6}"))
        } else {
            Err(format!("gap {gap} not positive"))
        }
    });

    check(&mut lines, "transfer.matches-enumeration", || {
        let k = 0.44f64;
        for bc in [BoundaryCondition::Open, BoundaryCondition::Torus] {
            let mode = match bc {
                BoundaryCondition::Open => HamiltonianMode::OpenH,
                BoundaryCondition::Torus => HamiltonianMode::TorusH,
            };
            let op = TransferOperator::<f64>::new(3, bc, k).map_err(|e| e.to_string())?;
            let split = partition_split(3, k, mode).map_err(|e| e.to_string())?;
            if !close(op.log_z(), split.log_q, 1e-10) {
                return Err(format!("log Z mismatch for {}", bc.as_str()));
            }
            if !close(op.log_q1(), split.log_q1, 1e-10) {
                return Err(format!("log Q1 mismatch for {}", bc.as_str()));
            }
        }
        Ok("L=3 agreement at 1e-10".into())
    });

    check(&mut lines, "onsager.critical-point", || {
        let kc: f64 = critical_coupling();
        let s = (2.0 * kc).sinh();
        if (s - 1.0).abs() < 1e-15 {
            Ok(format!("sinh(2Kc) = {s:.16}"))
        } else {
            Err(format!("sinh(2Kc) = {s}"))
        }
    });

    check(&mut lines, "onsager.free-ensemble-entropy", || {
        let f = free_energy_density(0.0).map_err(|e| e.to_string())?;
        let expect = -std::f64::consts::LN_2;
        if close(f, expect, 1e-9) {
            Ok(format!("beta*f(0) = {f:.12}"))
        } else {
            Err(format!("beta*f(0) = {f}, expected {expect}"))
        }
    });

    check(&mut lines, "onsager.magnetization", || {
        let m = spontaneous_magnetization(0.5).map_err(|e| e.to_string())?;
        if close(m, 0.911319377877496, 1e-12) {
            Ok(format!("m(0.5) = {m:.12}"))
        } else {
            Err(format!("m(0.5) = {m}"))
        }
    });

    check(&mut lines, "topology.winding-homomorphism", || {
        let a = LatticeLoop::from_letters((0, 0), "RRRR").map_err(|e| e.to_string())?;
        let b = LatticeLoop::from_letters((0, 0), "UUUU").map_err(|e| e.to_string())?;
        let ca = loop_class(&a, 4).map_err(|e| e.to_string())?;
        let cb = loop_class(&b, 4).map_err(|e| e.to_string())?;
        let composed = crate::topology::compose_loops(&a, &b).map_err(|e| e.to_string())?;
        let cc = loop_class(&composed, 4).map_err(|e| e.to_string())?;
        if ca + cb == cc && cc == (WindingPair { m: 1, n: 1 }) {
            Ok("classes add under composition".into())
        } else {
            Err(format!("{ca:?} + {cb:?} != {cc:?}"))
        }
    });

    check(&mut lines, "topology.normals-cancel", || {
        let emb = TorusEmbedding::<f64>::default();
        let sum = crate::topology::normals_sum(&emb, 8).map_err(|e| e.to_string())?;
        let max = sum.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        if max < 1e-9 {
            Ok(format!("max |component| = {max:.3e}"))
        } else {
            Err(format!("normals sum to {sum:?}"))
        }
    });

    check(&mut lines, "renorm.majority", || {
        let rule = BlockRule::majority_b3();
        let coarse = block_spin(&SpinConfig::checkerboard(9), &rule).map_err(|e| e.to_string())?;
        let expect = SpinConfig::checkerboard(3);
        if coarse.spins() == expect.spins() {
            Ok("checkerboard(9) -> checkerboard(3)".into())
        } else {
            Err("majority rule broke the checkerboard".into())
        }
    });

    check(&mut lines, "mc.deterministic-replay", || {
        let p = ChainParams {
            l: 4,
            bc: BoundaryCondition::Torus,
            k: 0.4,
            algorithm: Algorithm::Metropolis,
            sweeps: 200,
            burn_in: 20,
            thin: 1,
            seed: 7,
        };
        let a = run_chain(&p).map_err(|e| e.to_string())?;
        let b = run_chain(&p).map_err(|e| e.to_string())?;
        if a.energy == b.energy && a.magnetization == b.magnetization {
            Ok("identical series from identical seeds".into())
        } else {
            Err("seeded replay diverged".into())
        }
    });

    check(&mut lines, "mc.trivial-dynamics", || {
        let lattice = build_lattice(4, BoundaryCondition::Open).map_err(|e| e.to_string())?;
        let mut config = SpinConfig::all_up(4);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        metropolis_sweep(&mut config, &lattice, 0.0, &mut rng).map_err(|e| e.to_string())?;
        if config.spins() != SpinConfig::all_down(4).spins() {
            return Err("free sweep is not a global flip".into());
        }
        let mut config = SpinConfig::random(4, &mut rng);
        let size = wolff_step(&mut config, &lattice, 0.0, &mut rng).map_err(|e| e.to_string())?;
        if size == 1 {
            Ok("free-ensemble updates behave".into())
        } else {
            Err(format!("free cluster size {size}"))
        }
    });

    lines
}

/// True when every line passed.
pub fn all_passed(lines: &[CheckLine]) -> bool {
    lines.iter().all(|l| l.passed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes_and_covers_every_module() {
        let lines = run_selftest();
        for l in &lines {
            assert!(l.passed, "{}: {}", l.name, l.detail);
        }
        assert!(all_passed(&lines));
        for module in [
            "enumerate",
            "transfer",
            "onsager",
            "topology",
            "renorm",
            "mc",
        ] {
            assert!(
                lines.iter().any(|l| l.name.starts_with(module)),
                "no check for {module}"
            );
        }
    }
}
