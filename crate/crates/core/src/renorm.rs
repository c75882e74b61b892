//! Majority-rule block-spin transformation and iterated flows.
//!
//! Each `b×b` block collapses to the sign of its spin sum. Iterating the
//! transform shrinks an `L = b^k` system to a single site; an ordered
//! configuration keeps (and sharpens) its magnetization along the way, while
//! a disordered one arrives at the final site with no systematic bias. The
//! flow acts on configurations only — there is no coupling-space recursion
//! here — and blocking is independent of boundary conditions because the
//! blocks tile the lattice exactly.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::Error;
use crate::lattice::{magnetization, SpinConfig};
use crate::Result;

/// How an even-sided block with zero spin sum is resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TieRule {
    PlusWins,
    MinusWins,
    /// Deterministic pseudo-random resolution keyed by this seed and the
    /// block's position, so repeated runs agree.
    RandomTie(u64),
}

/// Block side and tie policy. Ties cannot occur for odd `b`, so the rule is
/// ignored there; even `b` with no rule fails on the first tied block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockRule {
    b: usize,
    tie_rule: Option<TieRule>,
}

impl BlockRule {
    pub fn new(b: usize, tie_rule: Option<TieRule>) -> Result<Self> {
        if b < 2 {
            return Err(Error::Domain(format!("block side must be ≥ 2, got {b}")));
        }
        Ok(BlockRule { b, tie_rule })
    }

    /// The default rule: `b = 3`, where majorities are always strict.
    pub fn majority_b3() -> Self {
        BlockRule {
            b: 3,
            tie_rule: None,
        }
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn tie_rule(&self) -> Option<TieRule> {
        self.tie_rule
    }

    fn resolve_tie(&self, side: usize, bx: usize, by: usize) -> Result<i8> {
        match self.tie_rule {
            Some(TieRule::PlusWins) => Ok(1),
            Some(TieRule::MinusWins) => Ok(-1),
            Some(TieRule::RandomTie(seed)) => {
                // Disjoint bit fields make the derived seed unique per
                // (side, block) for any lattice this crate can hold.
                let derived = seed ^ ((side as u64) << 42) ^ ((bx as u64) << 21) ^ by as u64;
                let mut rng = ChaCha8Rng::seed_from_u64(derived);
                Ok(if rng.gen::<bool>() { 1 } else { -1 })
            }
            None => Err(Error::TieWithoutRule(format!(
                "block ({bx}, {by}) sums to zero and b = {} is even",
                self.b
            ))),
        }
    }
}

/// Applies one majority-rule blocking, mapping side `L` to side `L/b`.
pub fn block_spin(config: &SpinConfig, rule: &BlockRule) -> Result<SpinConfig> {
    let l = config.side();
    let b = rule.b;
    if !l.is_multiple_of(b) {
        return Err(Error::NotDivisible(format!(
            "side {l} is not divisible by block side {b}"
        )));
    }
    let out = l / b;
    let rows: Vec<Vec<i8>> = (0..out)
        .into_par_iter()
        .map(|by| {
            (0..out)
                .map(|bx| {
                    let mut sum = 0i64;
                    for dy in 0..b {
                        for dx in 0..b {
                            sum += config.get(bx * b + dx, by * b + dy) as i64;
                        }
                    }
                    match sum.cmp(&0) {
                        std::cmp::Ordering::Greater => Ok(1),
                        std::cmp::Ordering::Less => Ok(-1),
                        std::cmp::Ordering::Equal => rule.resolve_tie(l, bx, by),
                    }
                })
                .collect::<Result<Vec<i8>>>()
        })
        .collect::<Result<_>>()?;
    SpinConfig::from_spins(out, rows.concat())
}

/// A flow down to one site: the configurations at sizes `L, L/b, …, 1` and
/// the average spin at each level.
#[derive(Debug, Clone)]
pub struct RgFlow {
    pub configs: Vec<SpinConfig>,
    pub avg_spins: Vec<f64>,
}

impl RgFlow {
    /// Number of recorded levels, `log_b L + 1`.
    pub fn levels(&self) -> usize {
        self.configs.len()
    }

    /// The single spin left at the end.
    pub fn final_spin(&self) -> i8 {
        self.configs.last().unwrap().get(0, 0)
    }
}

fn is_power_of(mut l: usize, b: usize) -> bool {
    while l.is_multiple_of(b) {
        l /= b;
    }
    l == 1
}

/// Iterates [`block_spin`] until one site remains, recording every level.
pub fn rg_flow(config: &SpinConfig, rule: &BlockRule) -> Result<RgFlow> {
    if !is_power_of(config.side(), rule.b) {
        return Err(Error::NotPowerOfB(format!(
            "side {} is not a power of block side {}",
            config.side(),
            rule.b
        )));
    }
    let mut configs = vec![config.clone()];
    let mut avg_spins = vec![magnetization(config).average];
    while configs.last().unwrap().side() > 1 {
        let next = block_spin(configs.last().unwrap(), rule)?;
        avg_spins.push(magnetization(&next).average);
        configs.push(next);
    }
    Ok(RgFlow { configs, avg_spins })
}

/// Aggregate magnetization of an ensemble at one flow level.
#[derive(Debug, Clone, Copy)]
pub struct AmplificationRow {
    pub level: usize,
    pub side: usize,
    /// Mean over configurations of `|average spin|`.
    pub mean_abs_s: f64,
    /// Mean over configurations of the signed average spin — the bias; near
    /// zero for unbiased ensembles even when every final spin is ±1.
    pub mean_s: f64,
}

/// Flows every configuration of an ensemble and tabulates per-level
/// magnetization. Ordered ensembles amplify toward `|s| = 1`; disordered
/// ones reach the final site with `mean_s` near zero.
pub fn order_amplification_report(
    configs: &[SpinConfig],
    rule: &BlockRule,
) -> Result<Vec<AmplificationRow>> {
    let first = configs
        .first()
        .ok_or_else(|| Error::Domain("no configurations given".into()))?;
    let side = first.side();
    if configs.iter().any(|c| c.side() != side) {
        return Err(Error::ShapeMismatch(
            "all configurations must share one side".into(),
        ));
    }
    let flows: Vec<RgFlow> = configs
        .par_iter()
        .map(|c| rg_flow(c, rule))
        .collect::<Result<_>>()?;
    let levels = flows[0].levels();
    let n = configs.len() as f64;
    Ok((0..levels)
        .map(|level| {
            let mean_abs_s = flows.iter().map(|f| f.avg_spins[level].abs()).sum::<f64>() / n;
            let mean_s = flows.iter().map(|f| f.avg_spins[level]).sum::<f64>() / n;
            AmplificationRow {
                level,
                side: flows[0].configs[level].side(),
                mean_abs_s,
                mean_s,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unanimous_blocks_stay_unanimous() {
        for b in [2usize, 3, 4] {
            let rule = BlockRule::new(b, Some(TieRule::PlusWins)).unwrap();
            let blocked = block_spin(&SpinConfig::all_up(b * 3), &rule).unwrap();
            assert_eq!(blocked.spins(), SpinConfig::all_up(3).spins());
            let blocked = block_spin(&SpinConfig::all_down(b * 2), &rule).unwrap();
            assert_eq!(blocked.spins(), SpinConfig::all_down(2).spins());
        }
    }

    #[test]
    fn checkerboard_blocks_to_checkerboard() {
        // Each 3×3 block holds a 5–4 majority matching its anchor parity.
        let rule = BlockRule::majority_b3();
        let blocked = block_spin(&SpinConfig::checkerboard(9), &rule).unwrap();
        assert_eq!(blocked.spins(), SpinConfig::checkerboard(3).spins());
    }

    #[test]
    fn strict_majority_wins() {
        // 5 up, 4 down in a single 3×3 block.
        let spins = vec![1, 1, 1, 1, 1, -1, -1, -1, -1];
        let config = SpinConfig::from_spins(3, spins).unwrap();
        let blocked = block_spin(&config, &BlockRule::majority_b3()).unwrap();
        assert_eq!(blocked.spins(), &[1]);
    }

    #[test]
    fn divisibility_enforced() {
        let rule = BlockRule::new(2, Some(TieRule::PlusWins)).unwrap();
        assert!(matches!(
            block_spin(&SpinConfig::all_up(5), &rule),
            Err(Error::NotDivisible(_))
        ));
        assert!(matches!(BlockRule::new(1, None), Err(Error::Domain(_))));
    }

    #[test]
    fn tie_handling() {
        // A 2×2 block with two up, two down.
        let config = SpinConfig::from_spins(2, vec![1, -1, -1, 1]).unwrap();
        assert!(matches!(
            block_spin(&config, &BlockRule::new(2, None).unwrap()),
            Err(Error::TieWithoutRule(_))
        ));
        let plus = block_spin(
            &config,
            &BlockRule::new(2, Some(TieRule::PlusWins)).unwrap(),
        )
        .unwrap();
        assert_eq!(plus.spins(), &[1]);
        let minus = block_spin(
            &config,
            &BlockRule::new(2, Some(TieRule::MinusWins)).unwrap(),
        )
        .unwrap();
        assert_eq!(minus.spins(), &[-1]);
        let r1 = block_spin(
            &config,
            &BlockRule::new(2, Some(TieRule::RandomTie(9))).unwrap(),
        )
        .unwrap();
        let r2 = block_spin(
            &config,
            &BlockRule::new(2, Some(TieRule::RandomTie(9))).unwrap(),
        )
        .unwrap();
        assert_eq!(r1.spins(), r2.spins());
    }

    #[test]
    fn random_tie_varies_with_seed() {
        let config = SpinConfig::from_spins(2, vec![1, -1, -1, 1]).unwrap();
        let mut seen = std::collections::BTreeSet::new();
        for seed in 0..16 {
            let rule = BlockRule::new(2, Some(TieRule::RandomTie(seed))).unwrap();
            seen.insert(block_spin(&config, &rule).unwrap().spins()[0]);
        }
        assert_eq!(seen.len(), 2, "both tie outcomes appear across seeds");
    }

    #[test]
    fn flip_commutes_for_odd_blocks() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        let rule = BlockRule::majority_b3();
        for _ in 0..20 {
            let c = SpinConfig::random(9, &mut rng);
            let blocked_flip = block_spin(&c.flipped(), &rule).unwrap();
            let flip_blocked = block_spin(&c, &rule).unwrap().flipped();
            assert_eq!(blocked_flip.spins(), flip_blocked.spins());
        }
    }

    #[test]
    fn ordered_flow_contracts_to_plus_one() {
        let flow = rg_flow(&SpinConfig::all_up(27), &BlockRule::majority_b3()).unwrap();
        assert_eq!(flow.levels(), 4); // 27, 9, 3, 1 — three steps
        assert_eq!(flow.final_spin(), 1);
        for s in &flow.avg_spins {
            assert_eq!(*s, 1.0);
        }
        let down = rg_flow(
            &SpinConfig::all_down(8),
            &BlockRule::new(2, Some(TieRule::PlusWins)).unwrap(),
        )
        .unwrap();
        assert_eq!(down.final_spin(), -1);
    }

    #[test]
    fn level_count_is_exact() {
        let rule = BlockRule::new(2, Some(TieRule::PlusWins)).unwrap();
        let flow = rg_flow(&SpinConfig::all_up(16), &rule).unwrap();
        assert_eq!(flow.levels(), 5);
        let sides: Vec<usize> = flow.configs.iter().map(|c| c.side()).collect();
        assert_eq!(sides, vec![16, 8, 4, 2, 1]);
    }

    #[test]
    fn non_power_sides_rejected() {
        assert!(matches!(
            rg_flow(&SpinConfig::all_up(12), &BlockRule::majority_b3()),
            Err(Error::NotPowerOfB(_))
        ));
    }

    #[test]
    fn random_configs_reach_the_final_site_unbiased() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let configs: Vec<SpinConfig> = (0..100).map(|_| SpinConfig::random(27, &mut rng)).collect();
        let report = order_amplification_report(&configs, &BlockRule::majority_b3()).unwrap();
        assert_eq!(report.len(), 4);
        // No spontaneous order out of blocking noise: the signed bias stays
        // small at every level even though each final |s| is 1.
        for row in &report {
            assert!(
                row.mean_s.abs() < 0.15,
                "level {}: {}",
                row.level,
                row.mean_s
            );
        }
        assert!((report.last().unwrap().mean_abs_s - 1.0).abs() < 1e-12);
        assert!(report[0].mean_abs_s < 0.1);
    }

    #[test]
    fn ordered_ensemble_amplifies() {
        let configs = vec![SpinConfig::all_up(27); 5];
        let report = order_amplification_report(&configs, &BlockRule::majority_b3()).unwrap();
        for row in &report {
            assert_eq!(row.mean_abs_s, 1.0);
            assert_eq!(row.mean_s, 1.0);
        }
    }

    #[test]
    fn report_rejects_mixed_sides() {
        let configs = vec![SpinConfig::all_up(9), SpinConfig::all_up(27)];
        assert!(matches!(
            order_amplification_report(&configs, &BlockRule::majority_b3()),
            Err(Error::ShapeMismatch(_))
        ));
        assert!(matches!(
            order_amplification_report(&[], &BlockRule::majority_b3()),
            Err(Error::Domain(_))
        ));
    }
}
