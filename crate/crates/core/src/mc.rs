//! Metropolis and Wolff sampling with blocked error analysis.
//!
//! One chain is strictly sequential and fully determined by its parameters:
//! the generator is ChaCha8 seeded from the 64-bit seed, and parallel chains
//! take the same seed on distinct ChaCha streams (the generator's documented
//! split mechanism), so results are identical across runs and thread counts.
//! Metropolis proposals scan sites in fixed raster order; correctness rests
//! on the stationary-distribution checks against exact enumeration, not on
//! any particular update sequence.
//!
//! All statistics here are `f64`; energies are in units of `J` (`E = −B`)
//! and couplings are the dimensionless `K = J/(k_B T)`.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::Error;
use crate::lattice::{bond_sum, build_lattice, BoundaryCondition, LatticeSpec, SpinConfig};
use crate::onsager::critical_coupling;
use crate::Result;

/// Update dynamics for one chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    /// Single-site proposals in raster order, one lattice pass per sweep.
    Metropolis,
    /// One cluster grow-and-flip per sweep.
    Wolff,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Metropolis => "metropolis",
            Algorithm::Wolff => "wolff",
        }
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "metropolis" => Ok(Algorithm::Metropolis),
            "wolff" => Ok(Algorithm::Wolff),
            other => Err(Error::Parse(format!(
                "unknown algorithm '{other}' (expected 'metropolis' or 'wolff')"
            ))),
        }
    }
}

/// Everything that determines a chain, and therefore its exact output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainParams {
    pub l: usize,
    pub bc: BoundaryCondition,
    pub k: f64,
    pub algorithm: Algorithm,
    /// Measurement sweeps after burn-in.
    pub sweeps: u64,
    /// Discarded leading sweeps.
    pub burn_in: u64,
    /// Sweeps between retained samples.
    pub thin: u64,
    pub seed: u64,
}

impl ChainParams {
    pub fn validate(&self) -> Result<()> {
        build_lattice(self.l, self.bc)?;
        if !self.k.is_finite() || self.k < 0.0 {
            return Err(Error::InvalidCoupling(
                "coupling K must be finite and non-negative".into(),
            ));
        }
        if self.sweeps == 0 {
            return Err(Error::Domain("sweeps must be positive".into()));
        }
        if self.thin == 0 {
            return Err(Error::Domain("thin must be at least 1".into()));
        }
        Ok(())
    }
}

/// Retained samples of total energy and total spin, with their provenance.
#[derive(Debug, Clone)]
pub struct ObservableSeries {
    pub params: ChainParams,
    pub chain_index: u32,
    /// `E = −B` per retained sweep, in units of `J`.
    pub energy: Vec<f64>,
    /// Total spin `M` per retained sweep.
    pub magnetization: Vec<i64>,
}

impl ObservableSeries {
    pub fn len(&self) -> usize {
        self.energy.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energy.is_empty()
    }
}

struct Neighbors {
    flat: Vec<u32>,
    off: Vec<u32>,
}

impl Neighbors {
    fn new(lattice: &LatticeSpec) -> Self {
        let adj = lattice.adjacency();
        let mut flat = Vec::new();
        let mut off = Vec::with_capacity(adj.len() + 1);
        off.push(0);
        for list in adj {
            flat.extend_from_slice(&list);
            off.push(flat.len() as u32);
        }
        Neighbors { flat, off }
    }

    #[inline]
    fn of(&self, site: usize) -> &[u32] {
        &self.flat[self.off[site] as usize..self.off[site + 1] as usize]
    }
}

fn metropolis_pass<R: Rng>(spins: &mut [i8], nbrs: &Neighbors, k: f64, rng: &mut R) {
    // b_i = s_i·Σ s_j ranges over ±deg; only positive values need a weight.
    let accept: [f64; 5] = std::array::from_fn(|b| (-2.0 * k * b as f64).exp());
    for i in 0..spins.len() {
        let mut nbr = 0i32;
        for &j in nbrs.of(i) {
            nbr += spins[j as usize] as i32;
        }
        let b = spins[i] as i32 * nbr;
        if b <= 0 || rng.gen::<f64>() < accept[b as usize] {
            spins[i] = -spins[i];
        }
    }
}

/// One Metropolis sweep: `N` single-site proposals in raster order, each
/// accepted with probability `min(1, e^{−2K·s_i·Σ_nbr s_j})`.
///
/// Proposals that do not raise the energy are accepted with probability
/// exactly 1, which makes parts of the dynamics deterministic. At `K = 0`
/// every proposal qualifies, so a full sweep is a global flip and the chain
/// does not mix at all. More subtly, on small periodic lattices a few states
/// cascade through the whole raster with every local field `≤ 0`
/// ([`deterministic_sweep_image`]); each forms a closed two-cycle with its
/// global flip that the chain can neither enter nor leave, so the sampled
/// law is the Boltzmann distribution restricted to the reachable class.
/// Cluster updates (or a random scan order) are free of both effects.
pub fn metropolis_sweep<R: Rng>(
    config: &mut SpinConfig,
    lattice: &LatticeSpec,
    k: f64,
    rng: &mut R,
) -> Result<()> {
    if config.sites() != lattice.sites() {
        return Err(Error::ShapeMismatch(
            "configuration and lattice sizes differ".into(),
        ));
    }
    let nbrs = Neighbors::new(lattice);
    let mut spins = config.spins().to_vec();
    metropolis_pass(&mut spins, &nbrs, k, rng);
    *config = SpinConfig::from_spins(lattice.side(), spins)?;
    Ok(())
}

/// If a raster Metropolis sweep started from `config` involves no randomness
/// at all — every proposal in scan order sees a local field `b_i ≤ 0` and is
/// therefore accepted with probability 1 — returns the state the sweep is
/// certain to produce. Returns `None` as soon as any proposal would raise the
/// energy and so could be rejected.
///
/// The condition is independent of the coupling (the `b_i` are integers), so
/// a state whose deterministic image cascades straight back to it sits on a
/// closed two-cycle of [`metropolis_sweep`] at every `K`. Enumerating such
/// states for a small lattice identifies the part of state space the raster
/// chain cannot exchange with; see the note on [`metropolis_sweep`].
pub fn deterministic_sweep_image(
    config: &SpinConfig,
    lattice: &LatticeSpec,
) -> Result<Option<SpinConfig>> {
    if config.sites() != lattice.sites() {
        return Err(Error::ShapeMismatch(
            "configuration and lattice sizes differ".into(),
        ));
    }
    let nbrs = Neighbors::new(lattice);
    let mut spins = config.spins().to_vec();
    for i in 0..spins.len() {
        let mut nbr = 0i32;
        for &j in nbrs.of(i) {
            nbr += spins[j as usize] as i32;
        }
        if spins[i] as i32 * nbr > 0 {
            return Ok(None);
        }
        spins[i] = -spins[i];
    }
    Ok(Some(SpinConfig::from_spins(lattice.side(), spins)?))
}

fn wolff_pass<R: Rng>(
    spins: &mut [i8],
    nbrs: &Neighbors,
    k: f64,
    rng: &mut R,
    in_cluster: &mut [bool],
    stack: &mut Vec<u32>,
) -> usize {
    let p_add = -(-2.0 * k).exp_m1(); // 1 − e^{−2K}
    in_cluster.fill(false);
    stack.clear();
    let seed_site = rng.gen_range(0..spins.len());
    let cluster_spin = spins[seed_site];
    in_cluster[seed_site] = true;
    stack.push(seed_site as u32);
    let mut size = 0usize;
    while let Some(site) = stack.pop() {
        size += 1;
        for &j in nbrs.of(site as usize) {
            let j = j as usize;
            if !in_cluster[j] && spins[j] == cluster_spin && rng.gen::<f64>() < p_add {
                in_cluster[j] = true;
                stack.push(j as u32);
            }
        }
    }
    for (s, &inside) in spins.iter_mut().zip(in_cluster.iter()) {
        if inside {
            *s = -*s;
        }
    }
    size
}

/// One Wolff update: grows a cluster from a uniform seed site, joining
/// aligned neighbors with probability `1 − e^{−2K}`, then flips it whole.
/// Returns the cluster size.
pub fn wolff_step<R: Rng>(
    config: &mut SpinConfig,
    lattice: &LatticeSpec,
    k: f64,
    rng: &mut R,
) -> Result<usize> {
    if config.sites() != lattice.sites() {
        return Err(Error::ShapeMismatch(
            "configuration and lattice sizes differ".into(),
        ));
    }
    let nbrs = Neighbors::new(lattice);
    let mut spins = config.spins().to_vec();
    let mut in_cluster = vec![false; spins.len()];
    let mut stack = Vec::new();
    let size = wolff_pass(&mut spins, &nbrs, k, rng, &mut in_cluster, &mut stack);
    *config = SpinConfig::from_spins(lattice.side(), spins)?;
    Ok(size)
}

fn run_chain_on_stream(params: &ChainParams, chain_index: u32) -> Result<ObservableSeries> {
    params.validate()?;
    let lattice = build_lattice(params.l, params.bc)?;
    let nbrs = Neighbors::new(&lattice);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    rng.set_stream(chain_index as u64);

    // Cold start in the ordered regime, hot start otherwise, to shorten
    // equilibration from the matching side.
    let mut config = if params.k > critical_coupling::<f64>() {
        SpinConfig::all_up(params.l)
    } else {
        SpinConfig::random(params.l, &mut rng)
    };
    let mut spins = config.spins().to_vec();
    let mut in_cluster = vec![false; spins.len()];
    let mut stack = Vec::new();

    let mut update = |spins: &mut [i8], rng: &mut ChaCha8Rng| match params.algorithm {
        Algorithm::Metropolis => {
            metropolis_pass(spins, &nbrs, params.k, rng);
        }
        Algorithm::Wolff => {
            wolff_pass(spins, &nbrs, params.k, rng, &mut in_cluster, &mut stack);
        }
    };

    for _ in 0..params.burn_in {
        update(&mut spins, &mut rng);
    }
    let retained = (params.sweeps / params.thin) as usize;
    let mut energy = Vec::with_capacity(retained);
    let mut magnetization = Vec::with_capacity(retained);
    for sweep in 0..params.sweeps {
        update(&mut spins, &mut rng);
        if (sweep + 1) % params.thin == 0 {
            config = SpinConfig::from_spins(params.l, spins.clone())?;
            energy.push(-(bond_sum(&lattice, &config)? as f64));
            magnetization.push(spins.iter().map(|&s| s as i64).sum());
        }
    }
    Ok(ObservableSeries {
        params: *params,
        chain_index,
        energy,
        magnetization,
    })
}

/// Runs one chain, deterministic in its parameters (stream 0 of the seed).
pub fn run_chain(params: &ChainParams) -> Result<ObservableSeries> {
    run_chain_on_stream(params, 0)
}

/// Runs independent chains on streams `0..chains` of the same seed, in
/// parallel; chain `i` is bit-identical to a solo run on stream `i`.
pub fn run_chains(params: &ChainParams, chains: u32) -> Result<Vec<ObservableSeries>> {
    (0..chains)
        .into_par_iter()
        .map(|i| run_chain_on_stream(params, i))
        .collect()
}

/// Summary statistics of one series.
#[derive(Debug, Clone, Copy)]
pub struct EstimateReport {
    pub n_samples: usize,
    /// `⟨E⟩/N ± err`, error from 20-block jackknife.
    pub e_per_site: f64,
    pub e_err: f64,
    /// `K²·Var(E)/N`.
    pub c_v: f64,
    /// `⟨|M|⟩/N ± err`.
    pub m_abs: f64,
    pub m_abs_err: f64,
    /// `K·(⟨M²⟩ − ⟨|M|⟩²)/N`.
    pub chi: f64,
    /// `1 − ⟨m⁴⟩/(3⟨m²⟩²)` on `m = M/N`.
    pub u4: f64,
    /// Integrated autocorrelation time of `|m|`, in retained samples.
    pub tau_int: f64,
}

const JACKKNIFE_BLOCKS: usize = 20;

fn jackknife_mean_err(series: &[f64]) -> f64 {
    let nb = JACKKNIFE_BLOCKS;
    let bs = series.len() / nb;
    let used = &series[..nb * bs];
    let total: f64 = used.iter().sum();
    let block_sums: Vec<f64> = (0..nb)
        .map(|b| used[b * bs..(b + 1) * bs].iter().sum())
        .collect();
    let leave_out: Vec<f64> = block_sums
        .iter()
        .map(|s| (total - s) / ((nb - 1) * bs) as f64)
        .collect();
    let mean = leave_out.iter().sum::<f64>() / nb as f64;
    let var = leave_out
        .iter()
        .map(|x| (x - mean) * (x - mean))
        .sum::<f64>();
    ((nb - 1) as f64 / nb as f64 * var).sqrt()
}

fn integrated_autocorrelation(series: &[f64]) -> f64 {
    let n = series.len();
    let mean = series.iter().sum::<f64>() / n as f64;
    let c0 = series.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
    if c0 == 0.0 {
        return 0.5;
    }
    // Self-consistent window: stop at the first lag W ≥ 6·τ(W).
    let mut tau = 0.5;
    let max_lag = n / 3;
    for t in 1..max_lag {
        let c: f64 = (0..n - t)
            .map(|i| (series[i] - mean) * (series[i + t] - mean))
            .sum::<f64>()
            / (n - t) as f64;
        tau += c / c0;
        if (t as f64) >= 6.0 * tau {
            break;
        }
    }
    tau.max(0.5)
}

/// Means, fluctuation observables, and blocked errors for a series of at
/// least 100 samples.
pub fn estimate(series: &ObservableSeries) -> Result<EstimateReport> {
    let n = series.len();
    if n < 100 {
        return Err(Error::SeriesTooShort(format!(
            "{n} samples; estimates need at least 100"
        )));
    }
    let sites = (series.params.l * series.params.l) as f64;
    let k = series.params.k;
    let nf = n as f64;

    let e_mean = series.energy.iter().sum::<f64>() / nf;
    let e_var = series
        .energy
        .iter()
        .map(|e| (e - e_mean) * (e - e_mean))
        .sum::<f64>()
        / nf;

    let m_abs_tot: Vec<f64> = series
        .magnetization
        .iter()
        .map(|&m| m.abs() as f64)
        .collect();
    let m_abs_mean = m_abs_tot.iter().sum::<f64>() / nf;
    let m2_mean = series
        .magnetization
        .iter()
        .map(|&m| (m as f64) * (m as f64))
        .sum::<f64>()
        / nf;

    let m_site2 = m2_mean / (sites * sites);
    let m_site4 = series
        .magnetization
        .iter()
        .map(|&m| {
            let ms = m as f64 / sites;
            ms * ms * ms * ms
        })
        .sum::<f64>()
        / nf;
    // A point mass (all samples equal) has ⟨m⁴⟩ = ⟨m²⟩², like any two-delta
    // ±m distribution, so the degenerate all-zero series takes that limit.
    let u4 = if m_site2 == 0.0 {
        2.0 / 3.0
    } else {
        1.0 - m_site4 / (3.0 * m_site2 * m_site2)
    };

    let e_site: Vec<f64> = series.energy.iter().map(|e| e / sites).collect();
    let m_abs_site: Vec<f64> = m_abs_tot.iter().map(|m| m / sites).collect();

    Ok(EstimateReport {
        n_samples: n,
        e_per_site: e_mean / sites,
        e_err: jackknife_mean_err(&e_site),
        c_v: k * k * e_var / sites,
        m_abs: m_abs_mean / sites,
        m_abs_err: jackknife_mean_err(&m_abs_site),
        chi: k * (m2_mean - m_abs_mean * m_abs_mean) / sites,
        u4,
        tau_int: integrated_autocorrelation(&m_abs_site),
    })
}

/// A Binder-cumulant curve for one system size: `(K, U4)` points sorted by
/// coupling.
#[derive(Debug, Clone)]
pub struct BinderCurve {
    pub l: usize,
    pub bc: BoundaryCondition,
    pub points: Vec<(f64, f64)>,
}

impl BinderCurve {
    fn k_range(&self) -> (f64, f64) {
        (self.points[0].0, self.points[self.points.len() - 1].0)
    }

    fn interpolate(&self, k: f64) -> f64 {
        let pts = &self.points;
        for w in pts.windows(2) {
            if k >= w[0].0 && k <= w[1].0 {
                let t = if w[1].0 == w[0].0 {
                    0.0
                } else {
                    (k - w[0].0) / (w[1].0 - w[0].0)
                };
                return w[0].1 + t * (w[1].1 - w[0].1);
            }
        }
        // Callers stay inside the overlap range.
        pts[pts.len() - 1].1
    }
}

/// A critical-coupling estimate from cumulant crossings.
#[derive(Debug, Clone)]
pub struct TcEstimate {
    pub kc_hat: f64,
    /// Spread (max − min) of the pairwise crossings.
    pub uncertainty: f64,
    pub crossings: Vec<f64>,
}

fn pair_crossing(a: &BinderCurve, b: &BinderCurve) -> Result<f64> {
    let (alo, ahi) = a.k_range();
    let (blo, bhi) = b.k_range();
    let lo = alo.max(blo);
    let hi = ahi.min(bhi);
    if !(lo < hi) {
        return Err(Error::NoCrossing(format!(
            "curves L={} and L={} have no overlapping K range",
            a.l, b.l
        )));
    }
    let mut grid: Vec<f64> = a
        .points
        .iter()
        .chain(&b.points)
        .map(|p| p.0)
        .filter(|&k| k >= lo && k <= hi)
        .collect();
    grid.sort_by(|x, y| x.partial_cmp(y).unwrap());
    grid.dedup();
    let diff: Vec<f64> = grid
        .iter()
        .map(|&k| a.interpolate(k) - b.interpolate(k))
        .collect();
    for (w, d) in grid.windows(2).zip(diff.windows(2)) {
        if d[0] == 0.0 {
            return Ok(w[0]);
        }
        if d[0] * d[1] < 0.0 {
            let t = d[0] / (d[0] - d[1]);
            return Ok(w[0] + t * (w[1] - w[0]));
        }
    }
    if *diff.last().unwrap() == 0.0 {
        return Ok(*grid.last().unwrap());
    }
    Err(Error::NoCrossing(format!(
        "U4 curves for L={} and L={} do not intersect in [{lo}, {hi}]",
        a.l, b.l
    )))
}

/// Estimates the critical coupling from pairwise crossings of Binder
/// cumulant curves: the mean of all crossings, with their spread as the
/// uncertainty.
pub fn binder_tc_estimate(curves: &[BinderCurve]) -> Result<TcEstimate> {
    if curves.len() < 2 {
        return Err(Error::Domain(
            "crossing estimates need at least two sizes".into(),
        ));
    }
    for c in curves {
        if c.points.len() < 2 {
            return Err(Error::Domain(format!(
                "curve L={} has fewer than two points",
                c.l
            )));
        }
        if c.points.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::Domain(format!(
                "curve L={} is not sorted by increasing K",
                c.l
            )));
        }
    }
    let mut crossings = Vec::new();
    for i in 0..curves.len() {
        for j in i + 1..curves.len() {
            crossings.push(pair_crossing(&curves[i], &curves[j])?);
        }
    }
    let kc_hat = crossings.iter().sum::<f64>() / crossings.len() as f64;
    let max = crossings.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = crossings.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(TcEstimate {
        kc_hat,
        uncertainty: max - min,
        crossings,
    })
}

/// Pools histogram cells whose expected count falls below `min_expected`
/// into one shared cell, preserving totals; returns `(observed, expected)`.
pub fn merge_small_buckets(
    observed: &[u64],
    expected: &[f64],
    min_expected: f64,
) -> (Vec<u64>, Vec<f64>) {
    let mut obs = Vec::new();
    let mut exp = Vec::new();
    let mut pool_obs = 0u64;
    let mut pool_exp = 0.0f64;
    for (&o, &e) in observed.iter().zip(expected) {
        if e < min_expected {
            pool_obs += o;
            pool_exp += e;
        } else {
            obs.push(o);
            exp.push(e);
        }
    }
    if pool_exp > 0.0 || pool_obs > 0 {
        obs.push(pool_obs);
        exp.push(pool_exp);
    }
    (obs, exp)
}

/// Pearson statistic `Σ (O−E)²/E` with its degrees of freedom (cells − 1).
pub fn chi_squared_statistic(observed: &[u64], expected: &[f64]) -> (f64, usize) {
    let stat = observed
        .iter()
        .zip(expected)
        .map(|(&o, &e)| {
            let d = o as f64 - e;
            d * d / e
        })
        .sum();
    (stat, observed.len().saturating_sub(1))
}

/// Upper critical value of the χ² distribution by the Wilson–Hilferty cube
/// approximation; `z` is the standard-normal quantile of the test level
/// (2.3263478740408408 for a 1% upper tail).
pub fn chi_squared_critical(df: usize, z: f64) -> f64 {
    let d = df as f64;
    let t = 1.0 - 2.0 / (9.0 * d) + z * (2.0 / (9.0 * d)).sqrt();
    d * t * t * t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::enumerate_tables;
    use approx::assert_abs_diff_eq;

    fn params(l: usize, bc: BoundaryCondition, k: f64, algo: Algorithm) -> ChainParams {
        ChainParams {
            l,
            bc,
            k,
            algorithm: algo,
            sweeps: 1000,
            burn_in: 100,
            thin: 1,
            seed: 42,
        }
    }

    #[test]
    fn zero_coupling_accepts_every_proposal() {
        // At K = 0 each raster proposal is accepted, so one sweep flips
        // every spin exactly once.
        let lattice = build_lattice(4, BoundaryCondition::Open).unwrap();
        let mut config = SpinConfig::all_up(4);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        metropolis_sweep(&mut config, &lattice, 0.0, &mut rng).unwrap();
        assert_eq!(config.spins(), SpinConfig::all_down(4).spins());
    }

    #[test]
    fn energy_lowering_flip_is_deterministic() {
        // One anti-aligned site in a deep-cold lattice heals in one sweep;
        // every other proposal costs 2K·b with b ≥ 2 and K = 50.
        let lattice = build_lattice(4, BoundaryCondition::Torus).unwrap();
        let mut config = SpinConfig::all_up(4);
        config.set(2, 2, -1);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        metropolis_sweep(&mut config, &lattice, 50.0, &mut rng).unwrap();
        assert_eq!(config.spins(), SpinConfig::all_up(4).spins());
    }

    #[test]
    fn raster_order_ties_freeze_two_cycles_on_the_odd_torus() {
        // The raster-alternating pattern 010101010 on the 3×3 torus presents
        // every raster proposal with a local field b ≤ 0, so the sweep is
        // the deterministic global flip at any coupling, and the flip maps
        // back the same way: a closed two-cycle the chain can never leave.
        let lattice = build_lattice(3, BoundaryCondition::Torus).unwrap();
        let cycle = SpinConfig::from_bits(3, 0b010101010);

        let image = deterministic_sweep_image(&cycle, &lattice)
            .unwrap()
            .expect("every proposal is non-increasing");
        assert_eq!(image.spins(), cycle.flipped().spins());
        let back = deterministic_sweep_image(&image, &lattice)
            .unwrap()
            .unwrap();
        assert_eq!(back.spins(), cycle.spins());

        // The live sweep follows the predicted orbit regardless of K or rng.
        for k in [0.1f64, 0.44, 2.0] {
            let mut config = SpinConfig::from_bits(3, 0b010101010);
            let mut rng = ChaCha8Rng::seed_from_u64(k.to_bits());
            metropolis_sweep(&mut config, &lattice, k, &mut rng).unwrap();
            assert_eq!(config.spins(), image.spins());
            metropolis_sweep(&mut config, &lattice, k, &mut rng).unwrap();
            assert_eq!(config.spins(), cycle.spins());
        }

        // A generic state meets an energy-raising proposal immediately.
        let all_up = SpinConfig::all_up(3);
        assert!(deterministic_sweep_image(&all_up, &lattice)
            .unwrap()
            .is_none());
    }

    #[test]
    fn wolff_cluster_is_single_site_at_zero_coupling() {
        let lattice = build_lattice(5, BoundaryCondition::Torus).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let mut config = SpinConfig::random(5, &mut rng);
            let before = config.spins().to_vec();
            let size = wolff_step(&mut config, &lattice, 0.0, &mut rng).unwrap();
            assert_eq!(size, 1);
            let flips: usize = before
                .iter()
                .zip(config.spins())
                .filter(|(a, b)| a != b)
                .count();
            assert_eq!(flips, 1);
        }
    }

    #[test]
    fn wolff_strong_coupling_flips_everything() {
        let lattice = build_lattice(8, BoundaryCondition::Torus).unwrap();
        let mut config = SpinConfig::all_up(8);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let size = wolff_step(&mut config, &lattice, 10.0, &mut rng).unwrap();
        assert_eq!(size, 64);
        assert_eq!(config.spins(), SpinConfig::all_down(8).spins());
    }

    #[test]
    fn chains_are_deterministic_and_streams_independent() {
        let p = params(4, BoundaryCondition::Torus, 0.3, Algorithm::Metropolis);
        let a = run_chain(&p).unwrap();
        let b = run_chain(&p).unwrap();
        assert_eq!(a.energy, b.energy);
        assert_eq!(a.magnetization, b.magnetization);

        let many = run_chains(&p, 3).unwrap();
        assert_eq!(many[0].energy, a.energy);
        assert_ne!(many[1].energy, many[2].energy);
        assert_eq!(many[1].chain_index, 1);
    }

    #[test]
    fn series_shape_and_bounds() {
        let mut p = params(3, BoundaryCondition::Torus, 0.5, Algorithm::Wolff);
        p.sweeps = 1003;
        p.thin = 10;
        let s = run_chain(&p).unwrap();
        assert_eq!(s.len(), 100);
        let bonds = 2 * 9;
        for (&e, &m) in s.energy.iter().zip(&s.magnetization) {
            assert!(m.abs() <= 9);
            assert!(e.abs() <= bonds as f64);
        }
    }

    #[test]
    fn zero_coupling_means_match_enumeration() {
        // Metropolis is degenerate at exactly K = 0 (every proposal accepted
        // ⇒ each sweep is a deterministic global flip), so the uniform
        // distribution is sampled with Wolff, which reduces to one uniform
        // single-site flip per step. That walk alternates the parity of the
        // up-spin count, so the thinning stride must be odd or samples lock
        // to one parity class.
        let mut p = params(4, BoundaryCondition::Open, 0.0, Algorithm::Wolff);
        p.sweeps = 60_000;
        p.thin = 5;
        let s = run_chain(&p).unwrap();
        let r = estimate(&s).unwrap();
        let tables = enumerate_tables(4, BoundaryCondition::Open).unwrap();
        let exact_e = tables.unrestricted.thermal_average(0.0, |b, _| -(b as f64)) / 16.0;
        let exact_m = tables
            .unrestricted
            .thermal_average(0.0, |_, m| (m as f64).abs())
            / 16.0;
        assert_abs_diff_eq!(exact_e, 0.0, epsilon = 1e-12);
        assert!((r.e_per_site - exact_e).abs() <= 3.0 * r.e_err, "{r:?}");
        assert!((r.m_abs - exact_m).abs() <= 3.0 * r.m_abs_err, "{r:?}");
    }

    #[test]
    fn interacting_means_match_enumeration() {
        let mut p = params(4, BoundaryCondition::Torus, 0.3, Algorithm::Metropolis);
        p.sweeps = 60_000;
        p.thin = 4;
        p.seed = 2024;
        let s = run_chain(&p).unwrap();
        let r = estimate(&s).unwrap();
        let tables = enumerate_tables(4, BoundaryCondition::Torus).unwrap();
        let exact_e = tables.unrestricted.thermal_average(0.3, |b, _| -(b as f64)) / 16.0;
        let exact_m = tables
            .unrestricted
            .thermal_average(0.3, |_, m| (m as f64).abs())
            / 16.0;
        assert!(
            (r.e_per_site - exact_e).abs() <= 3.0 * r.e_err,
            "{r:?} vs {exact_e}"
        );
        assert!(
            (r.m_abs - exact_m).abs() <= 3.0 * r.m_abs_err,
            "{r:?} vs {exact_m}"
        );
    }

    #[test]
    fn signed_magnetization_unbiased_in_the_hot_phase() {
        let mut p = params(8, BoundaryCondition::Torus, 0.2, Algorithm::Wolff);
        p.sweeps = 20_000;
        p.thin = 2;
        let s = run_chain(&p).unwrap();
        let n = s.len() as f64;
        let mean_m = s.magnetization.iter().sum::<i64>() as f64 / n;
        let var_m = s
            .magnetization
            .iter()
            .map(|&m| (m as f64 - mean_m).powi(2))
            .sum::<f64>()
            / n;
        // Generous correlation allowance on the standard error.
        let se = (var_m / n).sqrt() * 3.0;
        assert!(mean_m.abs() <= 3.0 * se, "mean M = {mean_m}, se = {se}");
    }

    #[test]
    fn estimate_rejects_short_series() {
        let p = params(3, BoundaryCondition::Torus, 0.4, Algorithm::Wolff);
        let s = ObservableSeries {
            params: p,
            chain_index: 0,
            energy: vec![0.0; 99],
            magnetization: vec![0; 99],
        };
        assert!(matches!(estimate(&s), Err(Error::SeriesTooShort(_))));
    }

    #[test]
    fn constant_series_has_zero_variance_estimates() {
        let p = params(3, BoundaryCondition::Torus, 0.4, Algorithm::Wolff);
        let s = ObservableSeries {
            params: p,
            chain_index: 0,
            energy: vec![-18.0; 200],
            magnetization: vec![9; 200],
        };
        let r = estimate(&s).unwrap();
        assert_eq!(r.c_v, 0.0);
        assert_eq!(r.chi, 0.0);
        assert_eq!(r.e_err, 0.0);
        assert_eq!(r.m_abs_err, 0.0);
        assert_abs_diff_eq!(r.u4, 2.0 / 3.0, epsilon = 1e-14);
        assert_eq!(r.tau_int, 0.5);
    }

    #[test]
    fn two_delta_magnetization_gives_two_thirds() {
        let p = params(4, BoundaryCondition::Torus, 0.4, Algorithm::Wolff);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m: Vec<i64> = (0..1000)
            .map(|_| if rng.gen::<bool>() { 16 } else { -16 })
            .collect();
        let s = ObservableSeries {
            params: p,
            chain_index: 0,
            energy: vec![0.0; 1000],
            magnetization: m,
        };
        let r = estimate(&s).unwrap();
        assert_abs_diff_eq!(r.u4, 2.0 / 3.0, epsilon = 1e-14);
    }

    #[test]
    fn gaussian_magnetization_has_vanishing_u4() {
        // Box–Muller normals, scaled onto a fine integer grid (the series
        // stores total spins).
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let sites = 1_000_000u64;
        let m: Vec<i64> = (0..1_000_000)
            .map(|_| {
                let u1: f64 = rng.gen::<f64>().max(1e-300);
                let u2: f64 = rng.gen::<f64>();
                let g = (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
                (g * 0.1 * sites as f64) as i64
            })
            .collect();
        let p = ChainParams {
            l: 1000,
            bc: BoundaryCondition::Torus,
            k: 0.1,
            algorithm: Algorithm::Metropolis,
            sweeps: 1,
            burn_in: 0,
            thin: 1,
            seed: 0,
        };
        let s = ObservableSeries {
            params: p,
            chain_index: 0,
            energy: vec![0.0; 1_000_000],
            magnetization: m,
        };
        let r = estimate(&s).unwrap();
        assert_abs_diff_eq!(r.u4, 0.0, epsilon = 0.02);
    }

    #[test]
    fn autocorrelation_sees_block_repetition() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let mut series = Vec::new();
        for _ in 0..2000 {
            let v: f64 = rng.gen::<f64>();
            for _ in 0..10 {
                series.push(v);
            }
        }
        let tau = integrated_autocorrelation(&series);
        // Exact τ for 10-fold repetition of iid values is 5.
        assert!((3.5..=6.5).contains(&tau), "tau = {tau}");

        let iid: Vec<f64> = (0..20000).map(|_| rng.gen::<f64>()).collect();
        let tau_iid = integrated_autocorrelation(&iid);
        assert!((0.3..=0.8).contains(&tau_iid), "tau = {tau_iid}");
    }

    #[test]
    fn synthetic_binder_curves_cross_where_built() {
        let mk = |l: usize, slope: f64| BinderCurve {
            l,
            bc: BoundaryCondition::Torus,
            points: (0..9)
                .map(|i| {
                    let k = 0.40 + 0.01 * i as f64;
                    (k, 0.6 - slope * (k - 0.44))
                })
                .collect(),
        };
        let est = binder_tc_estimate(&[mk(8, 5.0), mk(16, 10.0), mk(32, 20.0)]).unwrap();
        assert_abs_diff_eq!(est.kc_hat, 0.44, epsilon = 1e-12);
        assert_abs_diff_eq!(est.uncertainty, 0.0, epsilon = 1e-12);
        assert_eq!(est.crossings.len(), 3);
    }

    #[test]
    fn parallel_curves_report_no_crossing() {
        let mk = |l: usize, offset: f64| BinderCurve {
            l,
            bc: BoundaryCondition::Open,
            points: vec![(0.40, 0.5 + offset), (0.48, 0.3 + offset)],
        };
        assert!(matches!(
            binder_tc_estimate(&[mk(8, 0.0), mk(16, 0.1)]),
            Err(Error::NoCrossing(_))
        ));
    }

    #[test]
    fn crossing_needs_two_curves_and_sorted_points() {
        let c = BinderCurve {
            l: 8,
            bc: BoundaryCondition::Open,
            points: vec![(0.4, 0.5), (0.45, 0.4)],
        };
        assert!(matches!(
            binder_tc_estimate(std::slice::from_ref(&c)),
            Err(Error::Domain(_))
        ));
        let unsorted = BinderCurve {
            l: 16,
            bc: BoundaryCondition::Open,
            points: vec![(0.45, 0.4), (0.4, 0.5)],
        };
        assert!(matches!(
            binder_tc_estimate(&[c, unsorted]),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn wolff_and_metropolis_agree() {
        let mut pm = params(16, BoundaryCondition::Torus, 0.42, Algorithm::Metropolis);
        pm.sweeps = 60_000;
        pm.burn_in = 6_000;
        pm.thin = 10;
        pm.seed = 99;
        let mut pw = pm;
        pw.algorithm = Algorithm::Wolff;
        pw.sweeps = 30_000;
        pw.burn_in = 3_000;
        pw.thin = 5;
        let rm = estimate(&run_chain(&pm).unwrap()).unwrap();
        let rw = estimate(&run_chain(&pw).unwrap()).unwrap();
        let e_tol = 3.0 * (rm.e_err.powi(2) + rw.e_err.powi(2)).sqrt();
        let m_tol = 3.0 * (rm.m_abs_err.powi(2) + rw.m_abs_err.powi(2)).sqrt();
        assert!(
            (rm.e_per_site - rw.e_per_site).abs() <= e_tol,
            "{rm:?} vs {rw:?}"
        );
        assert!((rm.m_abs - rw.m_abs).abs() <= m_tol, "{rm:?} vs {rw:?}");
    }

    #[test]
    fn mean_cluster_size_grows_at_criticality() {
        let kc: f64 = critical_coupling();
        let mut sizes = Vec::new();
        for l in [8usize, 16, 32] {
            let lattice = build_lattice(l, BoundaryCondition::Torus).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(31);
            let mut config = SpinConfig::all_up(l);
            for _ in 0..500 {
                wolff_step(&mut config, &lattice, kc, &mut rng).unwrap();
            }
            let mut total = 0usize;
            for _ in 0..1500 {
                total += wolff_step(&mut config, &lattice, kc, &mut rng).unwrap();
            }
            sizes.push(total as f64 / 1500.0);
        }
        assert!(sizes[1] > 2.0 * sizes[0], "{sizes:?}");
        assert!(sizes[2] > 2.0 * sizes[1], "{sizes:?}");
    }

    #[test]
    fn chi_squared_helpers() {
        // Wilson–Hilferty vs tabulated 1% critical values.
        let z = 2.3263478740408408;
        assert_abs_diff_eq!(chi_squared_critical(10, z), 23.209, epsilon = 0.15);
        assert_abs_diff_eq!(chi_squared_critical(50, z), 76.154, epsilon = 0.15);

        let (obs, exp) = merge_small_buckets(&[50, 3, 2, 60], &[49.0, 4.0, 3.0, 59.0], 10.0);
        assert_eq!(obs, vec![50, 60, 5]);
        assert_eq!(exp, vec![49.0, 59.0, 7.0]);
        let (stat, df) = chi_squared_statistic(&obs, &exp);
        assert_eq!(df, 2);
        assert!(stat > 0.0 && stat < 2.0);
    }

    #[test]
    fn params_validation() {
        let mut p = params(4, BoundaryCondition::Torus, 0.3, Algorithm::Metropolis);
        p.sweeps = 0;
        assert!(matches!(p.validate(), Err(Error::Domain(_))));
        let mut p2 = params(4, BoundaryCondition::Torus, -0.3, Algorithm::Metropolis);
        p2.sweeps = 10;
        assert!(matches!(p2.validate(), Err(Error::InvalidCoupling(_))));
        let p3 = params(1, BoundaryCondition::Torus, 0.3, Algorithm::Metropolis);
        assert!(matches!(p3.validate(), Err(Error::SizeTooSmall(_))));
    }
}
