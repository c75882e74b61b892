//! Exhaustive enumeration of all `2^N` spin configurations.
//!
//! States are visited in Gray-code order so each step flips exactly one spin
//! and updates the bond sum, total spin, and boundary-mismatch counter in
//! O(1). One pass tabulates the exact density of states — configuration
//! counts per integer bond sum `B = Σ_bonds s_i·s_j` — for both the full
//! state space and the boundary-matched restriction, so the partition
//! function can later be evaluated at any coupling without re-enumeration.
//!
//! The split into a boundary-matched sum and its complement uses the same
//! Hamiltonian for both parts; choosing which bond set supplies the Boltzmann
//! weights (open or wrapped) is a separate, explicit [`HamiltonianMode`].
//! All partition values live in log space: `e^{K·B}` overflows `f64` already
//! at modest sizes.

use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::error::Error;
use crate::lattice::{boundary_pairs, build_lattice, BoundaryCondition};
use crate::scalar::{log_add_exp, log_sub_exp, log_sum_exp, Real};
use crate::Result;

/// Default guard on the number of sites for an exhaustive scan (~33M states).
pub const DEFAULT_MAX_SITES: u32 = 25;
/// Hard upper bound for the override; a `2^36` scan takes hours.
pub const HARD_MAX_SITES: u32 = 36;

/// Which bond set supplies the Boltzmann weights of both partition sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HamiltonianMode {
    /// Open-lattice bonds: the split is a pure state-space restriction.
    OpenH,
    /// Wrapped bonds: the restricted sum is weighted as a torus system.
    TorusH,
}

impl HamiltonianMode {
    pub fn bc(self) -> BoundaryCondition {
        match self {
            HamiltonianMode::OpenH => BoundaryCondition::Open,
            HamiltonianMode::TorusH => BoundaryCondition::Torus,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            HamiltonianMode::OpenH => "open-h",
            HamiltonianMode::TorusH => "torus-h",
        }
    }
}

impl std::str::FromStr for HamiltonianMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "open-h" | "open" | "openh" => Ok(HamiltonianMode::OpenH),
            "torus-h" | "torus" | "torush" => Ok(HamiltonianMode::TorusH),
            other => Err(Error::Parse(format!(
                "unknown hamiltonian mode '{other}' (expected 'open-h' or 'torus-h')"
            ))),
        }
    }
}

/// Exact configuration counts keyed by integer bond sum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityOfStates {
    pub l: usize,
    pub bc: BoundaryCondition,
    /// Whether only boundary-matched configurations were counted.
    pub restricted: bool,
    pub counts: BTreeMap<i64, u64>,
}

impl DensityOfStates {
    /// Total number of counted configurations.
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    /// `log Σ_B count(B)·e^{K·B}`, evaluated by a stable log-sum-exp.
    pub fn log_partition<F: Real>(&self, k: F) -> F {
        let terms: Vec<F> = self
            .counts
            .iter()
            .filter(|&(_, &c)| c > 0)
            .map(|(&b, &c)| k * F::from_i64(b).unwrap() + F::from_u64(c).unwrap().ln())
            .collect();
        log_sum_exp(&terms)
    }
}

/// Exact counts keyed by `(bond sum B, total spin M)`; the joint version of
/// [`DensityOfStates`], used for thermal averages of magnetization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointDensity {
    pub l: usize,
    pub bc: BoundaryCondition,
    pub restricted: bool,
    pub counts: BTreeMap<(i64, i64), u64>,
}

impl JointDensity {
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    /// Marginal over total spin, keeping only the bond-sum key.
    pub fn bond_marginal(&self) -> DensityOfStates {
        let mut counts: BTreeMap<i64, u64> = BTreeMap::new();
        for (&(b, _), &c) in &self.counts {
            *counts.entry(b).or_insert(0) += c;
        }
        DensityOfStates {
            l: self.l,
            bc: self.bc,
            restricted: self.restricted,
            counts,
        }
    }

    /// Boltzmann average of `f(B, M)` at dimensionless coupling `k`.
    pub fn thermal_average<G>(&self, k: f64, f: G) -> f64
    where
        G: Fn(i64, i64) -> f64,
    {
        let shift = self
            .counts
            .keys()
            .map(|&(b, _)| k * b as f64)
            .fold(f64::NEG_INFINITY, f64::max);
        let mut num = 0.0;
        let mut den = 0.0;
        for (&(b, m), &c) in &self.counts {
            let w = c as f64 * (k * b as f64 - shift).exp();
            num += f(b, m) * w;
            den += w;
        }
        num / den
    }
}

/// Both joint tables produced by one enumeration pass.
#[derive(Debug, Clone)]
pub struct EnumerationTables {
    pub unrestricted: JointDensity,
    pub restricted: JointDensity,
}

struct SiteGraph {
    n: usize,
    bonds: usize,
    nbr_off: Vec<u32>,
    nbr_flat: Vec<u32>,
    partner_off: Vec<u32>,
    partner_flat: Vec<u32>,
}

fn site_graph(l: usize, bc: BoundaryCondition) -> Result<SiteGraph> {
    let lattice = build_lattice(l, bc)?;
    let n = lattice.sites();
    let adj = lattice.adjacency();
    let mut nbr_off = Vec::with_capacity(n + 1);
    let mut nbr_flat = Vec::new();
    nbr_off.push(0);
    for list in &adj {
        nbr_flat.extend_from_slice(list);
        nbr_off.push(nbr_flat.len() as u32);
    }
    let mut partners = vec![Vec::new(); n];
    for (a, b) in boundary_pairs(l) {
        partners[a as usize].push(b);
        partners[b as usize].push(a);
    }
    let mut partner_off = Vec::with_capacity(n + 1);
    let mut partner_flat = Vec::new();
    partner_off.push(0);
    for list in &partners {
        partner_flat.extend_from_slice(list);
        partner_off.push(partner_flat.len() as u32);
    }
    Ok(SiteGraph {
        n,
        bonds: lattice.bonds().len(),
        nbr_off,
        nbr_flat,
        partner_off,
        partner_flat,
    })
}

impl SiteGraph {
    fn bond_sum(&self, state: u64) -> i64 {
        let mut b = 0i64;
        for j in 0..self.n {
            let sj = ((state >> j & 1) as i64) * 2 - 1;
            for &k in &self.nbr_flat[self.nbr_off[j] as usize..self.nbr_off[j + 1] as usize] {
                if (k as usize) > j {
                    let sk = ((state >> k & 1) as i64) * 2 - 1;
                    b += sj * sk;
                }
            }
        }
        b
    }

    fn mismatch_count(&self, state: u64) -> i64 {
        let mut mism = 0i64;
        for j in 0..self.n {
            for &p in
                &self.partner_flat[self.partner_off[j] as usize..self.partner_off[j + 1] as usize]
            {
                if (p as usize) > j && (state >> j & 1) != (state >> p & 1) {
                    mism += 1;
                }
            }
        }
        mism
    }
}

/// Dense (B, M) count table for one scan chunk; rows indexed by bond sum.
struct ChunkTables {
    unrestricted: Vec<u64>,
    restricted: Vec<u64>,
}

fn scan_chunk(graph: &SiteGraph, start: u64, end: u64) -> ChunkTables {
    let n = graph.n;
    let bonds = graph.bonds as i64;
    let m_dim = n + 1;
    let mut table_u = vec![0u64; (graph.bonds + 1) * m_dim];
    let mut table_r = vec![0u64; (graph.bonds + 1) * m_dim];

    let mut state = start ^ (start >> 1); // Gray code of the chunk start
    let mut b = graph.bond_sum(state);
    let mut m = 2 * (state.count_ones() as i64) - n as i64;
    let mut mism = graph.mismatch_count(state);

    #[inline]
    fn record(tu: &mut [u64], tr: &mut [u64], idx: usize, matched: bool) {
        tu[idx] += 1;
        if matched {
            tr[idx] += 1;
        }
    }
    let index = |b: i64, m: i64| ((b + bonds) / 2) as usize * m_dim + ((m + n as i64) / 2) as usize;

    record(&mut table_u, &mut table_r, index(b, m), mism == 0);
    for i in start + 1..end {
        let j = i.trailing_zeros() as usize;
        let s_old = ((state >> j & 1) as i64) * 2 - 1;
        let mut nbr_up = 0i64;
        for &k in &graph.nbr_flat[graph.nbr_off[j] as usize..graph.nbr_off[j + 1] as usize] {
            nbr_up += (state >> k & 1) as i64;
        }
        let deg = (graph.nbr_off[j + 1] - graph.nbr_off[j]) as i64;
        b -= 2 * s_old * (2 * nbr_up - deg);
        m -= 2 * s_old;
        for &p in
            &graph.partner_flat[graph.partner_off[j] as usize..graph.partner_off[j + 1] as usize]
        {
            mism += if (state >> j & 1) == (state >> p & 1) {
                1
            } else {
                -1
            };
        }
        state ^= 1 << j;
        record(&mut table_u, &mut table_r, index(b, m), mism == 0);
    }

    ChunkTables {
        unrestricted: table_u,
        restricted: table_r,
    }
}

fn check_guard(l: usize, max_sites: u32) -> Result<u32> {
    let n = (l * l) as u32;
    let cap = max_sites.min(HARD_MAX_SITES);
    if n > cap {
        return Err(Error::TooLarge(format!(
            "N = L² = {n} sites exceeds the enumeration guard {cap} \
             (a 2^{n} scan; the guard can be raised up to {HARD_MAX_SITES})"
        )));
    }
    Ok(n)
}

/// Enumerates all configurations of the `L×L` lattice under `bc` and returns
/// the exact joint (bond sum, total spin) tables for the full state space and
/// for the boundary-matched restriction, in one pass.
pub fn enumerate_tables_with_guard(
    l: usize,
    bc: BoundaryCondition,
    max_sites: u32,
) -> Result<EnumerationTables> {
    let n = check_guard(l, max_sites)?;
    let graph = site_graph(l, bc)?;
    let total: u64 = 1 << n;
    let chunk: u64 = 1 << 16;
    let ranges: Vec<(u64, u64)> = (0..total.div_ceil(chunk))
        .map(|c| (c * chunk, ((c + 1) * chunk).min(total)))
        .collect();

    // Integer tables merge by addition, so the result is identical for any
    // chunking and thread count.
    let merged = ranges
        .into_par_iter()
        .map(|(s, e)| scan_chunk(&graph, s, e))
        .reduce(
            || ChunkTables {
                unrestricted: vec![0; (graph.bonds + 1) * (graph.n + 1)],
                restricted: vec![0; (graph.bonds + 1) * (graph.n + 1)],
            },
            |mut a, b| {
                for (x, y) in a.unrestricted.iter_mut().zip(&b.unrestricted) {
                    *x += y;
                }
                for (x, y) in a.restricted.iter_mut().zip(&b.restricted) {
                    *x += y;
                }
                a
            },
        );

    let to_map = |table: &[u64]| {
        let mut counts = BTreeMap::new();
        let m_dim = graph.n + 1;
        for (idx, &c) in table.iter().enumerate() {
            if c > 0 {
                let b = (idx / m_dim) as i64 * 2 - graph.bonds as i64;
                let m = (idx % m_dim) as i64 * 2 - graph.n as i64;
                counts.insert((b, m), c);
            }
        }
        counts
    };

    Ok(EnumerationTables {
        unrestricted: JointDensity {
            l,
            bc,
            restricted: false,
            counts: to_map(&merged.unrestricted),
        },
        restricted: JointDensity {
            l,
            bc,
            restricted: true,
            counts: to_map(&merged.restricted),
        },
    })
}

/// [`enumerate_tables_with_guard`] at the default guard.
pub fn enumerate_tables(l: usize, bc: BoundaryCondition) -> Result<EnumerationTables> {
    enumerate_tables_with_guard(l, bc, DEFAULT_MAX_SITES)
}

/// Exact density of states by bond sum; `restricted` keeps only
/// boundary-matched configurations.
pub fn density_of_states(
    l: usize,
    bc: BoundaryCondition,
    restricted: bool,
) -> Result<DensityOfStates> {
    density_of_states_with_guard(l, bc, restricted, DEFAULT_MAX_SITES)
}

pub fn density_of_states_with_guard(
    l: usize,
    bc: BoundaryCondition,
    restricted: bool,
    max_sites: u32,
) -> Result<DensityOfStates> {
    let tables = enumerate_tables_with_guard(l, bc, max_sites)?;
    Ok(if restricted {
        tables.restricted.bond_marginal()
    } else {
        tables.unrestricted.bond_marginal()
    })
}

/// Log-space partition split `Q = Q1 + Q2` at one coupling.
///
/// `Q` sums Boltzmann weights over every configuration, `Q1` over the
/// boundary-matched ones only, and `Q2` over the rest; all three use the bond
/// set selected by `mode`. `log_q2` is recovered as `log(Q − Q1)` in log
/// space; when `Q1` and `Q` coincide to working precision the difference is
/// not representable and `q2_underflow` is set with `log_q2 = −∞` rather
/// than returning a silently wrong value.
#[derive(Debug, Clone, Copy)]
pub struct PartitionSplit<F: Real> {
    pub l: usize,
    pub k: F,
    pub mode: HamiltonianMode,
    pub log_q: F,
    pub log_q1: F,
    pub log_q2: F,
    pub q2_underflow: bool,
}

impl<F: Real> PartitionSplit<F> {
    /// Evaluates the split from precomputed densities of states.
    pub fn from_tables(
        unrestricted: &DensityOfStates,
        restricted: &DensityOfStates,
        k: F,
        mode: HamiltonianMode,
    ) -> Result<Self> {
        if unrestricted.restricted || !restricted.restricted {
            return Err(Error::ShapeMismatch(
                "tables passed in the wrong order (need unrestricted, restricted)".into(),
            ));
        }
        if unrestricted.l != restricted.l || unrestricted.bc != restricted.bc {
            return Err(Error::ShapeMismatch(
                "density tables describe different lattices".into(),
            ));
        }
        if !k.is_finite() {
            return Err(Error::InvalidCoupling("K must be finite".into()));
        }
        let log_q = unrestricted.log_partition(k);
        let log_q1 = restricted.log_partition(k);
        // Strictly Q > Q1, but at extreme coupling the same dominant states
        // saturate both sums and the two logs coincide to the last bit; that
        // is the flagged-underflow regime, not a broken table.
        if log_q < log_q1 {
            return Err(Error::InvariantViolation(format!(
                "log Q = {log_q:?} fell below log Q1 = {log_q1:?}"
            )));
        }
        let (log_q2, q2_underflow) = match log_sub_exp(log_q, log_q1) {
            Some(v) => (v, false),
            None => (F::neg_infinity(), true),
        };
        Ok(PartitionSplit {
            l: unrestricted.l,
            k,
            mode,
            log_q,
            log_q1,
            log_q2,
            q2_underflow,
        })
    }

    /// Checks `exp(log_q1) + exp(log_q2) = exp(log_q)` in log space.
    pub fn recombination_error(&self) -> F {
        let recombined = log_add_exp(self.log_q1, self.log_q2);
        ((recombined - self.log_q) / self.log_q.abs().max(F::one())).abs()
    }
}

/// Enumerates and splits the partition function at coupling `k`.
pub fn partition_split<F: Real>(
    l: usize,
    k: F,
    mode: HamiltonianMode,
) -> Result<PartitionSplit<F>> {
    partition_split_with_guard(l, k, mode, DEFAULT_MAX_SITES)
}

pub fn partition_split_with_guard<F: Real>(
    l: usize,
    k: F,
    mode: HamiltonianMode,
    max_sites: u32,
) -> Result<PartitionSplit<F>> {
    let tables = enumerate_tables_with_guard(l, mode.bc(), max_sites)?;
    PartitionSplit::from_tables(
        &tables.unrestricted.bond_marginal(),
        &tables.restricted.bond_marginal(),
        k,
        mode,
    )
}

/// Free energies of the full and restricted systems at temperature `T`.
#[derive(Debug, Clone, Copy)]
pub struct FreeEnergies<F: Real> {
    /// `F = −k_B·T·log Q`.
    pub f: F,
    /// `F1 = −k_B·T·log Q1`.
    pub f1: F,
    /// `ΔF = F1 − F = k_B·T·log(Q/Q1)`, strictly positive.
    pub delta_f: F,
    pub t: F,
}

/// Free energies from a partition split.
///
/// The strict gap `ΔF > 0` is a theorem of the split; a non-positive value
/// can only come from a broken enumeration and is reported as an invariant
/// violation.
pub fn free_energies<F: Real>(split: &PartitionSplit<F>, t: F, k_b: F) -> Result<FreeEnergies<F>> {
    if !(t > F::zero()) || !(k_b > F::zero()) {
        return Err(Error::InvalidCoupling(
            "temperature and k_B must be positive".into(),
        ));
    }
    if !split.log_q.is_finite() || !split.log_q1.is_finite() {
        return Err(Error::InvariantViolation(
            "partition split has non-finite log values".into(),
        ));
    }
    let delta_f = k_b * t * (split.log_q - split.log_q1);
    if !(delta_f > F::zero()) {
        return Err(Error::InvariantViolation(format!(
            "free-energy gap must be positive, got {delta_f:?}"
        )));
    }
    Ok(FreeEnergies {
        f: -k_b * t * split.log_q,
        f1: -k_b * t * split.log_q1,
        delta_f,
        t,
    })
}

fn bool_word(restricted: bool) -> &'static str {
    if restricted {
        "true"
    } else {
        "false"
    }
}

/// Writes a density of states in the cache text format: a `L bc restricted`
/// header line, then one `B count` line per bond sum.
pub fn write_dos(dos: &DensityOfStates, path: &Path) -> Result<()> {
    let mut out = String::new();
    out.push_str(&format!(
        "{} {} {}\n",
        dos.l,
        dos.bc.as_str(),
        bool_word(dos.restricted)
    ));
    for (&b, &c) in &dos.counts {
        out.push_str(&format!("{b} {c}\n"));
    }
    let mut file = std::fs::File::create(path)?;
    file.write_all(out.as_bytes())?;
    Ok(())
}

/// Reads a density of states written by [`write_dos`].
pub fn read_dos(path: &Path) -> Result<DensityOfStates> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty density-of-states file".into()))?;
    let mut parts = header.split_whitespace();
    let l: usize = parts
        .next()
        .ok_or_else(|| Error::Parse("missing L in header".into()))?
        .parse()
        .map_err(|e| Error::Parse(format!("bad L: {e}")))?;
    let bc: BoundaryCondition = parts
        .next()
        .ok_or_else(|| Error::Parse("missing bc in header".into()))?
        .parse()?;
    let restricted = match parts.next() {
        Some("true") => true,
        Some("false") => false,
        other => {
            return Err(Error::Parse(format!(
                "bad restricted flag {other:?} in header"
            )))
        }
    };
    let mut counts = BTreeMap::new();
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let mut cols = line.split_whitespace();
        let b: i64 = cols
            .next()
            .ok_or_else(|| Error::Parse("missing bond sum".into()))?
            .parse()
            .map_err(|e| Error::Parse(format!("bad bond sum: {e}")))?;
        let c: u64 = cols
            .next()
            .ok_or_else(|| Error::Parse("missing count".into()))?
            .parse()
            .map_err(|e| Error::Parse(format!("bad count: {e}")))?;
        counts.insert(b, c);
    }
    Ok(DensityOfStates {
        l,
        bc,
        restricted,
        counts,
    })
}

/// Disk cache of densities of states keyed by `(L, bc, restricted)`, so
/// temperature scans do not re-enumerate.
#[derive(Debug, Clone)]
pub struct DosCache {
    dir: PathBuf,
}

impl DosCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        DosCache { dir: dir.into() }
    }

    fn path(&self, l: usize, bc: BoundaryCondition, restricted: bool) -> PathBuf {
        self.dir.join(format!(
            "dos_L{l}_{}_{}.txt",
            bc.as_str(),
            if restricted { "restricted" } else { "full" }
        ))
    }

    /// Loads the requested table from disk, or enumerates and stores both the
    /// full and restricted tables for this `(L, bc)`.
    pub fn load_or_compute(
        &self,
        l: usize,
        bc: BoundaryCondition,
        restricted: bool,
        max_sites: u32,
    ) -> Result<DensityOfStates> {
        let path = self.path(l, bc, restricted);
        if path.is_file() {
            let dos = read_dos(&path)?;
            if dos.l == l && dos.bc == bc && dos.restricted == restricted {
                return Ok(dos);
            }
            return Err(Error::Parse(format!(
                "cache file {} does not match its key",
                path.display()
            )));
        }
        let tables = enumerate_tables_with_guard(l, bc, max_sites)?;
        let full = tables.unrestricted.bond_marginal();
        let restr = tables.restricted.bond_marginal();
        std::fs::create_dir_all(&self.dir)?;
        write_dos(&full, &self.path(l, bc, false))?;
        write_dos(&restr, &self.path(l, bc, true))?;
        Ok(if restricted { restr } else { full })
    }
}
