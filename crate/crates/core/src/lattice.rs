//! Square-lattice geometry, spin configurations, and the boundary-matching
//! predicate.
//!
//! Sites of an `L×L` lattice are addressed by `(x, y)` with `0 ≤ x, y < L`
//! and stored row-major at index `x + L·y`. Every site contributes a bond to
//! its `+x` and `+y` neighbor; open lattices skip bonds that would cross the
//! edge, toroidal lattices wrap them modulo `L`. The resulting bond multiset
//! is deterministic, with `2L(L−1)` bonds for open and `2L²` for toroidal
//! lattices.

use crate::error::Error;
use crate::scalar::Real;
use crate::Result;

/// Boundary condition of the square lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryCondition {
    /// Free edges; bonds stop at the lattice boundary.
    Open,
    /// Opposite edges identified; bonds wrap modulo `L` in both directions.
    Torus,
}

impl BoundaryCondition {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundaryCondition::Open => "open",
            BoundaryCondition::Torus => "torus",
        }
    }
}

impl std::str::FromStr for BoundaryCondition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "open" => Ok(BoundaryCondition::Open),
            "torus" | "periodic" => Ok(BoundaryCondition::Torus),
            other => Err(Error::Parse(format!(
                "unknown boundary condition '{other}' (expected 'open' or 'torus')"
            ))),
        }
    }
}

impl std::fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Spin-projection orientation of the drawn arrows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// Normal to the lattice surface (the torus normal under wrapping).
    NormalToPlane,
    /// Parallel to the x-axis.
    XParallel,
    /// Parallel to the y-axis.
    YParallel,
}

impl std::str::FromStr for Orientation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "normal" | "normal-to-plane" => Ok(Orientation::NormalToPlane),
            "x" | "x-parallel" => Ok(Orientation::XParallel),
            "y" | "y-parallel" => Ok(Orientation::YParallel),
            other => Err(Error::Parse(format!(
                "unknown orientation '{other}' (expected 'normal', 'x', or 'y')"
            ))),
        }
    }
}

/// Geometry and bond multiset of an `L×L` lattice under a boundary condition.
#[derive(Debug, Clone)]
pub struct LatticeSpec {
    l: usize,
    bc: BoundaryCondition,
    bonds: Vec<(u32, u32)>,
}

impl LatticeSpec {
    pub fn side(&self) -> usize {
        self.l
    }

    pub fn bc(&self) -> BoundaryCondition {
        self.bc
    }

    /// Total site count `N = L²`.
    pub fn sites(&self) -> usize {
        self.l * self.l
    }

    /// The deterministic bond multiset; each bond joins two distinct sites.
    pub fn bonds(&self) -> &[(u32, u32)] {
        &self.bonds
    }

    pub fn site_index(&self, x: usize, y: usize) -> usize {
        debug_assert!(x < self.l && y < self.l);
        x + self.l * y
    }

    /// Neighbor lists per site, derived from the bond multiset.
    pub fn adjacency(&self) -> Vec<Vec<u32>> {
        let mut adj = vec![Vec::with_capacity(4); self.sites()];
        for &(a, b) in &self.bonds {
            adj[a as usize].push(b);
            adj[b as usize].push(a);
        }
        adj
    }
}

/// Builds the lattice geometry for side `L` under `bc`.
///
/// Requires `L ≥ 2` for open and `L ≥ 3` for toroidal lattices; an `L = 2`
/// torus would wrap each bond onto its partner and double-count it, so it is
/// rejected rather than silently accepted.
pub fn build_lattice(l: usize, bc: BoundaryCondition) -> Result<LatticeSpec> {
    let min = match bc {
        BoundaryCondition::Open => 2,
        BoundaryCondition::Torus => 3,
    };
    if l < min {
        return Err(Error::SizeTooSmall(format!(
            "L = {l} under {} boundaries (need L ≥ {min})",
            bc.as_str()
        )));
    }
    let mut bonds = Vec::with_capacity(2 * l * l);
    for y in 0..l {
        for x in 0..l {
            let here = (x + l * y) as u32;
            match bc {
                BoundaryCondition::Open => {
                    if x + 1 < l {
                        bonds.push((here, (x + 1 + l * y) as u32));
                    }
                    if y + 1 < l {
                        bonds.push((here, (x + l * (y + 1)) as u32));
                    }
                }
                BoundaryCondition::Torus => {
                    bonds.push((here, ((x + 1) % l + l * y) as u32));
                    bonds.push((here, (x + l * ((y + 1) % l)) as u32));
                }
            }
        }
    }
    Ok(LatticeSpec { l, bc, bonds })
}

/// One assignment of ±1 spins on an `L×L` lattice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpinConfig {
    l: usize,
    spins: Vec<i8>,
}

impl SpinConfig {
    /// All spins up.
    pub fn all_up(l: usize) -> Self {
        SpinConfig {
            l,
            spins: vec![1; l * l],
        }
    }

    /// All spins down.
    pub fn all_down(l: usize) -> Self {
        SpinConfig {
            l,
            spins: vec![-1; l * l],
        }
    }

    /// Alternating pattern with `+1` at `(0, 0)`.
    pub fn checkerboard(l: usize) -> Self {
        let mut spins = Vec::with_capacity(l * l);
        for y in 0..l {
            for x in 0..l {
                spins.push(if (x + y) % 2 == 0 { 1 } else { -1 });
            }
        }
        SpinConfig { l, spins }
    }

    /// Uniformly random spins.
    pub fn random<R: rand::Rng>(l: usize, rng: &mut R) -> Self {
        let spins = (0..l * l)
            .map(|_| if rng.gen::<bool>() { 1 } else { -1 })
            .collect();
        SpinConfig { l, spins }
    }

    /// Builds a configuration from values that must all be ±1.
    pub fn from_spins(l: usize, spins: Vec<i8>) -> Result<Self> {
        if spins.len() != l * l {
            return Err(Error::ShapeMismatch(format!(
                "{} spins for an {l}×{l} lattice",
                spins.len()
            )));
        }
        if spins.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::Parse("spins must be +1 or -1".into()));
        }
        Ok(SpinConfig { l, spins })
    }

    /// Low `L²` bits of `bits` as spins: set bit → `+1`, clear bit → `−1`.
    pub fn from_bits(l: usize, bits: u64) -> Self {
        let spins = (0..l * l)
            .map(|i| if bits >> i & 1 == 1 { 1 } else { -1 })
            .collect();
        SpinConfig { l, spins }
    }

    pub fn side(&self) -> usize {
        self.l
    }

    pub fn sites(&self) -> usize {
        self.spins.len()
    }

    pub fn spins(&self) -> &[i8] {
        &self.spins
    }

    pub fn get(&self, x: usize, y: usize) -> i8 {
        self.spins[x + self.l * y]
    }

    pub fn set(&mut self, x: usize, y: usize, s: i8) {
        debug_assert!(s == 1 || s == -1);
        self.spins[x + self.l * y] = s;
    }

    pub fn flip_site(&mut self, idx: usize) {
        self.spins[idx] = -self.spins[idx];
    }

    /// The globally flipped configuration `−c`.
    pub fn flipped(&self) -> Self {
        SpinConfig {
            l: self.l,
            spins: self.spins.iter().map(|&s| -s).collect(),
        }
    }

    /// Parses the fixture text format: first line `L bc`, then `L` lines of
    /// `L` characters `+`/`-` (the Unicode minus sign is accepted too).
    pub fn parse(text: &str) -> Result<(Self, BoundaryCondition)> {
        let mut lines = text.lines().filter(|line| !line.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty configuration text".into()))?;
        let mut parts = header.split_whitespace();
        let l: usize = parts
            .next()
            .ok_or_else(|| Error::Parse("missing side length in header".into()))?
            .parse()
            .map_err(|e| Error::Parse(format!("bad side length: {e}")))?;
        let bc: BoundaryCondition = parts
            .next()
            .ok_or_else(|| Error::Parse("missing boundary condition in header".into()))?
            .parse()?;
        if parts.next().is_some() {
            return Err(Error::Parse("trailing tokens in header".into()));
        }
        let mut spins = Vec::with_capacity(l * l);
        for _ in 0..l {
            let row = lines
                .next()
                .ok_or_else(|| Error::Parse(format!("expected {l} spin rows")))?;
            let mut count = 0;
            for ch in row.trim().chars() {
                match ch {
                    '+' => spins.push(1),
                    '-' | '−' => spins.push(-1),
                    other => {
                        return Err(Error::Parse(format!("unexpected spin character '{other}'")))
                    }
                }
                count += 1;
            }
            if count != l {
                return Err(Error::Parse(format!("row has {count} spins, expected {l}")));
            }
        }
        if lines.next().is_some() {
            return Err(Error::Parse("trailing rows after the spin grid".into()));
        }
        Ok((SpinConfig { l, spins }, bc))
    }

    /// Renders the fixture text format accepted by [`SpinConfig::parse`].
    pub fn to_text(&self, bc: BoundaryCondition) -> String {
        let mut out = format!("{} {}\n", self.l, bc.as_str());
        for y in 0..self.l {
            for x in 0..self.l {
                out.push(if self.get(x, y) == 1 { '+' } else { '-' });
            }
            out.push('\n');
        }
        out
    }
}

/// Coupling energy, temperature, and the derived dimensionless coupling
/// `K = J/(k_B·T)`.
///
/// Reduced units `J = k_B = 1` are the default throughout the lab; the full
/// parameters are kept so dimensional runs remain possible. Only
/// ferromagnetic couplings (`J > 0`) are accepted.
#[derive(Debug, Clone, Copy)]
pub struct CouplingParams<F: Real> {
    j: F,
    t: F,
    k_b: F,
    k: F,
}

impl<F: Real> CouplingParams<F> {
    pub fn new(j: F, t: F, k_b: F) -> Result<Self> {
        if !(j > F::zero()) {
            return Err(Error::InvalidCoupling(
                "coupling J must be positive (ferromagnetic)".into(),
            ));
        }
        if !(t > F::zero()) || !(k_b > F::zero()) {
            return Err(Error::InvalidCoupling(
                "temperature T and constant k_B must be positive".into(),
            ));
        }
        Ok(CouplingParams {
            j,
            t,
            k_b,
            k: j / (k_b * t),
        })
    }

    /// Reduced-unit parameters (`J = k_B = 1`) at dimensionless coupling `k`.
    pub fn reduced(k: F) -> Result<Self> {
        if !(k > F::zero()) {
            return Err(Error::InvalidCoupling(
                "dimensionless coupling K must be positive".into(),
            ));
        }
        CouplingParams::new(F::one(), k.recip(), F::one())
    }

    pub fn j(&self) -> F {
        self.j
    }

    pub fn t(&self) -> F {
        self.t
    }

    pub fn k_b(&self) -> F {
        self.k_b
    }

    pub fn k(&self) -> F {
        self.k
    }
}

/// Exact integer bond sum `B = Σ_bonds s_i·s_j`.
pub fn bond_sum(lattice: &LatticeSpec, config: &SpinConfig) -> Result<i64> {
    if config.sites() != lattice.sites() {
        return Err(Error::ShapeMismatch(format!(
            "config has {} sites, lattice has {}",
            config.sites(),
            lattice.sites()
        )));
    }
    let spins = config.spins();
    Ok(lattice
        .bonds()
        .iter()
        .map(|&(a, b)| i64::from(spins[a as usize] * spins[b as usize]))
        .sum())
}

/// Configuration energy `−J·Σ_bonds s_i·s_j`, exact over the bond multiset.
pub fn energy<F: Real>(lattice: &LatticeSpec, config: &SpinConfig, j: F) -> Result<F> {
    let b = bond_sum(lattice, config)?;
    Ok(-j * F::from_i64(b).unwrap())
}

/// Total spin `S` and average spin `s = S/N` of a configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Magnetization {
    pub total: i64,
    pub average: f64,
}

pub fn magnetization(config: &SpinConfig) -> Magnetization {
    let total: i64 = config.spins().iter().map(|&s| i64::from(s)).sum();
    Magnetization {
        total,
        average: total as f64 / config.sites() as f64,
    }
}

/// Pairs of sites identified by the boundary matching: `(0,y) ↔ (L−1,y)` for
/// every row and `(x,0) ↔ (x,L−1)` for every column.
pub fn boundary_pairs(l: usize) -> Vec<(u32, u32)> {
    let mut pairs = Vec::with_capacity(2 * l);
    for y in 0..l {
        pairs.push(((l * y) as u32, (l - 1 + l * y) as u32));
    }
    for x in 0..l {
        pairs.push((x as u32, (x + l * (l - 1)) as u32));
    }
    pairs
}

/// True iff opposite boundaries carry the same spins:
/// `s(0,y) = s(L−1,y)` for all `y` and `s(x,0) = s(x,L−1)` for all `x`.
///
/// Membership in the restricted partition sum is defined by this predicate.
pub fn boundary_matched(config: &SpinConfig, l: usize) -> Result<bool> {
    if config.side() != l {
        return Err(Error::ShapeMismatch(format!(
            "config side {} does not match L = {l}",
            config.side()
        )));
    }
    let spins = config.spins();
    Ok(boundary_pairs(l)
        .iter()
        .all(|&(a, b)| spins[a as usize] == spins[b as usize]))
}
