//! Winding classes of lattice loops, torus embeddings, and spin-projection
//! vector fields.
//!
//! The fundamental group of the torus is `Z × Z`, and on the discrete `L×L`
//! torus the class of a closed loop is decided entirely by its net winding
//! pair — no simplicial machinery is needed. The vector-field side projects
//! a spin configuration along a global axis or along the local normals of an
//! embedded torus, then asks whether the summed field defines a direction
//! and how the in-plane field winds around the fundamental cycles.

use crate::error::Error;
use crate::lattice::{Orientation, SpinConfig};
use crate::scalar::Real;
use crate::Result;

/// One unit step of a lattice path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Step {
    /// `+x`, written `R`.
    PlusX,
    /// `−x`, written `L`.
    MinusX,
    /// `+y`, written `U`.
    PlusY,
    /// `−y`, written `D`.
    MinusY,
}

impl Step {
    pub fn displacement(self) -> (i64, i64) {
        match self {
            Step::PlusX => (1, 0),
            Step::MinusX => (-1, 0),
            Step::PlusY => (0, 1),
            Step::MinusY => (0, -1),
        }
    }

    pub fn reversed(self) -> Step {
        match self {
            Step::PlusX => Step::MinusX,
            Step::MinusX => Step::PlusX,
            Step::PlusY => Step::MinusY,
            Step::MinusY => Step::PlusY,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Step::PlusX => 'R',
            Step::MinusX => 'L',
            Step::PlusY => 'U',
            Step::MinusY => 'D',
        }
    }

    pub fn from_letter(c: char) -> Result<Step> {
        match c.to_ascii_uppercase() {
            'R' => Ok(Step::PlusX),
            'L' => Ok(Step::MinusX),
            'U' => Ok(Step::PlusY),
            'D' => Ok(Step::MinusY),
            other => Err(Error::Parse(format!(
                "unknown step '{other}' (expected one of R, L, U, D)"
            ))),
        }
    }
}

/// Parses a step string such as `"RRUULLDD"`.
pub fn parse_steps(s: &str) -> Result<Vec<Step>> {
    s.chars().map(Step::from_letter).collect()
}

/// A lattice path with a base site, intended to close on the torus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeLoop {
    start: (i64, i64),
    steps: Vec<Step>,
}

impl LatticeLoop {
    pub fn new(start: (i64, i64), steps: Vec<Step>) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::Domain("a loop needs at least one step".into()));
        }
        Ok(LatticeLoop { start, steps })
    }

    pub fn from_letters(start: (i64, i64), letters: &str) -> Result<Self> {
        LatticeLoop::new(start, parse_steps(letters)?)
    }

    pub fn start(&self) -> (i64, i64) {
        self.start
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    /// Net displacement before any torus reduction.
    pub fn net_displacement(&self) -> (i64, i64) {
        let mut dx = 0;
        let mut dy = 0;
        for s in &self.steps {
            let (a, b) = s.displacement();
            dx += a;
            dy += b;
        }
        (dx, dy)
    }

    /// The same steps walked from a different base site.
    pub fn rebased(&self, start: (i64, i64)) -> LatticeLoop {
        LatticeLoop {
            start,
            steps: self.steps.clone(),
        }
    }

    /// The inverse path: reversed step order, each step inverted.
    pub fn reversed(&self) -> LatticeLoop {
        LatticeLoop {
            start: self.start,
            steps: self.steps.iter().rev().map(|s| s.reversed()).collect(),
        }
    }
}

/// Homotopy class `(m, n)` of a closed loop on the torus: net x- and y-wraps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WindingPair {
    pub m: i64,
    pub n: i64,
}

impl WindingPair {
    /// The class of contractible loops.
    pub fn is_contractible(self) -> bool {
        self.m == 0 && self.n == 0
    }
}

impl std::ops::Add for WindingPair {
    type Output = WindingPair;

    fn add(self, rhs: WindingPair) -> WindingPair {
        WindingPair {
            m: self.m + rhs.m,
            n: self.n + rhs.n,
        }
    }
}

impl std::ops::Neg for WindingPair {
    type Output = WindingPair;

    fn neg(self) -> WindingPair {
        WindingPair {
            m: -self.m,
            n: -self.n,
        }
    }
}

/// Winding class of a loop on the `L×L` torus.
///
/// A loop is closed iff its net displacement is `(0, 0)` modulo `L`; the
/// class is the displacement divided by `L` componentwise, in exact integer
/// arithmetic.
pub fn loop_class(lp: &LatticeLoop, l: usize) -> Result<WindingPair> {
    if l == 0 {
        return Err(Error::Domain("torus side must be positive".into()));
    }
    let l = l as i64;
    let (dx, dy) = lp.net_displacement();
    if dx.rem_euclid(l) != 0 || dy.rem_euclid(l) != 0 {
        return Err(Error::NotClosed(format!(
            "net displacement ({dx}, {dy}) is not a multiple of L = {l}"
        )));
    }
    Ok(WindingPair {
        m: dx / l,
        n: dy / l,
    })
}

/// Concatenates two loops sharing a base point. `loop_class` of the result
/// is the componentwise sum of the inputs' classes.
pub fn compose_loops(a: &LatticeLoop, b: &LatticeLoop) -> Result<LatticeLoop> {
    if a.start != b.start {
        return Err(Error::BasePointMismatch(format!(
            "loops start at {:?} and {:?}; rebase one of them first",
            a.start, b.start
        )));
    }
    let mut steps = a.steps.clone();
    steps.extend_from_slice(&b.steps);
    Ok(LatticeLoop {
        start: a.start,
        steps,
    })
}

/// The standard torus in 3-space, mapping lattice site `(x, y)` of an `L×L`
/// grid to angles `(2πx/L, 2πy/L)`.
#[derive(Debug, Clone, Copy)]
pub struct TorusEmbedding<F: Real> {
    big_r: F,
    small_r: F,
}

impl<F: Real> Default for TorusEmbedding<F> {
    fn default() -> Self {
        TorusEmbedding {
            big_r: F::from_f64(2.0).unwrap(),
            small_r: F::one(),
        }
    }
}

impl<F: Real> TorusEmbedding<F> {
    pub fn new(big_r: F, small_r: F) -> Result<Self> {
        if !(small_r > F::zero()) || !(big_r > small_r) {
            return Err(Error::Domain("torus embedding needs R > r > 0".into()));
        }
        Ok(TorusEmbedding { big_r, small_r })
    }

    pub fn major_radius(&self) -> F {
        self.big_r
    }

    pub fn minor_radius(&self) -> F {
        self.small_r
    }

    fn angles(x: usize, y: usize, l: usize) -> (F, F) {
        let tau = F::PI() + F::PI();
        let lf = F::from_usize(l).unwrap();
        (
            tau * F::from_usize(x).unwrap() / lf,
            tau * F::from_usize(y).unwrap() / lf,
        )
    }

    /// 3-space position of site `(x, y)` on the `L×L` grid.
    pub fn point(&self, x: usize, y: usize, l: usize) -> [F; 3] {
        let (u, v) = Self::angles(x, y, l);
        let ring = self.big_r + self.small_r * v.cos();
        [ring * u.cos(), ring * u.sin(), self.small_r * v.sin()]
    }

    /// Outward unit normal at site `(x, y)`.
    pub fn unit_normal(&self, x: usize, y: usize, l: usize) -> [F; 3] {
        let (u, v) = Self::angles(x, y, l);
        [v.cos() * u.cos(), v.cos() * u.sin(), v.sin()]
    }
}

/// Sum of the unit normals over the full `L×L` site grid; the discrete
/// rotational symmetry cancels it to numerical noise.
pub fn normals_sum<F: Real>(embedding: &TorusEmbedding<F>, l: usize) -> Result<[F; 3]> {
    if l < 3 {
        return Err(Error::Domain(
            "normal sums need L ≥ 3 for a meaningful grid".into(),
        ));
    }
    let mut sum = [F::zero(); 3];
    for x in 0..l {
        for y in 0..l {
            let n = embedding.unit_normal(x, y, l);
            for (s, c) in sum.iter_mut().zip(n) {
                *s = *s + c;
            }
        }
    }
    Ok(sum)
}

/// A 3-vector per lattice site.
#[derive(Debug, Clone)]
pub struct SpinField<F: Real> {
    l: usize,
    orientation: Option<Orientation>,
    vectors: Vec<[F; 3]>,
}

/// Projects a spin configuration into a vector field: each site carries
/// `s_i` times the orientation's axis — the global `x̂` or `ŷ`, or the local
/// outward normal of the embedding. No site vector is ever zero.
pub fn build_spin_field<F: Real>(
    config: &SpinConfig,
    orientation: Orientation,
    embedding: &TorusEmbedding<F>,
) -> Result<SpinField<F>> {
    let l = config.side();
    let mut vectors = Vec::with_capacity(l * l);
    for y in 0..l {
        for x in 0..l {
            let s = F::from_i8(config.get(x, y)).unwrap();
            let axis = match orientation {
                Orientation::XParallel => [F::one(), F::zero(), F::zero()],
                Orientation::YParallel => [F::zero(), F::one(), F::zero()],
                Orientation::NormalToPlane => embedding.unit_normal(x, y, l),
            };
            vectors.push([s * axis[0], s * axis[1], s * axis[2]]);
        }
    }
    Ok(SpinField {
        l,
        orientation: Some(orientation),
        vectors,
    })
}

/// One of the two fundamental cycles of the torus grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cycle {
    /// All sites of row `y`, walked in `+x` order.
    XCycle { y: usize },
    /// All sites of column `x`, walked in `+y` order.
    YCycle { x: usize },
}

/// Whether a summed field defines a direction: the raw ratio `|Σv|/N` and
/// the normalized sum when the ratio clears the threshold.
#[derive(Debug, Clone, Copy)]
pub struct DirectionReport<F: Real> {
    pub ratio: F,
    pub direction: Option<[F; 3]>,
}

impl<F: Real> SpinField<F> {
    /// A synthetic field; `f(x, y)` supplies the vector at each site.
    pub fn from_fn(l: usize, f: impl Fn(usize, usize) -> [F; 3]) -> Result<Self> {
        if l == 0 {
            return Err(Error::Domain("field side must be positive".into()));
        }
        let mut vectors = Vec::with_capacity(l * l);
        for y in 0..l {
            for x in 0..l {
                vectors.push(f(x, y));
            }
        }
        Ok(SpinField {
            l,
            orientation: None,
            vectors,
        })
    }

    pub fn side(&self) -> usize {
        self.l
    }

    pub fn orientation(&self) -> Option<Orientation> {
        self.orientation
    }

    pub fn get(&self, x: usize, y: usize) -> Result<[F; 3]> {
        if x >= self.l || y >= self.l {
            return Err(Error::ShapeMismatch(format!(
                "site ({x}, {y}) outside an {0}×{0} field",
                self.l
            )));
        }
        Ok(self.vectors[y * self.l + x])
    }

    /// Sums all site vectors. With `|Σv| < threshold·N` the direction is
    /// reported as undefined; the raw ratio is always included.
    pub fn total_spin_direction(&self, threshold: F) -> Result<DirectionReport<F>> {
        if !(threshold > F::zero()) || threshold > F::one() {
            return Err(Error::Domain("threshold must lie in (0, 1]".into()));
        }
        let mut sum = [F::zero(); 3];
        for v in &self.vectors {
            for (s, c) in sum.iter_mut().zip(v) {
                *s = *s + *c;
            }
        }
        let norm = (sum[0] * sum[0] + sum[1] * sum[1] + sum[2] * sum[2]).sqrt();
        let n = F::from_usize(self.vectors.len()).unwrap();
        let ratio = norm / n;
        let direction = if ratio < threshold {
            None
        } else {
            Some([sum[0] / norm, sum[1] / norm, sum[2] / norm])
        };
        Ok(DirectionReport { ratio, direction })
    }

    /// Net turns of the in-plane field around a fundamental cycle: the sum
    /// of minimal angle differences in `(−π, π]` between consecutive site
    /// vectors, divided by `2π`. Exact integer for any closed walk.
    ///
    /// Zero in-plane vectors make the winding undefined, and an exact-π step
    /// (antipodal neighbors) is ambiguous; both are reported, never guessed.
    pub fn field_winding(&self, cycle: Cycle) -> Result<i64> {
        if self.orientation == Some(Orientation::NormalToPlane) {
            return Err(Error::InPlaneRequired(
                "normal-projection fields have no in-plane winding".into(),
            ));
        }
        let sites: Vec<(usize, usize)> = match cycle {
            Cycle::XCycle { y } => {
                if y >= self.l {
                    return Err(Error::ShapeMismatch(format!(
                        "row {y} outside an {0}×{0} field",
                        self.l
                    )));
                }
                (0..self.l).map(|x| (x, y)).collect()
            }
            Cycle::YCycle { x } => {
                if x >= self.l {
                    return Err(Error::ShapeMismatch(format!(
                        "column {x} outside an {0}×{0} field",
                        self.l
                    )));
                }
                (0..self.l).map(|y| (x, y)).collect()
            }
        };
        let angles: Vec<F> = sites
            .iter()
            .map(|&(x, y)| {
                let v = self.vectors[y * self.l + x];
                if v[2] != F::zero() {
                    return Err(Error::InPlaneRequired(format!(
                        "site ({x}, {y}) has an out-of-plane component"
                    )));
                }
                if v[0] == F::zero() && v[1] == F::zero() {
                    return Err(Error::ZeroVectorOnCycle(format!(
                        "site ({x}, {y}) carries the zero vector"
                    )));
                }
                Ok(v[1].atan2(v[0]))
            })
            .collect::<Result<_>>()?;

        let tau = F::PI() + F::PI();
        let mut total = F::zero();
        for i in 0..angles.len() {
            let next = angles[(i + 1) % angles.len()];
            let mut d = next - angles[i];
            while d > F::PI() {
                d = d - tau;
            }
            while d <= -F::PI() {
                d = d + tau;
            }
            if d == F::PI() {
                return Err(Error::ZeroVectorOnCycle(format!(
                    "consecutive vectors at step {i} are antipodal; the turn \
                     direction is ambiguous"
                )));
            }
            total = total + d;
        }
        let turns = total / tau;
        let rounded = turns.round();
        if (turns - rounded).abs() > F::from_f64(1e-6).unwrap() {
            return Err(Error::InvariantViolation(format!(
                "cycle winding {turns:?} is not an integer"
            )));
        }
        Ok(rounded.to_i64().unwrap())
    }
}
