//! Infinite-lattice closed forms used as oracles for the finite systems.
//!
//! The critical coupling, the free-energy density (as a double quadrature
//! over the Brillouin zone), the spontaneous magnetization, and the internal
//! energy (as a numerical derivative of the free energy) are all independent
//! of the enumeration, transfer, and Monte Carlo routes, which is what makes
//! them useful as cross-checks.

use crate::error::Error;
use crate::scalar::Real;
use crate::Result;

/// Smallest grid of the free-energy quadrature.
const MIN_GRID: usize = 64;
/// Largest grid before the quadrature gives up.
const MAX_GRID: usize = 8192;
/// Half-width of the coupling band around `K_c` where the numerical
/// derivative of the free energy is refused.
const SINGULAR_BAND: f64 = 1e-3;
/// Distance below which a coupling is treated as exactly critical.
const EXACT_KC: f64 = 1e-12;

/// `K_c = ln(1 + √2)/2 ≈ 0.4406868`, where `sinh(2K_c) = 1`.
pub fn critical_coupling<F: Real>() -> F {
    let two = F::from_f64(2.0).unwrap();
    (F::one() + two.sqrt()).ln() / two
}

/// `T_c/J = 1/K_c ≈ 2.2691853` (with `k_B = 1`).
pub fn critical_temperature_over_j<F: Real>() -> F {
    critical_coupling::<F>().recip()
}

fn check_k<F: Real>(k: F) -> Result<()> {
    if !k.is_finite() || k < F::zero() {
        return Err(Error::InvalidCoupling(
            "coupling K must be finite and non-negative".into(),
        ));
    }
    Ok(())
}

/// Midpoint mean of `ln[cosh²(2K) − sinh(2K)(cosθ₁ + cosθ₂)]` over the
/// quarter zone `[0,π]²` on an `n×n` grid. The integrand is symmetric under
/// `θ → 2π − θ` in each variable, so this equals the full-zone mean.
fn zone_mean<F: Real>(k: F, n: usize) -> F {
    let two = F::from_f64(2.0).unwrap();
    let c = (two * k).cosh().powi(2);
    let s = (two * k).sinh();
    let step = F::PI() / F::from_usize(n).unwrap();
    let half = F::from_f64(0.5).unwrap();
    let cos: Vec<F> = (0..n)
        .map(|i| ((F::from_usize(i).unwrap() + half) * step).cos())
        .collect();
    let mut total = F::zero();
    for &ci in &cos {
        let shifted = c - s * ci;
        for &cj in &cos {
            total = total + (shifted - s * cj).ln();
        }
    }
    total / F::from_usize(n * n).unwrap()
}

/// Dimensionless free energy per site `βf(K)` of the infinite lattice:
/// `−ln 2 − ½ · mean of ln[cosh²(2K) − sinh(2K)(cosθ₁ + cosθ₂)]`.
///
/// The grid is doubled until two successive values agree to `tol`, which is
/// loosened near `K_c` where the integrand develops a logarithmic
/// singularity at the zone center (the midpoint rule never samples it).
pub fn free_energy_density<F: Real>(k: F) -> Result<F> {
    let near = (k - critical_coupling::<F>()).abs() < F::from_f64(0.05).unwrap();
    let tol = if near { 1e-6 } else { 1e-8 };
    free_energy_density_with_opts(k, tol, MAX_GRID)
}

/// [`free_energy_density`] with an explicit convergence tolerance and grid cap.
pub fn free_energy_density_with_opts<F: Real>(k: F, tol: f64, max_grid: usize) -> Result<F> {
    check_k(k)?;
    let half = F::from_f64(0.5).unwrap();
    let to_f = |mean: F| -F::LN_2() - half * mean;
    let mut n = MIN_GRID;
    let mut prev = to_f(zone_mean(k, n));
    while n < max_grid.min(MAX_GRID) {
        n *= 2;
        let next = to_f(zone_mean(k, n));
        if (next - prev).abs() <= F::from_f64(tol).unwrap() {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::QuadratureNotConverged(format!(
        "free-energy quadrature did not reach tol {tol:.1e} by an {n}×{n} grid at K = {k:?}"
    )))
}

/// Spontaneous magnetization `m(K)`: zero up to `K_c`, then
/// `(1 − sinh(2K)^{−4})^{1/8}`.
pub fn spontaneous_magnetization<F: Real>(k: F) -> Result<F> {
    check_k(k)?;
    if k <= critical_coupling() {
        return Ok(F::zero());
    }
    let two = F::from_f64(2.0).unwrap();
    let s = (two * k).sinh();
    Ok((F::one() - s.powi(-4)).powf(F::from_f64(0.125).unwrap()))
}

/// Internal energy per site in units of `J`: `u(K) = d(βf)/dK`.
///
/// Evaluated by a Richardson-extrapolated central difference (one-sided near
/// `K = 0`). The derivative has a logarithmic singularity in its slope at
/// `K_c`: within `1e-3` of it the stencil is refused, except that the
/// critical point itself returns the exact value `−√2`.
pub fn internal_energy_density<F: Real>(k: F) -> Result<F> {
    check_k(k)?;
    let kc = critical_coupling::<F>();
    let dist = (k - kc).abs();
    if dist <= F::from_f64(EXACT_KC).unwrap() {
        return Ok(-F::from_f64(2.0).unwrap().sqrt());
    }
    if dist < F::from_f64(SINGULAR_BAND).unwrap() {
        return Err(Error::TooCloseToSingularity(format!(
            "refusing a finite-difference stencil within {SINGULAR_BAND:.0e} of K_c \
             (K = {k:?}); K_c itself has the exact value −√2"
        )));
    }
    let h = F::from_f64(1e-4).unwrap();
    let f = |x: F| free_energy_density(x);
    let twelve_h = F::from_f64(12e-4).unwrap();
    if k >= h + h {
        // (8·[f(K+h) − f(K−h)] − [f(K+2h) − f(K−2h)]) / 12h
        let eight = F::from_f64(8.0).unwrap();
        let d1 = f(k + h)? - f(k - h)?;
        let d2 = f(k + h + h)? - f(k - h - h)?;
        Ok((eight * d1 - d2) / twelve_h)
    } else {
        // Fourth-order forward stencil for K within 2h of zero.
        let c = [-25.0, 48.0, -36.0, 16.0, -3.0];
        let mut acc = F::zero();
        for (i, &ci) in c.iter().enumerate() {
            acc = acc + F::from_f64(ci).unwrap() * f(k + F::from_usize(i).unwrap() * h)?;
        }
        Ok(acc / twelve_h)
    }
}
