//! Scalar abstraction and log-space arithmetic.

use num_traits::float::FloatConst;
use num_traits::{Float, FromPrimitive};

/// Floating-point scalar for the deterministic numeric kernels: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + std::iter::Sum + std::fmt::Debug + Send + Sync + 'static
{
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + std::iter::Sum
        + std::fmt::Debug
        + Send
        + Sync
        + 'static
{
}

/// log(exp(a) + exp(b)) without overflow.
pub fn log_add_exp<F: Real>(a: F, b: F) -> F {
    if a == F::neg_infinity() {
        return b;
    }
    if b == F::neg_infinity() {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// log(Σ exp(t_i)) over a slice, anchored at the maximum term.
///
/// Returns negative infinity for an empty slice or one holding only
/// negative-infinity terms.
pub fn log_sum_exp<F: Real>(terms: &[F]) -> F {
    let hi = terms
        .iter()
        .cloned()
        .fold(F::neg_infinity(), |m, t| if t > m { t } else { m });
    if hi == F::neg_infinity() || hi.is_nan() {
        return hi;
    }
    let sum: F = terms.iter().map(|&t| (t - hi).exp()).sum();
    hi + sum.ln()
}

/// log(exp(a) − exp(b)) for a > b.
///
/// Returns `None` when the difference is not representable: a < b (negative
/// argument) or a == b to working precision, where the true result may be
/// any large negative value.
pub fn log_sub_exp<F: Real>(a: F, b: F) -> Option<F> {
    if b == F::neg_infinity() {
        return Some(a);
    }
    if a <= b {
        return None;
    }
    // exp_m1 keeps precision when a - b is tiny.
    let d = -(b - a).exp_m1(); // 1 - exp(b - a), in (0, 1]
    Some(a + d.ln())
}
