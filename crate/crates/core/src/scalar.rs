use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive, Zero};

/// Floating point scalar the numerical core is generic over (`f32` or `f64`).
///
/// Besides the usual float operations it can be lifted exactly into a
/// [`BigRational`] and rounded back, which is how coefficient tables are built.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Exact rational value of a finite float. Non-finite input yields `None`.
    fn to_exact(self) -> Option<BigRational> {
        BigRational::from_float(self.to_f64()?)
    }

    /// Nearest representable value of an exact rational.
    fn from_exact(q: &BigRational) -> Self;

    fn from_f64_lossy(v: f64) -> Self {
        Self::from_f64(v).unwrap_or_else(Self::nan)
    }

    fn from_u64_lossy(v: u64) -> Self {
        Self::from_u64(v).unwrap_or_else(Self::nan)
    }
}

impl Scalar for f64 {
    fn from_exact(q: &BigRational) -> Self {
        rational_to_f64(q)
    }
}

impl Scalar for f32 {
    fn from_exact(q: &BigRational) -> Self {
        // f64 -> f32 can double round; the error stays within one f32 ulp.
        rational_to_f64(q) as f32
    }
}

/// Rounds an exact rational to the nearest `f64`.
pub(crate) fn rational_to_f64(q: &BigRational) -> f64 {
    if q.is_zero() {
        return 0.0;
    }
    q.to_f64().unwrap_or_else(|| {
        // Out of range: saturate with the right sign.
        if q.numer().sign() == num_bigint::Sign::Minus {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Error-free sum: `a + b = s + e` exactly.
pub(crate) fn two_sum<T: Float>(a: T, b: T) -> (T, T) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// Error-free sum for `|a| >= |b|`.
pub(crate) fn fast_two_sum<T: Float>(a: T, b: T) -> (T, T) {
    let s = a + b;
    (s, b - (s - a))
}

/// Error-free product via fused multiply-add: `a * b = p + e` exactly.
pub(crate) fn two_prod<T: Float>(a: T, b: T) -> (T, T) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

pub(crate) fn exact_int(v: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

pub(crate) fn exact_factorial(j: usize) -> BigInt {
    (1..=j as u64).fold(BigInt::from(1u32), |acc, m| acc * BigInt::from(m))
}
