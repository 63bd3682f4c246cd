//! Floating point abstraction shared by the planner math.
//!
//! Everything numeric in the planner is generic over [`Scalar`], which is
//! implemented for `f32` and `f64`. The simulator and configuration layer
//! are fixed to `f64`; see the aliases at the crate root.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point type usable by the planner: `f32` or `f64`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal into this scalar type.
    fn lit(x: f64) -> Self;

    fn to_f64_lossy(self) -> f64;
}

impl Scalar for f32 {
    #[inline]
    fn lit(x: f64) -> Self {
        x as f32
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self as f64
    }
}

impl Scalar for f64 {
    #[inline]
    fn lit(x: f64) -> Self {
        x
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self
    }
}

/// Shorthand for [`Scalar::lit`].
#[inline]
pub(crate) fn lit<S: Scalar>(x: f64) -> S {
    S::lit(x)
}

#[inline]
pub(crate) fn from_usize<S: Scalar>(n: usize) -> S {
    S::from_usize(n).expect("usize fits in a float")
}

/// Rounds `value / step` to the nearest integer count, returning `None` when
/// the ratio is not integral within a relative tolerance.
pub(crate) fn integral_ratio<S: Scalar>(value: S, step: S) -> Option<usize> {
    if !(step > S::zero()) || !value.is_finite() || value < S::zero() {
        return None;
    }
    let ratio = value / step;
    let rounded = ratio.round();
    let tol = lit::<S>(1e-6) * rounded.max(S::one());
    if (ratio - rounded).abs() <= tol {
        rounded.to_usize()
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integral_ratio_detects_multiples() {
        assert_eq!(integral_ratio(5.0_f64, 0.1), Some(50));
        assert_eq!(integral_ratio(30.0_f64, 5.0), Some(6));
        assert_eq!(integral_ratio(12.0_f64, 5.0), None);
        assert_eq!(integral_ratio(1.0_f32, 0.1), Some(10));
        assert_eq!(integral_ratio(1.0_f64, 0.0), None);
    }
}
