//! Scalar abstraction shared by every path type.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Floating-point scalar the simulation code is generic over: `f32` or `f64`.
pub trait Real:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Draws one standard normal variate.
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Converts an `f64` literal. Infallible for the supported types.
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {
    #[inline]
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardNormal.sample(rng)
    }
}

impl Real for f64 {
    #[inline]
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardNormal.sample(rng)
    }
}

/// Symmetric signum: `+1` on `(0, ∞)`, `-1` on `(-∞, 0)`, `0` at the origin.
#[inline]
pub fn sgn_sym<T: Real>(x: T) -> T {
    if x > T::zero() {
        T::one()
    } else if x < T::zero() {
        -T::one()
    } else {
        T::zero()
    }
}

/// Left-continuous signum: `+1` on `(0, ∞)`, `-1` on `(-∞, 0]`.
#[inline]
pub fn sgn_left<T: Real>(x: T) -> T {
    if x > T::zero() {
        T::one()
    } else {
        -T::one()
    }
}

/// Which version of the signum function an integrand uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SignConvention {
    /// `sgn(0) = 0`.
    Symmetric,
    /// `sgn(0) = -1`.
    LeftContinuous,
}

impl SignConvention {
    #[inline]
    pub fn apply<T: Real>(self, x: T) -> T {
        match self {
            SignConvention::Symmetric => sgn_sym(x),
            SignConvention::LeftContinuous => sgn_left(x),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signum_conventions_differ_only_at_zero() {
        for x in [-2.0_f64, -1e-300, 1e-300, 3.0] {
            assert_eq!(sgn_sym(x), sgn_left(x));
        }
        assert_eq!(sgn_sym(0.0_f64), 0.0);
        assert_eq!(sgn_left(0.0_f64), -1.0);
        assert_eq!(SignConvention::LeftContinuous.apply(-0.0_f32), -1.0);
    }
}
