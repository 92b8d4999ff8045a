//! Floating-point scalars usable as interval endpoints.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// An IEEE binary floating-point type with round-to-nearest arithmetic.
///
/// Implemented for `f32` and `f64`. Besides the usual `num_traits` surface,
/// interval code needs the neighbouring representable values of a number.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Smallest representable value strictly greater than `self`.
    fn next_up(self) -> Self;
    /// Largest representable value strictly less than `self`.
    fn next_down(self) -> Self;
    /// Below this magnitude products and quotients may lose the exactness
    /// of their error terms, so directed rounding falls back to widening.
    fn tiny() -> Self;
    /// Veltkamp splitting constant `2^ceil(p/2) + 1`.
    fn split_factor() -> Self;
    /// Above this magnitude Veltkamp splitting may overflow.
    fn split_limit() -> Self;

    fn from_f64_lossy(x: f64) -> Self {
        Self::from_f64(x).expect("finite conversion")
    }

    fn from_usize(n: usize) -> Self {
        <Self as FromPrimitive>::from_usize(n).expect("integer conversion")
    }
}

impl Scalar for f64 {
    #[inline]
    fn next_up(self) -> Self {
        f64::next_up(self)
    }

    #[inline]
    fn next_down(self) -> Self {
        f64::next_down(self)
    }

    #[inline]
    fn tiny() -> Self {
        // 2^-969: leaves room for the 2^53 scaling inside two-product errors.
        f64::MIN_POSITIVE * 2f64.powi(53)
    }

    #[inline]
    fn split_factor() -> Self {
        134_217_729.0
    }

    #[inline]
    fn split_limit() -> Self {
        2f64.powi(995)
    }
}

impl Scalar for f32 {
    #[inline]
    fn next_up(self) -> Self {
        f32::next_up(self)
    }

    #[inline]
    fn next_down(self) -> Self {
        f32::next_down(self)
    }

    #[inline]
    fn tiny() -> Self {
        f32::MIN_POSITIVE * 2f32.powi(24)
    }

    #[inline]
    fn split_factor() -> Self {
        4097.0
    }

    #[inline]
    fn split_limit() -> Self {
        2f32.powi(114)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neighbours() {
        assert!(Scalar::next_up(1.0f64) > 1.0);
        assert_eq!(Scalar::next_down(Scalar::next_up(1.0f64)), 1.0);
        assert!(Scalar::next_down(0.0f32) < 0.0);
        assert_eq!(Scalar::next_up(f64::INFINITY), f64::INFINITY);
        assert!(f32::tiny() > 0.0 && f64::split_limit().is_finite());
    }
}
