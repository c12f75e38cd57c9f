//! Scalar abstraction shared by the numeric kernels.
//!
//! The root finders, quadrature rules and the rotor grid kernel are written
//! against [`Real`] so they can be instantiated for `f32` (fast, low
//! precision previews) as well as `f64`, which is what every public
//! high-level operation in this crate uses.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Floating point scalar: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).unwrap()
    }

    /// Lossy conversion from a count or index.
    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).unwrap()
    }

    /// Widening conversion used when reporting results.
    fn to_f64_lossy(self) -> f64;
}

impl Real for f32 {
    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self as f64
    }
}

impl Real for f64 {
    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn halve<T: Real>(x: T) -> T {
        x * T::lit(0.5)
    }

    #[test]
    fn literal_conversion_round_trips() {
        assert_eq!(halve(3.0f64), 1.5);
        assert_eq!(halve(3.0f32), 1.5);
        assert_eq!(f32::from_usize_lossy(7).to_f64_lossy(), 7.0);
    }
}
