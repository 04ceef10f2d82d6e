//! Scalar abstraction: the whole library is generic over the real field,
//! instantiated in practice at `f64` (see the aliases in the crate root).

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive};
use std::fmt::{Debug, Display};

/// Real scalar type the library is generic over: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + Send + Sync + 'static
{
}

impl<T> Real for T where
    T: Float + FloatConst + FromPrimitive + Debug + Display + Send + Sync + 'static
{
}

/// Shorthand for converting an `f64` literal into the scalar type.
#[inline]
pub fn re<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal must convert into the scalar type")
}

/// Complex number from `f64` literals.
#[inline]
pub fn cx<T: Real>(re_part: f64, im_part: f64) -> Complex<T> {
    Complex::new(re(re_part), re(im_part))
}

/// Tolerance bundle separating roundoff-level checks from
/// discretization-level checks.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances<T: Real> {
    /// Exact algebraic identities in double precision.
    pub alg: T,
    /// Quantities passing through ODE integration.
    pub num: T,
    /// Local error target per unit path length for the integrator.
    pub integration: T,
    /// Minimal pairwise pole separation in chart coordinates.
    pub separation: T,
}

impl<T: Real> Default for Tolerances<T> {
    fn default() -> Self {
        Tolerances {
            alg: re(1e-12),
            num: re(1e-6),
            integration: re(1e-10),
            separation: re(1e-9),
        }
    }
}

/// Distance from `x` to the nearest integer.
pub fn dist_to_integer<T: Real>(x: T) -> T {
    (x - x.round()).abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_distance() {
        assert!(dist_to_integer(1.0000001_f64) < 1e-6);
        assert!(dist_to_integer(0.5_f64) == 0.5);
        assert!(dist_to_integer(-2.75_f64) == 0.25);
    }
}
