//! Scalar abstraction.
//!
//! All numerical code in this crate is written against [`Real`], which is
//! implemented for `f32` and `f64`. Tolerances quoted throughout the crate
//! assume `f64`; the `f32` instantiation compiles and runs but only reaches
//! single-precision accuracy.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating point type usable as the real part of matrix entries.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Converts an `f64` literal. Never fails for the provided impls.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_i64_lossy(n: i64) -> Self {
        Self::from_i64(n).expect("integer representable")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `e^{i theta}`.
#[inline]
pub fn cis<T: Real>(theta: T) -> Complex<T> {
    Complex::new(theta.cos(), theta.sin())
}

/// Maps an angle into the principal range `(-pi, pi]`.
///
/// Values within `1e-12` of `-pi` are reported as `+pi` so that a
/// numerically noisy eigenvalue `-1` always lands on the same end.
pub fn principal_angle<T: Real>(theta: T) -> T {
    let two_pi = T::PI() + T::PI();
    let mut x = theta % two_pi;
    if x > T::PI() {
        x -= two_pi;
    }
    if x <= -T::PI() + T::lit(1e-12) {
        x += two_pi;
    }
    x
}

/// Principal cube root, argument in `(-pi/3, pi/3]`.
pub fn principal_cbrt<T: Real>(z: Complex<T>) -> Complex<T> {
    let (r, theta) = z.to_polar();
    Complex::from_polar(r.cbrt(), theta / T::lit(3.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn principal_angle_range() {
        let pi = std::f64::consts::PI;
        assert!((principal_angle(-pi) - pi).abs() < 1e-15);
        assert!((principal_angle(3.0 * pi) - pi).abs() < 1e-12);
        assert!((principal_angle(0.5 - 2.0 * pi) - 0.5).abs() < 1e-12);
        assert!((principal_angle(-0.5) + 0.5).abs() < 1e-15);
    }

    #[test]
    fn cbrt_is_principal() {
        let z = Complex::new(-8.0f64, 0.0);
        let r = principal_cbrt(z);
        assert!((r - Complex::from_polar(2.0, std::f64::consts::PI / 3.0)).norm() < 1e-12);
        assert!((r * r * r - z).norm() < 1e-12);
    }

    #[test]
    fn works_for_f32() {
        let z = cis(0.25f32);
        assert!((z.norm() - 1.0).abs() < 1e-6);
    }
}
