use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Normalization tolerance for states.
pub const NORM_TOL: f64 = 1e-10;

/// Amplitudes over the lexicographic binary basis.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T> {
    amps: Vec<Complex<T>>,
}

impl<T: Real> StateVector<T> {
    /// Checks `sum |c_i|^2 = 1` within [`NORM_TOL`].
    pub fn new(amps: Vec<Complex<T>>) -> Result<Self> {
        let s = Self { amps };
        let norm = s.norm();
        if (norm - T::one()).abs() > T::lit(NORM_TOL) {
            return Err(Error::NotNormalized(norm.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(s)
    }

    /// Wraps amplitudes without the norm check. Used for intermediate
    /// vectors (projections, unnormalized eigenvectors).
    pub fn from_amplitudes_unchecked(amps: Vec<Complex<T>>) -> Self {
        Self { amps }
    }

    /// Scales to unit norm. Zero vectors are returned unchanged.
    pub fn normalized(amps: Vec<Complex<T>>) -> Self {
        let mut s = Self { amps };
        let n = s.norm();
        if n > T::zero() {
            for a in &mut s.amps {
                *a = *a / n;
            }
        }
        s
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut amps = vec![Complex::zero(); dim];
        amps[index] = Complex::one();
        Self { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex<T>> {
        self.amps
    }

    pub fn norm(&self) -> T {
        self.amps
            .iter()
            .fold(T::zero(), |acc, a| acc + a.norm_sqr())
            .sqrt()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Complex<T> {
        assert_eq!(self.dim(), other.dim(), "inner product dimension mismatch");
        self.amps
            .iter()
            .zip(&other.amps)
            .fold(Complex::zero(), |acc, (a, b)| acc + a.conj() * b)
    }

    /// `|<self|other>|`.
    pub fn fidelity(&self, other: &Self) -> T {
        self.inner(other).norm()
    }

    pub fn scale(&self, z: Complex<T>) -> Self {
        Self {
            amps: self.amps.iter().map(|&a| a * z).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim());
        Self {
            amps: self.amps.iter().zip(&other.amps).map(|(&a, &b)| a + b).collect(),
        }
    }

    /// Tensor product with `self` on the leftmost bits.
    pub fn kron(&self, other: &Self) -> Self {
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for &a in &self.amps {
            for &b in &other.amps {
                amps.push(a * b);
            }
        }
        Self { amps }
    }

    /// Largest amplitude modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!(self.dim(), other.dim());
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(&a, &b)| (a - b).norm())
            .fold(T::zero(), T::max)
    }

    /// Distance after removing the best global phase.
    pub fn distance_up_to_phase(&self, other: &Self) -> T {
        let ov = self.inner(other);
        let phase = if ov.norm() > T::zero() {
            ov / ov.norm()
        } else {
            Complex::one()
        };
        self.scale(phase).max_abs_diff(other)
    }
}

impl<T> std::ops::Index<usize> for StateVector<T> {
    type Output = Complex<T>;
    fn index(&self, i: usize) -> &Complex<T> {
        &self.amps[i]
    }
}
