//! Dense eigendecomposition of unitary matrices.
//!
//! Householder reduction to upper Hessenberg form followed by the shifted
//! complex QR iteration. For a normal matrix the converged Schur form is
//! diagonal, so the accumulated Schur vectors are an orthonormal eigenbasis
//! even when eigenvalues repeat.

use std::cmp::Ordering;

use num_complex::Complex;
use num_traits::{One, Zero};

use super::{CMatrix, StateVector};
use crate::error::{Error, Result};
use crate::scalar::{cis, principal_angle, Real};

/// Eigenphases `nu_mu` and eigenvectors `Psi_mu` of a unitary operator.
#[derive(Clone, Debug)]
pub struct Spectrum<T> {
    /// Eigenphases in `(-pi, pi]`.
    pub eigenphases: Vec<T>,
    /// Unit-norm eigenvectors, one per eigenphase.
    pub eigenvectors: Vec<StateVector<T>>,
    /// Factor applied to the raw eigenvector to normalize it. The dense
    /// route always reports `1`.
    pub normalizations: Vec<T>,
}

impl<T: Real> Spectrum<T> {
    pub fn dim(&self) -> usize {
        self.eigenphases.len()
    }

    pub fn eigenvalue(&self, mu: usize) -> Complex<T> {
        cis(self.eigenphases[mu])
    }

    /// `sum_mu e^{i n nu_mu} |Psi_mu><Psi_mu|` for any integer `n`.
    pub fn power(&self, n: i64) -> CMatrix<T> {
        let d = self.dim();
        let nn = T::from_i64_lossy(n);
        let mut out = CMatrix::zeros(d);
        for (nu, v) in self.eigenphases.iter().zip(&self.eigenvectors) {
            let phase = cis(nn * *nu);
            let amps = v.amplitudes();
            for i in 0..d {
                let left = amps[i] * phase;
                if left.is_zero() {
                    continue;
                }
                for j in 0..d {
                    out[(i, j)] += left * amps[j].conj();
                }
            }
        }
        out
    }

    /// `sum_mu lambda_mu |Psi_mu><Psi_mu|`.
    pub fn reconstruct(&self) -> CMatrix<T> {
        self.power(1)
    }

    /// Largest `|U Psi - lambda Psi|` entry over all pairs.
    pub fn residual(&self, u: &CMatrix<T>) -> T {
        self.eigenphases
            .iter()
            .zip(&self.eigenvectors)
            .map(|(&nu, v)| {
                let uv = u.mul_vec(v.amplitudes());
                let lam = cis(nu);
                uv.iter()
                    .zip(v.amplitudes())
                    .map(|(&a, &b)| (a - lam * b).norm())
                    .fold(T::zero(), T::max)
            })
            .fold(T::zero(), T::max)
    }

    /// Largest deviation of the Gram matrix from the identity.
    pub fn orthonormality_residual(&self) -> T {
        let mut worst = T::zero();
        for (i, a) in self.eigenvectors.iter().enumerate() {
            for (j, b) in self.eigenvectors.iter().enumerate() {
                let target = if i == j { Complex::one() } else { Complex::zero() };
                worst = worst.max((a.inner(b) - target).norm());
            }
        }
        worst
    }

    /// Sorts by eigenphase, ties broken by the index of the leading entry.
    pub(crate) fn sort_canonical(&mut self) {
        let tie = T::lit(1e-10);
        let mut idx: Vec<usize> = (0..self.dim()).collect();
        let lead: Vec<usize> = self.eigenvectors.iter().map(leading_index).collect();
        idx.sort_by(|&a, &b| {
            let (pa, pb) = (self.eigenphases[a], self.eigenphases[b]);
            if (pa - pb).abs() > tie {
                pa.partial_cmp(&pb).unwrap_or(Ordering::Equal)
            } else {
                lead[a].cmp(&lead[b])
            }
        });
        self.eigenphases = idx.iter().map(|&i| self.eigenphases[i]).collect();
        self.eigenvectors = idx.iter().map(|&i| self.eigenvectors[i].clone()).collect();
        self.normalizations = idx.iter().map(|&i| self.normalizations[i]).collect();
    }
}

fn leading_index<T: Real>(v: &StateVector<T>) -> usize {
    let cut = T::lit(1e-8);
    v.amplitudes()
        .iter()
        .position(|a| a.norm() > cut)
        .unwrap_or(0)
}

/// Rotates `v` so its first non-negligible entry is real and positive.
pub(crate) fn fix_phase<T: Real>(v: StateVector<T>) -> StateVector<T> {
    let i = leading_index(&v);
    let a = v[i];
    if a.norm() == T::zero() {
        return v;
    }
    let rot = a.conj() / a.norm();
    v.scale(rot)
}

/// Eigendecomposition of a unitary matrix by complex Schur reduction.
///
/// Eigenphases are returned in `(-pi, pi]`, ascending. Fails with
/// [`Error::NotUnitary`] when `U†U = I` is violated by more than `1e-10`.
pub fn dense_eigendecomposition<T: Real>(u: &CMatrix<T>) -> Result<Spectrum<T>> {
    u.ensure_unitary(T::lit(super::UNITARY_TOL))?;
    let n = u.dim();
    let (t, q) = complex_schur(u)?;
    let mut spec = Spectrum {
        eigenphases: Vec::with_capacity(n),
        eigenvectors: Vec::with_capacity(n),
        normalizations: vec![T::one(); n],
    };
    for k in 0..n {
        let v = StateVector::normalized(q.column(k));
        // Rayleigh quotient is more accurate than the raw diagonal entry.
        let uv = u.mul_vec(v.amplitudes());
        let rq = v
            .amplitudes()
            .iter()
            .zip(&uv)
            .fold(Complex::zero(), |acc, (a, b)| acc + a.conj() * b);
        let lam = if rq.norm() > T::lit(0.5) { rq } else { t[(k, k)] };
        spec.eigenphases.push(principal_angle(lam.arg()));
        spec.eigenvectors.push(fix_phase(v));
    }
    spec.sort_canonical();
    Ok(spec)
}

/// Complex Givens rotation `[c, s; -conj(s), c]` mapping `(x, y)` to `(r, 0)`.
fn givens<T: Real>(x: Complex<T>, y: Complex<T>) -> (T, Complex<T>) {
    let ax = x.norm();
    let r = (ax * ax + y.norm_sqr()).sqrt();
    if r == T::zero() {
        return (T::one(), Complex::zero());
    }
    if ax == T::zero() {
        return (T::zero(), Complex::one());
    }
    let c = ax / r;
    let s = (x / ax) * y.conj() / r;
    (c, s)
}

/// Returns `(T, Q)` with `A = Q T Q†`, `T` upper triangular.
fn complex_schur<T: Real>(a: &CMatrix<T>) -> Result<(CMatrix<T>, CMatrix<T>)> {
    let n = a.dim();
    let mut h = a.clone();
    let mut q = CMatrix::<T>::identity(n);
    if n <= 1 {
        return Ok((h, q));
    }

    // Hessenberg reduction.
    for k in 0..n.saturating_sub(2) {
        let xnorm = (k + 1..n)
            .fold(T::zero(), |acc, i| acc + h[(i, k)].norm_sqr())
            .sqrt();
        if xnorm == T::zero() {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0.norm() > T::zero() {
            x0 / x0.norm()
        } else {
            Complex::one()
        };
        let alpha = -phase * xnorm;
        let mut v: Vec<Complex<T>> = (k + 1..n).map(|i| h[(i, k)]).collect();
        v[0] -= alpha;
        let vn = v.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt();
        if vn == T::zero() {
            continue;
        }
        for z in &mut v {
            *z = *z / vn;
        }
        let two = T::lit(2.0);
        // H <- P H with P = I - 2 v v†
        for j in 0..n {
            let s = (k + 1..n).fold(Complex::zero(), |acc, i| acc + v[i - k - 1].conj() * h[(i, j)]);
            for i in k + 1..n {
                let d = v[i - k - 1] * s * two;
                h[(i, j)] -= d;
            }
        }
        // H <- H P, Q <- Q P
        for m in [&mut h, &mut q] {
            for i in 0..n {
                let s = (k + 1..n).fold(Complex::<T>::zero(), |acc, j| acc + m[(i, j)] * v[j - k - 1]);
                for j in k + 1..n {
                    let d = s * v[j - k - 1].conj() * two;
                    m[(i, j)] -= d;
                }
            }
        }
        for i in k + 2..n {
            h[(i, k)] = Complex::zero();
        }
    }

    // Shifted QR on the active window.
    let eps = T::epsilon();
    let mut hi = n - 1;
    let mut iter = 0usize;
    let max_iter = 100 * n;
    let mut total = 0usize;
    while hi > 0 {
        let mut l = hi;
        while l > 0 {
            let off = h[(l, l - 1)].norm();
            let scale = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            if off <= eps * scale.max(T::min_positive_value()) {
                h[(l, l - 1)] = Complex::zero();
                break;
            }
            l -= 1;
        }
        if l == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > max_iter {
            return Err(Error::NoConvergence);
        }

        let mu = if iter % 11 == 10 {
            // Exceptional shift to break symmetric stagnation.
            h[(hi, hi)] + Complex::new(h[(hi, hi - 1)].norm() * T::lit(0.75), T::zero())
        } else {
            wilkinson_shift(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            )
        };

        for i in l..=hi {
            h[(i, i)] -= mu;
        }
        let mut rots = Vec::with_capacity(hi - l);
        for k in l..hi {
            let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
            let cc = Complex::new(c, T::zero());
            for j in k..n {
                let (x, y) = (h[(k, j)], h[(k + 1, j)]);
                h[(k, j)] = cc * x + s * y;
                h[(k + 1, j)] = -s.conj() * x + cc * y;
            }
            h[(k + 1, k)] = Complex::zero();
            rots.push((k, cc, s));
        }
        for &(k, cc, s) in &rots {
            let top = (k + 2).min(hi);
            for i in 0..=top {
                let (x, y) = (h[(i, k)], h[(i, k + 1)]);
                h[(i, k)] = cc * x + s.conj() * y;
                h[(i, k + 1)] = -s * x + cc * y;
            }
            for i in 0..n {
                let (x, y) = (q[(i, k)], q[(i, k + 1)]);
                q[(i, k)] = cc * x + s.conj() * y;
                q[(i, k + 1)] = -s * x + cc * y;
            }
        }
        for i in l..=hi {
            h[(i, i)] += mu;
        }
    }
    Ok((h, q))
}

fn wilkinson_shift<T: Real>(
    a: Complex<T>,
    b: Complex<T>,
    c: Complex<T>,
    d: Complex<T>,
) -> Complex<T> {
    let half = T::lit(0.5);
    let m = (a + d) * half;
    let disc = ((a - d) * (a - d) * T::lit(0.25) + b * c).sqrt();
    let (m1, m2) = (m + disc, m - disc);
    if (m1 - d).norm() <= (m2 - d).norm() {
        m1
    } else {
        m2
    }
}
