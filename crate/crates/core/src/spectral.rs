//! Closed-form spectra of control-gate networks.
//!
//! For a per-cycle operator `G = 1 ⊕ M` the eigenvalue 1 with eigenvector
//! `|00>` is fixed, and the other three eigenvalues are the roots of
//! `lambda^3 + a1 lambda^2 + a2 lambda + a3 = 0` with `a1 = -Tr M`,
//! `a2` the sum of the principal 2x2 minors and `a3 = -det M`. Roots come
//! from Cardano's formula; eigenvectors from the cofactors of `M - lambda`.
//! Whenever the formula path is ill-conditioned the dense decomposition in
//! [`crate::linalg`] takes over, subject to [`FallbackPolicy`].

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::group::{has_block_form, lower_block};
use crate::linalg::{dense_eigendecomposition, CMatrix, Spectrum, StateVector};
use crate::scalar::{cis, principal_angle, principal_cbrt, Real};

/// Roots must satisfy `||lambda| - 1| < ROOT_MODULUS_TOL`.
pub const ROOT_MODULUS_TOL: f64 = 1e-8;
/// Minimum eigenvalue separation for the cofactor eigenvectors.
pub const DEGENERACY_TOL: f64 = 1e-8;
/// Largest accepted `|G Psi - lambda Psi|` for a formula eigenvector.
pub const EIGEN_RESIDUAL_TOL: f64 = 1e-9;
const W_TINY: f64 = 1e-12;

/// What to do when the closed form cannot be used.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum FallbackPolicy {
    /// Use the dense decomposition.
    #[default]
    Oracle,
    /// Propagate the error.
    Error,
}

impl FallbackPolicy {
    pub const ENV_VAR: &'static str = "CYCLONET_FALLBACK";

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "oracle" => Some(Self::Oracle),
            "error" => Some(Self::Error),
            _ => None,
        }
    }

    /// Reads `CYCLONET_FALLBACK`; unset means [`FallbackPolicy::Oracle`].
    pub fn from_env() -> std::result::Result<Self, String> {
        match std::env::var(Self::ENV_VAR) {
            Ok(v) => Self::parse(&v).ok_or_else(|| {
                format!("{}={v}: expected `oracle` or `error`", Self::ENV_VAR)
            }),
            Err(_) => Ok(Self::Oracle),
        }
    }
}

/// How a spectrum was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpectrumRoute {
    ClosedForm,
    Dense,
}

/// Characteristic-polynomial coefficients and Cardano intermediates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CubicCoefficients<T> {
    pub a1: Complex<T>,
    pub a2: Complex<T>,
    pub a3: Complex<T>,
    pub q: Complex<T>,
    pub p: Complex<T>,
    /// Principal branch `Q/2 + sqrt(Q^2/4 + P^3/27)`.
    pub w: Complex<T>,
}

impl<T: Real> CubicCoefficients<T> {
    pub fn from_a(a1: Complex<T>, a2: Complex<T>, a3: Complex<T>) -> Self {
        let r = |x: f64| Complex::new(T::lit(x), T::zero());
        let q = (r(9.0) * a1 * a2 - r(27.0) * a3 - r(2.0) * a1 * a1 * a1) / r(27.0);
        let p = (r(3.0) * a2 - a1 * a1) / r(3.0);
        let w = q / r(2.0) + discriminant_root(q, p);
        Self { a1, a2, a3, q, p, w }
    }

    /// Evaluates the cubic at `x`.
    pub fn eval(&self, x: Complex<T>) -> Complex<T> {
        ((x + self.a1) * x + self.a2) * x + self.a3
    }

    /// `w` on the other square-root branch.
    pub fn w_alternate(&self) -> Complex<T> {
        self.q / Complex::new(T::lit(2.0), T::zero()) - discriminant_root(self.q, self.p)
    }
}

fn discriminant_root<T: Real>(q: Complex<T>, p: Complex<T>) -> Complex<T> {
    (q * q / T::lit(4.0) + p * p * p / T::lit(27.0)).sqrt()
}

/// Coefficients of `det(lambda - M)` for a 3x3 block.
pub fn cubic_coefficients<T: Real>(m: &CMatrix<T>) -> CubicCoefficients<T> {
    assert_eq!(m.dim(), 3, "cubic coefficients need a 3x3 block");
    let e = |i: usize, j: usize| m[(i, j)];
    let minor11 = e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1);
    let minor22 = e(0, 0) * e(2, 2) - e(0, 2) * e(2, 0);
    let minor33 = e(0, 0) * e(1, 1) - e(0, 1) * e(1, 0);
    CubicCoefficients::from_a(-m.trace(), minor11 + minor22 + minor33, -m.det())
}

fn roots_from_w<T: Real>(c: &CubicCoefficients<T>, w: Complex<T>) -> [Complex<T>; 3] {
    let shift = c.a1 / T::lit(3.0);
    let z = principal_cbrt(w);
    if z.norm() < T::lit(W_TINY) {
        return [-shift; 3];
    }
    let third = T::lit(2.0) * T::PI() / T::lit(3.0);
    let mut out = [Complex::zero(); 3];
    for (k, slot) in out.iter_mut().enumerate() {
        let zk = z * cis(third * T::lit(k as f64));
        *slot = zk - c.p / (zk * T::lit(3.0)) - shift;
    }
    out
}

fn unit_modulus<T: Real>(roots: &[Complex<T>; 3]) -> bool {
    roots
        .iter()
        .all(|r| (r.norm() - T::one()).abs() < T::lit(ROOT_MODULUS_TOL))
}

/// Cardano roots `lambda_k`, `k = 0, 1, 2`.
///
/// Tries the principal branches first, then the other square-root branch
/// for `w`. Fails with [`Error::CubicDegenerate`] if neither yields roots of
/// unit modulus (the input is assumed to come from a unitary block).
pub fn solve_cubic<T: Real>(c: &CubicCoefficients<T>) -> Result<[Complex<T>; 3]> {
    let tiny = T::lit(W_TINY);
    if c.w.norm() < tiny && c.p.norm() < tiny {
        let r = roots_from_w(c, Complex::zero());
        return if unit_modulus(&r) {
            Ok(r)
        } else {
            Err(Error::CubicDegenerate)
        };
    }
    if c.w.norm() >= tiny {
        let r = roots_from_w(c, c.w);
        if unit_modulus(&r) {
            return Ok(r);
        }
    }
    let alt = c.w_alternate();
    if alt.norm() >= tiny {
        let r = roots_from_w(c, alt);
        if unit_modulus(&r) {
            return Ok(r);
        }
    }
    Err(Error::CubicDegenerate)
}

/// Eigenvalues `{1, e^{i nu}, e^{-i nu}}` of a block with real trace and
/// unit determinant, `cos nu = (Tr M - 1)/2`.
pub fn real_trace_eigenvalues<T: Real>(tr_m: T) -> Result<[Complex<T>; 3]> {
    let slack = T::lit(1e-12);
    let (lo, hi) = (-T::one(), T::lit(3.0));
    if tr_m < lo - slack || tr_m > hi + slack || tr_m.is_nan() {
        return Err(Error::TraceOutOfRange(tr_m.to_f64().unwrap_or(f64::NAN)));
    }
    let t = tr_m.max(lo).min(hi);
    let half = T::lit(0.5);
    let re = (t - T::one()) * half;
    let im = ((hi - t) * (t + T::one())).sqrt() * half;
    Ok([
        Complex::one(),
        Complex::new(re, im),
        Complex::new(re, -im),
    ])
}

/// Unnormalized cofactor eigenvector of `M` for eigenvalue `lam`.
fn cofactor_vector<T: Real>(m: &CMatrix<T>, lam: Complex<T>) -> [Complex<T>; 3] {
    let e = |i: usize, j: usize| m[(i, j)];
    let (m11, m12, m13) = (e(0, 0), e(0, 1), e(0, 2));
    let (m21, m22, m23) = (e(1, 0), e(1, 1), e(1, 2));
    [
        -m13 * (m22 - lam) + m12 * m23,
        -m23 * (m11 - lam) + m21 * m13,
        (m22 - lam) * (m11 - lam) - m21 * m12,
    ]
}

/// Eigenstates `Psi_0, Psi_1, Psi_2` from the cofactor formula plus
/// `Psi_3 = |00>`, in that order.
///
/// Needs pairwise-distinct eigenvalues; otherwise, or when the cofactor
/// vector vanishes for a particular `M`, returns
/// [`Error::DegenerateSpectrum`].
pub fn eigenstates_g<T: Real>(g: &CMatrix<T>, eigenvalues: &[Complex<T>; 3]) -> Result<Spectrum<T>> {
    if !has_block_form(g) {
        return Err(Error::NotBlockForm {
            residual: crate::group::block_form_residual(g).to_f64().unwrap_or(f64::INFINITY),
        });
    }
    let mut separation = T::infinity();
    for i in 0..3 {
        for j in i + 1..3 {
            separation = separation.min((eigenvalues[i] - eigenvalues[j]).norm());
        }
    }
    let degenerate = |sep: T| Error::DegenerateSpectrum {
        separation: sep.to_f64().unwrap_or(0.0),
    };
    if separation <= T::lit(DEGENERACY_TOL) {
        return Err(degenerate(separation));
    }
    let m = lower_block(g);
    let mut spec = Spectrum {
        eigenphases: Vec::with_capacity(4),
        eigenvectors: Vec::with_capacity(4),
        normalizations: Vec::with_capacity(4),
    };
    let unit_vector = |lam: Complex<T>| -> Option<(StateVector<T>, T)> {
        let v = cofactor_vector(&m, lam);
        let norm = v.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt();
        if norm <= T::lit(1e-12) {
            return None;
        }
        let amps = vec![Complex::zero(), v[0] / norm, v[1] / norm, v[2] / norm];
        Some((StateVector::from_amplitudes_unchecked(amps), norm))
    };
    for &root in eigenvalues {
        let (first, _) = unit_vector(root).ok_or_else(|| degenerate(separation))?;
        // The Rayleigh quotient is accurate to second order in the vector
        // error; one pass removes the Cardano round-off from the phase.
        let polished = rayleigh(g, &first);
        let lam = polished / polished.norm();
        let (psi, norm) = unit_vector(lam).ok_or_else(|| degenerate(separation))?;
        let gv = g.mul_vec(psi.amplitudes());
        let resid = gv
            .iter()
            .zip(psi.amplitudes())
            .map(|(&a, &b)| (a - lam * b).norm())
            .fold(T::zero(), T::max);
        if resid > T::lit(EIGEN_RESIDUAL_TOL) {
            return Err(degenerate(separation));
        }
        spec.eigenphases.push(principal_angle(lam.arg()));
        spec.eigenvectors.push(psi);
        spec.normalizations.push(T::one() / norm);
    }
    spec.eigenphases.push(T::zero());
    spec.eigenvectors.push(StateVector::basis(4, 0));
    spec.normalizations.push(T::one());
    Ok(spec)
}

fn rayleigh<T: Real>(g: &CMatrix<T>, v: &StateVector<T>) -> Complex<T> {
    let gv = StateVector::from_amplitudes_unchecked(g.mul_vec(v.amplitudes()));
    v.inner(&gv)
}

/// Closed-form spectrum of a block-form operator (unsorted, formula order).
pub fn closed_form_spectrum<T: Real>(g: &CMatrix<T>) -> Result<Spectrum<T>> {
    if !has_block_form(g) {
        return Err(Error::NotBlockForm {
            residual: crate::group::block_form_residual(g).to_f64().unwrap_or(f64::INFINITY),
        });
    }
    let coeffs = cubic_coefficients(&lower_block(g));
    let roots = solve_cubic(&coeffs)?;
    eigenstates_g(g, &roots)
}

/// Spectrum of any per-cycle unitary, sorted by eigenphase.
///
/// Block-form 4x4 operators use the closed form; everything else, and any
/// closed-form failure under [`FallbackPolicy::Oracle`], uses the dense
/// decomposition.
pub fn spectrum_with_route<T: Real>(
    g: &CMatrix<T>,
    policy: FallbackPolicy,
) -> Result<(Spectrum<T>, SpectrumRoute)> {
    if g.dim() == 4 && has_block_form(g) {
        match closed_form_spectrum(g) {
            Ok(mut s) => {
                s.sort_canonical();
                return Ok((s, SpectrumRoute::ClosedForm));
            }
            Err(e) if policy == FallbackPolicy::Error => return Err(e),
            Err(_) => {}
        }
    }
    Ok((dense_eigendecomposition(g)?, SpectrumRoute::Dense))
}

pub fn spectrum<T: Real>(g: &CMatrix<T>, policy: FallbackPolicy) -> Result<Spectrum<T>> {
    spectrum_with_route(g, policy).map(|(s, _)| s)
}

/// `A(alpha, phi) = e^{-2i alpha} cos^2 phi + 2 e^{i alpha} cos phi`, the
/// trace of `M` for `G_up(alpha, phi, beta) G_dn(alpha, phi, beta)`.
pub fn alternating_trace<T: Real>(alpha: T, phi: T) -> Complex<T> {
    let c = phi.cos();
    cis(-(alpha + alpha)) * (c * c) + cis(alpha) * (c + c)
}

/// `lambda_0(alpha, phi)`: the `k = 0` Cardano root of
/// `lambda^3 - A lambda^2 + A* lambda - 1 = 0`.
pub fn alternating_lambda0<T: Real>(alpha: T, phi: T) -> Complex<T> {
    let a = alternating_trace(alpha, phi);
    let c = CubicCoefficients::from_a(-a, a.conj(), -Complex::one());
    let tiny = T::lit(W_TINY);
    let w = if c.w.norm() >= tiny || c.p.norm() < tiny {
        c.w
    } else {
        c.w_alternate()
    };
    roots_from_w(&c, w)[0]
}

/// Trace and eigenvalues of the alternating SU(3) pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AlternatingSu3<T> {
    pub trace: Complex<T>,
    /// `lambda_k = lambda_0(alpha - 2k pi/3, phi) e^{i 2k pi/3}`.
    pub eigenvalues: [Complex<T>; 3],
}

pub fn alternating_su3_analysis<T: Real>(alpha: T, phi: T) -> AlternatingSu3<T> {
    let third = T::lit(2.0) * T::PI() / T::lit(3.0);
    let mut eigenvalues = [Complex::zero(); 3];
    for (k, slot) in eigenvalues.iter_mut().enumerate() {
        let shift = third * T::lit(k as f64);
        *slot = alternating_lambda0(alpha - shift, phi) * cis(shift);
    }
    AlternatingSu3 {
        trace: alternating_trace(alpha, phi),
        eigenvalues,
    }
}

/// Value of `lambda^3 - A lambda^2 + A* lambda - 1` at `lambda = e^{i alpha}`.
///
/// Expands to `(e^{3i alpha} - 1)(1 - cos phi)^2`, which vanishes for
/// `alpha ∈ {0, ±2pi/3}` at every `phi`.
pub fn special_solution_residual<T: Real>(alpha: T, phi: T) -> Complex<T> {
    let a = alternating_trace(alpha, phi);
    let l = cis(alpha);
    ((l - a) * l + a.conj()) * l - Complex::one()
}
