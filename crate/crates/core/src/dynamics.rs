//! Iterated evolution, spectral powers and acyclic-qubit perturbations.

use std::io::{self, Write};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::gates::{embed_single, CyclicNetwork, GateSpec, U2Params};
use crate::linalg::{CMatrix, Spectrum, StateVector, NORM_TOL};
use crate::scalar::{cis, Real};
use crate::spectral::{spectrum, FallbackPolicy};

/// Largest number of linked networks accepted by [`chain_evolve`].
pub const MAX_CHAIN: usize = 4;

/// `Psi(n) = sum_mu c_mu e^{i n nu_mu} Psi_mu` with `c_mu = <Psi_mu|psi>`.
pub fn evolve_with_spectrum<T: Real>(
    spec: &Spectrum<T>,
    psi: &StateVector<T>,
    n: i64,
) -> Result<StateVector<T>> {
    if psi.dim() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            found: psi.dim(),
        });
    }
    let nn = T::from_i64_lossy(n);
    let mut out = StateVector::from_amplitudes_unchecked(vec![Complex::zero(); psi.dim()]);
    for (nu, v) in spec.eigenphases.iter().zip(&spec.eigenvectors) {
        let coeff = v.inner(psi) * cis(nn * *nu);
        out = out.add(&v.scale(coeff));
    }
    Ok(out)
}

/// State after `n` cycles of `net`.
pub fn evolve<T: Real>(net: &CyclicNetwork<T>, psi: &StateVector<T>, n: i64) -> Result<StateVector<T>> {
    let g = net.compile()?;
    let spec = spectrum(&g, FallbackPolicy::Oracle)?;
    evolve_with_spectrum(&spec, psi, n)
}

/// `G^n` from the eigendecomposition, for any integer `n`.
///
/// Negative `n` conjugates the phases, so `n = -1` gives `G^dagger`.
pub fn matrix_power_spectral<T: Real>(g: &CMatrix<T>, n: i64, policy: FallbackPolicy) -> Result<CMatrix<T>> {
    Ok(spectrum(g, policy)?.power(n))
}

/// Matrix element `A + B cos(n nu1) + C sin(n nu1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClosedFormElement<T> {
    pub a: Complex<T>,
    pub b: Complex<T>,
    pub c: Complex<T>,
}

impl<T: Real> ClosedFormElement<T> {
    fn real(a: T, b: T, c: T) -> Self {
        Self {
            a: Complex::new(a, T::zero()),
            b: Complex::new(b, T::zero()),
            c: Complex::new(c, T::zero()),
        }
    }

    /// Value at a (possibly non-integer) cycle count `x`.
    pub fn eval(&self, x: T, nu1: T) -> Complex<T> {
        let (s, c) = (x * nu1).sin_cos();
        self.a + self.b * c + self.c * s
    }

    fn combine(terms: &[(Self, Complex<T>)]) -> Self {
        terms.iter().fold(
            Self {
                a: Complex::zero(),
                b: Complex::zero(),
                c: Complex::zero(),
            },
            |acc, (e, w)| Self {
                a: acc.a + e.a * w,
                b: acc.b + e.b * w,
                c: acc.c + e.c * w,
            },
        )
    }
}

/// The SO(3) network `G = G_up(phi) G_dn(phi)` with all phases zero.
///
/// Its lower block has eigenvalues `lambda_0 = 1`, `lambda_1 = e^{i nu1}`,
/// `lambda_2 = e^{-i nu1}` with `cos nu1 = (Tr M - 1)/2` and
/// `Tr M = cos^2 phi + 2 cos phi`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct So3Example<T> {
    phi: T,
}

const SINGULAR_TOL: f64 = 1e-6;

impl<T: Real> So3Example<T> {
    /// Fails with [`Error::NearSingular`] when `sin phi` or `cos phi + 1`
    /// is within `1e-6` of zero.
    pub fn new(phi: T) -> Result<Self> {
        let (s, c) = phi.sin_cos();
        let tol = T::lit(SINGULAR_TOL);
        if s.abs() < tol || (c + T::one()).abs() < tol {
            return Err(Error::NearSingular(phi.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(Self { phi })
    }

    /// The `phi ∈ [0, pi]` giving eigenphase `nu1`, via
    /// `cos phi = -1 + sqrt(2 + 2 cos nu1)`.
    pub fn phi_for_nu1(nu1: T) -> T {
        let c = -T::one() + (T::lit(2.0) + T::lit(2.0) * nu1.cos()).max(T::zero()).sqrt();
        c.max(-T::one()).min(T::one()).acos()
    }

    pub fn from_nu1(nu1: T) -> Result<Self> {
        Self::new(Self::phi_for_nu1(nu1))
    }

    pub fn phi(&self) -> T {
        self.phi
    }

    pub fn network(&self) -> CyclicNetwork<T> {
        let p = U2Params::rotation(self.phi);
        CyclicNetwork::new(2, vec![GateSpec::control_down(p), GateSpec::control_up(p)])
    }

    pub fn matrix(&self) -> CMatrix<T> {
        self.network()
            .compile()
            .expect("two-qubit control gates always compile")
    }

    pub fn trace_m(&self) -> T {
        let c = self.phi.cos();
        c * c + c + c
    }

    /// `sin nu1 = (c + 1) sqrt((1 - c)(c + 3)) / 2`.
    fn sin_nu1(&self) -> T {
        let c = self.phi.cos();
        let one = T::one();
        (c + one) * ((one - c) * (c + T::lit(3.0))).max(T::zero()).sqrt() * T::lit(0.5)
    }

    /// `nu1 ∈ [0, pi]`.
    pub fn nu1(&self) -> T {
        self.sin_nu1().atan2((self.trace_m() - T::one()) * T::lit(0.5))
    }

    pub fn eigenvalues(&self) -> [Complex<T>; 3] {
        let nu = self.nu1();
        [Complex::one(), cis(nu), cis(-nu)]
    }

    /// `N_k`; index 3 is the `|00>` state with `N_3 = 1`.
    pub fn normalization(&self, k: usize) -> T {
        let (s, c) = self.phi.sin_cos();
        let three = T::lit(3.0);
        match k {
            0 => T::one() / ((T::one() - c) * ((T::one() - c) * (c + three)).sqrt()),
            1 | 2 => T::one() / (s * s * ((c + T::one()) * (c + three)).sqrt()),
            _ => T::one(),
        }
    }

    /// `Psi_k` for `k ∈ 0..=3`.
    pub fn eigenstate(&self, k: usize) -> Result<StateVector<T>> {
        if k > 3 {
            return Err(Error::IndexOutOfRange { index: k, len: 4 });
        }
        if k == 3 {
            return Ok(StateVector::basis(4, 0));
        }
        let (s, c) = self.phi.sin_cos();
        let lam = self.eigenvalues()[k];
        let cr = Complex::new(c, T::zero());
        let n = self.normalization(k);
        let amps = vec![
            Complex::zero(),
            (Complex::<T>::one() - lam * c) * (-s * n),
            (cr - lam) * (-s * n),
            (cr - lam) * (cr - lam) * n,
        ];
        Ok(StateVector::from_amplitudes_unchecked(amps))
    }

    /// Coefficients of `m_{j,j'}(n) = <j|M^n|j'>`, rows and columns over
    /// `|01>, |10>, |11>`.
    ///
    /// Algebraically reduced forms of [`Self::table_printed`], with
    /// `cos nu1` and `sin nu1` written in terms of `c`. They avoid the
    /// cancellation the printed numerators suffer as `phi` approaches `pi`.
    pub fn table(&self) -> [[ClosedFormElement<T>; 3]; 3] {
        let (s, c) = self.phi.sin_cos();
        let one = T::one();
        let c3 = c + T::lit(3.0);
        let c1 = c + one;
        let r = ((one - c) * c3).max(T::zero()).sqrt();
        let diag = (c1 / c3, T::lit(2.0) / c3);
        let b12 = c1 / c3;
        let c12 = -r / c3;
        let b13 = s / c3;
        let c13 = r * s / ((one - c) * c3);
        let e = ClosedFormElement::real;
        [
            [e(diag.0, diag.1, T::zero()), e(-diag.0, b12, c12), e(-s / c3, b13, c13)],
            [e(-diag.0, b12, -c12), e(diag.0, diag.1, T::zero()), e(s / c3, -b13, c13)],
            [e(-s / c3, b13, -c13), e(s / c3, -b13, -c13), e((one - c) / c3, T::lit(2.0) * c1 / c3, T::zero())],
        ]
    }

    /// The coefficient table exactly as printed, with `cos nu1 = (Tr M - 1)/2`.
    pub fn table_printed(&self) -> [[ClosedFormElement<T>; 3]; 3] {
        let (s, c) = self.phi.sin_cos();
        let l = |x: f64| T::lit(x);
        let cn = (self.trace_m() - T::one()) * l(0.5);
        let sn = self.sin_nu1();
        let (s2n, c2n) = (l(2.0) * sn * cn, l(2.0) * cn * cn - T::one());
        let one = T::one();
        let c3 = c + l(3.0);
        let c1 = c + one;
        let d2 = s * s * c1 * c3;
        let d3 = s * s * s * c1 * c3;
        let cc = c * c;
        let ccc = cc * c;

        let diag_a = c1 / c3;
        let diag_b = l(2.0) / c3;
        let b12 = (l(4.0) * c - l(2.0) * cc * cn - l(2.0) * cn) / d2;
        let c12 = -l(2.0) * sn / (c1 * c3);
        let b13 = (l(2.0) * ccc * cn - l(6.0) * cc + l(6.0) * c * cn - l(2.0) * c2n) / d3;
        let c13 = (-l(2.0) * ccc * sn + l(6.0) * c * sn - l(2.0) * s2n) / d3;
        let b23 = l(2.0) * (-ccc + l(3.0) * cc * cn - c * (c2n + l(2.0)) + cn) / d3;
        let c23 = l(2.0) * (cc * sn - c * s2n + sn) / d3;
        let e = ClosedFormElement::real;
        [
            [e(diag_a, diag_b, T::zero()), e(-diag_a, b12, c12), e(-s / c3, b13, c13)],
            [e(-diag_a, b12, -c12), e(diag_a, diag_b, T::zero()), e(s / c3, b23, c23)],
            [e(-s / c3, b13, -c13), e(s / c3, b23, -c23), e((one - c) / c3, l(2.0) * c1 / c3, T::zero())],
        ]
    }

    /// `M^x` assembled from [`Self::table`].
    pub fn m_power(&self, x: T) -> CMatrix<T> {
        let t = self.table();
        let nu = self.nu1();
        let mut data = Vec::with_capacity(9);
        for row in &t {
            for el in row {
                data.push(el.eval(x, nu));
            }
        }
        CMatrix::from_vec(3, data)
    }
}

/// Which qubit of the coupling gate sits on the acyclic line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CouplingOrientation {
    /// Acyclic qubit controls; the operator hits the bottom cyclic line.
    ControlOnAcyclic,
    /// Bottom cyclic line controls; the operator hits the acyclic qubit.
    TargetOnAcyclic,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Coupling<T> {
    pub orientation: CouplingOrientation,
    pub operator: U2Params<T>,
}

impl<T: Real> Coupling<T> {
    /// Controlled-NOT with the given orientation.
    pub fn cnot(orientation: CouplingOrientation) -> Self {
        Self {
            orientation,
            operator: U2Params::pauli_x(),
        }
    }
}

/// A two-qubit cyclic network touched once by an acyclic qubit
/// `Phi = alpha|0> + beta|1>`: `n` cycles, the coupling gate, then `n'`
/// cycles.
#[derive(Clone, Debug, PartialEq)]
pub struct PerturbationScenario<T> {
    pub net: CyclicNetwork<T>,
    pub coupling: Coupling<T>,
    pub acyclic: [Complex<T>; 2],
    pub n: u64,
    pub n_prime: u64,
    pub initial: StateVector<T>,
}

impl<T: Real> PerturbationScenario<T> {
    pub fn new(
        net: CyclicNetwork<T>,
        coupling: Coupling<T>,
        acyclic: [Complex<T>; 2],
        n: u64,
        n_prime: u64,
        initial: StateVector<T>,
    ) -> Result<Self> {
        if net.qubits != 2 {
            return Err(Error::UnsupportedQubits(net.qubits));
        }
        if initial.dim() != 4 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                found: initial.dim(),
            });
        }
        let norm = (acyclic[0].norm_sqr() + acyclic[1].norm_sqr()).sqrt();
        if (norm - T::one()).abs() > T::lit(NORM_TOL) {
            return Err(Error::NotNormalized(norm.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(Self {
            net,
            coupling,
            acyclic,
            n,
            n_prime,
            initial,
        })
    }
}

fn to_i64(n: u64) -> i64 {
    i64::try_from(n).unwrap_or(i64::MAX)
}

/// Bottom-bit projector on the two cyclic qubits.
fn project_bottom<T: Real>(v: &StateVector<T>, bit: usize) -> StateVector<T> {
    let amps = v
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(i, &a)| if i & 1 == bit { a } else { Complex::zero() })
        .collect();
    StateVector::from_amplitudes_unchecked(amps)
}

/// Joint 8-dim state, acyclic qubit leftmost.
///
/// Control on the acyclic line gives
/// `alpha|0> ⊗ U^{n'+n} psi + beta|1> ⊗ U^{n'} V_b U^n psi`; control on the
/// cyclic bottom line gives
/// `Phi ⊗ U^{n'} P_{0,b} U^n psi + (V Phi) ⊗ U^{n'} P_{1,b} U^n psi`.
pub fn perturb<T: Real>(s: &PerturbationScenario<T>) -> Result<StateVector<T>> {
    let g = s.net.compile()?;
    let spec = spectrum(&g, FallbackPolicy::Oracle)?;
    let before = evolve_with_spectrum(&spec, &s.initial, to_i64(s.n))?;
    let np = to_i64(s.n_prime);
    let v = s.coupling.operator.matrix();
    let phi = StateVector::from_amplitudes_unchecked(s.acyclic.to_vec());
    match s.coupling.orientation {
        CouplingOrientation::ControlOnAcyclic => {
            let vb = embed_single(&v, 2, 2)?;
            let idle = evolve_with_spectrum(&spec, &before, np)?;
            let kicked = StateVector::from_amplitudes_unchecked(vb.mul_vec(before.amplitudes()));
            let kicked = evolve_with_spectrum(&spec, &kicked, np)?;
            let zero = StateVector::basis(2, 0).scale(s.acyclic[0]);
            let one = StateVector::basis(2, 1).scale(s.acyclic[1]);
            Ok(zero.kron(&idle).add(&one.kron(&kicked)))
        }
        CouplingOrientation::TargetOnAcyclic => {
            let p0 = evolve_with_spectrum(&spec, &project_bottom(&before, 0), np)?;
            let p1 = evolve_with_spectrum(&spec, &project_bottom(&before, 1), np)?;
            let vphi = StateVector::from_amplitudes_unchecked(v.mul_vec(phi.amplitudes()));
            Ok(phi.kron(&p0).add(&vphi.kron(&p1)))
        }
    }
}

/// Parses `100`, `|101>` or `|110⟩` into a cyclic-register index with
/// the acyclic bit set.
pub fn parse_perturbed_basis(label: &str) -> Result<usize> {
    let bits = label
        .trim()
        .trim_start_matches('|')
        .trim_end_matches('>')
        .trim_end_matches('⟩');
    match bits {
        "100" => Ok(0),
        "101" => Ok(1),
        "110" => Ok(2),
        "111" => Ok(3),
        _ => Err(Error::InvalidBasis(label.to_string())),
    }
}

/// Amplitude of one acyclic-`|1>` basis state versus `n'`.
#[derive(Clone, Debug, PartialEq)]
pub struct AmplitudeSeries<T> {
    pub label: String,
    pub nu1: T,
    /// `values[n']` for `n' = 0..=n'_max`, from `G^{n'} sigma_{x,b} Psi_k`.
    pub values: Vec<Complex<T>>,
    /// The closed-form curve `A + B cos x nu1 + C sin x nu1` sampled at
    /// the same points.
    pub background: Vec<Complex<T>>,
}

/// Perturbed component of the SO(3) example started in `Psi_k` with the
/// acyclic qubit in `|1>` and `n = 0`.
pub fn perturbed_amplitude_series<T: Real>(
    example: &So3Example<T>,
    k: usize,
    basis: &str,
    n_prime_max: u64,
) -> Result<AmplitudeSeries<T>> {
    let idx = parse_perturbed_basis(basis)?;
    let psi = example.eigenstate(k)?;
    let sigma = embed_single(&U2Params::<T>::pauli_x().matrix(), 2, 2)?;
    let kicked = StateVector::from_amplitudes_unchecked(sigma.mul_vec(psi.amplitudes()));

    let spec = spectrum(&example.matrix(), FallbackPolicy::Oracle)?;
    let weights: Vec<(T, Complex<T>)> = spec
        .eigenphases
        .iter()
        .zip(&spec.eigenvectors)
        .map(|(&nu, v)| (nu, v.inner(&kicked) * v[idx]))
        .collect();

    let nu1 = example.nu1();
    let element = if idx == 0 {
        ClosedFormElement {
            a: kicked[0],
            b: Complex::zero(),
            c: Complex::zero(),
        }
    } else {
        let row = &example.table()[idx - 1];
        ClosedFormElement::combine(&[(row[0], kicked[1]), (row[1], kicked[2]), (row[2], kicked[3])])
    };

    let len = usize::try_from(n_prime_max).map_err(|_| Error::OutOfRange("n'_max".into()))? + 1;
    let mut values = Vec::with_capacity(len);
    let mut background = Vec::with_capacity(len);
    for np in 0..len {
        let x = T::lit(np as f64);
        values.push(
            weights
                .iter()
                .fold(Complex::zero(), |acc, &(nu, w)| acc + w * cis(x * nu)),
        );
        background.push(element.eval(x, nu1));
    }
    Ok(AmplitudeSeries {
        label: format!("1{}", ["00", "01", "10", "11"][idx]),
        nu1,
        values,
        background,
    })
}

/// C-style `%.12e`: twelve fractional digits and a signed two-digit exponent.
pub fn format_sci(x: f64) -> String {
    let s = format!("{x:.12e}");
    match s.split_once('e') {
        Some((mant, exp)) => {
            let (sign, digits) = match exp.strip_prefix('-') {
                Some(d) => ('-', d),
                None => ('+', exp),
            };
            format!("{mant}e{sign}{digits:0>2}")
        }
        None => s,
    }
}

/// Writes `n_prime,re,im,abs,background_re,background_im` rows.
pub fn write_series_csv<T: Real, W: Write>(series: &AmplitudeSeries<T>, mut out: W) -> io::Result<()> {
    writeln!(out, "n_prime,re,im,abs,background_re,background_im")?;
    let f = |x: T| format_sci(x.to_f64().unwrap_or(f64::NAN));
    for (np, (v, b)) in series.values.iter().zip(&series.background).enumerate() {
        writeln!(
            out,
            "{np},{},{},{},{},{}",
            f(v.re),
            f(v.im),
            f(v.norm()),
            f(b.re),
            f(b.im)
        )?;
    }
    Ok(())
}

/// `q` two-qubit networks visited in turn by one acyclic qubit.
///
/// Network `j` (1-based) runs `j - 1` cycles, meets the acyclic qubit
/// through a Control-Not with control on the acyclic line, then runs the
/// remaining `q - j + 1 + n'` cycles, so every network completes `q + n'`
/// cycles. The joint state is ordered `Phi ⊗ psi_q ⊗ ... ⊗ psi_1`.
pub fn chain_evolve<T: Real>(
    nets: &[CyclicNetwork<T>],
    acyclic: [Complex<T>; 2],
    initial: &[StateVector<T>],
    n_prime: u64,
) -> Result<StateVector<T>> {
    let q = nets.len();
    if q == 0 || q > MAX_CHAIN {
        return Err(Error::OutOfRange(format!("chain length {q} not in 1..={MAX_CHAIN}")));
    }
    if initial.len() != q {
        return Err(Error::DimensionMismatch {
            expected: q,
            found: initial.len(),
        });
    }
    let sigma = embed_single(&U2Params::<T>::pauli_x().matrix(), 2, 2)?;
    let total = to_i64(n_prime) + q as i64;
    let mut idle = StateVector::from_amplitudes_unchecked(vec![Complex::one()]);
    let mut kicked = idle.clone();
    for j in (1..=q).rev() {
        let net = &nets[j - 1];
        if net.qubits != 2 {
            return Err(Error::UnsupportedQubits(net.qubits));
        }
        let psi = &initial[j - 1];
        if psi.dim() != 4 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                found: psi.dim(),
            });
        }
        let spec = spectrum(&net.compile()?, FallbackPolicy::Oracle)?;
        let pre = evolve_with_spectrum(&spec, psi, j as i64 - 1)?;
        let hit = StateVector::from_amplitudes_unchecked(sigma.mul_vec(pre.amplitudes()));
        kicked = kicked.kron(&evolve_with_spectrum(&spec, &hit, total - (j as i64 - 1))?);
        idle = idle.kron(&evolve_with_spectrum(&spec, psi, total)?);
    }
    let zero = StateVector::basis(2, 0).scale(acyclic[0]);
    let one = StateVector::basis(2, 1).scale(acyclic[1]);
    Ok(zero.kron(&idle).add(&one.kron(&kicked)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix_power_direct;
    use crate::{Matrix, State, C64};
    use std::f64::consts::PI;

    fn lower(g: &Matrix) -> Matrix {
        g.block(1, 3)
    }

    #[test]
    fn table_matches_direct_power() {
        for phi in [0.7, 1.2, 2.0, -1.0] {
            let ex = So3Example::new(phi).unwrap();
            let g = ex.matrix();
            for n in [0u64, 1, 2, 57] {
                let direct = lower(&matrix_power_direct(&g, n));
                let closed = ex.m_power(n as f64);
                assert!(direct.max_abs_diff(&closed) < 1e-9, "phi={phi} n={n}");
            }
        }
    }

    #[test]
    fn printed_table_equals_reduced() {
        for phi in [0.4f64, 1.0, 1.7, 2.5, -0.8, -2.2] {
            let ex = So3Example::new(phi).unwrap();
            let (a, b) = (ex.table(), ex.table_printed());
            for j in 0..3 {
                for k in 0..3 {
                    let (x, y) = (a[j][k], b[j][k]);
                    let d = (x.a - y.a).norm().max((x.b - y.b).norm()).max((x.c - y.c).norm());
                    assert!(d < 1e-11, "phi={phi} m{}{} differs by {d:e}", j + 1, k + 1);
                }
            }
        }
    }

    #[test]
    fn table_corner_entry() {
        let ex = So3Example::new(1.1).unwrap();
        let c = 1.1f64.cos();
        let e = ex.table()[2][2];
        assert!((e.a.re - (1.0 - c) / (c + 3.0)).abs() < 1e-15);
        assert!((e.b.re - 2.0 * (c + 1.0) / (c + 3.0)).abs() < 1e-15);
        assert_eq!(e.c, C64::new(0.0, 0.0));
    }

    #[test]
    fn eigenstates_are_normalized_eigenvectors() {
        let ex = So3Example::<f64>::new(0.9).unwrap();
        let g = ex.matrix();
        for k in 0..4 {
            let psi = ex.eigenstate(k).unwrap();
            assert!((psi.norm() - 1.0).abs() < 1e-12, "k={k}");
            let lam = if k == 3 { C64::new(1.0, 0.0) } else { ex.eigenvalues()[k] };
            let gpsi = g.mul_vec(psi.amplitudes());
            let err = gpsi
                .iter()
                .zip(psi.amplitudes())
                .map(|(a, b)| (a - lam * b).norm())
                .fold(0.0, f64::max);
            assert!(err < 1e-12, "k={k}");
        }
        assert!(ex.eigenstate(4).is_err());
    }

    #[test]
    fn near_singular_phi_rejected() {
        assert!(matches!(So3Example::new(0.0), Err(Error::NearSingular(_))));
        assert!(matches!(So3Example::new(PI), Err(Error::NearSingular(_))));
    }

    #[test]
    fn nu1_inversion() {
        for nu in [0.3, PI / 4.0, 1.01 * PI / 4.0, 2.5, 0.99 * PI] {
            let ex = So3Example::from_nu1(nu).unwrap();
            assert!((ex.nu1() - nu).abs() < 1e-9, "nu={nu}");
        }
    }

    #[test]
    fn evolve_trivial_cases() {
        let ex = So3Example::new(0.8).unwrap();
        let net = ex.network();
        let psi = State::normalized(vec![
            C64::new(0.3, 0.1),
            C64::new(-0.2, 0.5),
            C64::new(0.4, 0.0),
            C64::new(0.1, -0.6),
        ]);
        assert!(evolve(&net, &psi, 0).unwrap().max_abs_diff(&psi) < 1e-12);
        let psi1 = ex.eigenstate(1).unwrap();
        let out = evolve(&net, &psi1, 37).unwrap();
        let expect = psi1.scale(cis(37.0 * ex.nu1()));
        assert!(out.max_abs_diff(&expect) < 1e-10);
        assert!(evolve(&net, &State::basis(8, 0), 1).is_err());
    }

    #[test]
    fn negative_power_is_adjoint() {
        let g = So3Example::new(0.6).unwrap().matrix();
        let inv = matrix_power_spectral(&g, -1, FallbackPolicy::Oracle).unwrap();
        assert!(inv.max_abs_diff(&g.adjoint()) < 1e-12);
        let id = matrix_power_spectral(&g, 0, FallbackPolicy::Oracle).unwrap();
        assert!(id.max_abs_diff(&Matrix::identity(4)) < 1e-12);
    }

    #[test]
    fn unperturbed_when_beta_zero() {
        let ex = So3Example::new(1.3).unwrap();
        let psi = State::normalized(vec![
            C64::new(0.5, 0.0),
            C64::new(0.1, 0.2),
            C64::new(-0.3, 0.0),
            C64::new(0.0, 0.4),
        ]);
        let s = PerturbationScenario::new(
            ex.network(),
            Coupling::cnot(CouplingOrientation::ControlOnAcyclic),
            [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
            3,
            5,
            psi.clone(),
        )
        .unwrap();
        let out = perturb(&s).unwrap();
        let expect = State::basis(2, 0).kron(&evolve(&ex.network(), &psi, 8).unwrap());
        assert!(out.max_abs_diff(&expect) < 1e-10);
    }

    #[test]
    fn scenario_validation() {
        let ex = So3Example::new(1.3).unwrap();
        let bad = PerturbationScenario::new(
            ex.network(),
            Coupling::cnot(CouplingOrientation::ControlOnAcyclic),
            [C64::new(1.0, 0.0), C64::new(1.0, 0.0)],
            0,
            0,
            State::basis(4, 0),
        );
        assert!(matches!(bad, Err(Error::NotNormalized(_))));
    }

    #[test]
    fn series_first_component_constant() {
        let ex = So3Example::new(1.0).unwrap();
        let s = perturbed_amplitude_series(&ex, 0, "|100>", 50).unwrap();
        let (sn, c) = 1.0f64.sin_cos();
        let want = -ex.normalization(0) * sn * (1.0 - c);
        assert!(s.values.iter().all(|v| (v - C64::new(want, 0.0)).norm() < 1e-12));
        assert!(perturbed_amplitude_series(&ex, 0, "011", 5).is_err());
    }

    #[test]
    fn series_background_agrees_at_integers() {
        let ex = So3Example::from_nu1(PI / 4.0).unwrap();
        for k in 0..4 {
            for b in ["101", "110", "111"] {
                let s = perturbed_amplitude_series(&ex, k, b, 40).unwrap();
                for (v, bg) in s.values.iter().zip(&s.background) {
                    assert!((v - bg).norm() < 1e-9, "k={k} b={b}");
                }
            }
        }
    }

    #[test]
    fn sci_format() {
        assert_eq!(format_sci(1.0), "1.000000000000e+00");
        assert_eq!(format_sci(-0.00123), "-1.230000000000e-03");
        assert_eq!(format_sci(0.0), "0.000000000000e+00");
        assert_eq!(format_sci(6.02e123), "6.020000000000e+123");
    }

    #[test]
    fn chain_length_checked() {
        let one = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        assert!(chain_evolve::<f64>(&[], one, &[], 0).is_err());
    }
}
