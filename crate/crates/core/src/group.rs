//! Group classification and constructive decompositions.
//!
//! Two-qubit networks built only from controlled-U(2) gates never touch
//! `|00>`; their per-cycle operator is `1 ⊕ M` with `M ∈ U(3)` acting on
//! `|01>, |10>, |11>`. Anything containing single-qubit gates falls back to
//! the full `U(4)`.

use std::fmt;

use num_complex::Complex;
use num_traits::One;

use crate::error::{Error, Result};
use crate::gates::{make_upr, CyclicNetwork, GateSpec, U2Params};
use crate::linalg::CMatrix;
use crate::scalar::Real;

/// Tolerance for all membership predicates.
pub const MEMBERSHIP_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupClass {
    SO2,
    SU2,
    U2,
    SO3,
    SU3,
    U3,
    U4,
}

impl fmt::Display for GroupClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::SO2 => "SO2",
            Self::SU2 => "SU2",
            Self::U2 => "U2",
            Self::SO3 => "SO3",
            Self::SU3 => "SU3",
            Self::U3 => "U3",
            Self::U4 => "U4",
        };
        f.write_str(s)
    }
}

/// Smallest containing class, plus whether a two-qubit block-form operator
/// leaves `|01>` or `|10>` untouched (a single-orientation control network).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Classification {
    pub class: GroupClass,
    pub single_axis: bool,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.single_axis {
            write!(f, "{} (single-axis)", self.class)
        } else {
            write!(f, "{}", self.class)
        }
    }
}

/// Deviation of row 0 and column 0 from `e_1`.
pub fn block_form_residual<T: Real>(g: &CMatrix<T>) -> T {
    let mut worst = (g[(0, 0)] - Complex::one()).norm();
    for k in 1..g.dim() {
        worst = worst.max(g[(0, k)].norm()).max(g[(k, 0)].norm());
    }
    worst
}

pub fn has_block_form<T: Real>(g: &CMatrix<T>) -> bool {
    g.dim() == 4 && block_form_residual(g) <= T::lit(MEMBERSHIP_TOL)
}

/// Lower 3x3 block `M` of a 4x4 operator.
pub fn lower_block<T: Real>(g: &CMatrix<T>) -> CMatrix<T> {
    g.block(1, 3)
}

/// Classifies a compiled operator for a network of `qubits` loops.
pub fn classify_matrix<T: Real>(g: &CMatrix<T>, qubits: usize) -> Result<Classification> {
    let tol = T::lit(MEMBERSHIP_TOL);
    let unit_det = |m: &CMatrix<T>| (m.det() - Complex::one()).norm() <= tol;
    match qubits {
        1 => {
            let class = if unit_det(g) && g.is_real(tol) {
                GroupClass::SO2
            } else if unit_det(g) {
                GroupClass::SU2
            } else {
                GroupClass::U2
            };
            Ok(Classification {
                class,
                single_axis: false,
            })
        }
        2 => {
            if !has_block_form(g) {
                return Ok(Classification {
                    class: GroupClass::U4,
                    single_axis: false,
                });
            }
            let m = lower_block(g);
            let class = if unit_det(&m) && m.is_real(tol) {
                GroupClass::SO3
            } else if unit_det(&m) {
                GroupClass::SU3
            } else {
                GroupClass::U3
            };
            let fixes = |k: usize| {
                (m[(k, k)] - Complex::one()).norm() <= tol
                    && (0..3).filter(|&j| j != k).all(|j| {
                        m[(k, j)].norm() <= tol && m[(j, k)].norm() <= tol
                    })
            };
            Ok(Classification {
                class,
                single_axis: fixes(0) || fixes(1),
            })
        }
        q => Err(Error::UnsupportedQubits(q)),
    }
}

pub fn classify<T: Real>(net: &CyclicNetwork<T>) -> Result<Classification> {
    if net.qubits > 2 {
        return Err(Error::UnsupportedQubits(net.qubits));
    }
    classify_matrix(&net.compile()?, net.qubits)
}

/// Angle pair of one `U_{p,r}(phi, beta)` factor.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct FactorAngles<T> {
    pub phi: T,
    pub beta: T,
}

/// Row operation by `U_{p,r}(phi, beta)` on `x`, 0-based rows.
fn apply_factor_rows<T: Real>(x: &mut CMatrix<T>, p: usize, r: usize, a: FactorAngles<T>) {
    let u = U2Params::new(T::zero(), a.phi, a.beta, T::zero()).block();
    for j in 0..x.dim() {
        let (xp, xr) = (x[(p, j)], x[(r, j)]);
        x[(p, j)] = u[0][0] * xp + u[0][1] * xr;
        x[(r, j)] = u[1][0] * xp + u[1][1] * xr;
    }
}

/// Angles of the `U_{p,r}` row rotation that zeroes `x[r][col]` against
/// `x[p][col]`.
fn eliminating_angles<T: Real>(xp: Complex<T>, xr: Complex<T>) -> FactorAngles<T> {
    let (a, b) = (xp.norm(), xr.norm());
    if b <= T::lit(1e-15) * (a + b).max(T::one()) {
        return FactorAngles::default();
    }
    let theta_p = if a > T::zero() { xp.arg() } else { T::zero() };
    FactorAngles {
        phi: b.atan2(a),
        beta: theta_p - xr.arg(),
    }
}

/// Successive elimination: finds the factors so that
/// `F_last ... F_first U† = D†` for the listed `(p, r, col)` steps and
/// returns their angles together with the residual diagonal phases of `D`.
fn eliminate<T: Real>(
    u: &CMatrix<T>,
    steps: &[(usize, usize, usize)],
) -> (Vec<FactorAngles<T>>, Vec<T>) {
    let mut x = u.adjoint();
    let mut angles = Vec::with_capacity(steps.len());
    for &(p, r, col) in steps {
        let a = eliminating_angles(x[(p, col)], x[(r, col)]);
        apply_factor_rows(&mut x, p, r, a);
        angles.push(a);
    }
    let gammas = (0..u.dim()).map(|i| -x[(i, i)].arg()).collect();
    (angles, gammas)
}

/// Parameters of `D(1, g1, g2, g3) U_{3,4}(phi1, beta1) U_{2,3}(phi2, beta2) U_{2,4}(phi3, beta3)`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct U3Params<T> {
    pub u34: FactorAngles<T>,
    pub u23: FactorAngles<T>,
    pub u24: FactorAngles<T>,
    pub gammas: [T; 3],
}

impl<T: Real> U3Params<T> {
    /// Forward product, embedded as `1 ⊕ M`.
    pub fn build(&self) -> CMatrix<T> {
        let z = T::zero();
        let d = CMatrix::diagonal_phases(&[z, self.gammas[0], self.gammas[1], self.gammas[2]]);
        let f = |p, r, a: FactorAngles<T>| make_upr(p, r, a.phi, a.beta, z, z).expect("valid pair");
        d.matmul(&f(3, 4, self.u34))
            .matmul(&f(2, 3, self.u23))
            .matmul(&f(2, 4, self.u24))
    }

    /// Recovers the parameters of a block-form operator.
    pub fn extract(g: &CMatrix<T>) -> Result<Self> {
        check_block_form(g)?;
        // U24 zeroes (4,2), U23 zeroes (3,2), U34 zeroes (4,3); 0-based below.
        let (a, gammas) = eliminate(g, &[(1, 3, 1), (1, 2, 1), (2, 3, 2)]);
        Ok(Self {
            u24: a[0],
            u23: a[1],
            u34: a[2],
            gammas: [gammas[1], gammas[2], gammas[3]],
        })
    }

    /// The four alternating control gates reproducing [`Self::build`],
    /// listed in the order the qubits meet them.
    pub fn gate_sequence(&self) -> Vec<GateSpec<T>> {
        let z = T::zero();
        let h = T::FRAC_PI_2();
        let [g1, g2, g3] = self.gammas;
        let b3 = self.u24.beta;
        // Written product: U34(phi1,beta1,g2,g3) U24(-pi/2,0,g1,0)
        //                  U34(phi2,-beta2,0,0) U24(phi3+pi/2,beta3,-beta3,beta3)
        vec![
            GateSpec::UprFactor {
                p: 2,
                r: 4,
                phi: self.u24.phi + h,
                beta: b3,
                gamma1: -b3,
                gamma2: b3,
            },
            GateSpec::UprFactor {
                p: 3,
                r: 4,
                phi: self.u23.phi,
                beta: -self.u23.beta,
                gamma1: z,
                gamma2: z,
            },
            GateSpec::UprFactor {
                p: 2,
                r: 4,
                phi: -h,
                beta: z,
                gamma1: g1,
                gamma2: z,
            },
            GateSpec::UprFactor {
                p: 3,
                r: 4,
                phi: self.u34.phi,
                beta: self.u34.beta,
                gamma1: g2,
                gamma2: g3,
            },
        ]
    }
}

fn check_block_form<T: Real>(g: &CMatrix<T>) -> Result<()> {
    if g.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: g.dim(),
        });
    }
    let residual = block_form_residual(g);
    if residual > T::lit(MEMBERSHIP_TOL) {
        return Err(Error::NotBlockForm {
            residual: residual.to_f64().unwrap_or(f64::INFINITY),
        });
    }
    Ok(())
}

/// Four alternating extended control gates compiling to `g`.
pub fn decompose_u3<T: Real>(g: &CMatrix<T>) -> Result<Vec<GateSpec<T>>> {
    Ok(U3Params::extract(g)?.gate_sequence())
}

/// Which control gate opens a three-gate SO(3) product.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Leading {
    /// `G_up(phi1) G_dn(phi2) G_up(phi3)`.
    Up,
    /// `G_dn(phi1) G_up(phi2) G_dn(phi3)`.
    Down,
}

/// Network whose cycle is `G_up(phi1) G_dn(phi2) G_up(phi3)` (or the
/// down-leading variant). The gate met first is `phi3`.
pub fn synthesize_so3<T: Real>(phi1: T, phi2: T, phi3: T, leading: Leading) -> CyclicNetwork<T> {
    let rot = U2Params::rotation;
    let (outer, inner): (fn(U2Params<T>) -> GateSpec<T>, fn(U2Params<T>) -> GateSpec<T>) =
        match leading {
            Leading::Up => (GateSpec::control_up, GateSpec::control_down),
            Leading::Down => (GateSpec::control_down, GateSpec::control_up),
        };
    CyclicNetwork::new(2, vec![outer(rot(phi3)), inner(rot(phi2)), outer(rot(phi1))])
}

/// Euler-like angles of a real orthogonal `M` (3x3, basis `|01>,|10>,|11>`).
///
/// With `Leading::Up`, `M = R_y(phi1) R_x(phi2) R_y(phi3)` where `R_x` is
/// the `G_dn` rotation in the `|10>,|11>` plane and `R_y` the `G_up`
/// rotation in the `|01>,|11>` plane. `phi2 ∈ [0, pi]`; when it is 0 or pi
/// the third angle is set to 0.
pub fn extract_so3_angles<T: Real>(m: &CMatrix<T>, leading: Leading) -> Result<(T, T, T)> {
    if m.dim() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: m.dim(),
        });
    }
    let tol = T::lit(MEMBERSHIP_TOL);
    let orth = m.transpose().matmul(m).max_abs_diff(&CMatrix::identity(3));
    let imag = m.as_slice().iter().map(|z| z.im.abs()).fold(T::zero(), T::max);
    let det = (m.det() - Complex::one()).norm();
    let residual = orth.max(imag).max(det);
    if residual > tol {
        return Err(Error::NotSpecialOrthogonal {
            residual: residual.to_f64().unwrap_or(f64::INFINITY),
        });
    }
    // Swapping the x and y axes maps one ordering onto the other.
    let (x, y, z) = match leading {
        Leading::Up => (0, 1, 2),
        Leading::Down => (1, 0, 2),
    };
    let e = |i: usize, j: usize| m[(i, j)].re;
    let sin_mid = e(y, x).hypot(e(y, z));
    let mid = sin_mid.atan2(e(y, y));
    let degenerate = T::lit(1e-12);
    if sin_mid > degenerate {
        let third = (-e(y, x)).atan2(e(y, z));
        let first = (-e(x, y)).atan2(-e(z, y));
        Ok((first, mid, third))
    } else if e(y, y) > T::zero() {
        Ok((e(x, z).atan2(e(x, x)), T::zero(), T::zero()))
    } else {
        Ok(((-e(x, z)).atan2(e(x, x)), T::PI(), T::zero()))
    }
}

/// Parameters of `D(g1..g4) U34 U23 U24 U12 U13 U14`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct U4Params<T> {
    /// `(phi_i, theta_i)` for `U34, U23, U24, U12, U13, U14` in that order.
    pub factors: [FactorAngles<T>; 6],
    pub gammas: [T; 4],
}

/// Factor pairs in written order.
pub const U4_ORDER: [(usize, usize); 6] = [(3, 4), (2, 3), (2, 4), (1, 2), (1, 3), (1, 4)];

impl<T: Real> U4Params<T> {
    pub fn build(&self) -> CMatrix<T> {
        let mut acc = CMatrix::diagonal_phases(&self.gammas);
        for (&(p, r), a) in U4_ORDER.iter().zip(&self.factors) {
            let f = make_upr(p, r, a.phi, a.beta, T::zero(), T::zero()).expect("valid pair");
            acc = acc.matmul(&f);
        }
        acc
    }
}

/// Forward product of six `U_{p,r}` factors and a diagonal.
pub fn build_u4<T: Real>(params: &U4Params<T>) -> CMatrix<T> {
    params.build()
}

/// Inverts [`build_u4`] by Givens-style elimination of the sub-diagonal.
pub fn extract_u4_parameters<T: Real>(u: &CMatrix<T>) -> Result<U4Params<T>> {
    if u.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: u.dim(),
        });
    }
    u.ensure_unitary(T::lit(crate::linalg::UNITARY_TOL))?;
    // Factors act on U† starting from the rightmost one, U14.
    let steps = [(0, 3, 0), (0, 2, 0), (0, 1, 0), (1, 3, 1), (1, 2, 1), (2, 3, 2)];
    let (a, gammas) = eliminate(u, &steps);
    Ok(U4Params {
        factors: [a[5], a[4], a[3], a[2], a[1], a[0]],
        gammas: [gammas[0], gammas[1], gammas[2], gammas[3]],
    })
}

/// Sum of the `delta` phases of a control-only network; `det M = e^{2i sum}`.
pub fn control_phase_sum<T: Real>(net: &CyclicNetwork<T>) -> Option<T> {
    net.gates
        .iter()
        .map(|g| g.control_params().map(|p| p.delta))
        .try_fold(T::zero(), |acc, d| d.map(|d| acc + d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::make_gdn;
    use crate::{Matrix, Network};
    use std::f64::consts::PI;

    fn cd(a: f64, p: f64, b: f64, d: f64) -> GateSpec<f64> {
        GateSpec::control_down(U2Params::new(a, p, b, d))
    }
    fn cu(a: f64, p: f64, b: f64, d: f64) -> GateSpec<f64> {
        GateSpec::control_up(U2Params::new(a, p, b, d))
    }

    #[test]
    fn single_orientation_is_single_axis_so3() {
        let net = Network::new(2, vec![cd(0.0, 0.3, 0.0, 0.0), cd(0.0, 0.5, 0.0, 0.0), cd(0.0, -0.1, 0.0, 0.0)]);
        let c = classify(&net).unwrap();
        assert_eq!(c.class, GroupClass::SO3);
        assert!(c.single_axis);
        assert_eq!(c.to_string(), "SO3 (single-axis)");
    }

    #[test]
    fn alternating_su3_and_u3() {
        let net = Network::new(2, vec![cd(0.4, 1.0, 0.2, 0.0), cu(0.4, 1.0, 0.2, 0.0)]);
        let c = classify(&net).unwrap();
        assert_eq!(c.class, GroupClass::SU3);
        assert!(!c.single_axis);

        let net = Network::new(2, vec![cd(0.4, 1.0, 0.2, 0.3), cu(-0.2, 0.7, 0.9, 0.5)]);
        assert_eq!(classify(&net).unwrap().class, GroupClass::U3);
    }

    #[test]
    fn single_qubit_gate_forces_u4() {
        let net = Network::new(2, vec![cd(0.0, 0.3, 0.0, 0.0), GateSpec::single(2, U2Params::rotation(0.7))]);
        assert_eq!(classify(&net).unwrap().class, GroupClass::U4);
    }

    #[test]
    fn one_qubit_classes() {
        let so = Network::new(1, vec![GateSpec::single(1, U2Params::rotation(0.7))]);
        assert_eq!(classify(&so).unwrap().class, GroupClass::SO2);
        let su = Network::new(1, vec![GateSpec::single(1, U2Params::new(0.2, 0.7, 0.1, 0.0))]);
        assert_eq!(classify(&su).unwrap().class, GroupClass::SU2);
        let u = Network::new(1, vec![GateSpec::single(1, U2Params::new(0.2, 0.7, 0.1, 0.3))]);
        assert_eq!(classify(&u).unwrap().class, GroupClass::U2);
    }

    #[test]
    fn three_qubits_rejected() {
        let net = Network::new(3, vec![]);
        assert_eq!(classify(&net).unwrap_err(), Error::UnsupportedQubits(3));
    }

    #[test]
    fn decompose_identity() {
        let gates = decompose_u3(&Matrix::identity(4)).unwrap();
        assert_eq!(gates.len(), 4);
        let g = Network::new(2, gates.clone()).compile().unwrap();
        assert!(g.max_abs_diff(&Matrix::identity(4)) < 1e-15);
        let p = U3Params::extract(&Matrix::identity(4)).unwrap();
        assert_eq!(p, U3Params::default());
    }

    #[test]
    fn decompose_rejects_non_block() {
        let net = Network::new(2, vec![GateSpec::Not { line: 1 }]);
        let g = net.compile().unwrap();
        assert!(matches!(decompose_u3(&g), Err(Error::NotBlockForm { .. })));
    }

    #[test]
    fn so3_extract_identity_and_coaxial() {
        let (a, b, c) = extract_so3_angles(&Matrix::identity(3), Leading::Up).unwrap();
        assert!(a.abs() < 1e-15 && b.abs() < 1e-15 && c.abs() < 1e-15);

        let m1 = synthesize_so3(0.4, 0.0, 0.9, Leading::Up).compile().unwrap();
        let m2 = synthesize_so3(1.3, 0.0, 0.0, Leading::Up).compile().unwrap();
        assert!(m1.max_abs_diff(&m2) < 1e-14);
    }

    #[test]
    fn so3_gimbal_cases() {
        for leading in [Leading::Up, Leading::Down] {
            for mid in [0.0, PI] {
                let g = synthesize_so3(0.7, mid, -0.2, leading).compile().unwrap();
                let (a, b, c) = extract_so3_angles(&lower_block(&g), leading).unwrap();
                assert_eq!(c, 0.0);
                let back = synthesize_so3(a, b, c, leading).compile().unwrap();
                assert!(back.max_abs_diff(&g) < 1e-12, "{leading:?} {mid}");
            }
        }
    }

    #[test]
    fn so3_rejects_complex() {
        let g = make_gdn(0.3, 0.2, 0.0, 0.0);
        assert!(matches!(
            extract_so3_angles(&lower_block(&g), Leading::Up),
            Err(Error::NotSpecialOrthogonal { .. })
        ));
    }

    #[test]
    fn u4_identity_and_gdn() {
        assert!(build_u4(&U4Params::<f64>::default()).max_abs_diff(&Matrix::identity(4)) < 1e-15);
        let (phi, beta): (f64, f64) = (0.6, 1.1);
        let p = extract_u4_parameters(&make_gdn(0.0, phi, beta, 0.0)).unwrap();
        for (i, f) in p.factors.iter().enumerate().skip(1) {
            assert!(f.phi.abs() < 1e-14, "factor {i} nontrivial: {f:?}");
        }
        assert!((p.factors[0].phi - phi).abs() < 1e-14);
        assert!((p.factors[0].beta - beta).abs() < 1e-14);
        assert!(p.gammas.iter().all(|g| g.abs() < 1e-14));
    }

    #[test]
    fn u4_rejects_non_unitary() {
        let m = Matrix::from_real(4, &[1.0; 16]);
        assert!(matches!(extract_u4_parameters(&m), Err(Error::NotUnitary { .. })));
    }

    #[test]
    fn control_phase_sum_counts_deltas() {
        let net = Network::new(2, vec![cd(0.0, 0.1, 0.0, 0.2), cu(0.0, 0.1, 0.0, -0.5)]);
        assert!((control_phase_sum(&net).unwrap() + 0.3).abs() < 1e-15);
    }
}
