//! Gate constructors and per-cycle compilation.
//!
//! Gate lists are written in the order the qubits meet the gates, so a list
//! `k1, k2, ..., km` compiles to `U_km ... U_k2 U_k1`.

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::scalar::{cis, Real};

/// Parameters of the general `U(2)` element
/// `e^{i delta} [[e^{i alpha} cos phi, e^{i beta} sin phi], [-e^{-i beta} sin phi, e^{-i alpha} cos phi]]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Real"))]
pub struct U2Params<T> {
    pub alpha: T,
    pub phi: T,
    pub beta: T,
    #[serde(default)]
    pub delta: T,
}

impl<T: Real> U2Params<T> {
    pub fn new(alpha: T, phi: T, beta: T, delta: T) -> Self {
        Self {
            alpha,
            phi,
            beta,
            delta,
        }
    }

    /// Real rotation, `alpha = beta = delta = 0`.
    pub fn rotation(phi: T) -> Self {
        Self::new(T::zero(), phi, T::zero(), T::zero())
    }

    /// Pauli `sigma_x` written in this parameterization.
    pub fn pauli_x() -> Self {
        let h = T::FRAC_PI_2();
        Self::new(T::zero(), h, -h, h)
    }

    /// The 2x2 block `[[a, b], [c, d]]`.
    pub fn block(&self) -> [[Complex<T>; 2]; 2] {
        let (s, c) = self.phi.sin_cos();
        [
            [
                cis(self.alpha + self.delta) * c,
                cis(self.beta + self.delta) * s,
            ],
            [
                -cis(self.delta - self.beta) * s,
                cis(self.delta - self.alpha) * c,
            ],
        ]
    }

    pub fn matrix(&self) -> CMatrix<T> {
        let b = self.block();
        CMatrix::from_rows(&[&b[0], &b[1]])
    }

    /// Recovers parameters from a 2x2 unitary block.
    ///
    /// `phi` lands in `[0, pi/2]`; phases whose modulus factor vanishes are
    /// reported as zero.
    pub fn from_block(m: [[Complex<T>; 2]; 2]) -> Self {
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        let snap = T::lit(1e-14);
        let delta = if (det - Complex::one()).norm() < snap {
            T::zero()
        } else {
            det.arg() / T::lit(2.0)
        };
        let unphase = cis(-delta);
        let v00 = m[0][0] * unphase;
        let v01 = m[0][1] * unphase;
        let phi = v01.norm().atan2(v00.norm());
        let alpha = if v00.norm() < snap { T::zero() } else { v00.arg() };
        let beta = if v01.norm() < snap { T::zero() } else { v01.arg() };
        Self::new(alpha, phi, beta, delta)
    }
}

/// One gate of a network. Angles are radians, stored as given.
///
/// Lines are numbered from 1, line 1 being the leftmost bit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
#[serde(bound(deserialize = "T: Real"))]
pub enum GateSpec<T> {
    U2Single {
        line: usize,
        alpha: T,
        phi: T,
        beta: T,
        #[serde(default)]
        delta: T,
    },
    /// Controlled-U(2) acting on `|10>, |11>` (control on the top line).
    ControlDown {
        alpha: T,
        phi: T,
        beta: T,
        #[serde(default)]
        delta: T,
    },
    /// Controlled-U(2) acting on `|01>, |11>` (control on the bottom line).
    ControlUp {
        alpha: T,
        phi: T,
        beta: T,
        #[serde(default)]
        delta: T,
    },
    /// `U_{p,r}(phi, beta, gamma', gamma'')`, 1-based basis indices.
    UprFactor {
        p: usize,
        r: usize,
        phi: T,
        beta: T,
        #[serde(default)]
        gamma1: T,
        #[serde(default)]
        gamma2: T,
    },
    Diagonal {
        gammas: Vec<T>,
    },
    Not {
        line: usize,
    },
    ControlNot {
        control: usize,
        target: usize,
    },
}

impl<T: Real> GateSpec<T> {
    pub fn control_down(p: U2Params<T>) -> Self {
        Self::ControlDown {
            alpha: p.alpha,
            phi: p.phi,
            beta: p.beta,
            delta: p.delta,
        }
    }

    pub fn control_up(p: U2Params<T>) -> Self {
        Self::ControlUp {
            alpha: p.alpha,
            phi: p.phi,
            beta: p.beta,
            delta: p.delta,
        }
    }

    pub fn single(line: usize, p: U2Params<T>) -> Self {
        Self::U2Single {
            line,
            alpha: p.alpha,
            phi: p.phi,
            beta: p.beta,
            delta: p.delta,
        }
    }

    /// Orientation of a control gate, `None` for every other kind.
    pub fn orientation(&self) -> Option<Orientation> {
        match self {
            GateSpec::ControlDown { .. } => Some(Orientation::Down),
            GateSpec::ControlUp { .. } => Some(Orientation::Up),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::U2Single { .. } => "u2_single",
            Self::ControlDown { .. } => "control_down",
            Self::ControlUp { .. } => "control_up",
            Self::UprFactor { .. } => "upr_factor",
            Self::Diagonal { .. } => "diagonal",
            Self::Not { .. } => "not",
            Self::ControlNot { .. } => "control_not",
        }
    }

    /// U(2) parameters of a control gate, `None` otherwise.
    pub fn control_params(&self) -> Option<U2Params<T>> {
        match *self {
            Self::ControlDown {
                alpha,
                phi,
                beta,
                delta,
            }
            | Self::ControlUp {
                alpha,
                phi,
                beta,
                delta,
            } => Some(U2Params::new(alpha, phi, beta, delta)),
            _ => None,
        }
    }

    /// Full `2^qubits` matrix of this gate.
    pub fn matrix(&self, qubits: usize) -> Result<CMatrix<T>> {
        let need_two = |kind| {
            if qubits == 2 {
                Ok(())
            } else {
                Err(Error::GateArity {
                    kind,
                    required: 2,
                    qubits,
                })
            }
        };
        match self {
            Self::U2Single {
                line,
                alpha,
                phi,
                beta,
                delta,
            } => embed_single(
                &make_u2(*alpha, *phi, *beta, *delta),
                *line,
                qubits,
            ),
            Self::ControlDown {
                alpha,
                phi,
                beta,
                delta,
            } => {
                need_two("control_down")?;
                Ok(make_gdn(*alpha, *phi, *beta, *delta))
            }
            Self::ControlUp {
                alpha,
                phi,
                beta,
                delta,
            } => {
                need_two("control_up")?;
                Ok(make_gup(*alpha, *phi, *beta, *delta))
            }
            Self::UprFactor {
                p,
                r,
                phi,
                beta,
                gamma1,
                gamma2,
            } => {
                need_two("upr_factor")?;
                make_upr(*p, *r, *phi, *beta, *gamma1, *gamma2)
            }
            Self::Diagonal { gammas } => {
                let expected = 1usize << qubits;
                if gammas.len() != expected {
                    return Err(Error::DiagonalLength {
                        expected,
                        found: gammas.len(),
                    });
                }
                Ok(CMatrix::diagonal_phases(gammas))
            }
            Self::Not { line } => embed_single(&not_matrix(), *line, qubits),
            Self::ControlNot { control, target } => {
                need_two("control_not")?;
                for &l in [control, target] {
                    if l == 0 || l > qubits {
                        return Err(Error::LineOutOfRange { line: l, qubits });
                    }
                }
                if control == target {
                    return Err(Error::OutOfRange(
                        "control and target lines coincide".into(),
                    ));
                }
                Ok(controlled_not(2, *control, *target))
            }
        }
    }
}

/// A cyclic network: `qubits` loop lines and the gates met per cycle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Real"))]
pub struct CyclicNetwork<T> {
    pub qubits: usize,
    pub gates: Vec<GateSpec<T>>,
}

impl<T: Real> CyclicNetwork<T> {
    pub fn new(qubits: usize, gates: Vec<GateSpec<T>>) -> Self {
        Self { qubits, gates }
    }

    pub fn dim(&self) -> usize {
        1 << self.qubits
    }

    /// Per-cycle unitary.
    pub fn compile(&self) -> Result<CMatrix<T>> {
        compile_cycle(self)
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("network serializes")
    }
}

/// General U(2) element.
pub fn make_u2<T: Real>(alpha: T, phi: T, beta: T, delta: T) -> CMatrix<T> {
    U2Params::new(alpha, phi, beta, delta).matrix()
}

fn place_block<T: Real>(p: usize, r: usize, b: [[Complex<T>; 2]; 2]) -> CMatrix<T> {
    let mut m = CMatrix::identity(4);
    m[(p, p)] = b[0][0];
    m[(p, r)] = b[0][1];
    m[(r, p)] = b[1][0];
    m[(r, r)] = b[1][1];
    m
}

/// Control on the top line; the U(2) block acts on `|10>, |11>`.
pub fn make_gdn<T: Real>(alpha: T, phi: T, beta: T, delta: T) -> CMatrix<T> {
    place_block(2, 3, U2Params::new(alpha, phi, beta, delta).block())
}

/// Control on the bottom line; the U(2) block acts on `|01>, |11>`.
pub fn make_gup<T: Real>(alpha: T, phi: T, beta: T, delta: T) -> CMatrix<T> {
    place_block(1, 3, U2Params::new(alpha, phi, beta, delta).block())
}

/// Pairs `(p, r)` for which `U_{p,r}` is defined.
pub const UPR_PAIRS: [(usize, usize); 6] = [(3, 4), (2, 3), (2, 4), (1, 2), (1, 3), (1, 4)];

/// `U_{p,r}(phi, beta, gamma', gamma'')` on the 4-dimensional space.
///
/// The extended phases left-multiply by `D(1, gamma', 1, gamma'')` for
/// `(2,4)` and by `D(1, 1, gamma', gamma'')` for `(3,4)`; other pairs
/// require both to be zero.
pub fn make_upr<T: Real>(
    p: usize,
    r: usize,
    phi: T,
    beta: T,
    gamma1: T,
    gamma2: T,
) -> Result<CMatrix<T>> {
    if !UPR_PAIRS.contains(&(p, r)) {
        return Err(Error::InvalidPair { p, r });
    }
    let base = place_block(
        p - 1,
        r - 1,
        U2Params::new(T::zero(), phi, beta, T::zero()).block(),
    );
    if gamma1.is_zero() && gamma2.is_zero() {
        return Ok(base);
    }
    let z = T::zero();
    let phases = match (p, r) {
        (2, 4) => [z, gamma1, z, gamma2],
        (3, 4) => [z, z, gamma1, gamma2],
        _ => return Err(Error::UnsupportedExtension { p, r }),
    };
    Ok(CMatrix::diagonal_phases(&phases).matmul(&base))
}

fn not_matrix<T: Real>() -> CMatrix<T> {
    CMatrix::from_real(2, &[T::zero(), T::one(), T::one(), T::zero()])
}

/// Embeds a single-qubit operator on `line` (1-based, leftmost first).
pub fn embed_single<T: Real>(u: &CMatrix<T>, line: usize, qubits: usize) -> Result<CMatrix<T>> {
    if line == 0 || line > qubits {
        return Err(Error::LineOutOfRange { line, qubits });
    }
    let mut out = CMatrix::identity(1);
    for l in 1..=qubits {
        let factor = if l == line {
            u.clone()
        } else {
            CMatrix::identity(2)
        };
        out = out.kron(&factor);
    }
    Ok(out)
}

/// Controlled-NOT over `qubits` lines (1-based, leftmost first). Lines must
/// be valid and distinct.
pub fn controlled_not<T: Real>(qubits: usize, control: usize, target: usize) -> CMatrix<T> {
    controlled_u(qubits, control, target, &not_matrix())
}

/// Controlled single-qubit operator over `qubits` lines.
pub fn controlled_u<T: Real>(
    qubits: usize,
    control: usize,
    target: usize,
    u: &CMatrix<T>,
) -> CMatrix<T> {
    let dim = 1usize << qubits;
    let cmask = 1usize << (qubits - control);
    let tmask = 1usize << (qubits - target);
    let mut m = CMatrix::zeros(dim);
    for col in 0..dim {
        if col & cmask == 0 {
            m[(col, col)] = Complex::one();
            continue;
        }
        let tb = usize::from(col & tmask != 0);
        for ob in 0..2 {
            let row = if ob == 1 { col | tmask } else { col & !tmask };
            m[(row, col)] = u[(ob, tb)];
        }
    }
    m
}

/// Compiles one cycle: gates `k1..km` give `U_km ... U_k1`.
pub fn compile_cycle<T: Real>(net: &CyclicNetwork<T>) -> Result<CMatrix<T>> {
    if net.qubits == 0 || net.qubits > 10 {
        return Err(Error::UnsupportedQubits(net.qubits));
    }
    let mut acc = CMatrix::identity(net.dim());
    for g in &net.gates {
        acc = g.matrix(net.qubits)?.matmul(&acc);
    }
    Ok(acc)
}

/// Orientation of a controlled-U(2) gate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    Down,
    Up,
}

/// Replaces a run of same-orientation control gates by one gate whose
/// U(2) block is the product of the input blocks in compile order.
pub fn compress_same_orientation<T: Real>(gates: &[GateSpec<T>]) -> Result<GateSpec<T>> {
    let mut orientation = None;
    let mut acc = [[Complex::one(), Complex::zero()], [Complex::zero(), Complex::one()]];
    for g in gates {
        let o = match g {
            GateSpec::ControlDown { .. } => Orientation::Down,
            GateSpec::ControlUp { .. } => Orientation::Up,
            other => return Err(Error::NotControlGate { kind: other.name() }),
        };
        if *orientation.get_or_insert(o) != o {
            return Err(Error::MixedOrientation);
        }
        let b = g.control_params().expect("control gate").block();
        acc = mul2(&b, &acc);
    }
    if gates.len() == 1 {
        return Ok(gates[0].clone());
    }
    let p = U2Params::from_block(acc);
    Ok(match orientation {
        Some(Orientation::Up) => GateSpec::control_up(p),
        _ => GateSpec::control_down(p),
    })
}

/// Compresses every maximal run of same-orientation control gates; other
/// gates pass through unchanged. The compiled cycle is preserved.
pub fn compress_runs<T: Real>(gates: &[GateSpec<T>]) -> Vec<GateSpec<T>> {
    let mut out = Vec::with_capacity(gates.len());
    let mut start = 0;
    while start < gates.len() {
        let o = gates[start].orientation();
        let mut end = start + 1;
        if o.is_some() {
            while end < gates.len() && gates[end].orientation() == o {
                end += 1;
            }
            out.push(compress_same_orientation(&gates[start..end]).expect("uniform control run"));
        } else {
            out.push(gates[start].clone());
        }
        start = end;
    }
    out
}

fn mul2<T: Real>(a: &[[Complex<T>; 2]; 2], b: &[[Complex<T>; 2]; 2]) -> [[Complex<T>; 2]; 2] {
    let mut out = [[Complex::zero(); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}
