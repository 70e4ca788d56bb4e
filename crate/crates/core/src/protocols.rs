//! Memory, sensor and phase-estimation protocols on cyclic networks.

use std::cell::Cell;

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::dynamics::{evolve_with_spectrum, perturb, Coupling, CouplingOrientation, PerturbationScenario};
use crate::error::{Error, Result};
use crate::gates::CyclicNetwork;
use crate::linalg::{CMatrix, StateVector};
use crate::scalar::{cis, Real};
use crate::spectral::{spectrum, FallbackPolicy};

/// Largest register accepted by [`phase_estimation_demo`].
pub const MAX_PHASE_BITS: usize = 8;
pub const SENSOR_THRESHOLD: f64 = 0.5;

/// Counts matrix-vector applications.
#[derive(Debug, Default)]
pub struct ApplyCounter {
    count: Cell<usize>,
}

impl ApplyCounter {
    pub fn apply<T: Real>(&self, m: &CMatrix<T>, v: &StateVector<T>) -> StateVector<T> {
        self.count.set(self.count.get() + 1);
        StateVector::from_amplitudes_unchecked(m.mul_vec(v.amplitudes()))
    }

    pub fn count(&self) -> usize {
        self.count.get()
    }
}

/// A state loaded into a cyclic network at cycle `stored_at_cycle`.
#[derive(Clone)]
pub struct MemoryRecord<T> {
    pub net: CyclicNetwork<T>,
    pub stored: StateVector<T>,
    pub stored_at_cycle: u64,
    /// Undo operator `G' = (G^dagger)^n` for the latest retrieval; the
    /// identity until [`memory_retrieve`] runs.
    pub inverse_op: CMatrix<T>,
    pub policy: FallbackPolicy,
}

pub fn memory_store<T: Real>(net: &CyclicNetwork<T>, psi: &StateVector<T>) -> Result<MemoryRecord<T>> {
    memory_store_with(net, psi, FallbackPolicy::Oracle)
}

pub fn memory_store_with<T: Real>(
    net: &CyclicNetwork<T>,
    psi: &StateVector<T>,
    policy: FallbackPolicy,
) -> Result<MemoryRecord<T>> {
    let d = net.dim();
    if psi.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: psi.dim(),
        });
    }
    // Fail early if the spectrum is unavailable under this policy.
    spectrum(&net.compile()?, policy)?;
    Ok(MemoryRecord {
        net: net.clone(),
        stored: psi.clone(),
        stored_at_cycle: 0,
        inverse_op: CMatrix::identity(d),
        policy,
    })
}

#[derive(Clone, Debug)]
pub struct Retrieval<T> {
    pub state: StateVector<T>,
    /// Fidelity `|<stored|retrieved>|`.
    pub fidelity: T,
    /// Matrix applications spent undoing the `n` cycles.
    pub undo_applications: usize,
}

/// Reads the state back after the network has run `n` cycles, by applying
/// the single operator `G' = (G^dagger)^n` to `G^n psi`.
pub fn memory_retrieve<T: Real>(rec: &mut MemoryRecord<T>, n: u64) -> Result<Retrieval<T>> {
    let g = rec.net.compile()?;
    let spec = spectrum(&g, rec.policy)?;
    let n = i64::try_from(n).map_err(|_| Error::OutOfRange("cycle count".into()))?;
    let held = evolve_with_spectrum(&spec, &rec.stored, n)?;
    rec.inverse_op = spec.power(-n);
    rec.stored_at_cycle = n as u64;
    let counter = ApplyCounter::default();
    let state = counter.apply(&rec.inverse_op, &held);
    Ok(Retrieval {
        fidelity: rec.stored.fidelity(&state),
        state,
        undo_applications: counter.count(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SensorReading<T> {
    /// Probability that the cyclic pair is found in `|00>`.
    pub p_psi3: T,
    pub detected: bool,
}

/// Sensor with the acyclic qubit in `alpha|0> + beta|1>`: the cyclic pair
/// starts in `|00>`, the acyclic qubit controls a NOT on the bottom line,
/// then the network runs `n'` cycles. For basis inputs `p_psi3` is exactly
/// 0 or 1; in general it equals `|alpha|^2`.
pub fn sensor_run_superposed<T: Real>(
    net: &CyclicNetwork<T>,
    acyclic: [Complex<T>; 2],
    n_prime: u64,
) -> Result<SensorReading<T>> {
    let s = PerturbationScenario::new(
        net.clone(),
        Coupling::cnot(CouplingOrientation::ControlOnAcyclic),
        acyclic,
        0,
        n_prime,
        StateVector::basis(4, 0),
    )?;
    let out = perturb(&s)?;
    let p = out[0].norm_sqr() + out[4].norm_sqr();
    Ok(SensorReading {
        p_psi3: p,
        detected: p < T::lit(SENSOR_THRESHOLD),
    })
}

pub fn sensor_run<T: Real>(net: &CyclicNetwork<T>, acyclic_bit: u8, n_prime: u64) -> Result<SensorReading<T>> {
    let amps = match acyclic_bit {
        0 => [Complex::one(), Complex::zero()],
        1 => [Complex::zero(), Complex::one()],
        b => return Err(Error::OutOfRange(format!("acyclic bit {b}"))),
    };
    sensor_run_superposed(net, amps, n_prime)
}

/// Outcome of the phase-estimation demo.
#[derive(Clone, Debug)]
pub struct PhaseEstimate<T> {
    /// Eigenphase of the chosen eigenstate divided by `2 pi`, in `[0, 1)`.
    pub phase: T,
    /// Control register after the controlled powers, qubit `t-1` leftmost.
    pub kickback_state: StateVector<T>,
    /// Largest deviation from the ideal product state.
    pub kickback_residual: T,
    /// Outcome probabilities after the inverse Fourier transform.
    pub distribution: Vec<T>,
    pub outcome: usize,
    /// `outcome / 2^t`.
    pub estimate: T,
    pub probability: T,
}

/// Product state `⊗_j (|0> + e^{2 pi i 2^j phase}|1>)/sqrt 2`, largest `j`
/// leftmost.
pub fn ideal_kickback<T: Real>(phase: T, t: usize) -> StateVector<T> {
    let n = 1usize << t;
    let scale = T::one() / T::lit(n as f64).sqrt();
    let two_pi = T::lit(2.0) * T::PI();
    let amps = (0..n)
        .map(|x| {
            let frac = (T::lit(x as f64) * phase).fract();
            cis(two_pi * frac) * scale
        })
        .collect();
    StateVector::from_amplitudes_unchecked(amps)
}

fn apply_h<T: Real>(v: &mut [Complex<T>], bit: usize) {
    let r = T::FRAC_1_SQRT_2();
    let mask = 1usize << bit;
    for i in 0..v.len() {
        if i & mask == 0 {
            let (a, b) = (v[i], v[i | mask]);
            v[i] = (a + b) * r;
            v[i | mask] = (a - b) * r;
        }
    }
}

fn apply_cphase<T: Real>(v: &mut [Complex<T>], a: usize, b: usize, theta: T) {
    let mask = (1usize << a) | (1usize << b);
    let ph = cis(theta);
    for (i, x) in v.iter_mut().enumerate() {
        if i & mask == mask {
            *x = *x * ph;
        }
    }
}

fn apply_swap<T>(v: &mut [Complex<T>], a: usize, b: usize) {
    let (ma, mb) = (1usize << a, 1usize << b);
    for i in 0..v.len() {
        if i & ma != 0 && i & mb == 0 {
            v.swap(i, (i & !ma) | mb);
        }
    }
}

/// Inverse quantum Fourier transform on `t` qubits built from Hadamards,
/// controlled phases and swaps. Maps `ideal_kickback(k / 2^t)` to `|k>`.
pub fn inverse_qft<T: Real>(v: &mut [Complex<T>], t: usize) {
    assert_eq!(v.len(), 1usize << t);
    for q in 0..t / 2 {
        apply_swap(v, q, t - 1 - q);
    }
    // Qubit i (1-based, leftmost first) lives at bit t - i.
    let two_pi = T::lit(2.0) * T::PI();
    for i in (1..=t).rev() {
        for k in (2..=t - i + 1).rev() {
            let theta = -two_pi / T::lit((1u64 << k) as f64);
            apply_cphase(v, t - i, t - (i + k - 1), theta);
        }
        apply_h(v, t - i);
    }
}

/// Phase estimation of eigenstate `state` of `g` with a `t`-qubit register.
///
/// Simulates the full register: Hadamards on the controls, then
/// controlled `G^{2^j}` from control qubit `j`, each power taken from the
/// spectral decomposition. The register is then read out with
/// [`inverse_qft`].
pub fn phase_estimation_with_state<T: Real>(
    g: &CMatrix<T>,
    state: &StateVector<T>,
    t: usize,
    policy: FallbackPolicy,
) -> Result<PhaseEstimate<T>> {
    if t == 0 || t > MAX_PHASE_BITS {
        return Err(Error::OutOfRange(format!("t = {t} not in 1..={MAX_PHASE_BITS}")));
    }
    let d = g.dim();
    if state.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: state.dim(),
        });
    }
    let spec = spectrum(g, policy)?;
    let gu = g.mul_vec(state.amplitudes());
    let lam = state
        .amplitudes()
        .iter()
        .zip(&gu)
        .fold(Complex::zero(), |acc: Complex<T>, (a, b)| acc + a.conj() * b);
    let eig_resid = gu
        .iter()
        .zip(state.amplitudes())
        .map(|(&a, &b)| (a - lam * b).norm())
        .fold(T::zero(), T::max);
    if eig_resid > T::lit(1e-9) {
        return Err(Error::OutOfRange(format!(
            "state is not an eigenvector (residual {:.3e})",
            eig_resid.to_f64().unwrap_or(f64::NAN)
        )));
    }
    let two_pi = T::lit(2.0) * T::PI();
    let mut phase = lam.arg() / two_pi;
    if phase < T::zero() {
        phase = phase + T::one();
    }
    if phase >= T::one() {
        phase = phase - T::one();
    }

    let n = 1usize << t;
    let mut full = vec![Complex::zero(); n * d];
    let h = T::one() / T::lit(n as f64).sqrt();
    for x in 0..n {
        for (i, &a) in state.amplitudes().iter().enumerate() {
            full[x * d + i] = a * h;
        }
    }
    for j in 0..t {
        let p = spec.power(1i64 << j);
        for x in (0..n).filter(|x| x & (1 << j) != 0) {
            let block = &full[x * d..(x + 1) * d];
            let next = p.mul_vec(block);
            full[x * d..(x + 1) * d].copy_from_slice(&next);
        }
    }
    let mut kick = vec![Complex::zero(); n];
    for (x, slot) in kick.iter_mut().enumerate() {
        *slot = state
            .amplitudes()
            .iter()
            .enumerate()
            .fold(Complex::zero(), |acc, (i, a)| acc + a.conj() * full[x * d + i]);
    }
    let kickback_state = StateVector::from_amplitudes_unchecked(kick.clone());
    let kickback_residual = kickback_state.max_abs_diff(&ideal_kickback(phase, t));

    inverse_qft(&mut kick, t);
    let distribution: Vec<T> = kick.iter().map(|z| z.norm_sqr()).collect();
    let (outcome, &probability) = distribution
        .iter()
        .enumerate()
        .fold((0, &T::neg_infinity()), |best, cur| if *cur.1 > *best.1 { cur } else { best });
    Ok(PhaseEstimate {
        phase,
        kickback_state,
        kickback_residual,
        estimate: T::lit(outcome as f64) / T::lit(n as f64),
        distribution,
        outcome,
        probability,
    })
}

/// Phase estimation on eigenvector `u` of the compiled cycle, with
/// eigenvectors indexed in ascending eigenphase order.
pub fn phase_estimation_demo<T: Real>(
    net: &CyclicNetwork<T>,
    u: usize,
    t: usize,
) -> Result<PhaseEstimate<T>> {
    let g = net.compile()?;
    let spec = spectrum(&g, FallbackPolicy::Oracle)?;
    let state = spec
        .eigenvectors
        .get(u)
        .ok_or(Error::IndexOutOfRange {
            index: u,
            len: spec.dim(),
        })?
        .clone();
    phase_estimation_with_state(&g, &state, t, FallbackPolicy::Oracle)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::So3Example;
    use crate::gates::{GateSpec, U2Params};
    use crate::{State, C64};
    use std::f64::consts::PI;

    fn phase_net(phase: f64) -> CyclicNetwork<f64> {
        CyclicNetwork::new(
            2,
            vec![GateSpec::control_down(U2Params::new(2.0 * PI * phase, 0.0, 0.0, 0.0))],
        )
    }

    #[test]
    fn inverse_qft_matches_dft() {
        let t = 3;
        let n = 8;
        let mut v: Vec<C64> = (0..n).map(|i| C64::new(i as f64 * 0.1, 0.3 - i as f64 * 0.05)).collect();
        let orig = v.clone();
        inverse_qft(&mut v, t);
        for (k, got) in v.iter().enumerate() {
            let want = orig
                .iter()
                .enumerate()
                .fold(C64::new(0.0, 0.0), |acc, (x, a)| {
                    acc + a * cis(-2.0 * PI * (k * x) as f64 / n as f64)
                })
                / (n as f64).sqrt();
            assert!((got - want).norm() < 1e-12, "k={k}");
        }
    }

    #[test]
    fn memory_zero_cycles_exact() {
        let net = So3Example::new(0.7).unwrap().network();
        let psi = State::normalized(vec![C64::new(0.2, 0.1), C64::new(0.0, 0.7), C64::new(0.3, 0.0), C64::new(-0.5, 0.2)]);
        let mut rec = memory_store(&net, &psi).unwrap();
        let r = memory_retrieve(&mut rec, 0).unwrap();
        assert!(r.state.max_abs_diff(&psi) < 1e-12);
        let r = memory_retrieve(&mut rec, 12345).unwrap();
        assert!(r.fidelity > 1.0 - 1e-9);
        assert_eq!(r.undo_applications, 1);
    }

    #[test]
    fn sensor_basis_inputs() {
        let net = So3Example::<f64>::new(1.1).unwrap().network();
        let r0 = sensor_run(&net, 0, 100).unwrap();
        assert!((r0.p_psi3 - 1.0).abs() < 1e-12 && !r0.detected);
        let r1 = sensor_run(&net, 1, 0).unwrap();
        assert!(r1.p_psi3 < 1e-12 && r1.detected);
        assert!(sensor_run(&net, 2, 0).is_err());
    }

    #[test]
    fn sensor_superposed_partial() {
        let net = So3Example::<f64>::new(1.1).unwrap().network();
        let a = (0.3f64).sqrt();
        let b = (0.7f64).sqrt();
        let r = sensor_run_superposed(&net, [C64::new(a, 0.0), C64::new(0.0, b)], 17).unwrap();
        assert!((r.p_psi3 - 0.3).abs() < 1e-10);
    }

    #[test]
    fn phase_estimation_eighth() {
        let net = phase_net(0.125);
        let g = net.compile().unwrap();
        let r = phase_estimation_with_state(&g, &State::basis(4, 2), 3, FallbackPolicy::Oracle).unwrap();
        assert_eq!(r.outcome, 1);
        assert!((r.estimate - 0.125).abs() < 1e-15);
        assert!(r.probability > 1.0 - 1e-9);
        assert!(r.kickback_residual < 1e-9);
    }

    #[test]
    fn phase_estimation_zero_phase() {
        let net = phase_net(0.0);
        let r = phase_estimation_demo(&net, 0, 4).unwrap();
        assert_eq!(r.outcome, 0);
        let plus = ideal_kickback(0.0, 4);
        assert!(r.kickback_state.max_abs_diff(&plus) < 1e-12);
    }

    #[test]
    fn phase_estimation_range() {
        let net = phase_net(0.25);
        assert!(phase_estimation_demo(&net, 0, 0).is_err());
        assert!(phase_estimation_demo(&net, 0, 9).is_err());
        assert!(phase_estimation_demo(&net, 7, 3).is_err());
    }
}
