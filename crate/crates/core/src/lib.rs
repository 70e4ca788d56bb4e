//! Cyclic networks of quantum gates.
//!
//! A cyclic network is a gate arrangement whose qubit lines are closed
//! loops: every cycle the qubits pass through the same gates, so the state
//! after `n` cycles is `G^n psi` for the per-cycle unitary `G`. This crate
//! builds those per-cycle unitaries from gate lists, classifies them into the
//! `SO(2) ⊂ SU(2) ⊂ U(2)` and `SO(3) ⊂ SU(3) ⊂ U(3) ⊂ U(4)` chains, solves
//! their spectra in closed form, and simulates perturbation by acyclic
//! qubits together with the memory, sensor and phase-estimation protocols
//! built on top of them.
//!
//! Everything is generic over [`Real`]; the `f64` aliases below are what the
//! CLI and the tolerances are calibrated for.

pub mod dynamics;
pub mod error;
pub mod gates;
pub mod group;
pub mod linalg;
pub mod protocols;
pub mod scalar;
pub mod spectral;

pub use error::{Error, Result};
pub use scalar::Real;

/// Double-precision complex scalar.
pub type C64 = num_complex::Complex<f64>;
pub type Matrix = linalg::CMatrix<f64>;
pub type State = linalg::StateVector<f64>;
pub type Spectrum = linalg::Spectrum<f64>;
pub type Gate = gates::GateSpec<f64>;
pub type Network = gates::CyclicNetwork<f64>;
pub type U2 = gates::U2Params<f64>;
