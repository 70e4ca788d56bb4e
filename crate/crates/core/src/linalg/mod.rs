//! Dense complex linear algebra sized for a handful of qubits.

mod eigen;
mod matrix;
mod state;

pub use eigen::{dense_eigendecomposition, Spectrum};
pub use matrix::{matrix_power_direct, CMatrix, UNITARY_TOL};
pub use state::{StateVector, NORM_TOL};

use crate::error::Result;
use crate::scalar::Real;

/// `U v`, failing on a dimension mismatch.
pub fn apply<T: Real>(u: &CMatrix<T>, v: &StateVector<T>) -> Result<StateVector<T>> {
    u.apply(v)
}
