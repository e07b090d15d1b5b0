//! Small named states and observables used across tests, the CLI and the demo.

use crate::linalg::{c, CMatrix, DensityMatrix, HermitianMatrix};
use crate::skew::ObservableSet;

pub fn pauli_x() -> HermitianMatrix {
    HermitianMatrix::new(CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]))
        .unwrap()
}

pub fn pauli_y() -> HermitianMatrix {
    HermitianMatrix::new(CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]))
        .unwrap()
}

pub fn pauli_z() -> HermitianMatrix {
    HermitianMatrix::diagonal(&[1.0, -1.0])
}

/// The qubit saturation fixture: `ρ = diag(3/4, 1/4)`, `X = (σ_x, σ_y)`.
pub fn q1() -> (DensityMatrix, ObservableSet) {
    let rho = DensityMatrix::from_diagonal(&[0.75, 0.25]).unwrap();
    let x = ObservableSet::new(vec![pauli_x(), pauli_y()]).unwrap();
    (rho, x)
}
