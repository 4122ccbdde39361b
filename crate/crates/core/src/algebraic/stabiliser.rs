use num_complex::Complex64 as C64;

use super::mpo::{mpo_add, pauli_to_mpo, MatrixProductOperator};
use super::pauli::{conjugate_pauli, Pauli, PauliString};
use crate::circuit::quantum::QuantumCircuit;
use crate::error::Result;

/// `C†ΠC = ½(I − P̃)` with `P̃ = C† Z_out C`, as the sum of two χ = 1 MPOs.
pub fn evolve_projector_stabiliser(circ: &QuantumCircuit) -> Result<MatrixProductOperator> {
    let m = circ.qubits();
    let z = PauliString::single(m, circ.output(), Pauli::Z);
    let p = conjugate_pauli(circ, &z)?;
    let half = C64::new(0.5, 0.0);
    mpo_add(
        &pauli_to_mpo(&PauliString::identity(m)).scaled(half),
        &pauli_to_mpo(&p).scaled(-half),
    )
}
