use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::mpo::{mpo_add, mpo_multiply, pauli_to_mpo, MatrixProductOperator};
use super::pauli::{Pauli, PauliString};
use crate::circuit::quantum::{QuantumCircuit, QuantumGate};
use crate::error::{Error, Result};

/// Tolerance of the orthogonality check on rotations.
pub const ORTHOGONALITY_TOLERANCE: f64 = 1e-10;

/// Real orthogonal `2m × 2m` matrix `R̃` with `C† c_μ C = Σ_ν R̃_{μν} c_ν`.
#[derive(Clone, Debug, PartialEq)]
pub struct RotationMatrix {
    modes: usize,
    matrix: DMatrix<f64>,
}

impl RotationMatrix {
    pub fn identity(modes: usize) -> Self {
        RotationMatrix {
            modes,
            matrix: DMatrix::identity(2 * modes, 2 * modes),
        }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// `max |R̃ᵀR̃ − I|`.
    pub fn orthogonality_defect(&self) -> f64 {
        let d = self.matrix.transpose() * &self.matrix - DMatrix::identity(2 * self.modes, 2 * self.modes);
        d.abs().max()
    }
}

/// `R̃ = R_M ⋯ R_1`, each `R_k = exp(2h_k)` embedded at its gate's modes.
pub fn gaussian_rotation(circ: &QuantumCircuit) -> Result<RotationMatrix> {
    let m = circ.qubits();
    let mut r = RotationMatrix::identity(m);
    for g in circ.gates() {
        let QuantumGate::Gaussian(gg) = g else {
            return Err(Error::inapplicable("gaussian", format!("gate {} is not Gaussian", g.label())));
        };
        let local = gg.rotation();
        let off = 2 * gg.first_mode();
        let d = local.nrows();
        let mut full = DMatrix::<f64>::identity(2 * m, 2 * m);
        full.view_mut((off, off), (d, d)).copy_from(&local);
        r.matrix = full * r.matrix;
    }
    if r.orthogonality_defect() > ORTHOGONALITY_TOLERANCE {
        return Err(Error::InvalidCircuit("Gaussian rotation lost orthogonality".into()));
    }
    Ok(r)
}

/// Jordan–Wigner string of `c_μ` (0-based): `Z…Z X_j` or `Z…Z Y_j` with
/// `j = μ/2`.
pub fn majorana_string(modes: usize, mu: usize) -> PauliString {
    let j = mu / 2;
    let letters = (0..modes)
        .map(|q| match q.cmp(&j) {
            std::cmp::Ordering::Less => Pauli::Z,
            std::cmp::Ordering::Greater => Pauli::I,
            std::cmp::Ordering::Equal if mu.is_multiple_of(2) => Pauli::X,
            std::cmp::Ordering::Equal => Pauli::Y,
        })
        .collect();
    PauliString::new(letters, 0)
}

/// `Σ_ν row_ν c_ν` as an MPO, zero coefficients skipped.
fn majorana_sum(modes: usize, row: impl Iterator<Item = f64>) -> Result<MatrixProductOperator> {
    let mut acc: Option<MatrixProductOperator> = None;
    for (nu, coeff) in row.enumerate() {
        if coeff == 0.0 {
            continue;
        }
        let term = pauli_to_mpo(&majorana_string(modes, nu)).scaled(C64::new(coeff, 0.0));
        acc = Some(match acc {
            None => term,
            Some(a) => mpo_add(&a, &term)?,
        });
    }
    Ok(acc.unwrap_or_else(|| MatrixProductOperator::zero(modes)))
}

/// `C†ΠC` for a Gaussian circuit measured on qubit `k = circ.output()`.
///
/// With `Z_k = −i c_{2k} c_{2k+1}` the projector is `½I + (i/2) c_{2k} c_{2k+1}`,
/// so `C†ΠC = ½I + (i/2) A·B` with `A = Σ R̃_{2k,μ} c_μ`, `B = Σ R̃_{2k+1,ν} c_ν`.
pub fn evolve_projector_gaussian(circ: &QuantumCircuit) -> Result<MatrixProductOperator> {
    let m = circ.qubits();
    let r = gaussian_rotation(circ)?;
    let k = circ.output();
    let a = majorana_sum(m, r.matrix.row(2 * k).iter().copied())?;
    let b = majorana_sum(m, r.matrix.row(2 * k + 1).iter().copied())?;
    let ab = mpo_multiply(&a, &b)?.scaled(C64::new(0.0, 0.5));
    let out = mpo_add(&MatrixProductOperator::identity(m).scaled(C64::new(0.5, 0.0)), &ab)?;
    let bound = 4 * m * m + 1;
    if out.chi() > bound {
        return Err(Error::BudgetExceeded {
            what: "Gaussian MPO bond dimension",
            requested: out.chi(),
            limit: bound,
        });
    }
    Ok(out)
}
