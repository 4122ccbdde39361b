//! Heisenberg-picture evolution of the measured projector through Clifford
//! and Gaussian circuits, as matrix product operators.

pub mod concat;
pub mod gaussian;
pub mod mpo;
pub mod pauli;
pub mod stabiliser;

pub use concat::{concatenated_counter, contract_concatenated};
pub use gaussian::{evolve_projector_gaussian, gaussian_rotation, majorana_string, RotationMatrix};
pub use mpo::{mpo_add, mpo_multiply, pauli_to_mpo, MatrixProductOperator, MpoSite};
pub use pauli::{conjugate_pauli, Pauli, PauliString};
pub use stabiliser::evolve_projector_stabiliser;
