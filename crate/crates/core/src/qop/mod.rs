//! Operator algebra: Pauli sums, second-quantized operators, active-space
//! Hamiltonians and the reduced parity mapping.

pub mod fermion;
pub mod hamiltonian;
pub mod integrals;
pub mod parity;
pub mod pauli;

pub use fermion::{FermionOperator, FermionTerm, Ladder};
pub use hamiltonian::{build_hamiltonian, build_s2_operator, excitation, number_operator, pair_excitation, spin_orbital};
pub use integrals::{ActiveSpaceIntegrals, SectorSpec, SYMMETRY_TOLERANCE};
pub use parity::{map_parity, map_parity_reduced, CAS22_DICTIONARY};
pub use pauli::{matrix_of, Pauli, PauliTerm, PauliWord, QubitOperator};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QopError {
    #[error("operators act on registers of different size")]
    RegisterMismatch,
    #[error("invalid Pauli letter {0:?}")]
    BadPauliLetter(char),
    #[error("register of {n_qubits} qubits exceeds the limit of {max}")]
    RegisterTooLarge { n_qubits: usize, max: usize },
    #[error("operator does not conserve the particle-number and spin sector")]
    NotSectorConserving,
    #[error("invalid integrals: {0}")]
    InvalidIntegrals(String),
    #[error("integral symmetry violated: {0}")]
    SymmetryViolation(String),
    #[error("invalid sector: {0}")]
    InvalidSector(String),
    #[error("reduced mapping supports only 2 electrons in 2 orbitals with Sz = 0 (got {n_electrons} in {n_orbitals})")]
    UnsupportedSize { n_orbitals: usize, n_electrons: usize },
}
