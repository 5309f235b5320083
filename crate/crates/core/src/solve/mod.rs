//! Ground- and excited-state solvers: exact CASCI reference, VQE, VQD and
//! VQE with overlap constraints, plus measurement of spin and reduced
//! density matrices.

pub mod casci;
mod device;
pub mod rdm;
mod variational;

use serde::{Deserialize, Serialize};

use crate::ansatz::{AnsatzError, AnsatzParameters};
use crate::opt::{OptError, OptResult};
use crate::qop::{build_hamiltonian, build_s2_operator, map_parity_reduced, ActiveSpaceIntegrals, QopError, QubitOperator, SectorSpec};
use crate::sim::{NoiseModel, SimError};

pub use casci::{exact_casci, CasciRoot, CasciSolution};
pub use device::Device;
pub use rdm::{measure_rdms, rdm_energy, state_average_rdms, RdmPair};
pub use variational::{measure_overlap, measure_s_squared, vqd, vqe, vqe_ac, VqdConfig, BETA_PRESETS, DEFAULT_EPSILON};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolveError {
    #[error(transparent)]
    Qop(#[from] QopError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Opt(#[from] OptError),
    #[error(transparent)]
    Ansatz(#[from] AnsatzError),
    #[error("determinant space of {count} exceeds the dense limit of {max}")]
    TooManyDeterminants { count: usize, max: usize },
    #[error("{0}")]
    InvalidInput(String),
}

/// Where expectation values come from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Backend {
    /// Exact statevector expectations.
    Statevector,
    /// Shot sampling from the noisy density matrix.
    NoisySampled {
        noise: NoiseModel,
        /// Readout-error mitigation.
        mitigated: bool,
        /// Tomography and dominant-eigenvector purification at convergence.
        purified: bool,
    },
}

impl Backend {
    pub fn noisy(noise: NoiseModel) -> Self {
        Backend::NoisySampled {
            noise,
            mitigated: true,
            purified: true,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Backend::Statevector)
    }
}

/// Mapped Hamiltonian and total-spin observable on the two-qubit register.
#[derive(Clone, Debug, PartialEq)]
pub struct Problem {
    pub hamiltonian: QubitOperator,
    pub s_squared: QubitOperator,
}

impl Problem {
    pub fn new(hamiltonian: QubitOperator, s_squared: QubitOperator) -> Result<Self, SolveError> {
        for op in [&hamiltonian, &s_squared] {
            if op.n_qubits() != crate::ansatz::N_QUBITS {
                return Err(SolveError::InvalidInput(format!(
                    "observables must act on {} qubits, got {}",
                    crate::ansatz::N_QUBITS,
                    op.n_qubits()
                )));
            }
            if !op.is_hermitian() {
                return Err(SimError::NotHermitian.into());
            }
        }
        Ok(Self {
            hamiltonian,
            s_squared,
        })
    }

    /// CAS(2,2) integrals mapped with the reduced parity encoding.
    pub fn from_integrals(ints: &ActiveSpaceIntegrals) -> Result<Self, SolveError> {
        let sector = SectorSpec::two_electron_singlet();
        let h = map_parity_reduced(&build_hamiltonian(ints)?, &sector)?.hermitian_part();
        Self::new(h, mapped_s_squared())
    }

    /// Replace the Hamiltonian, keeping the spin observable.
    pub fn with_hamiltonian(hamiltonian: QubitOperator) -> Result<Self, SolveError> {
        Self::new(hamiltonian, mapped_s_squared())
    }
}

/// `S^2` on the reduced two-qubit register.
pub fn mapped_s_squared() -> QubitOperator {
    map_parity_reduced(&build_s2_operator(2), &SectorSpec::two_electron_singlet())
        .expect("S^2 conserves the sector")
        .hermitian_part()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PurificationReport {
    /// Sampled energy at the optimizer's parameters before purification.
    pub unpurified_energy: f64,
    /// Largest eigenvalue of the tomographic density matrix.
    pub weight: f64,
    pub degenerate: bool,
    /// Fidelity between the purified state and the refitted ansatz state.
    pub refit_fidelity: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub theta_star: AnsatzParameters,
    pub energy: f64,
    pub s_squared: f64,
    /// `|<Psi(theta_i)|Psi(theta_star)>|^2` for each lower state, in order.
    pub overlaps_with_lower: Vec<f64>,
    pub converged: bool,
    pub feasible: bool,
    pub purification: Option<PurificationReport>,
    pub warnings: Vec<String>,
    pub optimizer: OptResult,
}
