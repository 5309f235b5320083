//! Small-register circuit simulation: exact statevectors, depolarizing
//! density-matrix evolution, shot sampling with readout error, readout
//! mitigation, tomography and purification.

pub mod circuit;
pub mod density;
pub mod estimator;
pub mod mitigation;
pub mod noise;
pub mod purify;
pub mod refit;
pub mod sampling;
pub mod statevector;

pub use circuit::{Circuit, Gate};
pub use density::{run_density, DensityMatrix};
pub use estimator::{estimate_expectation, tomography, Estimate, Estimator};
pub use mitigation::{exact_confusion, mitigate_counts, mitigate_distribution, readout_calibrate};
pub use noise::NoiseModel;
pub use purify::{purify, Purified};
pub use refit::{refit_parameters, Refit};
pub use sampling::{sample_counts, Counts};
pub use statevector::{run_statevector, Statevector};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error("qubit {qubit} outside a {n_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },
    #[error("CNOT control and target are both qubit {0}")]
    ControlIsTarget(usize),
    #[error("register size mismatch: expected {expected}, got {got}")]
    RegisterMismatch { expected: usize, got: usize },
    #[error("observable is not Hermitian")]
    NotHermitian,
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid noise model: {0}")]
    InvalidNoise(String),
    #[error("basis-change circuits may contain only single-qubit gates")]
    InvalidBasisChange,
    #[error("readout mitigation failed: calibration condition number {condition:e}")]
    MitigationFailed { condition: f64 },
    #[error("{0}")]
    UnsupportedRegister(String),
    #[error("{0}")]
    Io(String),
}
