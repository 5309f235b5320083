use crate::ansatz::{build, AnsatzKind, AnsatzParameters};
use crate::opt::{minimize_unconstrained, OptimizerConfig};

use super::statevector::{run_statevector, Statevector};
use super::SimError;

/// Fidelity below which the refit is reported as a poor fit.
pub const POOR_FIT_FIDELITY: f64 = 0.5;

#[derive(Clone, Debug, PartialEq)]
pub struct Refit {
    pub parameters: AnsatzParameters,
    pub fidelity: f64,
    /// The target is likely outside the ansatz manifold.
    pub poor_fit: bool,
}

fn refit_config() -> OptimizerConfig {
    OptimizerConfig {
        rho_begin: 0.5,
        rho_end: 1e-7,
        max_evaluations: 2000,
        f_tolerance: 0.0,
    }
}

/// Parameters maximizing `|<target|Psi(theta)>|^2`, found by minimizing
/// `1 - fidelity` from `start`.
pub fn refit_parameters(kind: AnsatzKind, target: &Statevector, start: &AnsatzParameters) -> Result<Refit, SimError> {
    if target.n_qubits() != kind.n_qubits() {
        return Err(SimError::RegisterMismatch {
            expected: kind.n_qubits(),
            got: target.n_qubits(),
        });
    }
    if start.len() != kind.parameter_count() {
        return Err(SimError::InvalidState(format!(
            "{} start parameters for {kind}",
            start.len()
        )));
    }
    let infidelity = |theta: &[f64]| {
        let c = build(kind, theta).expect("length checked");
        1.0 - target.fidelity(&run_statevector(&c))
    };
    let r = minimize_unconstrained(infidelity, start.values(), &refit_config())
        .map_err(|e| SimError::InvalidState(e.to_string()))?;
    let fidelity = 1.0 - r.f_best;
    Ok(Refit {
        parameters: AnsatzParameters(r.x_best),
        fidelity,
        poor_fit: fidelity < POOR_FIT_FIDELITY,
    })
}
