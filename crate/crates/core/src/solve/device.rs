use super::{Backend, SolveError};
use crate::ansatz::{build, AnsatzKind};
use crate::qop::QubitOperator;
use crate::sim::{purify, run_statevector, Circuit, DensityMatrix, Estimator, Purified, Statevector};

/// An ansatz bound to a backend. Noisy devices own one generator stream, so
/// successive measurements draw fresh shots.
#[derive(Clone, Debug)]
pub struct Device {
    kind: AnsatzKind,
    backend: Backend,
    estimator: Option<Estimator>,
}

impl Device {
    pub fn new(kind: AnsatzKind, backend: &Backend) -> Result<Self, SolveError> {
        let estimator = match backend {
            Backend::Statevector => None,
            Backend::NoisySampled { noise, mitigated, .. } => {
                Some(Estimator::new(noise.clone(), kind.n_qubits(), *mitigated)?)
            }
        };
        Ok(Self {
            kind,
            backend: backend.clone(),
            estimator,
        })
    }

    pub fn kind(&self) -> AnsatzKind {
        self.kind
    }

    pub fn backend(&self) -> &Backend {
        &self.backend
    }

    pub fn purified(&self) -> bool {
        matches!(self.backend, Backend::NoisySampled { purified: true, .. })
    }

    fn circuit(&self, theta: &[f64]) -> Result<Circuit, SolveError> {
        Ok(build(self.kind, theta)?)
    }

    pub fn state(&self, theta: &[f64]) -> Result<Statevector, SolveError> {
        Ok(run_statevector(&self.circuit(theta)?))
    }

    /// Exact or sampled `<Psi(theta)|op|Psi(theta)>`.
    pub fn expectation(&mut self, theta: &[f64], op: &QubitOperator) -> Result<f64, SolveError> {
        let c = self.circuit(theta)?;
        match &mut self.estimator {
            None => Ok(run_statevector(&c).expectation(op)?),
            Some(e) => Ok(e.estimate(&c, op)?.value),
        }
    }

    /// `|<Psi(a)|Psi(b)>|^2`, sampled as the all-zeros probability of
    /// `U(a)^dagger U(b)` on noisy backends.
    pub fn overlap(&mut self, a: &[f64], b: &[f64]) -> Result<f64, SolveError> {
        let ua = self.circuit(a)?;
        let ub = self.circuit(b)?;
        match &mut self.estimator {
            None => Ok(run_statevector(&ua).fidelity(&run_statevector(&ub))),
            Some(e) => {
                let c = ub.then(&ua.inverse())?;
                Ok(e.zero_probability(&c)?.clamp(0.0, 1.0))
            }
        }
    }

    /// Exact pure state, or the tomographic estimate on noisy backends.
    pub fn density(&mut self, theta: &[f64]) -> Result<DensityMatrix, SolveError> {
        let c = self.circuit(theta)?;
        match &mut self.estimator {
            None => Ok(DensityMatrix::from_pure(&run_statevector(&c))),
            Some(e) => Ok(e.tomography(&c)?),
        }
    }

    /// Tomography followed by dominant-eigenvector extraction.
    pub fn purified_state(&mut self, theta: &[f64]) -> Result<Purified, SolveError> {
        Ok(purify(&self.density(theta)?))
    }
}
