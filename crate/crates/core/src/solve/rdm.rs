//! Spin-summed reduced density matrices in chemists' order:
//! `gamma[p][q] = <E_pq>` and `Gamma[p][q][r][s] = <e_pqrs>`.

use serde::{Deserialize, Serialize};

use super::device::Device;
use super::{Backend, SolveError};
use crate::ansatz::{AnsatzKind, AnsatzParameters};
use crate::qop::{excitation, map_parity_reduced, pair_excitation, ActiveSpaceIntegrals, QubitOperator, SectorSpec};
use crate::sim::DensityMatrix;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RdmPair {
    pub n_orbitals: usize,
    /// `n^2` entries, row-major.
    pub one: Vec<f64>,
    /// `n^4` entries, index `((p*n + q)*n + r)*n + s`.
    pub two: Vec<f64>,
    /// State weights behind an averaged pair; `[1]` for a single state.
    pub weights: Vec<f64>,
}

impl RdmPair {
    pub fn zeros(n_orbitals: usize) -> Self {
        Self {
            n_orbitals,
            one: vec![0.0; n_orbitals.pow(2)],
            two: vec![0.0; n_orbitals.pow(4)],
            weights: vec![1.0],
        }
    }

    pub fn one_at(&self, p: usize, q: usize) -> f64 {
        self.one[p * self.n_orbitals + q]
    }

    pub fn two_at(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        let n = self.n_orbitals;
        self.two[((p * n + q) * n + r) * n + s]
    }

    pub fn trace(&self) -> f64 {
        (0..self.n_orbitals).map(|p| self.one_at(p, p)).sum()
    }

    /// `sum_r Gamma[p][q][r][r]`, which equals `(N - 1) gamma[p][q]`.
    pub fn partial_trace(&self, p: usize, q: usize) -> f64 {
        (0..self.n_orbitals).map(|r| self.two_at(p, q, r, r)).sum()
    }
}

/// Hermitian parts of `E_pq` and `e_pqrs` on the reduced register.
fn observables(n_orbitals: usize, sector: &SectorSpec) -> Result<(Vec<QubitOperator>, Vec<QubitOperator>), SolveError> {
    let n = n_orbitals;
    let mut one = Vec::with_capacity(n * n);
    for p in 0..n {
        for q in 0..n {
            let e = excitation(n, p, q);
            one.push(map_parity_reduced(&(&e + &e.adjoint()).scale(0.5), sector)?.hermitian_part());
        }
    }
    let mut two = Vec::with_capacity(n.pow(4));
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    let e = pair_excitation(n, p, q, r, s);
                    two.push(map_parity_reduced(&(&e + &e.adjoint()).scale(0.5), sector)?.hermitian_part());
                }
            }
        }
    }
    Ok((one, two))
}

fn from_state(rho: &DensityMatrix, n_orbitals: usize, sector: &SectorSpec) -> Result<RdmPair, SolveError> {
    let (one_ops, two_ops) = observables(n_orbitals, sector)?;
    let one = one_ops.iter().map(|o| rho.expectation(o)).collect::<Result<Vec<_>, _>>()?;
    let two = two_ops.iter().map(|o| rho.expectation(o)).collect::<Result<Vec<_>, _>>()?;
    Ok(RdmPair {
        n_orbitals,
        one,
        two,
        weights: vec![1.0],
    })
}

impl Device {
    /// RDMs of `Psi(theta)`. Noisy backends evaluate every element on one
    /// tomographic state (purified when enabled), so trace and
    /// partial-trace identities hold exactly.
    pub fn rdms(&mut self, theta: &[f64], sector: &SectorSpec) -> Result<RdmPair, SolveError> {
        let rho = if self.purified() {
            DensityMatrix::from_pure(&self.purified_state(theta)?.psi)
        } else {
            self.density(theta)?
        };
        from_state(&rho, 2, sector)
    }
}

/// RDMs of `Psi(theta)` on a fresh device.
pub fn measure_rdms(
    theta: &AnsatzParameters,
    kind: AnsatzKind,
    backend: &Backend,
    sector: &SectorSpec,
) -> Result<RdmPair, SolveError> {
    Device::new(kind, backend)?.rdms(theta.values(), sector)
}

/// Weighted average; weights must be nonnegative and sum to one.
pub fn state_average_rdms(rdms: &[RdmPair], weights: &[f64]) -> Result<RdmPair, SolveError> {
    if rdms.is_empty() || rdms.len() != weights.len() {
        return Err(SolveError::InvalidInput(format!(
            "{} RDM pairs with {} weights",
            rdms.len(),
            weights.len()
        )));
    }
    if weights.iter().any(|w| !(*w >= 0.0)) || (weights.iter().sum::<f64>() - 1.0).abs() > 1e-10 {
        return Err(SolveError::InvalidInput("weights must be nonnegative and sum to 1".into()));
    }
    let n = rdms[0].n_orbitals;
    if rdms.iter().any(|r| r.n_orbitals != n) {
        return Err(SolveError::InvalidInput("RDM pairs differ in orbital count".into()));
    }
    let mut out = RdmPair::zeros(n);
    out.weights = weights.to_vec();
    for (r, &w) in rdms.iter().zip(weights) {
        for (a, b) in out.one.iter_mut().zip(&r.one) {
            *a += w * b;
        }
        for (a, b) in out.two.iter_mut().zip(&r.two) {
            *a += w * b;
        }
    }
    Ok(out)
}

/// `e_core + sum h_pq gamma_pq + 1/2 sum (pq|rs) Gamma_pqrs`.
pub fn rdm_energy(ints: &ActiveSpaceIntegrals, rdm: &RdmPair) -> Result<f64, SolveError> {
    if ints.n_orbitals != rdm.n_orbitals {
        return Err(SolveError::InvalidInput("orbital count mismatch".into()));
    }
    let one: f64 = ints.h1.iter().zip(&rdm.one).map(|(h, g)| h * g).sum();
    let two: f64 = ints.h2.iter().zip(&rdm.two).map(|(h, g)| h * g).sum();
    Ok(ints.e_core + one + 0.5 * two)
}
