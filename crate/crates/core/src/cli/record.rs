use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use super::CliError;
use crate::ansatz::{AnsatzKind, AnsatzParameters};
use crate::opt::{OptResult, OptimizerConfig};
use crate::qop::{ActiveSpaceIntegrals, SectorSpec};
use crate::solve::{exact_casci, vqd, vqe, vqe_ac, Backend, Problem, PurificationReport, SolveResult, VqdConfig};

pub const KCAL_PER_HARTREE: f64 = 627.5095;

/// Oracle roots closer than this are reported as degenerate.
const DEGENERACY_GAP: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Vqe,
    Vqd,
    #[value(name = "vqeac")]
    VqeAc,
    CasciExact,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Vqe => "vqe",
            Method::Vqd => "vqd",
            Method::VqeAc => "vqeac",
            Method::CasciExact => "casci-exact",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveRequest {
    pub ansatz: AnsatzKind,
    pub method: Method,
    pub states: usize,
    pub beta: f64,
    pub gamma: f64,
    pub epsilon: f64,
    pub backend: Backend,
    pub optimizer: OptimizerConfig,
}

/// One solved state. Energy differences are taken against the exact
/// diagonalization computed inside the command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveRecord {
    pub method: String,
    pub ansatz: String,
    pub backend: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub state: usize,
    pub energy: f64,
    pub exact_energy: f64,
    pub delta_e_hartree: f64,
    pub delta_e_kcal_mol: f64,
    pub s_squared: f64,
    /// The reference root has a neighbour within 1e-6 Ha.
    pub degenerate: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_star: Option<Vec<f64>>,
    pub overlaps_with_lower: Vec<f64>,
    pub converged: bool,
    pub feasible: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub purification: Option<PurificationReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimizer: Option<OptResult>,
    pub warnings: Vec<String>,
}

fn degenerate_at(energies: &[f64], k: usize) -> bool {
    let below = k > 0 && (energies[k] - energies[k - 1]).abs() < DEGENERACY_GAP;
    let above = k + 1 < energies.len() && (energies[k + 1] - energies[k]).abs() < DEGENERACY_GAP;
    below || above
}

impl SolveRequest {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.states == 0 {
            return Err(CliError::Usage("--states must be at least 1".into()));
        }
        if self.method == Method::Vqe && self.states > 1 {
            return Err(CliError::Usage("vqe solves only the ground state; use vqd or vqeac".into()));
        }
        VqdConfig::new(self.beta, self.gamma).map_err(|e| CliError::Usage(e.to_string()))?;
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(CliError::Usage(format!("--epsilon must lie in (0, 1), got {}", self.epsilon)));
        }
        self.optimizer.validate().map_err(|e| CliError::Usage(e.to_string()))
    }

    fn seed(&self) -> Option<u64> {
        match &self.backend {
            Backend::Statevector => None,
            Backend::NoisySampled { noise, .. } => Some(noise.seed),
        }
    }

    fn backend_label(&self) -> &'static str {
        if self.backend.is_exact() {
            "statevector"
        } else {
            "noisy"
        }
    }
}

fn solve_state(problem: &Problem, request: &SolveRequest, lower: &[AnsatzParameters]) -> Result<SolveResult, CliError> {
    let r = match (lower.is_empty(), request.method) {
        (true, _) | (false, Method::Vqe) => vqe(problem, request.ansatz, &request.backend, &request.optimizer)?,
        (false, Method::Vqd) => vqd(
            problem,
            request.ansatz,
            &request.backend,
            lower,
            &VqdConfig::new(request.beta, request.gamma)?,
            &request.optimizer,
        )?,
        (false, Method::VqeAc) => vqe_ac(problem, request.ansatz, &request.backend, lower, request.epsilon, &request.optimizer)?,
        (false, Method::CasciExact) => unreachable!("exact roots are not optimized"),
    };
    Ok(r)
}

/// Run `request` on the integrals and return one record per state, ground state
/// first. Variational states are compared with the singlet roots of the
/// sector; `casci-exact` lists the lowest roots of any spin.
pub fn solve_records(ints: &ActiveSpaceIntegrals, sector: &SectorSpec, request: &SolveRequest) -> Result<Vec<SolveRecord>, CliError> {
    request.validate()?;
    let oracle = exact_casci(ints, sector, usize::MAX)?;
    let base = |state: usize, energy: f64, exact: f64, s_squared: f64, degenerate: bool| SolveRecord {
        method: request.method.name().into(),
        ansatz: request.ansatz.to_string(),
        backend: request.backend_label().into(),
        seed: request.seed(),
        state,
        energy,
        exact_energy: exact,
        delta_e_hartree: energy - exact,
        delta_e_kcal_mol: (energy - exact) * KCAL_PER_HARTREE,
        s_squared,
        degenerate,
        theta_star: None,
        overlaps_with_lower: Vec::new(),
        converged: true,
        feasible: true,
        purification: None,
        optimizer: None,
        warnings: Vec::new(),
    };

    if request.method == Method::CasciExact {
        let energies = oracle.energies();
        if request.states > energies.len() {
            return Err(CliError::Usage(format!(
                "{} states requested, the sector has {} roots",
                request.states,
                energies.len()
            )));
        }
        return Ok(oracle.roots[..request.states]
            .iter()
            .enumerate()
            .map(|(k, r)| base(k, r.energy, r.energy, r.s_squared, degenerate_at(&energies, k)))
            .collect());
    }

    if *sector != SectorSpec::two_electron_singlet() || ints.n_orbitals != 2 {
        return Err(CliError::Usage(format!(
            "variational methods need 2 orbitals, 2 electrons and MS2 = 0; got NORB = {}, NELEC = {}, MS2 = {}",
            ints.n_orbitals, sector.n_electrons, sector.two_sz
        )));
    }
    let singlets: Vec<f64> = oracle.singlets().iter().map(|r| r.energy).collect();
    if request.states > singlets.len() {
        return Err(CliError::Usage(format!(
            "{} states requested, the sector has {} singlet roots",
            request.states,
            singlets.len()
        )));
    }
    let problem = Problem::from_integrals(ints)?;
    let mut lower: Vec<AnsatzParameters> = Vec::new();
    let mut records = Vec::with_capacity(request.states);
    for k in 0..request.states {
        let r = solve_state(&problem, request, &lower)?;
        let mut rec = base(k, r.energy, singlets[k], r.s_squared, degenerate_at(&singlets, k));
        rec.theta_star = Some(r.theta_star.0.clone());
        rec.overlaps_with_lower = r.overlaps_with_lower;
        rec.converged = r.converged;
        rec.feasible = r.feasible;
        rec.purification = r.purification;
        rec.warnings = r.warnings;
        rec.optimizer = Some(r.optimizer);
        lower.push(r.theta_star);
        records.push(rec);
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hubbard() -> ActiveSpaceIntegrals {
        let mut ints = ActiveSpaceIntegrals::zeros(2, 0.0);
        ints.set_one(0, 1, -1.0);
        ints.set_two(0, 0, 0, 0, 2.0);
        ints.set_two(1, 1, 1, 1, 2.0);
        ints
    }

    fn request(method: Method, states: usize) -> SolveRequest {
        SolveRequest {
            ansatz: AnsatzKind::SpinRestricted,
            method,
            states,
            beta: 5.0,
            gamma: 0.0,
            epsilon: 1e-4,
            backend: Backend::Statevector,
            optimizer: OptimizerConfig::default(),
        }
    }

    #[test]
    fn vqe_record_has_zero_error_in_kcal() {
        let recs = solve_records(&hubbard(), &SectorSpec::two_electron_singlet(), &request(Method::Vqe, 1)).unwrap();
        assert_eq!(recs.len(), 1);
        assert!((recs[0].exact_energy - (1.0 - 5f64.sqrt())).abs() < 1e-12);
        assert!(recs[0].delta_e_kcal_mol.abs() < 1e-3);
        assert!((recs[0].delta_e_kcal_mol - recs[0].delta_e_hartree * 627.5095).abs() < 1e-12);
    }

    /// Closed-shell pi/pi* model with a moderate excitation gap.
    fn molecule_like() -> ActiveSpaceIntegrals {
        let mut ints = ActiveSpaceIntegrals::zeros(2, -70.0);
        ints.set_one(0, 0, -1.1);
        ints.set_one(1, 1, -0.45);
        ints.set_one(0, 1, 0.02);
        ints.set_two(0, 0, 0, 0, 0.62);
        ints.set_two(1, 1, 1, 1, 0.58);
        ints.set_two(0, 0, 1, 1, 0.55);
        ints.set_two(0, 1, 0, 1, 0.12);
        ints
    }

    #[test]
    fn vqeac_excited_record_within_tenth_kcal() {
        let recs = solve_records(&molecule_like(), &SectorSpec::two_electron_singlet(), &request(Method::VqeAc, 2)).unwrap();
        assert!(recs[1].delta_e_kcal_mol.abs() < 0.1, "{}", recs[1].delta_e_kcal_mol);
        assert_eq!(recs[1].overlaps_with_lower.len(), 1);
    }

    #[test]
    fn vqeac_hubbard_record_carries_overlap_bias() {
        // allowing overlap eps with S0 lowers the optimum by eps (E1 - E0)
        let recs = solve_records(&hubbard(), &SectorSpec::two_electron_singlet(), &request(Method::VqeAc, 2)).unwrap();
        assert!((recs[1].exact_energy - 2.0).abs() < 1e-12);
        let bias = -1e-4 * (1.0 + 5f64.sqrt()) * KCAL_PER_HARTREE;
        assert!((recs[1].delta_e_kcal_mol - bias).abs() < 0.05, "{} vs {bias}", recs[1].delta_e_kcal_mol);
    }

    #[test]
    fn exact_roots_include_triplet() {
        let recs = solve_records(&hubbard(), &SectorSpec::two_electron_singlet(), &request(Method::CasciExact, 4)).unwrap();
        let s2: Vec<f64> = recs.iter().map(|r| r.s_squared.round()).collect();
        assert_eq!(s2, vec![0.0, 2.0, 0.0, 0.0]);
        assert!(recs.iter().all(|r| r.delta_e_hartree == 0.0 && r.theta_star.is_none()));
    }

    #[test]
    fn degenerate_roots_flagged() {
        // no interaction and no hopping: the three singlets and the triplet all sit at 0
        let ints = ActiveSpaceIntegrals::zeros(2, 0.0);
        let recs = solve_records(&ints, &SectorSpec::two_electron_singlet(), &request(Method::Vqe, 1)).unwrap();
        assert!(recs[0].degenerate);
        let recs = solve_records(&hubbard(), &SectorSpec::two_electron_singlet(), &request(Method::Vqe, 1)).unwrap();
        assert!(!recs[0].degenerate);
    }

    #[test]
    fn invalid_requests_are_usage_errors() {
        let sector = SectorSpec::two_electron_singlet();
        for s in [
            request(Method::Vqe, 2),
            request(Method::VqeAc, 4),
            SolveRequest { beta: -1.0, ..request(Method::Vqd, 2) },
            SolveRequest { epsilon: 0.0, ..request(Method::VqeAc, 2) },
        ] {
            assert!(matches!(solve_records(&hubbard(), &sector, &s), Err(CliError::Usage(_))), "{s:?}");
        }
    }
}
