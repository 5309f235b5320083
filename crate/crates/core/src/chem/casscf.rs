use std::path::{Path, PathBuf};
use std::process::Command;

use serde::{Deserialize, Serialize};

use super::fcidump::parse_fcidump;
use super::rdm_io::write_rdms;
use super::ChemError;
use crate::ansatz::{AnsatzKind, AnsatzParameters};
use crate::opt::OptimizerConfig;
use crate::solve::{rdm_energy, state_average_rdms, vqd, vqe, vqe_ac, Backend, Device, Problem, SolveResult, VqdConfig};

/// How states above the ground state are found.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum ExcitedMethod {
    VqeAc { epsilon: f64 },
    Vqd(VqdConfig),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverSettings {
    pub kind: AnsatzKind,
    pub backend: Backend,
    pub optimizer: OptimizerConfig,
    pub excited: ExcitedMethod,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CasscfConfig {
    /// One weight per state, summing to 1.
    pub weights: Vec<f64>,
    /// Stop once the averaged energy changes by less than this (Hartree).
    pub energy_threshold: f64,
    pub max_macro_iterations: usize,
    /// Orbital-update command run through `sh -c`. `{fcidump}`, `{rdm}` and
    /// `{out}` expand to the current integrals, the averaged RDMs and the
    /// path the updated FCIDUMP must be written to. Without a command a
    /// single CASCI-style iteration is run.
    pub external_command: Option<String>,
    /// Where RDMs and updated integrals are written.
    pub work_dir: PathBuf,
}

impl CasscfConfig {
    pub fn new(weights: Vec<f64>, work_dir: impl Into<PathBuf>) -> Self {
        Self {
            weights,
            energy_threshold: 1e-4,
            max_macro_iterations: 100,
            external_command: None,
            work_dir: work_dir.into(),
        }
    }

    pub fn validate(&self, states: usize) -> Result<(), ChemError> {
        if states == 0 || self.weights.len() != states {
            return Err(ChemError::InvalidConfig(format!(
                "{} weights for {states} states",
                self.weights.len()
            )));
        }
        if self.weights.iter().any(|w| !(*w >= 0.0)) || (self.weights.iter().sum::<f64>() - 1.0).abs() > 1e-10 {
            return Err(ChemError::InvalidConfig("weights must be nonnegative and sum to 1".into()));
        }
        if !(self.energy_threshold > 0.0) || self.max_macro_iterations == 0 {
            return Err(ChemError::InvalidConfig(
                "energy threshold and iteration limit must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MacroIterationRecord {
    /// 1-based.
    pub iteration: usize,
    pub state_energies: Vec<f64>,
    pub state_s_squared: Vec<f64>,
    /// Energies rebuilt from each state's own RDMs.
    pub rdm_energies: Vec<f64>,
    pub averaged_energy: f64,
    /// Change from the previous iteration; absent on the first.
    pub energy_change: Option<f64>,
    /// Absent in single-iteration mode, where no convergence test applies.
    pub converged: Option<bool>,
    pub fcidump: PathBuf,
    pub rdm_file: PathBuf,
    pub warnings: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CasscfStatus {
    Converged,
    /// Iteration limit reached before the energy settled.
    MaxIterations,
    /// No external command; one CASCI-style pass.
    SingleIteration,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CasscfRun {
    pub records: Vec<MacroIterationRecord>,
    pub status: CasscfStatus,
}

/// `'...'` quoting for `sh`.
fn shell_quote(p: &Path) -> String {
    format!("'{}'", p.display().to_string().replace('\'', r"'\''"))
}

fn run_external(template: &str, fcidump: &Path, rdm: &Path, out: &Path) -> Result<(), ChemError> {
    let command = template
        .replace("{fcidump}", &shell_quote(fcidump))
        .replace("{rdm}", &shell_quote(rdm))
        .replace("{out}", &shell_quote(out));
    let output = Command::new("sh")
        .arg("-c")
        .arg(&command)
        .output()
        .map_err(|e| ChemError::External {
            command: command.clone(),
            status: "not started".into(),
            stderr: e.to_string(),
        })?;
    if !output.status.success() {
        return Err(ChemError::External {
            command,
            status: output.status.to_string(),
            stderr: String::from_utf8_lossy(&output.stderr).trim().to_string(),
        });
    }
    if !out.is_file() {
        return Err(ChemError::MissingOutput(out.to_path_buf()));
    }
    Ok(())
}

/// Ground state, then each excited state against all lower ones.
fn solve_states(problem: &Problem, states: usize, settings: &SolverSettings) -> Result<Vec<SolveResult>, ChemError> {
    let mut results: Vec<SolveResult> = Vec::with_capacity(states);
    for k in 0..states {
        let lower: Vec<AnsatzParameters> = results.iter().map(|r| r.theta_star.clone()).collect();
        let r = if k == 0 {
            vqe(problem, settings.kind, &settings.backend, &settings.optimizer)?
        } else {
            match settings.excited {
                ExcitedMethod::VqeAc { epsilon } => {
                    vqe_ac(problem, settings.kind, &settings.backend, &lower, epsilon, &settings.optimizer)?
                }
                ExcitedMethod::Vqd(penalties) => {
                    vqd(problem, settings.kind, &settings.backend, &lower, &penalties, &settings.optimizer)?
                }
            }
        };
        results.push(r);
    }
    Ok(results)
}

/// State-averaged macro-iterations: solve the CI problem on the quantum
/// side, export averaged RDMs, let the external command rotate orbitals and
/// repeat until the averaged energy settles.
pub fn run_sa_casscf(
    initial_fcidump: &Path,
    states: usize,
    cfg: &CasscfConfig,
    settings: &SolverSettings,
) -> Result<CasscfRun, ChemError> {
    cfg.validate(states)?;
    std::fs::create_dir_all(&cfg.work_dir).map_err(|e| ChemError::io(&cfg.work_dir, e))?;
    let mut current = initial_fcidump.to_path_buf();
    let mut records: Vec<MacroIterationRecord> = Vec::new();
    for iteration in 1..=cfg.max_macro_iterations {
        let data = parse_fcidump(&current)?;
        let sector = data.sector()?;
        let problem = Problem::from_integrals(&data.integrals)?;
        let results = solve_states(&problem, states, settings)?;
        let mut rdms = Vec::with_capacity(states);
        for r in &results {
            let mut device = Device::new(settings.kind, &settings.backend)?;
            rdms.push(device.rdms(r.theta_star.values(), &sector)?);
        }
        let rdm_energies = rdms
            .iter()
            .map(|r| rdm_energy(&data.integrals, r))
            .collect::<Result<Vec<_>, _>>()?;
        let averaged = state_average_rdms(&rdms, &cfg.weights)?;
        let rdm_file = cfg.work_dir.join(format!("rdm_{iteration:03}.txt"));
        write_rdms(&averaged, &rdm_file)?;

        let state_energies: Vec<f64> = results.iter().map(|r| r.energy).collect();
        let averaged_energy = cfg.weights.iter().zip(&state_energies).map(|(w, e)| w * e).sum();
        let energy_change = records.last().map(|prev| averaged_energy - prev.averaged_energy);
        let settled = energy_change.is_some_and(|d: f64| d.abs() < cfg.energy_threshold);
        let converged = cfg.external_command.as_ref().map(|_| settled);
        let warnings = results
            .iter()
            .enumerate()
            .flat_map(|(k, r)| r.warnings.iter().map(move |w| format!("state {k}: {w}")))
            .collect();
        records.push(MacroIterationRecord {
            iteration,
            state_s_squared: results.iter().map(|r| r.s_squared).collect(),
            state_energies,
            rdm_energies,
            averaged_energy,
            energy_change,
            converged,
            fcidump: current.clone(),
            rdm_file: rdm_file.clone(),
            warnings,
        });

        let Some(template) = &cfg.external_command else {
            return Ok(CasscfRun {
                records,
                status: CasscfStatus::SingleIteration,
            });
        };
        if settled {
            return Ok(CasscfRun {
                records,
                status: CasscfStatus::Converged,
            });
        }
        if iteration == cfg.max_macro_iterations {
            break;
        }
        let out = cfg.work_dir.join(format!("orbitals_{iteration:03}.fcidump"));
        let _ = std::fs::remove_file(&out);
        run_external(template, &current, &rdm_file, &out)?;
        current = out;
    }
    Ok(CasscfRun {
        records,
        status: CasscfStatus::MaxIterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solve::DEFAULT_EPSILON;

    const HUBBARD: &str = " &FCI NORB=2,NELEC=2,MS2=0,\n &END\n -1.0 1 2 0 0\n 2.0 1 1 1 1\n 2.0 2 2 2 2\n 0.0 0 0 0 0\n";

    fn settings() -> SolverSettings {
        SolverSettings {
            kind: AnsatzKind::SpinRestricted,
            backend: Backend::Statevector,
            optimizer: OptimizerConfig::default(),
            excited: ExcitedMethod::VqeAc {
                epsilon: DEFAULT_EPSILON,
            },
        }
    }

    fn setup() -> (tempfile::TempDir, PathBuf) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("hubbard.fcidump");
        std::fs::write(&path, HUBBARD).unwrap();
        (dir, path)
    }

    #[test]
    fn single_iteration_mode() {
        let (dir, path) = setup();
        let cfg = CasscfConfig::new(vec![0.5, 0.5], dir.path().join("work"));
        let run = run_sa_casscf(&path, 2, &cfg, &settings()).unwrap();
        assert_eq!(run.status, CasscfStatus::SingleIteration);
        assert_eq!(run.records.len(), 1);
        let r = &run.records[0];
        assert!(r.converged.is_none());
        assert!((r.state_energies[0] - (1.0 - 5f64.sqrt())).abs() < 1e-4);
        assert!((r.state_energies[1] - 2.0).abs() < 1e-3);
        for (e, q) in r.state_energies.iter().zip(&r.rdm_energies) {
            assert!((e - q).abs() < 1e-6);
        }
        assert!((r.averaged_energy - 0.5 * (r.state_energies[0] + r.state_energies[1])).abs() < 1e-12);
        assert!(r.rdm_file.is_file());
    }

    #[test]
    fn identity_command_converges_at_second_iteration() {
        let (dir, path) = setup();
        let mut cfg = CasscfConfig::new(vec![0.5, 0.5], dir.path().join("work"));
        cfg.external_command = Some("cp {fcidump} {out}".into());
        let run = run_sa_casscf(&path, 2, &cfg, &settings()).unwrap();
        assert_eq!(run.status, CasscfStatus::Converged);
        assert_eq!(run.records.len(), 2);
        assert!(run.records[1].energy_change.unwrap().abs() < 1e-10);
        assert_eq!(run.records[1].converged, Some(true));

        cfg.max_macro_iterations = 1;
        let run = run_sa_casscf(&path, 2, &cfg, &settings()).unwrap();
        assert_eq!(run.status, CasscfStatus::MaxIterations);
        assert_eq!(run.records[0].converged, Some(false));
    }

    #[test]
    fn external_failures_abort() {
        let (dir, path) = setup();
        let mut cfg = CasscfConfig::new(vec![1.0], dir.path().join("work"));
        cfg.external_command = Some("echo broken >&2; exit 3".into());
        match run_sa_casscf(&path, 1, &cfg, &settings()) {
            Err(ChemError::External { stderr, .. }) => assert_eq!(stderr, "broken"),
            other => panic!("{other:?}"),
        }
        cfg.external_command = Some("true".into());
        assert!(matches!(run_sa_casscf(&path, 1, &cfg, &settings()), Err(ChemError::MissingOutput(_))));
    }

    #[test]
    fn state_specific_matches_plain_vqe() {
        let (dir, path) = setup();
        let cfg = CasscfConfig::new(vec![1.0], dir.path().join("work"));
        let run = run_sa_casscf(&path, 1, &cfg, &settings()).unwrap();
        let data = parse_fcidump(&path).unwrap();
        let p = Problem::from_integrals(&data.integrals).unwrap();
        let plain = vqe(&p, AnsatzKind::SpinRestricted, &Backend::Statevector, &OptimizerConfig::default()).unwrap();
        assert_eq!(run.records[0].averaged_energy, plain.energy);
    }

    #[test]
    fn bad_weights_rejected() {
        let (dir, path) = setup();
        let cfg = CasscfConfig::new(vec![0.5, 0.4], dir.path());
        assert!(matches!(run_sa_casscf(&path, 2, &cfg, &settings()), Err(ChemError::InvalidConfig(_))));
    }
}
