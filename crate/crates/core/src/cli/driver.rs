use serde::Serialize;

use super::record::{solve_records, Method};
use super::{emit, load_fcidump, CalibrateArgs, CliError, DriverArgs, SolveArgs};
use crate::chem::{run_sa_casscf, CasscfConfig, CasscfStatus, ExcitedMethod, SolverSettings};
use crate::sim::{exact_confusion, readout_calibrate};
use crate::solve::VqdConfig;

fn to_jsonl<T: Serialize>(items: &[T]) -> Result<String, CliError> {
    let mut text = String::new();
    for item in items {
        text.push_str(&serde_json::to_string(item).map_err(|e| CliError::Io(e.to_string()))?);
        text.push('\n');
    }
    Ok(text)
}

pub(super) fn cmd_solve(a: &SolveArgs) -> Result<(), CliError> {
    let backend = a.backend.backend()?;
    let request = a.method.request(backend);
    request.validate()?;
    let data = load_fcidump(&a.fcidump)?;
    let sector = data.sector()?;
    let records = solve_records(&data.integrals, &sector, &request)?;
    emit(a.out.as_deref(), &to_jsonl(&records)?)
}

pub(super) fn cmd_sa_driver(a: &DriverArgs) -> Result<(), CliError> {
    let backend = a.backend.backend()?;
    let request = a.method.request(backend);
    let excited = match request.method {
        Method::Vqd => ExcitedMethod::Vqd(VqdConfig::new(request.beta, request.gamma).map_err(|e| CliError::Usage(e.to_string()))?),
        Method::VqeAc | Method::Vqe => ExcitedMethod::VqeAc { epsilon: request.epsilon },
        Method::CasciExact => return Err(CliError::Usage("sa-driver needs a variational method".into())),
    };
    let states = a.method.states.unwrap_or(2);
    let weights = if a.weights.is_empty() {
        vec![1.0 / states as f64; states]
    } else {
        a.weights.clone()
    };
    let cfg = CasscfConfig {
        weights,
        energy_threshold: a.threshold,
        max_macro_iterations: a.max_iterations,
        external_command: a.command.clone(),
        work_dir: a.work_dir.clone(),
    };
    cfg.validate(states)?;
    load_fcidump(&a.fcidump)?;
    let settings = SolverSettings {
        kind: request.ansatz,
        backend: request.backend,
        optimizer: request.optimizer,
        excited,
    };
    let run = run_sa_casscf(&a.fcidump, states, &cfg, &settings)?;
    emit(a.out.as_deref(), &to_jsonl(&run.records)?)?;
    match run.status {
        CasscfStatus::Converged => eprintln!("converged after {} macro-iterations", run.records.len()),
        CasscfStatus::MaxIterations => eprintln!("maximum number of macro-iterations ({}) reached", run.records.len()),
        CasscfStatus::SingleIteration => {}
    }
    Ok(())
}

#[derive(Serialize)]
struct CalibrationRecord {
    n_qubits: usize,
    shots: u64,
    seed: u64,
    /// `matrix[i][j]`: frequency of outcome `i` for prepared basis state `j`.
    matrix: Vec<Vec<f64>>,
    exact: Vec<Vec<f64>>,
}

pub(super) fn cmd_calibrate(a: &CalibrateArgs) -> Result<(), CliError> {
    let mut backend = a.backend.clone();
    backend.noisy = true;
    let nm = backend.noise_model()?.expect("noisy backend requested");
    if a.qubits == 0 || a.qubits > 8 {
        return Err(CliError::Usage(format!("--qubits must lie in 1..=8, got {}", a.qubits)));
    }
    nm.check_register(a.qubits).map_err(|e| CliError::Usage(e.to_string()))?;
    let rows = |m: &nalgebra::DMatrix<f64>| (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect();
    let record = CalibrationRecord {
        n_qubits: a.qubits,
        shots: nm.shots,
        seed: nm.seed,
        matrix: rows(&readout_calibrate(&nm, a.qubits)?),
        exact: rows(&exact_confusion(&nm, a.qubits)),
    };
    emit(a.out.as_deref(), &to_jsonl(&[record])?)
}
