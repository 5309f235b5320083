//! Command-line front end: single-point solves, landscape scans, parameter
//! sweeps, the state-averaged driver and readout calibration.
//!
//! Results go to `--out` (or stdout) only after the whole command succeeded,
//! so a failing run never leaves a partial file behind.

mod driver;
mod landscape;
mod record;
mod sweep;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::ansatz::AnsatzKind;
use crate::chem::{parse_fcidump, ChemError, Fcidump};
use crate::opt::OptimizerConfig;
use crate::sim::{NoiseModel, SimError};
use crate::solve::{Backend, SolveError, DEFAULT_EPSILON};

pub use landscape::{scan_landscape, Landscape, StationaryClass, StationaryPointReport, CLASS_TOLERANCE, MIN_GRID};
pub use record::{solve_records, Method, SolveRecord, SolveRequest, KCAL_PER_HARTREE};
pub use sweep::{run_sweep, sweep_csv, SweepAxis, SweepRow, SWEEP_CSV_HEADER};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PARSE: i32 = 3;
pub const EXIT_SOLVER: i32 = 4;
pub const EXIT_EXTERNAL: i32 = 5;
pub const EXIT_IO: i32 = 6;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{0}")]
    Parse(String),
    #[error("solver failed: {0}")]
    Solver(String),
    #[error("{0}")]
    External(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Parse(_) => EXIT_PARSE,
            CliError::Solver(_) => EXIT_SOLVER,
            CliError::External(_) => EXIT_EXTERNAL,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

impl From<SolveError> for CliError {
    fn from(e: SolveError) -> Self {
        CliError::Solver(e.to_string())
    }
}

impl From<ChemError> for CliError {
    fn from(e: ChemError) -> Self {
        match e {
            ChemError::Parse { .. } => CliError::Parse(e.to_string()),
            ChemError::Io { .. } => CliError::Io(e.to_string()),
            ChemError::Solve(s) => s.into(),
            ChemError::External { .. } | ChemError::MissingOutput(_) => CliError::External(e.to_string()),
            ChemError::InvalidConfig(m) => CliError::Usage(m),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Io(_) => CliError::Io(e.to_string()),
            SimError::InvalidNoise(_) => CliError::Parse(e.to_string()),
            other => CliError::Solver(other.to_string()),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "vqcas", version, about = "Variational active-space solver for CAS(2,2) problems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve for one or more states and emit one JSON record per state.
    Solve(SolveArgs),
    /// Scan the spin-restricted energy landscape and classify stationary points.
    Landscape(LandscapeArgs),
    /// Repeat a solve over penalty weights or noise levels and emit a CSV table.
    Sweep(SweepArgs),
    /// State-averaged macro-iterations with an external orbital optimizer.
    SaDriver(DriverArgs),
    /// Sample and print the readout calibration matrix of a noise model.
    Calibrate(CalibrateArgs),
}

#[derive(Args, Debug, Clone)]
pub struct BackendArgs {
    /// TOML noise model; selects the noisy sampled backend.
    #[arg(long)]
    pub noise_config: Option<PathBuf>,
    /// Use the noisy backend with the default noise model.
    #[arg(long)]
    pub noisy: bool,
    /// Shots per measured circuit (noisy backend only).
    #[arg(long)]
    pub shots: Option<u64>,
    /// Seed for the noisy backend.
    #[arg(long, env = "VQCAS_SEED")]
    pub seed: Option<u64>,
    /// Skip readout-error mitigation.
    #[arg(long)]
    pub no_mitigation: bool,
    /// Skip tomography purification at convergence.
    #[arg(long)]
    pub no_purification: bool,
}

impl BackendArgs {
    pub fn noise_model(&self) -> Result<Option<NoiseModel>, CliError> {
        let mut nm = match (&self.noise_config, self.noisy) {
            (Some(path), _) => NoiseModel::from_file(path)?,
            (None, true) => NoiseModel::default(),
            (None, false) => {
                if self.shots.is_some() || self.no_mitigation || self.no_purification {
                    return Err(CliError::Usage(
                        "--shots and the mitigation switches need --noisy or --noise-config".into(),
                    ));
                }
                return Ok(None);
            }
        };
        if let Some(shots) = self.shots {
            nm = nm.with_shots(shots);
        }
        if let Some(seed) = self.seed {
            nm = nm.with_seed(seed);
        }
        nm.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(Some(nm))
    }

    pub fn backend(&self) -> Result<Backend, CliError> {
        Ok(match self.noise_model()? {
            None => Backend::Statevector,
            Some(noise) => Backend::NoisySampled {
                noise,
                mitigated: !self.no_mitigation,
                purified: !self.no_purification,
            },
        })
    }
}

#[derive(Args, Debug, Clone)]
pub struct MethodArgs {
    /// Ansatz: sr, ra(D) or esu2(D).
    #[arg(long, default_value = "sr")]
    pub ansatz: AnsatzKind,
    #[arg(long, value_enum, default_value = "vqe")]
    pub method: Method,
    /// Number of states (default 1 for vqe, 2 otherwise).
    #[arg(long)]
    pub states: Option<usize>,
    /// Overlap penalty weight for vqd (Hartree).
    #[arg(long, default_value_t = 5.0)]
    pub beta: f64,
    /// Spin penalty weight for vqd (Hartree).
    #[arg(long, default_value_t = 0.0)]
    pub gamma: f64,
    /// Overlap bound for vqeac.
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,
    /// Optimizer evaluation budget.
    #[arg(long, default_value_t = OptimizerConfig::default().max_evaluations)]
    pub max_evaluations: usize,
}

impl MethodArgs {
    pub fn request(&self, backend: Backend) -> SolveRequest {
        SolveRequest {
            ansatz: self.ansatz,
            method: self.method,
            states: self.states.unwrap_or(if self.method == Method::Vqe { 1 } else { 2 }),
            beta: self.beta,
            gamma: self.gamma,
            epsilon: self.epsilon,
            backend,
            optimizer: OptimizerConfig {
                max_evaluations: self.max_evaluations,
                ..OptimizerConfig::default()
            },
        }
    }
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[arg(long)]
    pub fcidump: PathBuf,
    #[command(flatten)]
    pub method: MethodArgs,
    #[command(flatten)]
    pub backend: BackendArgs,
    /// JSONL output file (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct LandscapeArgs {
    #[arg(long)]
    pub fcidump: PathBuf,
    /// Grid points per axis over [-pi, pi].
    #[arg(long, default_value_t = 201)]
    pub grid: usize,
    /// CSV file for the energy grid (theta0, theta1, energy).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// CSV file for the orthogonality locus against the ground state.
    #[arg(long)]
    pub locus: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(long)]
    pub fcidump: PathBuf,
    #[command(flatten)]
    pub method: MethodArgs,
    #[command(flatten)]
    pub backend: BackendArgs,
    /// Comma-separated penalty weights; forces --method vqd.
    #[arg(long, value_delimiter = ',')]
    pub betas: Vec<f64>,
    /// Comma-separated noise scale factors applied to the noise model.
    #[arg(long, value_delimiter = ',')]
    pub noise_levels: Vec<f64>,
    /// CSV output file (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct DriverArgs {
    #[arg(long)]
    pub fcidump: PathBuf,
    #[command(flatten)]
    pub method: MethodArgs,
    #[command(flatten)]
    pub backend: BackendArgs,
    /// Comma-separated state weights (default: equal).
    #[arg(long, value_delimiter = ',')]
    pub weights: Vec<f64>,
    /// Orbital-update command with {fcidump}, {rdm} and {out} placeholders.
    /// Without it a single iteration is run.
    #[arg(long)]
    pub command: Option<String>,
    #[arg(long, default_value_t = 100)]
    pub max_iterations: usize,
    /// Averaged-energy convergence threshold (Hartree).
    #[arg(long, default_value_t = 1e-4)]
    pub threshold: f64,
    /// Directory for RDM files and updated integrals.
    #[arg(long, default_value = "vqcas-work")]
    pub work_dir: PathBuf,
    /// JSONL output file for the macro-iteration records (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CalibrateArgs {
    #[command(flatten)]
    pub backend: BackendArgs,
    #[arg(long, default_value_t = crate::ansatz::N_QUBITS)]
    pub qubits: usize,
    /// JSON output file (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub(crate) fn load_fcidump(path: &Path) -> Result<Fcidump, CliError> {
    if !path.is_file() {
        return Err(CliError::Parse(format!("{}: no such FCIDUMP file", path.display())));
    }
    Ok(parse_fcidump(path)?)
}

pub(crate) fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Io(format!("stdout: {e}")))
        }
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Solve(a) => driver::cmd_solve(&a),
        Command::Landscape(a) => landscape::cmd_landscape(&a),
        Command::Sweep(a) => sweep::cmd_sweep(&a),
        Command::SaDriver(a) => driver::cmd_sa_driver(&a),
        Command::Calibrate(a) => driver::cmd_calibrate(&a),
    }
}

/// Parse arguments, run and return the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("vqcas: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn argument_definitions_are_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn shots_without_noise_is_usage_error() {
        let cli = Cli::try_parse_from(["vqcas", "solve", "--fcidump", "x", "--shots", "10"]).unwrap();
        let Command::Solve(a) = cli.command else { panic!() };
        assert_eq!(a.backend.backend().unwrap_err().exit_code(), EXIT_USAGE);
    }

    #[test]
    fn seed_and_shots_override_noise_model() {
        let cli =
            Cli::try_parse_from(["vqcas", "solve", "--fcidump", "x", "--noisy", "--shots", "100", "--seed", "9"]).unwrap();
        let Command::Solve(a) = cli.command else { panic!() };
        match a.backend.backend().unwrap() {
            Backend::NoisySampled { noise, mitigated, purified } => {
                assert_eq!((noise.shots, noise.seed), (100, 9));
                assert!(mitigated && purified);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn ansatz_and_method_parse() {
        let cli = Cli::try_parse_from([
            "vqcas", "solve", "--fcidump", "x", "--ansatz", "ra(2)", "--method", "vqeac", "--epsilon", "1e-3",
        ])
        .unwrap();
        let Command::Solve(a) = cli.command else { panic!() };
        let request = a.method.request(Backend::Statevector);
        assert_eq!(request.ansatz, AnsatzKind::RealAmplitudes(2));
        assert_eq!((request.method, request.states, request.epsilon), (Method::VqeAc, 2, 1e-3));
        assert!(Cli::try_parse_from(["vqcas", "solve", "--fcidump", "x", "--ansatz", "ra(0)"]).is_err());
    }
}
