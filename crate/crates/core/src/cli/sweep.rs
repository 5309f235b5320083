use std::fmt::Write as _;

use rayon::prelude::*;

use super::record::{solve_records, Method, SolveRequest};
use super::{emit, load_fcidump, CliError, SweepArgs};
use crate::qop::{ActiveSpaceIntegrals, SectorSpec};
use crate::solve::Backend;

/// Column order of the sweep table. Changing it breaks downstream plots.
pub const SWEEP_CSV_HEADER: &str = "axis,value,method,ansatz,backend,seed,state,energy,exact_energy,\
delta_e_hartree,delta_e_kcal_mol,s_squared,converged,feasible,n_evaluations";

#[derive(Clone, Debug, PartialEq)]
pub enum SweepAxis {
    /// Deflation penalty weights; every entry runs vqd.
    Beta(Vec<f64>),
    /// Multipliers of every error rate in the noise model.
    NoiseLevel(Vec<f64>),
}

impl SweepAxis {
    fn name(&self) -> &'static str {
        match self {
            SweepAxis::Beta(_) => "beta",
            SweepAxis::NoiseLevel(_) => "noise-level",
        }
    }

    fn values(&self) -> &[f64] {
        match self {
            SweepAxis::Beta(v) | SweepAxis::NoiseLevel(v) => v,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub axis: &'static str,
    pub value: f64,
    pub method: String,
    pub ansatz: String,
    pub backend: String,
    pub seed: Option<u64>,
    pub state: usize,
    pub energy: f64,
    pub exact_energy: f64,
    pub delta_e_hartree: f64,
    pub delta_e_kcal_mol: f64,
    pub s_squared: f64,
    pub converged: bool,
    pub feasible: bool,
    pub n_evaluations: usize,
}

impl SweepRow {
    fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{:.10},{:.10},{:.10},{:.6},{:.10},{},{},{}",
            self.axis,
            self.value,
            self.method,
            self.ansatz,
            self.backend,
            self.seed.map(|s| s.to_string()).unwrap_or_default(),
            self.state,
            self.energy,
            self.exact_energy,
            self.delta_e_hartree,
            self.delta_e_kcal_mol,
            self.s_squared,
            self.converged,
            self.feasible,
            self.n_evaluations
        )
    }
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from(SWEEP_CSV_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(s, "{}", r.csv_line());
    }
    s
}

/// Solve once per sweep value, all entries sharing `base`'s seed. Rows come
/// back in sweep order, ground state first within each entry.
pub fn run_sweep(
    ints: &ActiveSpaceIntegrals,
    sector: &SectorSpec,
    base: &SolveRequest,
    axis: &SweepAxis,
) -> Result<Vec<SweepRow>, CliError> {
    let values = axis.values();
    if values.is_empty() {
        return Err(CliError::Usage("empty sweep list".into()));
    }
    if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(CliError::Usage("sweep values must be finite and nonnegative".into()));
    }
    let requests: Vec<SolveRequest> = values
        .iter()
        .map(|&v| match axis {
            SweepAxis::Beta(_) => Ok(SolveRequest {
                method: Method::Vqd,
                beta: v,
                states: base.states.max(2),
                ..base.clone()
            }),
            SweepAxis::NoiseLevel(_) => match &base.backend {
                Backend::Statevector => Err(CliError::Usage("a noise-level sweep needs a noisy backend".into())),
                Backend::NoisySampled {
                    noise,
                    mitigated,
                    purified,
                } => Ok(SolveRequest {
                    backend: Backend::NoisySampled {
                        noise: noise.scaled(v),
                        mitigated: *mitigated,
                        purified: *purified,
                    },
                    ..base.clone()
                }),
            },
        })
        .collect::<Result<_, _>>()?;
    for s in &requests {
        s.validate()?;
    }
    let per_entry: Vec<Vec<SweepRow>> = requests
        .par_iter()
        .zip(values.par_iter())
        .map(|(request, &value)| {
            let records = solve_records(ints, sector, request)?;
            Ok(records
                .into_iter()
                .map(|r| SweepRow {
                    axis: axis.name(),
                    value,
                    method: r.method,
                    ansatz: r.ansatz,
                    backend: r.backend,
                    seed: r.seed,
                    state: r.state,
                    energy: r.energy,
                    exact_energy: r.exact_energy,
                    delta_e_hartree: r.delta_e_hartree,
                    delta_e_kcal_mol: r.delta_e_kcal_mol,
                    s_squared: r.s_squared,
                    converged: r.converged,
                    feasible: r.feasible,
                    n_evaluations: r.optimizer.map_or(0, |o| o.n_evaluations),
                })
                .collect())
        })
        .collect::<Result<_, CliError>>()?;
    Ok(per_entry.into_iter().flatten().collect())
}

pub(super) fn cmd_sweep(a: &SweepArgs) -> Result<(), CliError> {
    let axis = match (a.betas.is_empty(), a.noise_levels.is_empty()) {
        (false, true) => SweepAxis::Beta(a.betas.clone()),
        (true, false) => SweepAxis::NoiseLevel(a.noise_levels.clone()),
        (true, true) => return Err(CliError::Usage("empty sweep list: give --betas or --noise-levels".into())),
        (false, false) => return Err(CliError::Usage("give either --betas or --noise-levels, not both".into())),
    };
    let base = a.method.request(a.backend.backend()?);
    let data = load_fcidump(&a.fcidump)?;
    let sector = data.sector()?;
    let rows = run_sweep(&data.integrals, &sector, &base, &axis)?;
    emit(a.out.as_deref(), &sweep_csv(&rows))
}
