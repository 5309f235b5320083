use serde::{Deserialize, Serialize};

use super::device::Device;
use super::{Backend, Problem, PurificationReport, SolveError, SolveResult};
use crate::ansatz::{AnsatzError, AnsatzKind, AnsatzParameters};
use crate::opt::{try_minimize, Evaluation, OptResult, OptimizerConfig};
use crate::sim::refit_parameters;

/// Default overlap bound for the constrained solver.
pub const DEFAULT_EPSILON: f64 = 1e-4;

/// Penalty weights studied for deflation, in Hartree.
pub const BETA_PRESETS: [f64; 5] = [0.0, 1.0, 2.5, 5.0, 10.0];

/// Deflation penalty weights in Hartree. `gamma = 0` gives the overlap-only
/// cost.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VqdConfig {
    pub beta: f64,
    pub gamma: f64,
}

impl VqdConfig {
    pub fn new(beta: f64, gamma: f64) -> Result<Self, SolveError> {
        let c = Self { beta, gamma };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), SolveError> {
        if !(self.beta >= 0.0 && self.beta.is_finite() && self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(SolveError::InvalidInput(format!(
                "penalty weights must be finite and nonnegative, got beta = {} and gamma = {}",
                self.beta, self.gamma
            )));
        }
        Ok(())
    }
}

fn check_lower(kind: AnsatzKind, lower: &[AnsatzParameters]) -> Result<(), SolveError> {
    for l in lower {
        if l.len() != kind.parameter_count() {
            return Err(AnsatzError::ParameterCount {
                expected: kind.parameter_count(),
                got: l.len(),
            }
            .into());
        }
    }
    Ok(())
}

/// Report energy, spin and overlaps at the optimizer's best point, running
/// tomography, purification and the parameter refit on purified backends.
fn conclude(
    device: &mut Device,
    problem: &Problem,
    opt: OptResult,
    lower: &[AnsatzParameters],
) -> Result<SolveResult, SolveError> {
    let mut warnings = Vec::new();
    if !opt.converged() {
        warnings.push(format!(
            "evaluation budget of {} exhausted before convergence; reporting the best point seen",
            opt.n_evaluations
        ));
    }
    if !opt.is_feasible() {
        warnings.push(format!(
            "no evaluated point satisfies the overlap constraints (violation {:.3e})",
            opt.constraint_violation
        ));
    }
    let mut theta = opt.x_best.clone();
    let (energy, s_squared, purification) = if device.purified() {
        let unpurified_energy = device.expectation(&theta, &problem.hamiltonian)?;
        let p = device.purified_state(&theta)?;
        let energy = p.psi.expectation(&problem.hamiltonian)?;
        let s_squared = p.psi.expectation(&problem.s_squared)?;
        let refit = refit_parameters(device.kind(), &p.psi, &AnsatzParameters(theta.clone()))?;
        if p.degenerate {
            warnings.push("dominant eigenvalue of the tomographic state is degenerate".into());
        }
        if refit.poor_fit {
            warnings.push(format!(
                "purified state is poorly represented by the ansatz (fidelity {:.3})",
                refit.fidelity
            ));
        }
        theta = refit.parameters.0;
        let report = PurificationReport {
            unpurified_energy,
            weight: p.weight,
            degenerate: p.degenerate,
            refit_fidelity: refit.fidelity,
        };
        (energy, s_squared, Some(report))
    } else {
        (
            device.expectation(&theta, &problem.hamiltonian)?,
            device.expectation(&theta, &problem.s_squared)?,
            None,
        )
    };
    let overlaps_with_lower = lower
        .iter()
        .map(|l| device.overlap(l.values(), &theta))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SolveResult {
        theta_star: AnsatzParameters(theta),
        energy,
        s_squared,
        overlaps_with_lower,
        converged: opt.converged(),
        feasible: opt.is_feasible(),
        purification,
        warnings,
        optimizer: opt,
    })
}

/// Minimize `<H>` from the ansatz's initial parameters.
pub fn vqe(problem: &Problem, kind: AnsatzKind, backend: &Backend, cfg: &OptimizerConfig) -> Result<SolveResult, SolveError> {
    let mut device = Device::new(kind, backend)?;
    let start = kind.initial_parameters();
    let opt = try_minimize(
        |theta| Ok::<_, SolveError>(Evaluation::unconstrained(device.expectation(theta, &problem.hamiltonian)?)),
        start.values(),
        cfg,
    )?;
    conclude(&mut device, problem, opt, &[])
}

/// Minimize `<H> + beta * sum_i |<Psi(theta_i)|Psi>|^2 + gamma * <S^2>`.
pub fn vqd(
    problem: &Problem,
    kind: AnsatzKind,
    backend: &Backend,
    lower: &[AnsatzParameters],
    penalties: &VqdConfig,
    cfg: &OptimizerConfig,
) -> Result<SolveResult, SolveError> {
    check_lower(kind, lower)?;
    penalties.validate()?;
    let VqdConfig { beta, gamma } = *penalties;
    let mut device = Device::new(kind, backend)?;
    let start = kind.initial_parameters();
    let opt = try_minimize(
        |theta| {
            let mut cost = device.expectation(theta, &problem.hamiltonian)?;
            for l in lower {
                cost += beta * device.overlap(l.values(), theta)?;
            }
            if gamma != 0.0 {
                cost += gamma * device.expectation(theta, &problem.s_squared)?;
            }
            Ok::<_, SolveError>(Evaluation::unconstrained(cost))
        },
        start.values(),
        cfg,
    )?;
    conclude(&mut device, problem, opt, lower)
}

/// Minimize `<H>` subject to `|<Psi(theta_i)|Psi>|^2 <= epsilon` for every
/// lower state.
pub fn vqe_ac(
    problem: &Problem,
    kind: AnsatzKind,
    backend: &Backend,
    lower: &[AnsatzParameters],
    epsilon: f64,
    cfg: &OptimizerConfig,
) -> Result<SolveResult, SolveError> {
    check_lower(kind, lower)?;
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(SolveError::InvalidInput(format!("overlap bound must be nonnegative, got {epsilon}")));
    }
    let mut device = Device::new(kind, backend)?;
    let start = kind.initial_parameters();
    let opt = try_minimize(
        |theta| {
            let objective = device.expectation(theta, &problem.hamiltonian)?;
            let constraints = lower
                .iter()
                .map(|l| Ok(epsilon - device.overlap(l.values(), theta)?))
                .collect::<Result<Vec<_>, SolveError>>()?;
            Ok::<_, SolveError>(Evaluation {
                objective,
                constraints,
            })
        },
        start.values(),
        cfg,
    )?;
    conclude(&mut device, problem, opt, lower)
}

/// `|<Psi(a)|Psi(b)>|^2` on a fresh device.
pub fn measure_overlap(
    a: &AnsatzParameters,
    b: &AnsatzParameters,
    kind: AnsatzKind,
    backend: &Backend,
) -> Result<f64, SolveError> {
    check_lower(kind, &[a.clone(), b.clone()])?;
    Device::new(kind, backend)?.overlap(a.values(), b.values())
}

/// `<S^2>` through the backend's reporting pipeline (purified when enabled).
pub fn measure_s_squared(
    problem: &Problem,
    theta: &AnsatzParameters,
    kind: AnsatzKind,
    backend: &Backend,
) -> Result<f64, SolveError> {
    check_lower(kind, std::slice::from_ref(theta))?;
    let mut device = Device::new(kind, backend)?;
    if device.purified() {
        Ok(device.purified_state(theta.values())?.psi.expectation(&problem.s_squared)?)
    } else {
        device.expectation(theta.values(), &problem.s_squared)
    }
}
