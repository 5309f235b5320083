//! Derivative-free constrained minimization with linear models over a
//! simplex and a shrinking trust region (COBYLA family).

mod cobyla;
mod subproblem;

use serde::{Deserialize, Serialize};

pub use cobyla::{minimize, minimize_unconstrained, try_minimize};

/// Constraint values at or above `-FEASIBILITY_TOLERANCE` count as satisfied
/// when picking the returned point.
pub const FEASIBILITY_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerConfig {
    /// Initial trust-region radius.
    pub rho_begin: f64,
    /// Final trust-region radius.
    pub rho_end: f64,
    pub max_evaluations: usize,
    /// Stop when the objective settles to within this amount (0 disables).
    pub f_tolerance: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            rho_begin: 0.5,
            rho_end: 1e-4,
            max_evaluations: 100,
            f_tolerance: 1e-4,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<(), OptError> {
        if !(self.rho_end > 0.0 && self.rho_end <= self.rho_begin && self.rho_begin.is_finite()) {
            return Err(OptError::InvalidConfig(format!(
                "need 0 < rho_end <= rho_begin, got {} and {}",
                self.rho_end, self.rho_begin
            )));
        }
        if self.max_evaluations == 0 {
            return Err(OptError::InvalidConfig("max_evaluations must be positive".into()));
        }
        if !(self.f_tolerance >= 0.0) {
            return Err(OptError::InvalidConfig("f_tolerance must be nonnegative".into()));
        }
        Ok(())
    }
}

/// Objective value and constraint values (`c >= 0` means satisfied) at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    pub objective: f64,
    pub constraints: Vec<f64>,
}

impl Evaluation {
    pub fn unconstrained(objective: f64) -> Self {
        Self {
            objective,
            constraints: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub x: Vec<f64>,
    pub f: f64,
    /// `max(0, -min_i c_i)`.
    pub violation: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    /// Trust region shrank to `rho_end`.
    RhoEnd,
    /// Objective settled within `f_tolerance`.
    FTolerance,
    /// Evaluation budget exhausted.
    MaxEvaluations,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptResult {
    pub x_best: Vec<f64>,
    pub f_best: f64,
    pub n_evaluations: usize,
    /// Largest constraint violation at `x_best`; zero when feasible.
    pub constraint_violation: f64,
    pub history: Vec<HistoryEntry>,
    pub stop: StopReason,
}

impl OptResult {
    pub fn is_feasible(&self) -> bool {
        self.constraint_violation <= FEASIBILITY_TOLERANCE
    }

    /// Stopped by a convergence test rather than the budget.
    pub fn converged(&self) -> bool {
        self.stop != StopReason::MaxEvaluations
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OptError {
    #[error("invalid optimizer configuration: {0}")]
    InvalidConfig(String),
    #[error("starting point is empty")]
    EmptyStart,
    #[error("non-finite objective or constraint at x = {x:?}")]
    NonFinite { x: Vec<f64> },
    #[error("constraint count changed from {expected} to {got}")]
    ConstraintCountChanged { expected: usize, got: usize },
}
