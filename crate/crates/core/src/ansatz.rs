//! Parameterized two-qubit circuit families.
//!
//! The spin-restricted ansatz spans exactly the three singlet configurations
//! of two electrons in two orbitals:
//!
//! ```text
//! |psi> = (s - c cos t1)/sqrt2 |01> + (s + c cos t1)/sqrt2 |10>
//!       + c sin t1 / sqrt2 (|00> + |11>),   s = sin(t0/2 + pi/4), c = cos(t0/2 + pi/4)
//! ```

use std::f64::consts::{FRAC_PI_4, PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::sim::{Circuit, Statevector};

/// Register size shared by every ansatz family here.
pub const N_QUBITS: usize = 2;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AnsatzError {
    #[error("expected {expected} parameters, got {got}")]
    ParameterCount { expected: usize, got: usize },
    #[error("unknown ansatz {0:?} (expected spin-restricted, ra(D) or esu2(D))")]
    UnknownKind(String),
    #[error("ansatz depth must be positive")]
    ZeroDepth,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "family", content = "depth", rename_all = "kebab-case")]
pub enum AnsatzKind {
    SpinRestricted,
    RealAmplitudes(usize),
    EfficientSu2(usize),
}

impl AnsatzKind {
    pub fn n_qubits(&self) -> usize {
        N_QUBITS
    }

    pub fn parameter_count(&self) -> usize {
        match *self {
            AnsatzKind::SpinRestricted => 2,
            AnsatzKind::RealAmplitudes(d) => N_QUBITS * (d + 1),
            AnsatzKind::EfficientSu2(d) => 2 * N_QUBITS * (d + 1),
        }
    }

    /// `(0, pi)` (the closed-shell reference) for the spin-restricted
    /// ansatz, zeros otherwise.
    pub fn initial_parameters(&self) -> AnsatzParameters {
        match self {
            AnsatzKind::SpinRestricted => AnsatzParameters(vec![0.0, PI]),
            _ => AnsatzParameters(vec![0.0; self.parameter_count()]),
        }
    }

    pub fn is_spin_restricted(&self) -> bool {
        matches!(self, AnsatzKind::SpinRestricted)
    }
}

impl fmt::Display for AnsatzKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnsatzKind::SpinRestricted => write!(f, "spin-restricted"),
            AnsatzKind::RealAmplitudes(d) => write!(f, "ra({d})"),
            AnsatzKind::EfficientSu2(d) => write!(f, "esu2({d})"),
        }
    }
}

impl FromStr for AnsatzKind {
    type Err = AnsatzError;

    /// Accepts `spin-restricted`/`sr`, `ra(D)`/`real-amplitudes(D)` and
    /// `esu2(D)`/`efficient-su2(D)`, case-insensitively.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        if matches!(lower.as_str(), "sr" | "spin-restricted" | "spinrestricted") {
            return Ok(AnsatzKind::SpinRestricted);
        }
        let unknown = || AnsatzError::UnknownKind(s.to_string());
        let (name, rest) = lower.split_once('(').ok_or_else(unknown)?;
        let depth: usize = rest.strip_suffix(')').ok_or_else(unknown)?.trim().parse().map_err(|_| unknown())?;
        if depth == 0 {
            return Err(AnsatzError::ZeroDepth);
        }
        match name.trim() {
            "ra" | "real-amplitudes" | "realamplitudes" => Ok(AnsatzKind::RealAmplitudes(depth)),
            "esu2" | "efficient-su2" | "efficientsu2" => Ok(AnsatzKind::EfficientSu2(depth)),
            _ => Err(unknown()),
        }
    }
}

/// Variational angles in radians.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AnsatzParameters(pub Vec<f64>);

impl AnsatzParameters {
    pub fn for_kind(kind: AnsatzKind, values: Vec<f64>) -> Result<Self, AnsatzError> {
        check_count(kind, values.len())?;
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn check_count(kind: AnsatzKind, got: usize) -> Result<(), AnsatzError> {
    let expected = kind.parameter_count();
    if got != expected {
        return Err(AnsatzError::ParameterCount { expected, got });
    }
    Ok(())
}

/// Circuit preparing the ansatz state from `|00>`.
pub fn build(kind: AnsatzKind, theta: &[f64]) -> Result<Circuit, AnsatzError> {
    check_count(kind, theta.len())?;
    let c = Circuit::new(N_QUBITS);
    Ok(match kind {
        // X on q1 gives |10>; Ry(t0) on q0 and a CNOT rotate it into
        // sin(t0/2)|01> + cos(t0/2)|10>; the opposite Ry pair mixes the
        // antisymmetric combination into |00> + |11>.
        AnsatzKind::SpinRestricted => c.x(1).ry(0, theta[0]).cnot(0, 1).ry(0, theta[1]).ry(1, -theta[1]),
        AnsatzKind::RealAmplitudes(d) => {
            let mut c = c;
            for layer in 0..=d {
                if layer > 0 {
                    c = c.cnot(0, 1);
                }
                for q in 0..N_QUBITS {
                    c = c.ry(q, theta[layer * N_QUBITS + q]);
                }
            }
            c
        }
        AnsatzKind::EfficientSu2(d) => {
            let mut c = c;
            for layer in 0..=d {
                if layer > 0 {
                    c = c.cnot(0, 1);
                }
                let base = layer * 2 * N_QUBITS;
                for q in 0..N_QUBITS {
                    c = c.ry(q, theta[base + q]);
                }
                for q in 0..N_QUBITS {
                    c = c.rz(q, theta[base + N_QUBITS + q]);
                }
            }
            c
        }
    })
}

/// Closed-form spin-restricted state.
pub fn spin_restricted_state(theta0: f64, theta1: f64) -> Statevector {
    let a = theta0 / 2.0 + FRAC_PI_4;
    let (s, c) = a.sin_cos();
    let (s1, c1) = theta1.sin_cos();
    let open = c * s1 / SQRT_2;
    Statevector::from_real(&[open, (s - c * c1) / SQRT_2, (s + c * c1) / SQRT_2, open])
        .expect("closed form is normalized")
}
