use std::fmt;

use super::SimError;

/// Gate set of the simulator. Angles are in radians.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gate {
    PauliX(usize),
    Ry(usize, f64),
    Rz(usize, f64),
    Hadamard(usize),
    S(usize),
    SDagger(usize),
    Cnot { control: usize, target: usize },
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::PauliX(q) | Gate::Ry(q, _) | Gate::Rz(q, _) | Gate::Hadamard(q) | Gate::S(q) | Gate::SDagger(q) => {
                vec![q]
            }
            Gate::Cnot { control, target } => vec![control, target],
        }
    }

    pub fn is_single_qubit(&self) -> bool {
        !matches!(self, Gate::Cnot { .. })
    }

    pub fn inverse(&self) -> Gate {
        match *self {
            Gate::Ry(q, a) => Gate::Ry(q, -a),
            Gate::Rz(q, a) => Gate::Rz(q, -a),
            Gate::S(q) => Gate::SDagger(q),
            Gate::SDagger(q) => Gate::S(q),
            g => g,
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::PauliX(q) => write!(f, "x q{q}"),
            Gate::Ry(q, a) => write!(f, "ry({a}) q{q}"),
            Gate::Rz(q, a) => write!(f, "rz({a}) q{q}"),
            Gate::Hadamard(q) => write!(f, "h q{q}"),
            Gate::S(q) => write!(f, "s q{q}"),
            Gate::SDagger(q) => write!(f, "sdg q{q}"),
            Gate::Cnot { control, target } => write!(f, "cx q{control}, q{target}"),
        }
    }
}

/// Ordered gate list on a fixed register.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            gates: Vec::new(),
        }
    }

    pub fn from_gates(n_qubits: usize, gates: Vec<Gate>) -> Result<Self, SimError> {
        let mut c = Self::new(n_qubits);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, g: Gate) -> Result<(), SimError> {
        for q in g.qubits() {
            if q >= self.n_qubits {
                return Err(SimError::QubitOutOfRange {
                    qubit: q,
                    n_qubits: self.n_qubits,
                });
            }
        }
        if let Gate::Cnot { control, target } = g {
            if control == target {
                return Err(SimError::ControlIsTarget(control));
            }
        }
        self.gates.push(g);
        Ok(())
    }

    fn chain(mut self, g: Gate) -> Self {
        if let Err(e) = self.push(g) {
            panic!("{e}");
        }
        self
    }

    // Builder helpers panic on invalid qubit indices.
    pub fn x(self, q: usize) -> Self {
        self.chain(Gate::PauliX(q))
    }

    pub fn ry(self, q: usize, angle: f64) -> Self {
        self.chain(Gate::Ry(q, angle))
    }

    pub fn rz(self, q: usize, angle: f64) -> Self {
        self.chain(Gate::Rz(q, angle))
    }

    pub fn h(self, q: usize) -> Self {
        self.chain(Gate::Hadamard(q))
    }

    pub fn sdg(self, q: usize) -> Self {
        self.chain(Gate::SDagger(q))
    }

    pub fn cnot(self, control: usize, target: usize) -> Self {
        self.chain(Gate::Cnot { control, target })
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &Circuit) -> Result<Circuit, SimError> {
        if other.n_qubits != self.n_qubits {
            return Err(SimError::RegisterMismatch {
                expected: self.n_qubits,
                got: other.n_qubits,
            });
        }
        let mut out = self.clone();
        out.gates.extend_from_slice(&other.gates);
        Ok(out)
    }

    /// The adjoint circuit: gates reversed and individually inverted.
    pub fn inverse(&self) -> Circuit {
        Circuit {
            n_qubits: self.n_qubits,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
        }
    }

    pub fn cnot_count(&self) -> usize {
        self.gates.iter().filter(|g| !g.is_single_qubit()).count()
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "qubits {}", self.n_qubits)?;
        for g in &self.gates {
            writeln!(f, "{g}")?;
        }
        Ok(())
    }
}
