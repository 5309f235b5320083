use num_complex::Complex64;

use super::circuit::{Circuit, Gate};
use super::SimError;
use crate::qop::QubitOperator;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

type Mat2 = [[Complex64; 2]; 2];

fn single_qubit_matrix(g: &Gate) -> Option<(usize, Mat2)> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let i = Complex64::i();
    Some(match *g {
        Gate::PauliX(q) => (q, [[ZERO, ONE], [ONE, ZERO]]),
        Gate::Ry(q, a) => {
            let (s, c) = (a / 2.0).sin_cos();
            (q, [[c.into(), (-s).into()], [s.into(), c.into()]])
        }
        Gate::Rz(q, a) => (q, [[Complex64::from_polar(1.0, -a / 2.0), ZERO], [ZERO, Complex64::from_polar(1.0, a / 2.0)]]),
        Gate::Hadamard(q) => (q, [[r.into(), r.into()], [r.into(), (-r).into()]]),
        Gate::S(q) => (q, [[ONE, ZERO], [ZERO, i]]),
        Gate::SDagger(q) => (q, [[ONE, ZERO], [ZERO, -i]]),
        Gate::Cnot { .. } => return None,
    })
}

/// Apply one gate in place to a vector of `2^n` amplitudes.
pub(crate) fn apply_gate(g: &Gate, amps: &mut [Complex64]) {
    match single_qubit_matrix(g) {
        Some((q, u)) => {
            let m = 1usize << q;
            for i in 0..amps.len() {
                if i & m == 0 {
                    let (a, b) = (amps[i], amps[i | m]);
                    amps[i] = u[0][0] * a + u[0][1] * b;
                    amps[i | m] = u[1][0] * a + u[1][1] * b;
                }
            }
        }
        None => {
            if let Gate::Cnot { control, target } = *g {
                let (c, t) = (1usize << control, 1usize << target);
                for i in 0..amps.len() {
                    if i & c != 0 && i & t == 0 {
                        amps.swap(i, i | t);
                    }
                }
            }
        }
    }
}

/// Pure state of an `n`-qubit register; qubit `q` is bit `q` of the index.
#[derive(Clone, Debug, PartialEq)]
pub struct Statevector {
    amplitudes: Vec<Complex64>,
}

impl Statevector {
    /// Validates length `2^n` and unit norm within 1e-10.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self, SimError> {
        if amplitudes.len() < 2 || !amplitudes.len().is_power_of_two() {
            return Err(SimError::InvalidState(format!("length {} is not 2^n", amplitudes.len())));
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(SimError::InvalidState(format!("norm {norm} != 1")));
        }
        Ok(Self { amplitudes })
    }

    /// Normalizes the input; fails on a zero vector.
    pub fn normalized(mut amplitudes: Vec<Complex64>) -> Result<Self, SimError> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(SimError::InvalidState("cannot normalize".into()));
        }
        for a in &mut amplitudes {
            *a /= norm;
        }
        Self::new(amplitudes)
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self, SimError> {
        Self::new(amplitudes.iter().map(|&a| Complex64::new(a, 0.0)).collect())
    }

    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let mut amplitudes = vec![ZERO; 1 << n_qubits];
        amplitudes[index] = ONE;
        Self { amplitudes }
    }

    pub fn n_qubits(&self) -> usize {
        self.amplitudes.len().trailing_zeros() as usize
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Statevector) -> Complex64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum()
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &Statevector) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// Equality modulo a global phase, amplitude-wise within `tol`.
    pub fn equals_up_to_phase(&self, other: &Statevector, tol: f64) -> bool {
        if self.amplitudes.len() != other.amplitudes.len() {
            return false;
        }
        let ov = self.inner(other);
        if ov.norm() < 1e-300 {
            return false;
        }
        let phase = ov / ov.norm();
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .all(|(a, b)| (a * phase - b).norm() <= tol)
    }

    pub fn apply(&mut self, c: &Circuit) -> Result<(), SimError> {
        if c.n_qubits() != self.n_qubits() {
            return Err(SimError::RegisterMismatch {
                expected: self.n_qubits(),
                got: c.n_qubits(),
            });
        }
        for g in c.gates() {
            apply_gate(g, &mut self.amplitudes);
        }
        Ok(())
    }

    /// `<psi|op|psi>`; `op` must be Hermitian.
    pub fn expectation(&self, op: &QubitOperator) -> Result<f64, SimError> {
        check_observable(op, self.n_qubits())?;
        let mut total = ZERO;
        for t in op.terms() {
            let mut acc = ZERO;
            for (b, amp) in self.amplitudes.iter().enumerate() {
                let (phase, out) = t.word.apply_to_basis(b);
                acc += self.amplitudes[out].conj() * phase * amp;
            }
            total += t.coefficient * acc;
        }
        Ok(total.re)
    }
}

pub(crate) fn check_observable(op: &QubitOperator, n_qubits: usize) -> Result<(), SimError> {
    if op.n_qubits() != n_qubits {
        return Err(SimError::RegisterMismatch {
            expected: n_qubits,
            got: op.n_qubits(),
        });
    }
    if !op.is_hermitian() {
        return Err(SimError::NotHermitian);
    }
    Ok(())
}

/// Exact output of `c` applied to `|0...0>`.
pub fn run_statevector(c: &Circuit) -> Statevector {
    let mut psi = Statevector::basis(c.n_qubits(), 0);
    for g in c.gates() {
        apply_gate(g, &mut psi.amplitudes);
    }
    psi
}
