use nalgebra::DMatrix;
use num_complex::Complex64;

use super::circuit::{Circuit, Gate};
use super::noise::NoiseModel;
use super::statevector::{apply_gate, check_observable, Statevector};
use super::SimError;
use crate::qop::QubitOperator;

/// Mixed state of an `n`-qubit register.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    entries: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Accepts a square `2^n` matrix that is Hermitian (1e-10), has unit
    /// trace (1e-8) and no eigenvalue below -1e-6.
    pub fn new(entries: DMatrix<Complex64>) -> Result<Self, SimError> {
        let d = entries.nrows();
        if d != entries.ncols() || d < 2 || !d.is_power_of_two() {
            return Err(SimError::InvalidState(format!("{}x{} is not a 2^n square", d, entries.ncols())));
        }
        let herm = (&entries - entries.adjoint()).iter().map(|c| c.norm()).fold(0.0, f64::max);
        if herm > 1e-10 {
            return Err(SimError::InvalidState(format!("not Hermitian (deviation {herm:e})")));
        }
        let tr = entries.trace();
        if (tr.re - 1.0).abs() > 1e-8 || tr.im.abs() > 1e-8 {
            return Err(SimError::InvalidState(format!("trace {tr} != 1")));
        }
        let min = entries.clone().symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min);
        if min < -1e-6 {
            return Err(SimError::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self { entries })
    }

    pub(crate) fn from_entries_unchecked(entries: DMatrix<Complex64>) -> Self {
        Self { entries }
    }

    pub fn from_pure(psi: &Statevector) -> Self {
        let v = nalgebra::DVector::from_column_slice(psi.amplitudes());
        Self {
            entries: &v * v.adjoint(),
        }
    }

    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let d = 1 << n_qubits;
        Self {
            entries: DMatrix::identity(d, d) / Complex64::new(d as f64, 0.0),
        }
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn n_qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace().re
    }

    /// `Tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        self.entries.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Diagonal in the computational basis, clipped at zero.
    pub fn probabilities(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.entries[(i, i)].re.max(0.0)).collect()
    }

    /// `<psi|rho|psi>`.
    pub fn fidelity_with(&self, psi: &Statevector) -> f64 {
        let v = nalgebra::DVector::from_column_slice(psi.amplitudes());
        (v.adjoint() * &self.entries * &v)[(0, 0)].re
    }

    /// Frobenius distance to another density matrix.
    pub fn distance(&self, other: &DensityMatrix) -> f64 {
        (&self.entries - &other.entries).norm()
    }

    /// `Tr(rho op)`; `op` must be Hermitian.
    pub fn expectation(&self, op: &QubitOperator) -> Result<f64, SimError> {
        check_observable(op, self.n_qubits())?;
        let mut total = Complex64::new(0.0, 0.0);
        for t in op.terms() {
            let mut acc = Complex64::new(0.0, 0.0);
            for b in 0..self.dim() {
                let (phase, out) = t.word.apply_to_basis(b);
                acc += self.entries[(b, out)] * phase;
            }
            total += t.coefficient * acc;
        }
        Ok(total.re)
    }

    /// `rho -> U rho U^dagger` for one gate.
    fn apply_unitary(&mut self, g: &Gate) {
        let d = self.dim();
        for col in self.entries.as_mut_slice().chunks_mut(d) {
            apply_gate(g, col);
        }
        // (U (U rho)^dagger)^dagger = U rho U^dagger
        let mut m = self.entries.adjoint();
        for col in m.as_mut_slice().chunks_mut(d) {
            apply_gate(g, col);
        }
        self.entries = m.adjoint();
    }

    /// `rho -> (1 - p) rho + p Tr_q(rho) (x) I/2` on qubit `q`.
    pub fn depolarize(&mut self, q: usize, p: f64) {
        if p == 0.0 {
            return;
        }
        let d = self.dim();
        let m = 1usize << q;
        let old = self.entries.clone();
        for j in 0..d {
            for i in 0..d {
                let mut v = old[(i, j)] * (1.0 - p);
                if (i ^ j) & m == 0 {
                    v += (old[(i & !m, j & !m)] + old[(i | m, j | m)]) * (0.5 * p);
                }
                self.entries[(i, j)] = v;
            }
        }
    }

    /// Apply a circuit with gate noise from `nm`.
    pub fn evolve(&mut self, c: &Circuit, nm: &NoiseModel) -> Result<(), SimError> {
        if c.n_qubits() != self.n_qubits() {
            return Err(SimError::RegisterMismatch {
                expected: self.n_qubits(),
                got: c.n_qubits(),
            });
        }
        for g in c.gates() {
            self.apply_unitary(g);
            let p = if g.is_single_qubit() { nm.p1 } else { nm.p2 };
            for q in g.qubits() {
                self.depolarize(q, p);
            }
        }
        Ok(())
    }
}

/// Noisy evolution of `|0...0><0...0|` through `c`.
pub fn run_density(c: &Circuit, nm: &NoiseModel) -> DensityMatrix {
    let mut rho = DensityMatrix::from_pure(&Statevector::basis(c.n_qubits(), 0));
    rho.evolve(c, nm).expect("register sizes agree by construction");
    rho
}
