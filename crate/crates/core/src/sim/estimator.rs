use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::circuit::Circuit;
use super::density::DensityMatrix;
use super::mitigation::{mitigate_counts, readout_calibrate_with};
use super::noise::NoiseModel;
use super::sampling::sample_counts_with;
use super::statevector::check_observable;
use super::SimError;
use crate::qop::{Pauli, PauliWord, QubitOperator};

/// Largest register accepted by [`tomography`].
pub const MAX_TOMOGRAPHY_QUBITS: usize = 4;

/// Sampled expectation value with its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

/// Terms measurable in one shared product basis.
#[derive(Clone, Debug)]
pub struct MeasurementGroup {
    /// Basis letter per qubit; `Pauli::I` where no term acts.
    pub basis: Vec<Pauli>,
    pub terms: Vec<(f64, u64)>,
}

/// Greedy qubit-wise commuting partition of the non-identity terms.
/// Returns the identity coefficient and the groups.
pub fn group_terms(op: &QubitOperator) -> (f64, Vec<MeasurementGroup>) {
    let n = op.n_qubits();
    let mut constant = 0.0;
    let mut groups: Vec<MeasurementGroup> = Vec::new();
    for t in op.terms() {
        if t.word.is_identity() {
            constant += t.coefficient.re;
            continue;
        }
        let letters: Vec<Pauli> = (0..n).map(|q| t.word.get(q)).collect();
        let slot = groups.iter_mut().find(|g| {
            g.basis
                .iter()
                .zip(&letters)
                .all(|(a, b)| *a == Pauli::I || *b == Pauli::I || a == b)
        });
        let entry = (t.coefficient.re, t.word.support());
        match slot {
            Some(g) => {
                for (a, b) in g.basis.iter_mut().zip(&letters) {
                    if *a == Pauli::I {
                        *a = *b;
                    }
                }
                g.terms.push(entry);
            }
            None => groups.push(MeasurementGroup {
                basis: letters,
                terms: vec![entry],
            }),
        }
    }
    (constant, groups)
}

/// Gates rotating the given product basis onto Z.
pub fn basis_change(basis: &[Pauli]) -> Circuit {
    let mut c = Circuit::new(basis.len());
    for (q, p) in basis.iter().enumerate() {
        match p {
            Pauli::X => c = c.h(q),
            Pauli::Y => c = c.sdg(q).h(q),
            _ => {}
        }
    }
    c
}

fn parity(b: usize, mask: u64) -> f64 {
    if (b as u64 & mask).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Shot-based measurement engine owning one generator stream and, when
/// mitigation is on, a readout calibration taken at construction.
#[derive(Clone, Debug)]
pub struct Estimator {
    nm: NoiseModel,
    n_qubits: usize,
    calibration: Option<DMatrix<f64>>,
    rng: ChaCha8Rng,
}

impl Estimator {
    pub fn new(nm: NoiseModel, n_qubits: usize, mitigated: bool) -> Result<Self, SimError> {
        nm.validate()?;
        nm.check_register(n_qubits)?;
        let mut rng = ChaCha8Rng::seed_from_u64(nm.seed);
        let calibration = if mitigated {
            Some(readout_calibrate_with(&nm, n_qubits, &mut rng)?)
        } else {
            None
        };
        Ok(Self {
            nm,
            n_qubits,
            calibration,
            rng,
        })
    }

    pub fn noise(&self) -> &NoiseModel {
        &self.nm
    }

    pub fn calibration(&self) -> Option<&DMatrix<f64>> {
        self.calibration.as_ref()
    }

    pub fn is_mitigated(&self) -> bool {
        self.calibration.is_some()
    }

    /// Outcome distribution of `c` measured after `basis_changes`,
    /// mitigated when a calibration is present.
    pub fn distribution(&mut self, c: &Circuit, basis_changes: &Circuit) -> Result<Vec<f64>, SimError> {
        if c.n_qubits() != self.n_qubits {
            return Err(SimError::RegisterMismatch {
                expected: self.n_qubits,
                got: c.n_qubits(),
            });
        }
        let counts = sample_counts_with(c, basis_changes, &self.nm, &mut self.rng)?;
        match &self.calibration {
            Some(a) => mitigate_counts(&counts, a),
            None => Ok(counts.frequencies()),
        }
    }

    /// Probability of the all-zeros outcome.
    pub fn zero_probability(&mut self, c: &Circuit) -> Result<f64, SimError> {
        Ok(self.distribution(c, &Circuit::new(c.n_qubits()))?[0])
    }

    pub fn estimate(&mut self, c: &Circuit, op: &QubitOperator) -> Result<Estimate, SimError> {
        check_observable(op, self.n_qubits)?;
        let (constant, groups) = group_terms(op);
        let shots = self.nm.shots as f64;
        let mut value = constant;
        let mut variance = 0.0;
        for g in &groups {
            let p = self.distribution(c, &basis_change(&g.basis))?;
            let mut mean = 0.0;
            let mut second = 0.0;
            for (b, &pb) in p.iter().enumerate() {
                let f: f64 = g.terms.iter().map(|&(coef, mask)| coef * parity(b, mask)).sum();
                mean += pb * f;
                second += pb * f * f;
            }
            value += mean;
            variance += (second - mean * mean).max(0.0) / shots;
        }
        Ok(Estimate {
            value,
            stderr: variance.sqrt(),
        })
    }

    /// Linear-inversion state tomography over all `3^n` product bases,
    /// projected onto the set of density matrices.
    pub fn tomography(&mut self, c: &Circuit) -> Result<DensityMatrix, SimError> {
        let n = self.n_qubits;
        if n > MAX_TOMOGRAPHY_QUBITS {
            return Err(SimError::UnsupportedRegister(format!(
                "tomography is limited to {MAX_TOMOGRAPHY_QUBITS} qubits"
            )));
        }
        let letters = [Pauli::X, Pauli::Y, Pauli::Z];
        let settings: Vec<Vec<Pauli>> = (0..3usize.pow(n as u32))
            .map(|mut k| {
                (0..n)
                    .map(|_| {
                        let l = letters[k % 3];
                        k /= 3;
                        l
                    })
                    .collect()
            })
            .collect();
        let mut distributions = Vec::with_capacity(settings.len());
        for s in &settings {
            distributions.push(self.distribution(c, &basis_change(s))?);
        }
        let d = 1usize << n;
        let mut rho = DMatrix::<Complex64>::zeros(d, d);
        for code in 0..4usize.pow(n as u32) {
            let mut word = PauliWord::identity(n);
            let mut k = code;
            for q in 0..n {
                word.set(q, [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][k % 4]);
                k /= 4;
            }
            let mask = word.support();
            let mut sum = 0.0;
            let mut used = 0usize;
            for (s, p) in settings.iter().zip(&distributions) {
                if (0..n).all(|q| word.get(q) == Pauli::I || word.get(q) == s[q]) {
                    sum += p.iter().enumerate().map(|(b, &pb)| pb * parity(b, mask)).sum::<f64>();
                    used += 1;
                }
            }
            let expectation = sum / used as f64;
            let m = QubitOperator::from_terms(
                n,
                [crate::qop::PauliTerm {
                    coefficient: Complex64::new(1.0, 0.0),
                    word,
                }],
            )
            .to_matrix()
            .expect("tomography register is small");
            rho += m * Complex64::new(expectation / d as f64, 0.0);
        }
        Ok(project_to_density(&rho))
    }
}

/// Nearest-in-spectrum density matrix: Hermitize, clip negative
/// eigenvalues, renormalize the trace.
pub fn project_to_density(m: &DMatrix<Complex64>) -> DensityMatrix {
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let clipped: Vec<f64> = eig.eigenvalues.iter().map(|&l| l.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    let d = m.nrows();
    let mut out = DMatrix::<Complex64>::zeros(d, d);
    for (k, &l) in clipped.iter().enumerate() {
        if l > 0.0 {
            let v = eig.eigenvectors.column(k);
            out += v * v.adjoint() * Complex64::new(l / total, 0.0);
        }
    }
    let out = (&out + out.adjoint()) * Complex64::new(0.5, 0.0);
    DensityMatrix::from_entries_unchecked(out)
}

/// One-off sampled estimate with a fresh generator seeded from `nm.seed`.
pub fn estimate_expectation(
    c: &Circuit,
    op: &QubitOperator,
    nm: &NoiseModel,
    mitigated: bool,
) -> Result<Estimate, SimError> {
    Estimator::new(nm.clone(), c.n_qubits(), mitigated)?.estimate(c, op)
}

/// Readout-mitigated state tomography with a fresh generator.
pub fn tomography(c: &Circuit, nm: &NoiseModel) -> Result<DensityMatrix, SimError> {
    Estimator::new(nm.clone(), c.n_qubits(), true)?.tomography(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::statevector::run_statevector;

    fn mixed_basis_operator() -> QubitOperator {
        // a two-qubit operator touching all three measurement bases
        QubitOperator::from_real_labels(&[(1.0, "II"), (-1.0, "ZZ"), (-1.0, "XI"), (-1.0, "IX"), (1.0, "XX"), (1.0, "YY")])
            .unwrap()
    }

    #[test]
    fn grouping_is_qubitwise_commuting() {
        let op = QubitOperator::from_real_labels(&[(0.5, "II"), (1.0, "ZZ"), (2.0, "ZI"), (3.0, "XX"), (4.0, "IX"), (5.0, "YY")])
            .unwrap();
        let (c, groups) = group_terms(&op);
        assert_eq!(c, 0.5);
        assert_eq!(groups.len(), 3);
        assert_eq!(groups.iter().map(|g| g.terms.len()).sum::<usize>(), 5);
    }

    #[test]
    fn identity_term_is_exact() {
        let op = QubitOperator::identity(2, -1.25);
        let e = estimate_expectation(&Circuit::new(2).h(0), &op, &NoiseModel::default(), true).unwrap();
        assert_eq!(e.value, -1.25);
        assert_eq!(e.stderr, 0.0);
    }

    #[test]
    fn converges_to_exact_value() {
        let c = Circuit::new(2).ry(0, 0.9).cnot(0, 1).ry(1, -0.4).rz(0, 0.3);
        let op = mixed_basis_operator();
        let exact = run_statevector(&c).expectation(&op).unwrap();
        for (shots, mitigated) in [(8192, false), (1_000_000, false), (8192, true)] {
            let e = estimate_expectation(&c, &op, &NoiseModel::noiseless(shots, 9), mitigated).unwrap();
            assert!((e.value - exact).abs() < 5.0 * e.stderr, "{} vs {exact} +- {}", e.value, e.stderr);
        }
    }

    #[test]
    fn tomography_of_pure_state() {
        let c = Circuit::new(2).x(1).ry(0, 1.1).cnot(0, 1).ry(0, 2.3).ry(1, -2.3);
        let rho = tomography(&c, &NoiseModel::noiseless(1_000_000, 4)).unwrap();
        let target = DensityMatrix::from_pure(&run_statevector(&c));
        assert!(rho.distance(&target) < 0.02, "{}", rho.distance(&target));
        DensityMatrix::new(rho.entries().clone()).unwrap();
    }

    #[test]
    fn tomography_of_fully_depolarized_state() {
        let nm = NoiseModel {
            p1: 1.0,
            ..NoiseModel::noiseless(100_000, 8)
        };
        // calibration circuits would be depolarized too, so measure raw
        let rho = Estimator::new(nm, 2, false).unwrap().tomography(&Circuit::new(2).x(0).x(1)).unwrap();
        assert!(rho.distance(&DensityMatrix::maximally_mixed(2)) < 0.02);
    }
}
