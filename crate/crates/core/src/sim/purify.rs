use num_complex::Complex64;

use super::density::DensityMatrix;
use super::statevector::Statevector;

/// Gap below which the two largest eigenvalues count as degenerate.
pub const DEGENERACY_TOLERANCE: f64 = 1e-9;

/// Dominant eigenvector of a density matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Purified {
    pub psi: Statevector,
    /// Largest eigenvalue of the input.
    pub weight: f64,
    /// The top eigenvalue is not separated from the next one; `psi` is then
    /// an arbitrary vector of the top eigenspace.
    pub degenerate: bool,
}

/// Largest-magnitude amplitude made real and positive (first index wins ties).
pub fn fix_phase(amps: &mut [Complex64]) {
    let max = amps.iter().map(|a| a.norm()).fold(0.0, f64::max);
    if let Some(pivot) = amps.iter().find(|a| a.norm() >= max - 1e-12).copied() {
        if pivot.norm() > 0.0 {
            let phase = pivot.conj() / pivot.norm();
            for a in amps.iter_mut() {
                *a *= phase;
            }
        }
    }
}

pub fn purify(rho: &DensityMatrix) -> Purified {
    let eig = rho.entries().clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let top = order[0];
    let weight = eig.eigenvalues[top];
    let degenerate = order.len() > 1 && weight - eig.eigenvalues[order[1]] < DEGENERACY_TOLERANCE;
    let mut amps: Vec<Complex64> = eig.eigenvectors.column(top).iter().copied().collect();
    fix_phase(&mut amps);
    let psi = Statevector::normalized(amps).expect("eigenvectors are nonzero");
    Purified { psi, weight, degenerate }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    #[test]
    fn depolarized_basis_state() {
        let pure = DensityMatrix::from_pure(&Statevector::basis(2, 0b01));
        let mixed = DensityMatrix::maximally_mixed(2);
        let rho = DensityMatrix::new(
            pure.entries() * Complex64::new(0.9, 0.0) + mixed.entries() * Complex64::new(0.1, 0.0),
        )
        .unwrap();
        let p = purify(&rho);
        assert!((p.weight - 0.925).abs() < 1e-12);
        assert!(!p.degenerate);
        assert!((p.psi.amplitudes()[1] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn pure_state_round_trip_with_phase() {
        let psi = Statevector::normalized(vec![
            Complex64::new(0.1, 0.2),
            Complex64::new(-0.5, 0.3),
            Complex64::new(0.0, -0.6),
            Complex64::new(0.4, 0.0),
        ])
        .unwrap();
        let p = purify(&DensityMatrix::from_pure(&psi));
        assert!((p.weight - 1.0).abs() < 1e-12);
        assert!(p.psi.equals_up_to_phase(&psi, 1e-10));
        let big = p.psi.amplitudes().iter().max_by(|a, b| a.norm().total_cmp(&b.norm())).unwrap();
        assert!(big.im.abs() < 1e-14 && big.re > 0.0);
    }

    #[test]
    fn maximally_mixed_is_degenerate() {
        assert!(purify(&DensityMatrix::maximally_mixed(2)).degenerate);
        let diag = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::new(0.5, 0.0),
            Complex64::new(0.5, 0.0),
        ]));
        assert!(purify(&DensityMatrix::new(diag).unwrap()).degenerate);
    }
}
