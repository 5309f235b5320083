use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::circuit::Circuit;
use super::noise::NoiseModel;
use super::sampling::{sample_counts_with, Counts};
use super::SimError;

/// Largest condition number accepted by [`mitigate_counts`].
pub const MAX_CONDITION: f64 = 1e6;

/// Empirical confusion matrix from sampled computational-basis preparations
/// with a caller-owned generator. Column `j` is the outcome frequency for
/// prepared state `j`.
pub fn readout_calibrate_with<R: Rng + ?Sized>(
    nm: &NoiseModel,
    n_qubits: usize,
    rng: &mut R,
) -> Result<DMatrix<f64>, SimError> {
    let d = 1usize << n_qubits;
    let mut a = DMatrix::zeros(d, d);
    let empty = Circuit::new(n_qubits);
    for prepared in 0..d {
        let mut c = Circuit::new(n_qubits);
        for q in 0..n_qubits {
            if prepared >> q & 1 == 1 {
                c = c.x(q);
            }
        }
        let counts = sample_counts_with(&c, &empty, nm, rng)?;
        for (i, f) in counts.frequencies().into_iter().enumerate() {
            a[(i, prepared)] = f;
        }
    }
    Ok(a)
}

/// Empirical confusion matrix with a generator seeded from `nm.seed`.
pub fn readout_calibrate(nm: &NoiseModel, n_qubits: usize) -> Result<DMatrix<f64>, SimError> {
    let mut rng = ChaCha8Rng::seed_from_u64(nm.seed);
    readout_calibrate_with(nm, n_qubits, &mut rng)
}

/// Exact tensor product of the per-qubit confusion matrices.
pub fn exact_confusion(nm: &NoiseModel, n_qubits: usize) -> DMatrix<f64> {
    let mut a = DMatrix::from_element(1, 1, 1.0);
    for q in (0..n_qubits).rev() {
        let k = nm.confusion(q);
        let kq = DMatrix::from_row_slice(2, 2, &[k[0][0], k[0][1], k[1][0], k[1][1]]);
        a = a.kronecker(&kq);
    }
    a
}

/// Euclidean projection onto the probability simplex.
pub fn project_to_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut tau = 0.0;
    for (k, &x) in u.iter().enumerate() {
        cumulative += x;
        let t = (cumulative - 1.0) / (k + 1) as f64;
        if x - t > 0.0 {
            tau = t;
        }
    }
    v.iter().map(|&x| (x - tau).max(0.0)).collect()
}

/// Solve `A p = b` for a probability vector `p` (least squares when the
/// plain solution leaves the simplex).
pub fn mitigate_distribution(b: &[f64], a: &DMatrix<f64>) -> Result<Vec<f64>, SimError> {
    let d = a.nrows();
    if a.ncols() != d || b.len() != d {
        return Err(SimError::RegisterMismatch {
            expected: d,
            got: b.len(),
        });
    }
    let sv = a.clone().singular_values();
    let (smax, smin) = (sv.max(), sv.min());
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(condition <= MAX_CONDITION) {
        return Err(SimError::MitigationFailed { condition });
    }
    let rhs = DVector::from_column_slice(b);
    let x = a.clone().lu().solve(&rhs).ok_or(SimError::MitigationFailed { condition })?;
    if x.iter().all(|&v| v >= -1e-12) {
        let clipped: Vec<f64> = x.iter().map(|v| v.max(0.0)).collect();
        let s: f64 = clipped.iter().sum();
        return Ok(clipped.into_iter().map(|v| v / s).collect());
    }
    // accelerated projected gradient on 1/2 |A p - b|^2 over the simplex
    let step = 1.0 / (smax * smax);
    let at = a.transpose();
    let mut p = DVector::from_vec(project_to_simplex(x.as_slice()));
    let mut y = p.clone();
    let mut t = 1.0f64;
    for _ in 0..20_000 {
        let grad = &at * (a * &y - &rhs);
        let next = DVector::from_vec(project_to_simplex((&y - grad * step).as_slice()));
        let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        y = &next + (&next - &p) * ((t - 1.0) / t_next);
        let change = (&next - &p).amax();
        p = next;
        t = t_next;
        if change < 1e-15 {
            break;
        }
    }
    Ok(p.as_slice().to_vec())
}

/// Mitigated quasi-probabilities for raw counts.
pub fn mitigate_counts(raw: &Counts, a: &DMatrix<f64>) -> Result<Vec<f64>, SimError> {
    mitigate_distribution(&raw.frequencies(), a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::noise::symmetric_confusion;
    use crate::sim::sampling::{apply_readout, sample_counts};

    fn flips(f: f64) -> NoiseModel {
        NoiseModel {
            readout: vec![symmetric_confusion(f)],
            ..NoiseModel::noiseless(8192, 3)
        }
    }

    #[test]
    fn identity_calibration() {
        let a = readout_calibrate(&NoiseModel::noiseless(1000, 0), 2).unwrap();
        assert_eq!(a, DMatrix::identity(4, 4));
        let raw = Counts::from_vec(2, vec![10, 20, 30, 40]);
        let p = mitigate_counts(&raw, &a).unwrap();
        assert_eq!(p, vec![0.1, 0.2, 0.3, 0.4]);
    }

    #[test]
    fn calibration_matches_tensor_product() {
        let nm = flips(0.1).with_shots(20_000);
        let a = readout_calibrate(&nm, 2).unwrap();
        let exact = exact_confusion(&nm, 2);
        for j in 0..4 {
            assert!((a.column(j).sum() - 1.0).abs() < 1e-12);
            for i in 0..4 {
                let p = exact[(i, j)];
                let sigma = (p * (1.0 - p) / 20_000.0).sqrt().max(1e-9);
                assert!((a[(i, j)] - p).abs() < 5.0 * sigma, "({i},{j})");
            }
        }
    }

    #[test]
    fn exact_inversion() {
        let nm = flips(0.1);
        let a = exact_confusion(&nm, 2);
        let truth = [0.05, 0.6, 0.3, 0.05];
        let p = mitigate_distribution(&apply_readout(&truth, &nm), &a).unwrap();
        for (x, t) in p.iter().zip(truth) {
            assert!((x - t).abs() < 1e-12);
        }
    }

    #[test]
    fn projected_solution_stays_on_simplex() {
        let nm = flips(0.2);
        let a = exact_confusion(&nm, 2);
        // a measured distribution that no true distribution produces
        let p = mitigate_distribution(&[1.0, 0.0, 0.0, 0.0], &a).unwrap();
        assert!(p.iter().all(|&v| v >= 0.0));
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(p[0] > 0.99);
    }

    #[test]
    fn sampled_recovery_within_five_sigma() {
        let nm = flips(0.1);
        let c = Circuit::new(2).x(0);
        let a = exact_confusion(&nm, 2);
        let p = mitigate_counts(&sample_counts(&c, &Circuit::new(2), &nm).unwrap(), &a).unwrap();
        // variance of the inverted estimator for outcome 01
        let sigma = (0.9f64 * 0.1 / 8192.0).sqrt() / 0.8 * 2.0;
        assert!((p[1] - 1.0).abs() < 5.0 * sigma, "{p:?}");
    }

    #[test]
    fn ill_conditioned_rejected() {
        let a = exact_confusion(&flips(0.5), 1);
        assert!(matches!(
            mitigate_distribution(&[0.5, 0.5], &a),
            Err(SimError::MitigationFailed { .. })
        ));
    }

    #[test]
    fn simplex_projection() {
        assert_eq!(project_to_simplex(&[0.2, 0.3, 0.5]), vec![0.2, 0.3, 0.5]);
        let p = project_to_simplex(&[1.2, -0.1, -0.1]);
        assert!((p[0] - 1.0).abs() < 1e-15 && p[1] == 0.0);
    }
}
