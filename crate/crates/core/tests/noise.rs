use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use vqcas::ansatz::{build, AnsatzKind};
use vqcas::qop::QubitOperator;
use vqcas::sim::noise::symmetric_confusion;
use vqcas::sim::sampling::sample_multinomial;
use vqcas::sim::{estimate_expectation, exact_confusion, mitigate_counts, run_statevector, Counts, NoiseModel};

fn readout_only(flip: f64, seed: u64) -> NoiseModel {
    NoiseModel {
        readout: vec![symmetric_confusion(flip)],
        ..NoiseModel::noiseless(8192, seed)
    }
}

#[test]
fn mitigated_frequencies_are_unbiased() {
    let nm = readout_only(0.05, 0);
    let a = exact_confusion(&nm, 2);
    let p = DVector::from_vec(vec![0.4, 0.3, 0.2, 0.1]);
    let b = &a * &p;
    let trials = 200;
    let mut sum = [0.0; 4];
    let mut sum_sq = [0.0; 4];
    for seed in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw = sample_multinomial(b.as_slice(), nm.shots, &mut rng);
        let est = mitigate_counts(&Counts::from_vec(2, raw), &a).unwrap();
        for i in 0..4 {
            sum[i] += est[i];
            sum_sq[i] += est[i] * est[i];
        }
    }
    let n = trials as f64;
    for i in 0..4 {
        let mean = sum[i] / n;
        let sd = (sum_sq[i] / n - mean * mean).sqrt();
        assert!((mean - p[i]).abs() < 4.0 * sd / n.sqrt(), "component {i}: mean {mean}, sd {sd}");
    }
}

#[test]
fn readout_mitigation_removes_expectation_bias() {
    let theta = [0.3, 1.1];
    let circuit = build(AnsatzKind::SpinRestricted, &theta).unwrap();
    let zz = QubitOperator::from_real_labels(&[(1.0, "ZZ")]).unwrap();
    let exact = run_statevector(&circuit).expectation(&zz).unwrap();
    let trials = 100u64;
    let mean = |mitigated: bool| {
        let values: Vec<f64> = (0..trials)
            .map(|seed| estimate_expectation(&circuit, &zz, &readout_only(0.1, seed), mitigated).unwrap().value)
            .collect();
        let m = values.iter().sum::<f64>() / trials as f64;
        let sd = (values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / trials as f64).sqrt();
        (m, sd / (trials as f64).sqrt())
    };
    let (mitigated, se) = mean(true);
    assert!((mitigated - exact).abs() < 4.0 * se, "mitigated {mitigated} vs {exact} (se {se})");
    // symmetric flips shrink <ZZ> by (1 - 2f)^2
    let (raw, raw_se) = mean(false);
    assert!((raw - 0.64 * exact).abs() < 4.0 * raw_se, "raw {raw} vs {}", 0.64 * exact);
}

#[test]
fn shot_noise_scales_with_inverse_root_shots() {
    let circuit = build(AnsatzKind::SpinRestricted, &[0.3, 1.1]).unwrap();
    let zz = QubitOperator::from_real_labels(&[(1.0, "ZZ")]).unwrap();
    let spread = |shots: u64| {
        let values: Vec<f64> = (0..200u64)
            .map(|seed| {
                let nm = NoiseModel::noiseless(shots, seed);
                estimate_expectation(&circuit, &zz, &nm, false).unwrap().value
            })
            .collect();
        let m = values.iter().sum::<f64>() / values.len() as f64;
        (values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / values.len() as f64).sqrt()
    };
    let ratio = spread(256) / spread(4096);
    assert!((ratio - 4.0).abs() < 0.8, "ratio {ratio}");
}
