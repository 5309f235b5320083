use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use super::circuit::Circuit;
use super::density::run_density;
use super::noise::NoiseModel;
use super::SimError;

/// Measurement histogram indexed by basis state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counts {
    n_qubits: usize,
    counts: Vec<u64>,
}

/// Bitstring with `q_{n-1}` first.
pub fn bitstring(index: usize, n_qubits: usize) -> String {
    (0..n_qubits).rev().map(|q| if index >> q & 1 == 1 { '1' } else { '0' }).collect()
}

impl Counts {
    pub fn from_vec(n_qubits: usize, counts: Vec<u64>) -> Self {
        assert_eq!(counts.len(), 1 << n_qubits, "histogram length must be 2^n");
        Self { n_qubits, counts }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn shots(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.counts
    }

    pub fn get_index(&self, index: usize) -> u64 {
        self.counts[index]
    }

    /// Count for a bitstring such as `"01"`; zero for unknown strings.
    pub fn get(&self, bits: &str) -> u64 {
        if bits.len() != self.n_qubits {
            return 0;
        }
        match usize::from_str_radix(bits, 2) {
            Ok(i) => self.counts[i],
            Err(_) => 0,
        }
    }

    pub fn frequencies(&self) -> Vec<f64> {
        let total = self.shots().max(1) as f64;
        self.counts.iter().map(|&c| c as f64 / total).collect()
    }

    pub fn to_map(&self) -> BTreeMap<String, u64> {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &c)| (bitstring(i, self.n_qubits), c))
            .collect()
    }
}

impl fmt::Display for Counts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.to_map().into_iter().map(|(k, v)| format!("{k}: {v}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// Push a distribution over basis states through per-qubit readout error.
pub fn apply_readout(probs: &[f64], nm: &NoiseModel) -> Vec<f64> {
    let n = probs.len().trailing_zeros() as usize;
    let mut p = probs.to_vec();
    for q in 0..n {
        let k = nm.confusion(q);
        let m = 1usize << q;
        for i in 0..p.len() {
            if i & m == 0 {
                let (t0, t1) = (p[i], p[i | m]);
                p[i] = k[0][0] * t0 + k[0][1] * t1;
                p[i | m] = k[1][0] * t0 + k[1][1] * t1;
            }
        }
    }
    p
}

/// Multinomial draw of `shots` samples by sequential binomials.
pub fn sample_multinomial<R: Rng + ?Sized>(probs: &[f64], shots: u64, rng: &mut R) -> Vec<u64> {
    let mut out = vec![0u64; probs.len()];
    let mut remaining = shots;
    let mut mass: f64 = probs.iter().map(|p| p.max(0.0)).sum();
    for (i, &p) in probs.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        let p = p.max(0.0);
        if i + 1 == probs.len() || mass <= 0.0 {
            out[i] = remaining;
            break;
        }
        let frac = (p / mass).clamp(0.0, 1.0);
        let k = Binomial::new(remaining, frac).expect("probability clamped to [0, 1]").sample(rng);
        out[i] = k;
        remaining -= k;
        mass -= p;
    }
    out
}

/// Outcome distribution of `c + basis_changes` under `nm` including readout error.
pub fn measured_distribution(c: &Circuit, basis_changes: &Circuit, nm: &NoiseModel) -> Result<Vec<f64>, SimError> {
    if basis_changes.gates().iter().any(|g| !g.is_single_qubit()) {
        return Err(SimError::InvalidBasisChange);
    }
    nm.check_register(c.n_qubits())?;
    let full = c.then(basis_changes)?;
    let probs = run_density(&full, nm).probabilities();
    let total: f64 = probs.iter().sum();
    let probs: Vec<f64> = probs.iter().map(|p| p / total).collect();
    Ok(apply_readout(&probs, nm))
}

/// Sample with a caller-owned generator.
pub fn sample_counts_with<R: Rng + ?Sized>(
    c: &Circuit,
    basis_changes: &Circuit,
    nm: &NoiseModel,
    rng: &mut R,
) -> Result<Counts, SimError> {
    let p = measured_distribution(c, basis_changes, nm)?;
    Ok(Counts::from_vec(c.n_qubits(), sample_multinomial(&p, nm.shots, rng)))
}

/// Sample `nm.shots` measurements with a generator seeded from `nm.seed`.
pub fn sample_counts(c: &Circuit, basis_changes: &Circuit, nm: &NoiseModel) -> Result<Counts, SimError> {
    let mut rng = ChaCha8Rng::seed_from_u64(nm.seed);
    sample_counts_with(c, basis_changes, nm, &mut rng)
}
