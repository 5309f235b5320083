use std::path::Path;

use serde::{Deserialize, Serialize};

use super::SimError;

/// Readout confusion matrix `K[measured][true]`; columns sum to one.
pub type Confusion = [[f64; 2]; 2];

pub const DEFAULT_P1: f64 = 1e-3;
pub const DEFAULT_P2: f64 = 1e-2;
pub const DEFAULT_READOUT_FLIP: f64 = 0.025;
pub const DEFAULT_SHOTS: u64 = 8192;

pub fn symmetric_confusion(flip: f64) -> Confusion {
    [[1.0 - flip, flip], [flip, 1.0 - flip]]
}

/// Depolarizing gate noise plus per-qubit readout error and sampling settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Depolarizing probability after each single-qubit gate.
    pub p1: f64,
    /// Depolarizing probability applied to each qubit of a CNOT.
    pub p2: f64,
    /// One confusion matrix per qubit. A single entry applies to every
    /// qubit; an empty list means perfect readout.
    pub readout: Vec<Confusion>,
    pub shots: u64,
    pub seed: u64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self {
            p1: DEFAULT_P1,
            p2: DEFAULT_P2,
            readout: vec![symmetric_confusion(DEFAULT_READOUT_FLIP)],
            shots: DEFAULT_SHOTS,
            seed: 0,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NoiseFile {
    p1: Option<f64>,
    p2: Option<f64>,
    readout: Option<Vec<Confusion>>,
    readout_flip: Option<f64>,
    shots: Option<u64>,
    seed: Option<u64>,
}

impl NoiseModel {
    /// Perfect gates and readout; only shot noise remains.
    pub fn noiseless(shots: u64, seed: u64) -> Self {
        Self {
            p1: 0.0,
            p2: 0.0,
            readout: Vec::new(),
            shots,
            seed,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_shots(mut self, shots: u64) -> Self {
        self.shots = shots;
        self
    }

    /// Multiply every error rate (gate probabilities and readout flip
    /// probabilities) by `factor`, clamping to valid ranges.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.p1 = (self.p1 * factor).clamp(0.0, 1.0);
        out.p2 = (self.p2 * factor).clamp(0.0, 1.0);
        for k in &mut out.readout {
            let f01 = (k[0][1] * factor).clamp(0.0, 1.0);
            let f10 = (k[1][0] * factor).clamp(0.0, 1.0);
            *k = [[1.0 - f10, f01], [f10, 1.0 - f01]];
        }
        out
    }

    pub fn confusion(&self, qubit: usize) -> Confusion {
        match self.readout.len() {
            0 => [[1.0, 0.0], [0.0, 1.0]],
            1 => self.readout[0],
            _ => self.readout[qubit],
        }
    }

    pub fn has_readout_error(&self) -> bool {
        self.readout.iter().any(|k| k[0][1] != 0.0 || k[1][0] != 0.0)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        for (name, p) in [("p1", self.p1), ("p2", self.p2)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(SimError::InvalidNoise(format!("{name} = {p} outside [0, 1]")));
            }
        }
        if self.shots == 0 {
            return Err(SimError::InvalidNoise("shots must be positive".into()));
        }
        for (q, k) in self.readout.iter().enumerate() {
            for col in 0..2 {
                let sum = k[0][col] + k[1][col];
                if (sum - 1.0).abs() > 1e-12 || k[0][col] < 0.0 || k[1][col] < 0.0 {
                    return Err(SimError::InvalidNoise(format!(
                        "readout matrix {q} column {col} is not a probability vector"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Checks that per-qubit readout data covers an `n`-qubit register.
    pub fn check_register(&self, n_qubits: usize) -> Result<(), SimError> {
        if self.readout.len() > 1 && self.readout.len() != n_qubits {
            return Err(SimError::InvalidNoise(format!(
                "{} readout matrices for {n_qubits} qubits",
                self.readout.len()
            )));
        }
        Ok(())
    }

    /// Parse TOML with keys `p1`, `p2`, `readout` (list of 2x2 matrices) or
    /// `readout_flip`, `shots`, `seed`. Missing keys take defaults.
    pub fn from_toml_str(text: &str) -> Result<Self, SimError> {
        let f: NoiseFile = toml::from_str(text).map_err(|e| SimError::InvalidNoise(e.to_string()))?;
        if f.readout.is_some() && f.readout_flip.is_some() {
            return Err(SimError::InvalidNoise("give either readout or readout_flip".into()));
        }
        let d = Self::default();
        let nm = Self {
            p1: f.p1.unwrap_or(d.p1),
            p2: f.p2.unwrap_or(d.p2),
            readout: match (f.readout, f.readout_flip) {
                (Some(r), _) => r,
                (None, Some(flip)) => vec![symmetric_confusion(flip)],
                (None, None) => d.readout,
            },
            shots: f.shots.unwrap_or(d.shots),
            seed: f.seed.unwrap_or(d.seed),
        };
        nm.validate()?;
        Ok(nm)
    }

    pub fn from_file(path: &Path) -> Result<Self, SimError> {
        let text = std::fs::read_to_string(path).map_err(|e| SimError::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }
}
