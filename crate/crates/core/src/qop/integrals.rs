use serde::{Deserialize, Serialize};

use super::QopError;

/// Symmetry tolerance applied to one- and two-electron integrals.
pub const SYMMETRY_TOLERANCE: f64 = 1e-10;

/// Active-space integrals in chemists' notation.
///
/// `h2[(pq|rs)]` is stored densely with index `((p*n + q)*n + r)*n + s`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActiveSpaceIntegrals {
    pub e_core: f64,
    pub n_orbitals: usize,
    pub h1: Vec<f64>,
    pub h2: Vec<f64>,
}

impl ActiveSpaceIntegrals {
    /// All-zero integrals with the given core energy.
    pub fn zeros(n_orbitals: usize, e_core: f64) -> Self {
        Self {
            e_core,
            n_orbitals,
            h1: vec![0.0; n_orbitals * n_orbitals],
            h2: vec![0.0; n_orbitals.pow(4)],
        }
    }

    pub fn new(e_core: f64, n_orbitals: usize, h1: Vec<f64>, h2: Vec<f64>) -> Result<Self, QopError> {
        let ints = Self {
            e_core,
            n_orbitals,
            h1,
            h2,
        };
        ints.validate()?;
        Ok(ints)
    }

    pub fn validate(&self) -> Result<(), QopError> {
        let n = self.n_orbitals;
        if n == 0 {
            return Err(QopError::InvalidIntegrals("n_orbitals must be positive".into()));
        }
        if self.h1.len() != n * n || self.h2.len() != n.pow(4) {
            return Err(QopError::InvalidIntegrals(format!(
                "expected {} one-body and {} two-body entries, got {} and {}",
                n * n,
                n.pow(4),
                self.h1.len(),
                self.h2.len()
            )));
        }
        if !self.e_core.is_finite() || self.h1.iter().chain(&self.h2).any(|v| !v.is_finite()) {
            return Err(QopError::InvalidIntegrals("non-finite integral".into()));
        }
        for p in 0..n {
            for q in 0..n {
                let d = (self.one(p, q) - self.one(q, p)).abs();
                if d > SYMMETRY_TOLERANCE {
                    return Err(QopError::SymmetryViolation(format!("h1[{p}][{q}] != h1[{q}][{p}] by {d:e}")));
                }
            }
        }
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    for s in 0..n {
                        let v = self.two(p, q, r, s);
                        for (a, b, c, d) in [(q, p, r, s), (p, q, s, r), (r, s, p, q)] {
                            let w = self.two(a, b, c, d);
                            if (v - w).abs() > SYMMETRY_TOLERANCE {
                                return Err(QopError::SymmetryViolation(format!(
                                    "({p}{q}|{r}{s}) != ({a}{b}|{c}{d}) by {:e}",
                                    (v - w).abs()
                                )));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    #[inline]
    pub fn one(&self, p: usize, q: usize) -> f64 {
        self.h1[p * self.n_orbitals + q]
    }

    #[inline]
    pub fn two(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        let n = self.n_orbitals;
        self.h2[((p * n + q) * n + r) * n + s]
    }

    /// Set `h1[p][q]` and its transpose.
    pub fn set_one(&mut self, p: usize, q: usize, v: f64) {
        let n = self.n_orbitals;
        self.h1[p * n + q] = v;
        self.h1[q * n + p] = v;
    }

    /// Set `(pq|rs)` and all eight real-orbital permutations.
    pub fn set_two(&mut self, p: usize, q: usize, r: usize, s: usize, v: f64) {
        let n = self.n_orbitals;
        for (a, b, c, d) in [
            (p, q, r, s),
            (q, p, r, s),
            (p, q, s, r),
            (q, p, s, r),
            (r, s, p, q),
            (s, r, p, q),
            (r, s, q, p),
            (s, r, q, p),
        ] {
            self.h2[((a * n + b) * n + c) * n + d] = v;
        }
    }
}

/// Electron count and spin projection of a determinant space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectorSpec {
    pub n_electrons: usize,
    /// Twice S_z, kept integral.
    pub two_sz: i64,
}

impl SectorSpec {
    pub fn new(n_electrons: usize, two_sz: i64) -> Result<Self, QopError> {
        let s = Self { n_electrons, two_sz };
        if two_sz.unsigned_abs() as usize > n_electrons || (n_electrons as i64 - two_sz) % 2 != 0 {
            return Err(QopError::InvalidSector(format!(
                "N = {n_electrons} is incompatible with 2Sz = {two_sz}"
            )));
        }
        Ok(s)
    }

    /// N = 2, S_z = 0.
    pub fn two_electron_singlet() -> Self {
        Self {
            n_electrons: 2,
            two_sz: 0,
        }
    }

    pub fn sz(&self) -> f64 {
        self.two_sz as f64 / 2.0
    }

    pub fn n_alpha(&self) -> usize {
        ((self.n_electrons as i64 + self.two_sz) / 2) as usize
    }

    pub fn n_beta(&self) -> usize {
        ((self.n_electrons as i64 - self.two_sz) / 2) as usize
    }

    pub fn check_orbitals(&self, n_orbitals: usize) -> Result<(), QopError> {
        if self.n_alpha() > n_orbitals || self.n_beta() > n_orbitals {
            return Err(QopError::InvalidSector(format!(
                "{} alpha / {} beta electrons do not fit in {n_orbitals} orbitals",
                self.n_alpha(),
                self.n_beta()
            )));
        }
        Ok(())
    }
}
