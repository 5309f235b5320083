//! Exact diagonalization in a determinant basis via Slater-Condon rules.
//!
//! Determinants are occupation bitmasks over spin orbitals `p + sigma*n`
//! (alpha block first), ordered as `a+_{i1} a+_{i2} ... |vac>` with
//! `i1 < i2 < ...`. The phase and matrix-element code here is independent
//! of the operator algebra in `qop`, so it can serve as a reference for it.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::SolveError;
use crate::qop::{ActiveSpaceIntegrals, SectorSpec};

/// Largest determinant space diagonalized densely.
pub const MAX_DETERMINANTS: usize = 4096;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CasciRoot {
    pub energy: f64,
    /// Coefficients over [`CasciSolution::determinants`].
    pub vector: Vec<f64>,
    pub s_squared: f64,
}

impl CasciRoot {
    pub fn is_singlet(&self) -> bool {
        self.s_squared.abs() < 1e-6
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CasciSolution {
    pub determinants: Vec<u64>,
    /// Ascending in energy.
    pub roots: Vec<CasciRoot>,
}

impl CasciSolution {
    pub fn energies(&self) -> Vec<f64> {
        self.roots.iter().map(|r| r.energy).collect()
    }

    /// Singlet roots in ascending energy.
    pub fn singlets(&self) -> Vec<&CasciRoot> {
        self.roots.iter().filter(|r| r.is_singlet()).collect()
    }
}

fn choose(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1usize, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Bitmasks with `k` of the low `n` bits set, ascending.
fn strings(n: usize, k: usize) -> Vec<u64> {
    (0u64..1 << n).filter(|s| s.count_ones() as usize == k).collect()
}

/// All determinants of the sector, alpha-string-major.
pub fn determinants(n_orbitals: usize, sector: &SectorSpec) -> Result<Vec<u64>, SolveError> {
    sector.check_orbitals(n_orbitals)?;
    let count = choose(n_orbitals, sector.n_alpha()).saturating_mul(choose(n_orbitals, sector.n_beta()));
    if count > MAX_DETERMINANTS {
        return Err(SolveError::TooManyDeterminants {
            count,
            max: MAX_DETERMINANTS,
        });
    }
    let mut dets = Vec::with_capacity(count);
    for a in strings(n_orbitals, sector.n_alpha()) {
        for b in strings(n_orbitals, sector.n_beta()) {
            dets.push(a | b << n_orbitals);
        }
    }
    Ok(dets)
}

/// (-1)^(number of occupied modes below `mode`).
fn sign_below(state: u64, mode: usize) -> f64 {
    if (state & ((1u64 << mode) - 1)).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

fn annihilate(state: u64, mode: usize) -> Option<(f64, u64)> {
    (state >> mode & 1 == 1).then(|| (sign_below(state, mode), state & !(1u64 << mode)))
}

fn create(state: u64, mode: usize) -> Option<(f64, u64)> {
    (state >> mode & 1 == 0).then(|| (sign_below(state, mode), state | 1u64 << mode))
}

fn modes(state: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |m| state >> m & 1 == 1)
}

struct SpinOrbitalIntegrals<'a> {
    ints: &'a ActiveSpaceIntegrals,
}

impl SpinOrbitalIntegrals<'_> {
    fn split(&self, mode: usize) -> (usize, usize) {
        let n = self.ints.n_orbitals;
        (mode % n, mode / n)
    }

    fn h(&self, p: usize, q: usize) -> f64 {
        let ((a, sa), (b, sb)) = (self.split(p), self.split(q));
        if sa == sb {
            self.ints.one(a, b)
        } else {
            0.0
        }
    }

    /// Chemists' `(pq|rs)` over spin orbitals.
    fn g(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        let ((a, sa), (b, sb), (c, sc), (d, sd)) = (self.split(p), self.split(q), self.split(r), self.split(s));
        if sa == sb && sc == sd {
            self.ints.two(a, b, c, d)
        } else {
            0.0
        }
    }
}

/// `<bra|H|ket>` by Slater-Condon rules.
fn element(so: &SpinOrbitalIntegrals, bra: u64, ket: u64) -> f64 {
    let diff = bra ^ ket;
    match diff.count_ones() {
        0 => {
            let occ: Vec<usize> = modes(ket).collect();
            let mut e = so.ints.e_core;
            for &i in &occ {
                e += so.h(i, i);
                for &j in &occ {
                    e += 0.5 * (so.g(i, i, j, j) - so.g(i, j, j, i));
                }
            }
            e
        }
        2 => {
            let i = (ket & diff).trailing_zeros() as usize;
            let a = (bra & diff).trailing_zeros() as usize;
            let (s1, mid) = annihilate(ket, i).expect("i occupied");
            let (s2, out) = create(mid, a).expect("a empty");
            debug_assert_eq!(out, bra);
            let mut v = so.h(a, i);
            for j in modes(ket) {
                v += so.g(a, i, j, j) - so.g(a, j, j, i);
            }
            s1 * s2 * v
        }
        4 => {
            let holes: Vec<usize> = modes(ket & diff).collect();
            let parts: Vec<usize> = modes(bra & diff).collect();
            let (i, j, a, b) = (holes[0], holes[1], parts[0], parts[1]);
            // a+_a a+_b a_j a_i |ket>
            let mut sign = 1.0;
            let mut st = ket;
            for (mode, dagger) in [(i, false), (j, false), (b, true), (a, true)] {
                let (s, next) = if dagger { create(st, mode) } else { annihilate(st, mode) }.expect("valid excitation");
                sign *= s;
                st = next;
            }
            debug_assert_eq!(st, bra);
            sign * (so.g(a, i, b, j) - so.g(a, j, b, i))
        }
        _ => 0.0,
    }
}

/// Hamiltonian matrix over the sector determinants.
pub fn sector_matrix(ints: &ActiveSpaceIntegrals, sector: &SectorSpec) -> Result<(Vec<u64>, DMatrix<f64>), SolveError> {
    ints.validate()?;
    let dets = determinants(ints.n_orbitals, sector)?;
    let so = SpinOrbitalIntegrals { ints };
    let d = dets.len();
    let h = DMatrix::from_fn(d, d, |r, c| element(&so, dets[r], dets[c]));
    Ok((dets, h))
}

/// `<psi|S^2|psi>` for a real vector over `dets` (all with the same S_z).
pub fn spin_squared(dets: &[u64], vector: &[f64], n_orbitals: usize) -> f64 {
    let n = n_orbitals;
    let alpha = dets.first().map_or(0.0, |d| (d & ((1u64 << n) - 1)).count_ones() as f64);
    let beta = dets.first().map_or(0.0, |d| (d >> n).count_ones() as f64);
    let sz = 0.5 * (alpha - beta);
    // <S- S+> = |S+ psi|^2 with S+ = sum_p a+_{p alpha} a_{p beta}
    let mut raised: BTreeMap<u64, f64> = BTreeMap::new();
    for (&det, &c) in dets.iter().zip(vector) {
        for p in 0..n {
            if let Some((s1, mid)) = annihilate(det, p + n) {
                if let Some((s2, out)) = create(mid, p) {
                    *raised.entry(out).or_default() += c * s1 * s2;
                }
            }
        }
    }
    raised.values().map(|v| v * v).sum::<f64>() + sz * (sz + 1.0)
}

/// The `k` lowest eigenpairs of the sector Hamiltonian (all when `k` exceeds
/// the dimension), ascending, each with its `<S^2>`.
pub fn exact_casci(ints: &ActiveSpaceIntegrals, sector: &SectorSpec, k: usize) -> Result<CasciSolution, SolveError> {
    let (dets, h) = sector_matrix(ints, sector)?;
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..dets.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let roots = order
        .into_iter()
        .take(k)
        .map(|i| {
            let v: DVector<f64> = eig.eigenvectors.column(i).into();
            let vector = v.as_slice().to_vec();
            CasciRoot {
                energy: eig.eigenvalues[i],
                s_squared: spin_squared(&dets, &vector, ints.n_orbitals),
                vector,
            }
        })
        .collect();
    Ok(CasciSolution {
        determinants: dets,
        roots,
    })
}
