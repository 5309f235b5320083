//! Second-quantized operators over spin orbitals.
//!
//! Spin-orbital index `p + sigma * n_orbitals` addresses spatial orbital `p`
//! with spin `sigma` (0 = alpha, 1 = beta). Occupation-number states are
//! bitmasks; the state with bits `i1 < i2 < ...` set is
//! `a+_{i1} a+_{i2} ... |vac>`.

use std::collections::BTreeMap;
use std::ops::{Add, Mul};

use super::QopError;

/// One creation (`dagger = true`) or annihilation operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ladder {
    pub mode: usize,
    pub dagger: bool,
}

impl Ladder {
    pub fn create(mode: usize) -> Self {
        Self { mode, dagger: true }
    }

    pub fn annihilate(mode: usize) -> Self {
        Self {
            mode,
            dagger: false,
        }
    }

    /// Apply to an occupation bitmask. Returns the sign and new state, or
    /// `None` when the result vanishes.
    pub fn apply(&self, state: u64) -> Option<(f64, u64)> {
        let bit = 1u64 << self.mode;
        let occupied = state & bit != 0;
        if occupied == self.dagger {
            return None;
        }
        let below = (state & (bit - 1)).count_ones();
        let sign = if below.is_multiple_of(2) { 1.0 } else { -1.0 };
        Some((sign, state ^ bit))
    }
}

/// Product of ladder operators with a real coefficient; the rightmost
/// operator acts first.
#[derive(Clone, Debug, PartialEq)]
pub struct FermionTerm {
    pub coefficient: f64,
    pub ops: Vec<Ladder>,
}

impl FermionTerm {
    pub fn apply(&self, state: u64) -> Option<(f64, u64)> {
        let mut sign = self.coefficient;
        let mut s = state;
        for op in self.ops.iter().rev() {
            let (sg, next) = op.apply(s)?;
            sign *= sg;
            s = next;
        }
        Some((sign, s))
    }
}

/// Sum of fermionic terms on `n_modes` spin orbitals.
#[derive(Clone, Debug, PartialEq)]
pub struct FermionOperator {
    n_modes: usize,
    terms: Vec<FermionTerm>,
}

impl FermionOperator {
    pub fn zero(n_modes: usize) -> Self {
        Self {
            n_modes,
            terms: Vec::new(),
        }
    }

    pub fn constant(n_modes: usize, value: f64) -> Self {
        let mut op = Self::zero(n_modes);
        op.push(value, Vec::new());
        op
    }

    /// `a+_p a_q`.
    pub fn hopping(n_modes: usize, p: usize, q: usize) -> Self {
        let mut op = Self::zero(n_modes);
        op.push(1.0, vec![Ladder::create(p), Ladder::annihilate(q)]);
        op
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn terms(&self) -> &[FermionTerm] {
        &self.terms
    }

    /// Append a term. Mode indices must lie inside the register.
    pub fn push(&mut self, coefficient: f64, ops: Vec<Ladder>) {
        assert!(
            ops.iter().all(|l| l.mode < self.n_modes),
            "spin-orbital index outside [0, {})",
            self.n_modes
        );
        if coefficient != 0.0 {
            self.terms.push(FermionTerm { coefficient, ops });
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.coefficient *= s;
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero(self.n_modes);
        for t in &self.terms {
            let ops = t
                .ops
                .iter()
                .rev()
                .map(|l| Ladder {
                    mode: l.mode,
                    dagger: !l.dagger,
                })
                .collect();
            out.push(t.coefficient, ops);
        }
        out
    }

    /// Action on an occupation-number basis state, merged by output state.
    pub fn apply_to_state(&self, state: u64) -> Vec<(f64, u64)> {
        let mut acc: BTreeMap<u64, f64> = BTreeMap::new();
        for t in &self.terms {
            if let Some((c, s)) = t.apply(state) {
                *acc.entry(s).or_default() += c;
            }
        }
        acc.into_iter()
            .filter(|(_, c)| c.abs() > 0.0)
            .map(|(s, c)| (c, s))
            .collect()
    }

    /// Net (alpha, beta) particle change of each term, for an orbital count.
    fn spin_changes(&self, n_orbitals: usize) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.terms.iter().map(move |t| {
            let mut da = 0i64;
            let mut db = 0i64;
            for l in &t.ops {
                let d = if l.dagger { 1 } else { -1 };
                if l.mode < n_orbitals {
                    da += d;
                } else {
                    db += d;
                }
            }
            (da, db)
        })
    }

    /// Whether every term conserves both N_alpha and N_beta.
    pub fn conserves_spin_sector(&self, n_orbitals: usize) -> bool {
        self.spin_changes(n_orbitals).all(|(a, b)| a == 0 && b == 0)
    }

    /// Canonical form: creators left of annihilators, each group sorted by
    /// descending mode, equal products merged and zeros dropped.
    pub fn normal_ordered(&self) -> Self {
        let mut acc: BTreeMap<Vec<Ladder>, f64> = BTreeMap::new();
        let mut stack: Vec<(f64, Vec<Ladder>)> =
            self.terms.iter().map(|t| (t.coefficient, t.ops.clone())).collect();
        'outer: while let Some((coef, mut ops)) = stack.pop() {
            // insertion sort with anticommutation; contractions spawn new terms
            let mut sign = coef;
            for i in 1..ops.len() {
                let mut j = i;
                while j > 0 {
                    let (l, r) = (ops[j - 1], ops[j]);
                    let swap = match (l.dagger, r.dagger) {
                        (false, true) => true,
                        (true, true) | (false, false) => l.mode < r.mode,
                        (true, false) => false,
                    };
                    if !swap {
                        if l == r {
                            continue 'outer;
                        }
                        break;
                    }
                    if !l.dagger && r.dagger && l.mode == r.mode {
                        let mut contracted = ops.clone();
                        contracted.drain(j - 1..=j);
                        stack.push((sign, contracted));
                    }
                    ops.swap(j - 1, j);
                    sign = -sign;
                    j -= 1;
                }
            }
            if ops.windows(2).any(|w| w[0] == w[1]) {
                continue;
            }
            *acc.entry(ops).or_default() += sign;
        }
        let mut out = Self::zero(self.n_modes);
        for (ops, c) in acc {
            if c.abs() > 1e-14 {
                out.terms.push(FermionTerm { coefficient: c, ops });
            }
        }
        out
    }

    /// Equality after normal ordering, coefficient-wise within `tol`.
    pub fn approx_eq(&self, other: &FermionOperator, tol: f64) -> bool {
        let diff = (self + &other.scale(-1.0)).normal_ordered();
        diff.terms.iter().all(|t| t.coefficient.abs() <= tol)
    }

    /// Dense matrix over a list of occupation-number states.
    pub fn matrix_in(&self, basis: &[u64]) -> Result<Vec<Vec<f64>>, QopError> {
        let index: BTreeMap<u64, usize> = basis.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        let mut m = vec![vec![0.0; basis.len()]; basis.len()];
        for (col, s) in basis.iter().enumerate() {
            for (c, out) in self.apply_to_state(*s) {
                let row = *index.get(&out).ok_or(QopError::NotSectorConserving)?;
                m[row][col] += c;
            }
        }
        Ok(m)
    }
}

impl Add for &FermionOperator {
    type Output = FermionOperator;

    fn add(self, rhs: &FermionOperator) -> FermionOperator {
        assert_eq!(self.n_modes, rhs.n_modes, "mode count mismatch");
        let mut out = self.clone();
        out.terms.extend(rhs.terms.iter().cloned());
        out
    }
}

impl Mul for &FermionOperator {
    type Output = FermionOperator;

    fn mul(self, rhs: &FermionOperator) -> FermionOperator {
        assert_eq!(self.n_modes, rhs.n_modes, "mode count mismatch");
        let mut out = FermionOperator::zero(self.n_modes);
        for a in &self.terms {
            for b in &rhs.terms {
                let mut ops = a.ops.clone();
                ops.extend(b.ops.iter().copied());
                out.push(a.coefficient * b.coefficient, ops);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladder_signs() {
        // a+_1 on |mode0> picks up one sign from mode 0
        let (s, st) = Ladder::create(1).apply(0b01).unwrap();
        assert_eq!((s, st), (-1.0, 0b11));
        assert!(Ladder::create(0).apply(0b01).is_none());
        assert!(Ladder::annihilate(1).apply(0b01).is_none());
    }

    #[test]
    fn anticommutator_normal_orders_to_identity() {
        // a_0 a+_0 + a+_0 a_0 = 1
        let mut op = FermionOperator::zero(2);
        op.push(1.0, vec![Ladder::annihilate(0), Ladder::create(0)]);
        op.push(1.0, vec![Ladder::create(0), Ladder::annihilate(0)]);
        assert!(op.approx_eq(&FermionOperator::constant(2, 1.0), 1e-14));
    }

    #[test]
    fn normal_ordering_preserves_action() {
        let mut op = FermionOperator::zero(4);
        op.push(0.7, vec![Ladder::annihilate(2), Ladder::create(1), Ladder::create(2), Ladder::annihilate(0)]);
        op.push(-0.3, vec![Ladder::annihilate(3), Ladder::create(3)]);
        op.push(1.1, vec![Ladder::create(0), Ladder::create(0)]);
        let no = op.normal_ordered();
        for s in 0..16u64 {
            assert_eq!(op.apply_to_state(s), no.apply_to_state(s), "state {s:04b}");
        }
    }

    #[test]
    fn sector_conservation_detects_spin_flip() {
        // 2 orbitals: alpha modes 0,1; beta modes 2,3
        let mut flip = FermionOperator::zero(4);
        flip.push(1.0, vec![Ladder::create(0), Ladder::annihilate(2)]);
        assert!(!flip.conserves_spin_sector(2));
        assert!(FermionOperator::hopping(4, 1, 0).conserves_spin_sector(2));
    }
}
