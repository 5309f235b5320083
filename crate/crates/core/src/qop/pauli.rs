//! Pauli words and weighted sums of them.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::QopError;

/// Terms whose coefficient magnitude falls below this are dropped on simplification.
pub const PRUNE_THRESHOLD: f64 = 1e-12;

/// Largest register `matrix_of` will expand densely.
pub const MAX_DENSE_QUBITS: usize = 12;

/// Single-qubit Pauli letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    /// Product `self * rhs` as (power of i, letter).
    fn mul(self, rhs: Pauli) -> (u8, Pauli) {
        use Pauli::*;
        match (self, rhs) {
            (I, p) | (p, I) => (0, p),
            (a, b) if a == b => (0, I),
            (X, Y) => (1, Z),
            (Y, Z) => (1, X),
            (Z, X) => (1, Y),
            (Y, X) => (3, Z),
            (Z, Y) => (3, X),
            (X, Z) => (3, Y),
            _ => unreachable!(),
        }
    }
}

/// Tensor product of single-qubit Paulis in symplectic (x, z) bitmask form.
///
/// Bit `q` of each mask refers to qubit `q`. The string form prints qubit
/// `n - 1` first, so `"XZ"` means X on qubit 1 and Z on qubit 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliWord {
    n_qubits: u8,
    x: u64,
    z: u64,
}

impl PauliWord {
    pub fn identity(n_qubits: usize) -> Self {
        assert!(n_qubits <= 64, "register too large for a PauliWord");
        Self {
            n_qubits: n_qubits as u8,
            x: 0,
            z: 0,
        }
    }

    pub fn from_letters(letters: &[(usize, Pauli)], n_qubits: usize) -> Self {
        let mut w = Self::identity(n_qubits);
        for &(q, p) in letters {
            w.set(q, p);
        }
        w
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits as usize
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    /// Qubits carrying a non-identity letter.
    pub fn support(&self) -> u64 {
        self.x | self.z
    }

    pub fn is_identity(&self) -> bool {
        self.support() == 0
    }

    pub fn get(&self, qubit: usize) -> Pauli {
        Pauli::from_bits(self.x >> qubit & 1 == 1, self.z >> qubit & 1 == 1)
    }

    pub fn set(&mut self, qubit: usize, p: Pauli) {
        assert!(qubit < self.n_qubits(), "qubit {qubit} outside register");
        let (x, z) = p.bits();
        let m = 1u64 << qubit;
        self.x = if x { self.x | m } else { self.x & !m };
        self.z = if z { self.z | m } else { self.z & !m };
    }

    /// Number of Y letters.
    pub fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    /// Product of two words, returned as (phase, word).
    pub fn mul(&self, rhs: &PauliWord) -> (Complex64, PauliWord) {
        assert_eq!(self.n_qubits, rhs.n_qubits, "register size mismatch");
        let mut power = 0u8;
        let mut out = PauliWord::identity(self.n_qubits());
        for q in 0..self.n_qubits() {
            let (k, p) = self.get(q).mul(rhs.get(q));
            power = (power + k) % 4;
            out.set(q, p);
        }
        (i_power(power), out)
    }

    /// Action on a computational basis state: `P|b> = phase |b ^ x>`.
    pub fn apply_to_basis(&self, b: usize) -> (Complex64, usize) {
        let b = b as u64;
        let sign = if (b & self.z).count_ones() % 2 == 1 {
            -1.0
        } else {
            1.0
        };
        let phase = i_power((self.y_count() % 4) as u8) * sign;
        (phase, (b ^ self.x) as usize)
    }

    /// Whether two words commute.
    pub fn commutes_with(&self, rhs: &PauliWord) -> bool {
        ((self.x & rhs.z).count_ones() + (self.z & rhs.x).count_ones()).is_multiple_of(2)
    }
}

fn i_power(k: u8) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

impl fmt::Display for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in (0..self.n_qubits()).rev() {
            write!(f, "{}", self.get(q).as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliWord {
    type Err = QopError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let n = s.chars().count();
        if n > 64 {
            return Err(QopError::RegisterTooLarge { n_qubits: n, max: 64 });
        }
        let mut w = PauliWord::identity(n);
        for (i, c) in s.chars().enumerate() {
            let q = n - 1 - i;
            let p = match c {
                'I' => Pauli::I,
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                'Z' => Pauli::Z,
                other => return Err(QopError::BadPauliLetter(other)),
            };
            w.set(q, p);
        }
        Ok(w)
    }
}

/// One weighted Pauli word.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliTerm {
    pub coefficient: Complex64,
    pub word: PauliWord,
}

/// A simplified linear combination of Pauli words on a fixed register.
///
/// Equal words are merged and near-zero coefficients pruned on every
/// construction path, so no two stored terms share a word.
#[derive(Clone, Debug, PartialEq)]
pub struct QubitOperator {
    n_qubits: usize,
    terms: BTreeMap<PauliWord, Complex64>,
}

impl QubitOperator {
    pub fn zero(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(n_qubits: usize, coefficient: f64) -> Self {
        Self::from_terms(
            n_qubits,
            [PauliTerm {
                coefficient: Complex64::new(coefficient, 0.0),
                word: PauliWord::identity(n_qubits),
            }],
        )
    }

    pub fn from_terms(n_qubits: usize, terms: impl IntoIterator<Item = PauliTerm>) -> Self {
        let mut op = Self::zero(n_qubits);
        for t in terms {
            assert_eq!(t.word.n_qubits(), n_qubits, "word length must equal register size");
            *op.terms.entry(t.word).or_default() += t.coefficient;
        }
        op.prune();
        op
    }

    /// Parses `[(coefficient, "XZ"), ...]` with real coefficients.
    pub fn from_real_labels(labels: &[(f64, &str)]) -> Result<Self, QopError> {
        let mut n = None;
        let mut terms = Vec::with_capacity(labels.len());
        for &(c, s) in labels {
            let word: PauliWord = s.parse()?;
            if *n.get_or_insert(word.n_qubits()) != word.n_qubits() {
                return Err(QopError::RegisterMismatch);
            }
            terms.push(PauliTerm {
                coefficient: Complex64::new(c, 0.0),
                word,
            });
        }
        Ok(Self::from_terms(n.unwrap_or(0), terms))
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = PauliTerm> + '_ {
        self.terms.iter().map(|(w, c)| PauliTerm {
            coefficient: *c,
            word: *w,
        })
    }

    pub fn coefficient(&self, word: &PauliWord) -> Complex64 {
        self.terms.get(word).copied().unwrap_or_default()
    }

    /// Coefficient of the identity word.
    pub fn constant(&self) -> Complex64 {
        self.coefficient(&PauliWord::identity(self.n_qubits))
    }

    fn prune(&mut self) {
        self.terms.retain(|_, c| c.norm() >= PRUNE_THRESHOLD);
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c *= s;
        }
        out.prune();
        out
    }

    pub fn adjoint(&self) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.conj();
        }
        out
    }

    /// True when every coefficient is real to within the pruning threshold.
    pub fn is_hermitian(&self) -> bool {
        self.terms.values().all(|c| c.im.abs() < PRUNE_THRESHOLD)
    }

    /// Hermitian part `(A + A†)/2`.
    pub fn hermitian_part(&self) -> Self {
        (self + &self.adjoint()).scale(Complex64::new(0.5, 0.0))
    }

    /// Largest coefficient difference against another operator.
    pub fn distance(&self, other: &QubitOperator) -> f64 {
        let diff = self - other;
        diff.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Dense `2^n x 2^n` matrix.
    pub fn to_matrix(&self) -> Result<DMatrix<Complex64>, QopError> {
        if self.n_qubits > MAX_DENSE_QUBITS {
            return Err(QopError::RegisterTooLarge {
                n_qubits: self.n_qubits,
                max: MAX_DENSE_QUBITS,
            });
        }
        let dim = 1usize << self.n_qubits;
        let mut m = DMatrix::<Complex64>::zeros(dim, dim);
        for (w, c) in &self.terms {
            for col in 0..dim {
                let (phase, row) = w.apply_to_basis(col);
                m[(row, col)] += c * phase;
            }
        }
        Ok(m)
    }

    /// `self |psi>` for a dense amplitude vector.
    pub fn apply(&self, amplitudes: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::default(); amplitudes.len()];
        for (w, c) in &self.terms {
            for (b, a) in amplitudes.iter().enumerate() {
                let (phase, b2) = w.apply_to_basis(b);
                out[b2] += c * phase * a;
            }
        }
        out
    }
}

/// Dense matrix of an operator.
pub fn matrix_of(op: &QubitOperator) -> Result<DMatrix<Complex64>, QopError> {
    op.to_matrix()
}

impl Add for &QubitOperator {
    type Output = QubitOperator;

    fn add(self, rhs: &QubitOperator) -> QubitOperator {
        assert_eq!(self.n_qubits, rhs.n_qubits, "register size mismatch");
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            *out.terms.entry(*w).or_default() += c;
        }
        out.prune();
        out
    }
}

impl Sub for &QubitOperator {
    type Output = QubitOperator;

    fn sub(self, rhs: &QubitOperator) -> QubitOperator {
        self + &(-rhs)
    }
}

impl Neg for &QubitOperator {
    type Output = QubitOperator;

    fn neg(self) -> QubitOperator {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul for &QubitOperator {
    type Output = QubitOperator;

    fn mul(self, rhs: &QubitOperator) -> QubitOperator {
        assert_eq!(self.n_qubits, rhs.n_qubits, "register size mismatch");
        let mut acc: BTreeMap<PauliWord, Complex64> = BTreeMap::new();
        for (wa, ca) in &self.terms {
            for (wb, cb) in &rhs.terms {
                let (phase, w) = wa.mul(wb);
                *acc.entry(w).or_default() += ca * cb * phase;
            }
        }
        let mut out = QubitOperator {
            n_qubits: self.n_qubits,
            terms: acc,
        };
        out.prune();
        out
    }
}

impl fmt::Display for QubitOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (w, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if c.im.abs() < PRUNE_THRESHOLD {
                write!(f, "{:.6} {}", c.re, w)?;
            } else {
                write!(f, "({:.6}{:+.6}i) {}", c.re, c.im, w)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn word_roundtrip_and_ordering() {
        let w: PauliWord = "XZ".parse().unwrap();
        assert_eq!(w.get(1), Pauli::X);
        assert_eq!(w.get(0), Pauli::Z);
        assert_eq!(w.to_string(), "XZ");
        assert!("XA".parse::<PauliWord>().is_err());
    }

    #[test]
    fn single_qubit_products() {
        let x: PauliWord = "X".parse().unwrap();
        let y: PauliWord = "Y".parse().unwrap();
        let (ph, w) = x.mul(&y);
        assert_eq!(w.to_string(), "Z");
        assert_eq!(ph, Complex64::new(0.0, 1.0));
        let (ph, w) = y.mul(&x);
        assert_eq!(w.to_string(), "Z");
        assert_eq!(ph, Complex64::new(0.0, -1.0));
    }

    #[test]
    fn z_matrix_is_diag() {
        let z = QubitOperator::from_real_labels(&[(1.0, "Z")]).unwrap();
        let m = z.to_matrix().unwrap();
        assert_eq!(m[(0, 0)], c(1.0));
        assert_eq!(m[(1, 1)], c(-1.0));
        assert_eq!(m[(0, 1)], c(0.0));
    }

    #[test]
    fn xx_matrix_is_antidiagonal() {
        let xx = QubitOperator::from_real_labels(&[(1.0, "XX")]).unwrap();
        let m = xx.to_matrix().unwrap();
        for r in 0..4 {
            for col in 0..4 {
                let expect = if r + col == 3 { 1.0 } else { 0.0 };
                assert_eq!(m[(r, col)], c(expect));
            }
        }
    }

    #[test]
    fn y_matrix_matches_definition() {
        let y = QubitOperator::from_real_labels(&[(1.0, "Y")]).unwrap();
        let m = y.to_matrix().unwrap();
        assert_eq!(m[(0, 1)], Complex64::new(0.0, -1.0));
        assert_eq!(m[(1, 0)], Complex64::new(0.0, 1.0));
    }

    #[test]
    fn merges_and_prunes() {
        let op = QubitOperator::from_real_labels(&[(1.0, "ZI"), (-1.0, "ZI"), (0.5, "XX"), (0.25, "XX")])
            .unwrap();
        assert_eq!(op.len(), 1);
        assert_eq!(op.coefficient(&"XX".parse().unwrap()), c(0.75));
        let tiny = QubitOperator::from_real_labels(&[(1e-13, "ZZ")]).unwrap();
        assert!(tiny.is_empty());
    }

    #[test]
    fn product_matches_matrix_product() {
        let a = QubitOperator::from_real_labels(&[(0.3, "XY"), (1.2, "ZI"), (-0.7, "IY")]).unwrap();
        let b = QubitOperator::from_real_labels(&[(0.9, "YY"), (0.1, "XZ"), (0.4, "II")]).unwrap();
        let lhs = (&a * &b).to_matrix().unwrap();
        let rhs = a.to_matrix().unwrap() * b.to_matrix().unwrap();
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn dense_guard() {
        let big = QubitOperator::identity(13, 1.0);
        assert!(matches!(big.to_matrix(), Err(QopError::RegisterTooLarge { .. })));
    }
}
