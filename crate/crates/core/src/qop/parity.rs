//! Parity encoding and two-qubit symmetry reduction.
//!
//! In the parity encoding qubit `k` stores `n_0 ^ n_1 ^ ... ^ n_k`. With the
//! alpha-then-beta spin-orbital layout, qubit `n_orb - 1` holds the parity of
//! N_alpha and qubit `2 n_orb - 1` the parity of N; both are fixed inside a
//! sector and are removed.
//!
//! For the two-orbital, two-electron, S_z = 0 space the two remaining qubits
//! are relabelled and bit-flipped so that
//!
//! ```text
//! a+_{H up} a+_{L dn}|vac> -> |00>     a+_{H up} a+_{H dn}|vac> -> |01>
//! a+_{L up} a+_{L dn}|vac> -> |10>     a+_{L up} a+_{H dn}|vac> -> |11>
//! ```
//!
//! with kets written `|q1 q0>`.

use num_complex::Complex64;

use super::fermion::{FermionOperator, Ladder};
use super::integrals::SectorSpec;
use super::pauli::{Pauli, PauliTerm, PauliWord, QubitOperator};
use super::QopError;

/// Parity-encoded image of a single ladder operator on `n_modes` qubits:
/// `a+_j = 1/2 (X_j Z_{j-1} - i Y_j) X_{j+1} ... X_{n-1}`.
pub fn parity_ladder(l: Ladder, n_modes: usize) -> QubitOperator {
    let j = l.mode;
    let mut xz = PauliWord::identity(n_modes);
    let mut y = PauliWord::identity(n_modes);
    for k in j + 1..n_modes {
        xz.set(k, Pauli::X);
        y.set(k, Pauli::X);
    }
    xz.set(j, Pauli::X);
    if j > 0 {
        xz.set(j - 1, Pauli::Z);
    }
    y.set(j, Pauli::Y);
    let sign = if l.dagger { -1.0 } else { 1.0 };
    QubitOperator::from_terms(
        n_modes,
        [
            PauliTerm {
                coefficient: Complex64::new(0.5, 0.0),
                word: xz,
            },
            PauliTerm {
                coefficient: Complex64::new(0.0, 0.5 * sign),
                word: y,
            },
        ],
    )
}

/// Full parity encoding without any reduction.
pub fn map_parity(op: &FermionOperator) -> QubitOperator {
    let n = op.n_modes();
    let mut out = QubitOperator::zero(n);
    for t in op.terms() {
        let mut prod = QubitOperator::identity(n, t.coefficient);
        for l in &t.ops {
            prod = &prod * &parity_ladder(*l, n);
        }
        out = &out + &prod;
    }
    out
}

/// Parity encoding of the basis state with occupation bitmask `occ`.
pub fn parity_encode_state(occ: u64, n_modes: usize) -> u64 {
    let mut out = 0u64;
    let mut parity = 0u64;
    for k in 0..n_modes {
        parity ^= occ >> k & 1;
        out |= parity << k;
    }
    out
}

/// Remove the N_alpha- and N-parity qubits given the sector's eigenvalues.
fn taper(op: &QubitOperator, n_orbitals: usize, sector: &SectorSpec) -> Result<QubitOperator, QopError> {
    let n_modes = 2 * n_orbitals;
    let alpha_qubit = n_orbitals - 1;
    let total_qubit = n_modes - 1;
    let alpha_sign = if sector.n_alpha() % 2 == 1 { -1.0 } else { 1.0 };
    let total_sign = if sector.n_electrons % 2 == 1 { -1.0 } else { 1.0 };
    let kept: Vec<usize> = (0..n_modes).filter(|&q| q != alpha_qubit && q != total_qubit).collect();
    let mut terms = Vec::with_capacity(op.len());
    for t in op.terms() {
        let mut c = t.coefficient;
        for (q, sign) in [(alpha_qubit, alpha_sign), (total_qubit, total_sign)] {
            match t.word.get(q) {
                Pauli::I => {}
                Pauli::Z => c *= sign,
                _ => return Err(QopError::NotSectorConserving),
            }
        }
        let mut w = PauliWord::identity(kept.len());
        for (new_q, &old_q) in kept.iter().enumerate() {
            w.set(new_q, t.word.get(old_q));
        }
        terms.push(PauliTerm { coefficient: c, word: w });
    }
    Ok(QubitOperator::from_terms(kept.len(), terms))
}

/// Parity mapping with two-qubit reduction onto the CAS(2,2), N = 2, S_z = 0
/// register, in the determinant-to-qubit dictionary of the module docs.
pub fn map_parity_reduced(op: &FermionOperator, sector: &SectorSpec) -> Result<QubitOperator, QopError> {
    if !op.n_modes().is_multiple_of(2) {
        return Err(QopError::InvalidSector("odd number of spin orbitals".into()));
    }
    let n_orbitals = op.n_modes() / 2;
    if n_orbitals != 2 || sector.n_electrons != 2 || sector.two_sz != 0 {
        return Err(QopError::UnsupportedSize {
            n_orbitals,
            n_electrons: sector.n_electrons,
        });
    }
    if !op.conserves_spin_sector(n_orbitals) {
        return Err(QopError::NotSectorConserving);
    }
    let full = map_parity(op);
    let tapered = taper(&full, n_orbitals, sector)?;
    // tapered qubit 0 = parity(H up) and qubit 1 = parity(H up, L up, H dn).
    // Target: q1 = NOT tapered0, q0 = NOT tapered1.
    let terms = tapered.terms().map(|t| {
        let a = t.word.get(0);
        let b = t.word.get(1);
        let mut c = t.coefficient;
        for p in [a, b] {
            if matches!(p, Pauli::Y | Pauli::Z) {
                c = -c;
            }
        }
        let w = PauliWord::from_letters(&[(1, a), (0, b)], 2);
        PauliTerm { coefficient: c, word: w }
    });
    Ok(QubitOperator::from_terms(2, terms))
}

/// Qubit basis index of each CAS(2,2) determinant, keyed by occupation
/// bitmask (alpha orbitals in bits 0..2, beta in bits 2..4).
pub const CAS22_DICTIONARY: [(u64, usize); 4] = [
    (0b1001, 0b00), // H up, L dn
    (0b0101, 0b01), // H up, H dn
    (0b1010, 0b10), // L up, L dn
    (0b0110, 0b11), // L up, H dn
];
