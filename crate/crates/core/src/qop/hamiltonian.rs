use super::fermion::{FermionOperator, Ladder};
use super::integrals::ActiveSpaceIntegrals;
use super::QopError;

/// Spin-orbital index for spatial orbital `p` and spin `sigma` (0 = alpha).
#[inline]
pub fn spin_orbital(p: usize, sigma: usize, n_orbitals: usize) -> usize {
    p + sigma * n_orbitals
}

/// Spin-summed excitation `E_pq = sum_sigma a+_{p sigma} a_{q sigma}`.
pub fn excitation(n_orbitals: usize, p: usize, q: usize) -> FermionOperator {
    let mut op = FermionOperator::zero(2 * n_orbitals);
    for sigma in 0..2 {
        op.push(
            1.0,
            vec![
                Ladder::create(spin_orbital(p, sigma, n_orbitals)),
                Ladder::annihilate(spin_orbital(q, sigma, n_orbitals)),
            ],
        );
    }
    op
}

/// Spin-summed pair operator
/// `e_pqrs = sum_{sigma tau} a+_{p sigma} a+_{r tau} a_{s tau} a_{q sigma}`.
///
/// Its expectation is the chemists'-order 2-RDM element `Gamma[p][q][r][s]`.
pub fn pair_excitation(n_orbitals: usize, p: usize, q: usize, r: usize, s: usize) -> FermionOperator {
    let mut op = FermionOperator::zero(2 * n_orbitals);
    for sigma in 0..2 {
        for tau in 0..2 {
            op.push(
                1.0,
                vec![
                    Ladder::create(spin_orbital(p, sigma, n_orbitals)),
                    Ladder::create(spin_orbital(r, tau, n_orbitals)),
                    Ladder::annihilate(spin_orbital(s, tau, n_orbitals)),
                    Ladder::annihilate(spin_orbital(q, sigma, n_orbitals)),
                ],
            );
        }
    }
    op
}

/// `N = sum_p E_pp`.
pub fn number_operator(n_orbitals: usize) -> FermionOperator {
    let mut op = FermionOperator::zero(2 * n_orbitals);
    for p in 0..n_orbitals {
        op = &op + &excitation(n_orbitals, p, p);
    }
    op
}

/// Active-space Hamiltonian
/// `sum h_pq E_pq + 1/2 sum (pq|rs) e_pqrs + e_core`.
pub fn build_hamiltonian(ints: &ActiveSpaceIntegrals) -> Result<FermionOperator, QopError> {
    ints.validate()?;
    let n = ints.n_orbitals;
    let mut op = FermionOperator::constant(2 * n, ints.e_core);
    for p in 0..n {
        for q in 0..n {
            let h = ints.one(p, q);
            if h != 0.0 {
                op = &op + &excitation(n, p, q).scale(h);
            }
        }
    }
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    let g = ints.two(p, q, r, s);
                    if g != 0.0 {
                        op = &op + &pair_excitation(n, p, q, r, s).scale(0.5 * g);
                    }
                }
            }
        }
    }
    Ok(op)
}

/// Total spin squared `S^2 = S- S+ + Sz (Sz + 1)`, normal ordered.
pub fn build_s2_operator(n_orbitals: usize) -> FermionOperator {
    let m = 2 * n_orbitals;
    let mut s_plus = FermionOperator::zero(m);
    let mut s_minus = FermionOperator::zero(m);
    let mut s_z = FermionOperator::zero(m);
    for p in 0..n_orbitals {
        let a = spin_orbital(p, 0, n_orbitals);
        let b = spin_orbital(p, 1, n_orbitals);
        s_plus.push(1.0, vec![Ladder::create(a), Ladder::annihilate(b)]);
        s_minus.push(1.0, vec![Ladder::create(b), Ladder::annihilate(a)]);
        s_z.push(0.5, vec![Ladder::create(a), Ladder::annihilate(a)]);
        s_z.push(-0.5, vec![Ladder::create(b), Ladder::annihilate(b)]);
    }
    let sz_plus_one = &s_z + &FermionOperator::constant(m, 1.0);
    let op = &(&s_minus * &s_plus) + &(&s_z * &sz_plus_one);
    op.normal_ordered()
}

#[cfg(test)]
mod tests {
    use super::*;

    // occupation bitmask for 2 orbitals: alpha 0,1 -> bits 0,1; beta 0,1 -> bits 2,3
    const HOMO_A: u64 = 1 << 0;
    const LUMO_A: u64 = 1 << 1;
    const HOMO_B: u64 = 1 << 2;
    const LUMO_B: u64 = 1 << 3;

    fn expectation(op: &FermionOperator, vec: &[(f64, u64)]) -> f64 {
        let mut total = 0.0;
        for &(cj, sj) in vec {
            for (c, s) in op.apply_to_state(sj) {
                for &(ci, si) in vec {
                    if si == s {
                        total += ci * c * cj;
                    }
                }
            }
        }
        total
    }

    #[test]
    fn single_orbital_hamiltonian() {
        let ints = ActiveSpaceIntegrals::new(0.0, 1, vec![-0.5], vec![0.0]).unwrap();
        let h = build_hamiltonian(&ints).unwrap();
        let mut expect = FermionOperator::zero(2);
        expect.push(-0.5, vec![Ladder::create(0), Ladder::annihilate(0)]);
        expect.push(-0.5, vec![Ladder::create(1), Ladder::annihilate(1)]);
        assert!(h.approx_eq(&expect, 1e-14));
    }

    #[test]
    fn core_energy_is_constant_shift() {
        let ints = ActiveSpaceIntegrals::zeros(2, 3.7);
        let h = build_hamiltonian(&ints).unwrap();
        assert!(h.approx_eq(&FermionOperator::constant(4, 3.7), 1e-14));
    }

    #[test]
    fn s2_closed_shell_singlet() {
        let s2 = build_s2_operator(2);
        assert!(expectation(&s2, &[(1.0, HOMO_A | HOMO_B)]).abs() < 1e-14);
    }

    #[test]
    fn s2_open_shell_singlet_and_triplet() {
        let s2 = build_s2_operator(2);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        // a+_{L alpha} a+_{H beta}|vac> is the canonical state HOMO_B | LUMO_A with sign +1
        let singlet = [(r, HOMO_A | LUMO_B), (r, LUMO_A | HOMO_B)];
        let triplet = [(r, HOMO_A | LUMO_B), (-r, LUMO_A | HOMO_B)];
        assert!(expectation(&s2, &singlet).abs() < 1e-14);
        assert!((expectation(&s2, &triplet) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn s2_high_spin_triplet() {
        let s2 = build_s2_operator(2);
        assert!((expectation(&s2, &[(1.0, HOMO_A | LUMO_A)]) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn number_operator_counts() {
        let n = number_operator(2);
        assert_eq!(n.apply_to_state(HOMO_A | LUMO_B), vec![(2.0, HOMO_A | LUMO_B)]);
    }
}
