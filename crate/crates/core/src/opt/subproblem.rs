//! Trust-region subproblem for linear models.
//!
//! Given an objective gradient `g` and constraint models `c_i + a_i . d >= 0`,
//! find `d` with `|d| <= delta` that first minimizes the largest linearized
//! violation and then, keeping that violation level, minimizes `g . d`.
//!
//! Both stages are convex with few constraints, so they are solved exactly by
//! enumerating candidate active sets: every optimum is the extreme point of
//! the ball restricted to the affine slice where its active constraints hold
//! with equality.

use nalgebra::{DMatrix, DVector};

/// Active sets are enumerated exhaustively up to this many constraints;
/// beyond it only sets of size at most two are tried.
const EXHAUSTIVE_LIMIT: usize = 12;

fn subsets(m: usize, n: usize) -> Vec<Vec<usize>> {
    let max_size = if m <= EXHAUSTIVE_LIMIT { n.min(m) } else { 2.min(n) };
    let mut out = vec![Vec::new()];
    if m <= EXHAUSTIVE_LIMIT {
        for mask in 1u32..(1u32 << m) {
            let s: Vec<usize> = (0..m).filter(|i| mask >> i & 1 == 1).collect();
            if s.len() <= max_size {
                out.push(s);
            }
        }
    } else {
        for i in 0..m {
            out.push(vec![i]);
            if max_size >= 2 {
                for j in i + 1..m {
                    out.push(vec![i, j]);
                }
            }
        }
    }
    out
}

/// Minimum-norm solution of `rows . d = rhs` and the projector onto the
/// null space of `rows`; `None` for (nearly) dependent rows.
fn affine_slice(rows: &[DVector<f64>], rhs: &[f64], n: usize) -> Option<(DVector<f64>, DMatrix<f64>)> {
    if rows.is_empty() {
        return Some((DVector::zeros(n), DMatrix::identity(n, n)));
    }
    let a = DMatrix::from_fn(rows.len(), n, |i, j| rows[i][j]);
    let sv = a.clone().singular_values();
    if sv.min() <= 1e-12 * sv.max().max(1e-300) {
        return None;
    }
    let gram_inv = (&a * a.transpose()).try_inverse()?;
    let b = DVector::from_column_slice(rhs);
    let dp = a.transpose() * (&gram_inv * b);
    let p = DMatrix::identity(n, n) - a.transpose() * gram_inv * &a;
    Some((dp, p))
}

/// Point of the slice maximizing `dir . d` on the ball (or the slice's
/// min-norm point when `dir` is orthogonal to it).
fn extreme_point(dp: &DVector<f64>, p: &DMatrix<f64>, dir: &DVector<f64>, delta: f64) -> Option<DVector<f64>> {
    let r2 = delta * delta - dp.norm_squared();
    if r2 < -1e-12 * delta * delta {
        return None;
    }
    let u = p * dir;
    let un = u.norm();
    if un <= 1e-14 * dir.norm().max(1e-300) {
        return Some(dp.clone());
    }
    Some(dp + u * (r2.max(0.0).sqrt() / un))
}

fn max_violation(a: &[DVector<f64>], c: &[f64], d: &DVector<f64>) -> f64 {
    a.iter().zip(c).map(|(ai, ci)| -ci - ai.dot(d)).fold(0.0, f64::max)
}

fn tolerance(ai: &DVector<f64>, ci: f64, delta: f64) -> f64 {
    1e-10 * (1.0 + ci.abs() + ai.norm() * delta)
}

/// Smallest attainable linearized violation and a step attaining it.
fn least_violation(a: &[DVector<f64>], c: &[f64], delta: f64, n: usize) -> (f64, DVector<f64>) {
    let m = a.len();
    let sets = subsets(m, n);
    // exact feasibility: min-norm point of { d : a_i . d >= -c_i }
    let mut best: Option<DVector<f64>> = None;
    for s in &sets {
        let rows: Vec<DVector<f64>> = s.iter().map(|&i| a[i].clone()).collect();
        let rhs: Vec<f64> = s.iter().map(|&i| -c[i]).collect();
        if let Some((dp, _)) = affine_slice(&rows, &rhs, n) {
            let ok = (0..m).all(|j| a[j].dot(&dp) + c[j] >= -tolerance(&a[j], c[j], delta));
            if ok && best.as_ref().is_none_or(|b| dp.norm() < b.norm()) {
                best = Some(dp);
            }
        }
    }
    if let Some(d) = best {
        if d.norm() <= delta * (1.0 + 1e-12) {
            return (0.0, d);
        }
    }
    // otherwise the optimum lies on the sphere with a set of tied violations
    let mut best = (f64::INFINITY, DVector::zeros(n));
    for s in sets.iter().filter(|s| !s.is_empty()) {
        let lead = s[0];
        let rows: Vec<DVector<f64>> = s[1..].iter().map(|&i| &a[i] - &a[lead]).collect();
        let rhs: Vec<f64> = s[1..].iter().map(|&i| c[lead] - c[i]).collect();
        if let Some((dp, p)) = affine_slice(&rows, &rhs, n) {
            if let Some(d) = extreme_point(&dp, &p, &a[lead], delta) {
                let v = max_violation(a, c, &d);
                if v < best.0 {
                    best = (v, d);
                }
            }
        }
    }
    best
}

/// Trust-region step for the models. Returns the step and the linearized
/// violation level it keeps.
pub(crate) fn trust_region_step(g: &DVector<f64>, a: &[DVector<f64>], c: &[f64], delta: f64) -> (DVector<f64>, f64) {
    let n = g.len();
    let m = a.len();
    let current = c.iter().map(|ci| -ci).fold(0.0, f64::max);
    let (vstar, d1) = if current > 0.0 {
        least_violation(a, c, delta, n)
    } else {
        (0.0, DVector::zeros(n))
    };
    let feasible = |d: &DVector<f64>| {
        d.norm() <= delta * (1.0 + 1e-10)
            && (0..m).all(|j| a[j].dot(d) + c[j] + vstar >= -tolerance(&a[j], c[j], delta))
    };
    let neg_g = -g;
    let mut best = d1.clone();
    let mut best_val = g.dot(&d1);
    for s in subsets(m, n) {
        let rows: Vec<DVector<f64>> = s.iter().map(|&i| a[i].clone()).collect();
        let rhs: Vec<f64> = s.iter().map(|&i| -c[i] - vstar).collect();
        let Some((dp, p)) = affine_slice(&rows, &rhs, n) else {
            continue;
        };
        let Some(d) = extreme_point(&dp, &p, &neg_g, delta) else {
            continue;
        };
        if !feasible(&d) {
            continue;
        }
        let val = g.dot(&d);
        let scale = 1e-14 * (1.0 + g.norm() * delta);
        if val < best_val - scale || (val <= best_val + scale && d.norm() < best.norm()) {
            best_val = val;
            best = d;
        }
    }
    (best, vstar)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(x)
    }

    #[test]
    fn unconstrained_step_is_steepest_descent() {
        let (d, vs) = trust_region_step(&v(&[3.0, 4.0]), &[], &[], 2.0);
        assert_eq!(vs, 0.0);
        assert!((d - v(&[-1.2, -1.6])).norm() < 1e-14);
    }

    #[test]
    fn active_halfspace_slides_along_boundary() {
        // minimize -x subject to 0.5 - x >= 0 in the unit ball
        let (d, _) = trust_region_step(&v(&[-1.0, 0.0]), &[v(&[-1.0, 0.0])], &[0.5], 1.0);
        assert!((d[0] - 0.5).abs() < 1e-12);
        assert!(d.norm() <= 1.0 + 1e-12);
    }

    #[test]
    fn infeasible_start_reduces_violation_first() {
        // c = -2 + x >= 0 with radius 1: best is x = 1, violation 1
        let (d, vs) = trust_region_step(&v(&[1.0, 0.0]), &[v(&[1.0, 0.0])], &[-2.0], 1.0);
        assert!((vs - 1.0).abs() < 1e-12);
        assert!((d - v(&[1.0, 0.0])).norm() < 1e-9);
    }

    #[test]
    fn restores_feasibility_inside_ball() {
        // c = -0.5 + x >= 0 reachable; then minimize y
        let (d, vs) = trust_region_step(&v(&[0.0, 1.0]), &[v(&[1.0, 0.0])], &[-0.5], 1.0);
        assert_eq!(vs, 0.0);
        assert!(d[0] >= 0.5 - 1e-10);
        assert!((d[1] + (1.0f64 - 0.25).sqrt()).abs() < 1e-9);
    }

    #[test]
    fn two_tied_violations() {
        // -1 + x >= 0 and -1 - x + y >= 0 in radius 0.5; both violated at 0
        let a = [v(&[1.0, 0.0]), v(&[-1.0, 1.0])];
        let (d, vs) = trust_region_step(&v(&[0.0, 0.0]), &a, &[-1.0, -1.0], 0.5);
        let viol = max_violation(&a, &[-1.0, -1.0], &d);
        assert!((viol - vs).abs() < 1e-9);
        // brute-force over the disk
        let mut brute = f64::INFINITY;
        for i in 0..=400 {
            for j in 0..=400 {
                let p = v(&[-0.5 + i as f64 / 400.0, -0.5 + j as f64 / 400.0]);
                if p.norm() <= 0.5 {
                    brute = brute.min(max_violation(&a, &[-1.0, -1.0], &p));
                }
            }
        }
        assert!(vs <= brute + 1e-9 && vs > brute - 1e-2);
    }
}
