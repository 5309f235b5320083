use nalgebra::{DMatrix, DVector};

use super::subproblem::trust_region_step;
use super::{Evaluation, HistoryEntry, OptError, OptResult, OptimizerConfig, StopReason, FEASIBILITY_TOLERANCE};

// Simplex acceptability: every vertex at least ALPHA*rho from the opposite
// face and at most BETA*rho from the pole.
const ALPHA: f64 = 0.25;
const BETA: f64 = 2.1;
// Geometry-repair step length as a fraction of rho.
const GAMMA: f64 = 0.5;
// Vertices farther than DELTA*rho are preferred for replacement.
const DELTA: f64 = 1.1;

#[derive(Clone, Debug)]
struct Point {
    x: DVector<f64>,
    f: f64,
    c: Vec<f64>,
    violation: f64,
}

impl Point {
    fn merit(&self, mu: f64) -> f64 {
        self.f + mu * self.violation
    }
}

fn violation(c: &[f64]) -> f64 {
    c.iter().map(|v| -v).fold(0.0, f64::max)
}

struct Driver<'a, F> {
    f: F,
    cfg: &'a OptimizerConfig,
    n_constraints: Option<usize>,
    history: Vec<HistoryEntry>,
}

impl<F, E> Driver<'_, F>
where
    F: FnMut(&[f64]) -> Result<Evaluation, E>,
    E: From<OptError>,
{
    /// `Ok(None)` once the budget is spent.
    fn evaluate(&mut self, x: &DVector<f64>) -> Result<Option<Point>, E> {
        if self.history.len() >= self.cfg.max_evaluations {
            return Ok(None);
        }
        let e = (self.f)(x.as_slice())?;
        if !e.objective.is_finite() || e.constraints.iter().any(|c| !c.is_finite()) {
            return Err(OptError::NonFinite { x: x.as_slice().to_vec() }.into());
        }
        let m = *self.n_constraints.get_or_insert(e.constraints.len());
        if m != e.constraints.len() {
            return Err(OptError::ConstraintCountChanged {
                expected: m,
                got: e.constraints.len(),
            }
            .into());
        }
        let v = violation(&e.constraints);
        self.history.push(HistoryEntry {
            x: x.as_slice().to_vec(),
            f: e.objective,
            violation: v,
        });
        Ok(Some(Point {
            x: x.clone(),
            f: e.objective,
            c: e.constraints,
            violation: v,
        }))
    }

    fn finish(self, stop: StopReason) -> OptResult {
        let feasible = self
            .history
            .iter()
            .filter(|h| h.violation <= FEASIBILITY_TOLERANCE)
            .min_by(|a, b| a.f.total_cmp(&b.f));
        let best = feasible.unwrap_or_else(|| {
            self.history
                .iter()
                .min_by(|a, b| a.violation.total_cmp(&b.violation).then(a.f.total_cmp(&b.f)))
                .expect("at least one evaluation")
        });
        OptResult {
            x_best: best.x.clone(),
            f_best: best.f,
            n_evaluations: self.history.len(),
            constraint_violation: best.violation,
            stop,
            history: self.history,
        }
    }
}

/// Simplex quantities relative to the pole.
struct Frame {
    /// Row `j` is vertex `others[j]` minus the pole.
    d: DMatrix<f64>,
    /// Inverse of `d`.
    simi: DMatrix<f64>,
    others: Vec<usize>,
    acceptable: bool,
}

impl Frame {
    fn build(pts: &[Point], pole: usize, rho: f64) -> Option<Frame> {
        let n = pts[pole].x.len();
        let others: Vec<usize> = (0..pts.len()).filter(|&k| k != pole).collect();
        let d = DMatrix::from_fn(n, n, |j, i| pts[others[j]].x[i] - pts[pole].x[i]);
        let simi = d.clone().try_inverse()?;
        if simi.iter().any(|v| !v.is_finite()) {
            return None;
        }
        let acceptable = (0..n).all(|j| {
            let vsig = 1.0 / simi.column(j).norm();
            let veta = d.row(j).norm();
            vsig >= ALPHA * rho && veta <= BETA * rho
        });
        Some(Frame {
            d,
            simi,
            others,
            acceptable,
        })
    }

    /// Gradient of the linear interpolant of `values` (pole value first).
    fn gradient(&self, pole_value: f64, vertex_values: impl Iterator<Item = f64>) -> DVector<f64> {
        let diff = DVector::from_iterator(self.others.len(), vertex_values.map(|v| v - pole_value));
        &self.simi * diff
    }
}

fn best_vertex(pts: &[Point], mu: f64, current: usize) -> usize {
    let mut best = current;
    for (k, p) in pts.iter().enumerate() {
        let (pb, pk) = (pts[best].merit(mu), p.merit(mu));
        if pk < pb || (pk == pb && p.violation < pts[best].violation) {
            best = k;
        }
    }
    best
}

fn model_merit(g: &DVector<f64>, a: &[DVector<f64>], c: &[f64], mu: f64, d: &DVector<f64>) -> f64 {
    let v = a.iter().zip(c).map(|(ai, ci)| -ci - ai.dot(d)).fold(0.0, f64::max);
    g.dot(d) + mu * v
}

/// Minimize `f(x).objective` subject to `f(x).constraints >= 0`, with a
/// fallible evaluator. Evaluation errors abort the run and are returned.
pub fn try_minimize<F, E>(f: F, x0: &[f64], cfg: &OptimizerConfig) -> Result<OptResult, E>
where
    F: FnMut(&[f64]) -> Result<Evaluation, E>,
    E: From<OptError>,
{
    cfg.validate()?;
    let n = x0.len();
    if n == 0 {
        return Err(OptError::EmptyStart.into());
    }
    let mut drv = Driver {
        f,
        cfg,
        n_constraints: None,
        history: Vec::new(),
    };
    let mut rho = cfg.rho_begin;
    let mut mu = 0.0f64;

    let start = DVector::from_column_slice(x0);
    let mut pts = Vec::with_capacity(n + 1);
    match drv.evaluate(&start)? {
        Some(p) => pts.push(p),
        None => return Ok(drv.finish(StopReason::MaxEvaluations)),
    }
    for j in 0..n {
        let mut x = start.clone();
        x[j] += rho;
        match drv.evaluate(&x)? {
            Some(p) => pts.push(p),
            None => return Ok(drv.finish(StopReason::MaxEvaluations)),
        }
    }
    let m = pts[0].c.len();

    let mut pole = 0usize;
    let mut skip_geometry = false;
    let mut pole_restarts = 0usize;
    let mut f_at_last_reduction: Option<f64> = None;
    // consecutive radius reductions over which the objective stayed flat
    let mut settled_phases = 0usize;

    loop {
        pole = best_vertex(&pts, mu, pole);
        let frame = match Frame::build(&pts, pole, rho) {
            Some(fr) => fr,
            None => {
                // degenerate simplex: rebuild it around the pole
                let base = pts[pole].clone();
                let mut fresh = vec![base.clone()];
                for j in 0..n {
                    let mut x = base.x.clone();
                    x[j] += rho;
                    match drv.evaluate(&x)? {
                        Some(p) => fresh.push(p),
                        None => return Ok(drv.finish(StopReason::MaxEvaluations)),
                    }
                }
                pts = fresh;
                pole = 0;
                continue;
            }
        };
        let p0 = &pts[pole];
        let g = frame.gradient(p0.f, frame.others.iter().map(|&k| pts[k].f));
        let a: Vec<DVector<f64>> = (0..m)
            .map(|i| frame.gradient(p0.c[i], frame.others.iter().map(|&k| pts[k].c[i])))
            .collect();
        let c0 = p0.c.clone();

        if !skip_geometry && !frame.acceptable {
            // replace the vertex that most damages the simplex shape
            let veta: Vec<f64> = (0..n).map(|j| frame.d.row(j).norm()).collect();
            let vsig: Vec<f64> = (0..n).map(|j| 1.0 / frame.simi.column(j).norm()).collect();
            let far = (0..n).max_by(|&i, &j| veta[i].total_cmp(&veta[j])).unwrap();
            let jdrop = if veta[far] > BETA * rho {
                far
            } else {
                (0..n).min_by(|&i, &j| vsig[i].total_cmp(&vsig[j])).unwrap()
            };
            let col = frame.simi.column(jdrop);
            let dir: DVector<f64> = col * (GAMMA * rho / col.norm());
            let step = if model_merit(&g, &a, &c0, mu, &dir) <= model_merit(&g, &a, &c0, mu, &-&dir) {
                dir
            } else {
                -dir
            };
            let x = &pts[pole].x + step;
            match drv.evaluate(&x)? {
                Some(p) => pts[frame.others[jdrop]] = p,
                None => return Ok(drv.finish(StopReason::MaxEvaluations)),
            }
            continue;
        }

        let (d, _) = trust_region_step(&g, &a, &c0, rho);
        let mut reduce = d.norm() < 0.5 * rho;
        if !reduce {
            let v0 = pts[pole].violation;
            let v1 = a.iter().zip(&c0).map(|(ai, ci)| -ci - ai.dot(&d)).fold(0.0, f64::max);
            let prerec = v0 - v1;
            let predicted_change = g.dot(&d);
            if prerec > 0.0 {
                let barmu = predicted_change / prerec;
                if mu < 1.5 * barmu {
                    mu = 2.0 * barmu;
                    if best_vertex(&pts, mu, pole) != pole && pole_restarts < 4 {
                        pole_restarts += 1;
                        skip_geometry = true;
                        continue;
                    }
                }
            }
            pole_restarts = 0;
            let prerem = mu * prerec - predicted_change;
            let x = &pts[pole].x + &d;
            let new = match drv.evaluate(&x)? {
                Some(p) => p,
                None => return Ok(drv.finish(StopReason::MaxEvaluations)),
            };
            let trured = pts[pole].merit(mu) - new.merit(mu);

            // choose the vertex the new point replaces
            let threshold = if trured > 0.0 { 0.0 } else { 1.0 };
            let mut jdrop = None;
            let mut best_score = threshold;
            for j in 0..n {
                let sigma = frame.simi.column(j).dot(&d);
                let dist = if trured > 0.0 {
                    (frame.d.row(j).transpose() - &d).norm()
                } else {
                    frame.d.row(j).norm()
                };
                let score = sigma.abs() * (dist / (DELTA * rho)).powi(2).max(1.0);
                if score > best_score {
                    best_score = score;
                    jdrop = Some(j);
                }
            }
            if let Some(j) = jdrop {
                pts[frame.others[j]] = new;
            }
            if trured > 0.0 && prerem > 0.0 && trured >= 0.1 * prerem {
                skip_geometry = true;
                continue;
            }
            reduce = true;
        }

        if reduce {
            if !frame.acceptable {
                skip_geometry = false;
                continue;
            }
            if rho <= cfg.rho_end {
                return Ok(drv.finish(StopReason::RhoEnd));
            }
            pole = best_vertex(&pts, mu, pole);
            if cfg.f_tolerance > 0.0 && pts[pole].violation <= FEASIBILITY_TOLERANCE {
                let (lo, hi) = pts
                    .iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.f), hi.max(p.f)));
                let settled = f_at_last_reduction.is_some_and(|prev| (prev - pts[pole].f).abs() < cfg.f_tolerance);
                if hi - lo < cfg.f_tolerance && settled {
                    settled_phases += 1;
                } else {
                    settled_phases = 0;
                }
                // one flat phase can be a simplex ringing the minimum
                if settled_phases >= 2 {
                    return Ok(drv.finish(StopReason::FTolerance));
                }
            } else {
                settled_phases = 0;
            }
            f_at_last_reduction = Some(pts[pole].f);
            rho *= 0.5;
            if rho <= 1.5 * cfg.rho_end {
                rho = cfg.rho_end;
            }
            if mu > 0.0 {
                let mut denom = 0.0f64;
                for k in 0..m {
                    let (lo, hi) = pts
                        .iter()
                        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.c[k]), hi.max(p.c[k])));
                    if lo < 0.5 * hi {
                        let t = hi.max(0.0) - lo;
                        denom = if denom <= 0.0 { t } else { denom.min(t) };
                    }
                }
                let (lo, hi) = pts
                    .iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.f), hi.max(p.f)));
                if denom == 0.0 {
                    mu = 0.0;
                } else if hi - lo < mu * denom {
                    mu = (hi - lo) / denom;
                }
            }
            skip_geometry = true;
        }
    }
}

/// Infallible-evaluator form of [`try_minimize`].
pub fn minimize<F>(mut f: F, x0: &[f64], cfg: &OptimizerConfig) -> Result<OptResult, OptError>
where
    F: FnMut(&[f64]) -> Evaluation,
{
    try_minimize(|x: &[f64]| Ok::<_, OptError>(f(x)), x0, cfg)
}

pub fn minimize_unconstrained<F>(mut f: F, x0: &[f64], cfg: &OptimizerConfig) -> Result<OptResult, OptError>
where
    F: FnMut(&[f64]) -> f64,
{
    minimize(|x| Evaluation::unconstrained(f(x)), x0, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    #[test]
    fn linear_objective_on_unit_disk() {
        let r = minimize(
            |x| Evaluation {
                objective: x[0] + x[1],
                constraints: vec![1.0 - x[0] * x[0] - x[1] * x[1]],
            },
            &[0.0, 0.0],
            &OptimizerConfig::default(),
        )
        .unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((r.x_best[0] + h).abs() < 1e-3 && (r.x_best[1] + h).abs() < 1e-3, "{:?}", r.x_best);
        assert!((r.f_best + std::f64::consts::SQRT_2).abs() < 1e-3);
        assert!(r.n_evaluations <= 100);
        assert!(r.is_feasible());
    }

    #[test]
    fn rosenbrock() {
        // the trust radius never grows, so the curved valley is followed in
        // steps of the radius reached early on; this takes thousands of calls
        let cfg = OptimizerConfig {
            max_evaluations: 12_000,
            rho_end: 1e-8,
            f_tolerance: 0.0,
            ..Default::default()
        };
        let r = minimize_unconstrained(
            |x| (x[0] - 1.0).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2),
            &[-1.2, 1.0],
            &cfg,
        )
        .unwrap();
        assert!(r.f_best < 1e-4, "{} after {}", r.f_best, r.n_evaluations);
        assert!(r.n_evaluations <= 12_000);
    }

    #[test]
    fn quadratic_bowl_reaches_rho_end_scale() {
        let r = minimize_unconstrained(
            |x| (x[0] - 0.3).powi(2) + 2.0 * (x[1] + 0.7).powi(2) + 0.5 * x[0] * x[1],
            &[1.0, 1.0],
            &OptimizerConfig {
                f_tolerance: 0.0,
                max_evaluations: 400,
                ..Default::default()
            },
        )
        .unwrap();
        // analytic minimizer of the quadratic
        let h = nalgebra::Matrix2::new(2.0, 0.5, 0.5, 4.0);
        let b = nalgebra::Vector2::new(0.6, -2.8);
        let xs = h.try_inverse().unwrap() * b;
        assert!((r.x_best[0] - xs[0]).abs() < 1e-3 && (r.x_best[1] - xs[1]).abs() < 1e-3);
        assert_eq!(r.stop, StopReason::RhoEnd);
    }

    #[test]
    fn noisy_parabola() {
        let mut successes = 0;
        for seed in 0..50 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let noise = Normal::new(0.0, 1e-3).unwrap();
            let r = minimize_unconstrained(|x| x[0] * x[0] + noise.sample(&mut rng), &[0.8], &OptimizerConfig::default())
                .unwrap();
            if r.x_best[0].abs() < 0.05 {
                successes += 1;
            }
        }
        assert!(successes >= 45, "{successes}/50");
    }

    #[test]
    fn budget_is_respected() {
        let mut calls = 0;
        let cfg = OptimizerConfig {
            max_evaluations: 7,
            ..Default::default()
        };
        let r = minimize_unconstrained(
            |x| {
                calls += 1;
                x.iter().map(|v| (v - 3.0).powi(2)).sum()
            },
            &[0.0; 4],
            &cfg,
        )
        .unwrap();
        assert_eq!(calls, 7);
        assert_eq!(r.n_evaluations, 7);
        assert_eq!(r.history.len(), 7);
        assert_eq!(r.stop, StopReason::MaxEvaluations);
    }

    #[test]
    fn non_finite_aborts() {
        let r = minimize_unconstrained(|x| if x[0] > 0.2 { f64::NAN } else { x[0] }, &[0.0], &OptimizerConfig::default());
        assert!(matches!(r, Err(OptError::NonFinite { .. })));
    }

    #[test]
    fn infeasible_problem_is_flagged() {
        let r = minimize(
            |x| Evaluation {
                objective: x[0],
                constraints: vec![-1.0 - x[0] * x[0]],
            },
            &[0.5],
            &OptimizerConfig::default(),
        )
        .unwrap();
        assert!(!r.is_feasible());
        assert!((r.constraint_violation - 1.0).abs() < 1e-3);
    }

    #[test]
    fn best_is_recorded_value() {
        let r = minimize_unconstrained(|x| (x[0] - 2.0).powi(2) + x[1].abs(), &[0.0, 1.0], &OptimizerConfig::default())
            .unwrap();
        let h = r.history.iter().find(|h| h.x == r.x_best).unwrap();
        assert_eq!(h.f, r.f_best);
    }

    #[test]
    fn rejects_bad_config() {
        let cfg = OptimizerConfig {
            rho_end: 1.0,
            rho_begin: 0.5,
            ..Default::default()
        };
        assert!(matches!(minimize_unconstrained(|x| x[0], &[0.0], &cfg), Err(OptError::InvalidConfig(_))));
        assert!(matches!(
            minimize_unconstrained(|_| 0.0, &[], &OptimizerConfig::default()),
            Err(OptError::EmptyStart)
        ));
    }
}
