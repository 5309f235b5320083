//! Energy landscape of the spin-restricted ansatz over `[-pi, pi]^2`.
//!
//! Stationary points are seeded at grid minima of the gradient norm, polished
//! by minimizing the squared gradient norm and classified by the number of
//! negative Hessian eigenvalues. Points where `cos(theta0/2 + pi/4) = 0` are
//! flagged as chart-singular: there the state no longer depends on `theta1`,
//! so the gradient can vanish without the state being an eigenvector.

use std::f64::consts::{FRAC_PI_4, PI};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{emit, load_fcidump, CliError, LandscapeArgs};
use crate::ansatz::spin_restricted_state;
use crate::opt::{minimize_unconstrained, OptimizerConfig};
use crate::solve::Problem;

/// Smallest grid that still brackets every stationary point.
pub const MIN_GRID: usize = 11;
const ORTHOGONALITY_THRESHOLD: f64 = 1e-3;
const HESSIAN_STEP: f64 = 1e-3;
const GRADIENT_STEP: f64 = 1e-5;
/// Accepted gradient norm after polishing.
const STATIONARY_TOLERANCE: f64 = 1e-5;
const INDEX_TOLERANCE: f64 = 1e-5;
const SINGULAR_TOLERANCE: f64 = 1e-4;
const MERGE_DISTANCE: f64 = 1e-3;
/// Energy window for grouping stationary points into classes.
pub const CLASS_TOLERANCE: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StationaryPointReport {
    /// `(theta0, theta1)` in radians, wrapped to `[-pi, pi)`.
    pub theta: [f64; 2],
    pub energy: f64,
    /// Number of negative Hessian eigenvalues.
    pub index: usize,
    pub gradient_norm: f64,
    pub hessian_eigenvalues: [f64; 2],
    pub chart_singular: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StationaryClass {
    pub index: usize,
    pub energy: f64,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Landscape {
    /// Points per axis; both ends of `[-pi, pi]` are included.
    pub grid: usize,
    pub axis: Vec<f64>,
    /// `energies[i0 * grid + i1]` at `(axis[i0], axis[i1])`.
    pub energies: Vec<f64>,
    /// Ordered by energy, then location.
    pub stationary: Vec<StationaryPointReport>,
    /// Grid points nearly orthogonal to the ground state.
    pub locus: Vec<[f64; 2]>,
}

struct Surface {
    h: [[f64; 4]; 4],
}

impl Surface {
    fn new(problem: &Problem) -> Result<Self, CliError> {
        let m = problem
            .hamiltonian
            .to_matrix()
            .map_err(|e| CliError::Solver(e.to_string()))?;
        let mut h = [[0.0; 4]; 4];
        for (i, row) in h.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = m[(i, j)].re;
            }
        }
        Ok(Self { h })
    }

    fn amplitudes(t0: f64, t1: f64) -> [f64; 4] {
        let psi = spin_restricted_state(t0, t1);
        let a = psi.amplitudes();
        [a[0].re, a[1].re, a[2].re, a[3].re]
    }

    fn energy(&self, t0: f64, t1: f64) -> f64 {
        let a = Self::amplitudes(t0, t1);
        (0..4).map(|i| a[i] * (0..4).map(|j| self.h[i][j] * a[j]).sum::<f64>()).sum()
    }

    fn gradient(&self, t: &[f64]) -> [f64; 2] {
        let d = GRADIENT_STEP;
        [
            (self.energy(t[0] + d, t[1]) - self.energy(t[0] - d, t[1])) / (2.0 * d),
            (self.energy(t[0], t[1] + d) - self.energy(t[0], t[1] - d)) / (2.0 * d),
        ]
    }

    fn hessian_eigenvalues(&self, t: &[f64]) -> [f64; 2] {
        let d = HESSIAN_STEP;
        let e = |a: f64, b: f64| self.energy(t[0] + a, t[1] + b);
        let e0 = e(0.0, 0.0);
        let h00 = (e(d, 0.0) - 2.0 * e0 + e(-d, 0.0)) / (d * d);
        let h11 = (e(0.0, d) - 2.0 * e0 + e(0.0, -d)) / (d * d);
        let h01 = (e(d, d) - e(d, -d) - e(-d, d) + e(-d, -d)) / (4.0 * d * d);
        let mean = 0.5 * (h00 + h11);
        let radius = (0.25 * (h00 - h11).powi(2) + h01 * h01).sqrt();
        [mean - radius, mean + radius]
    }
}

fn wrap(x: f64) -> f64 {
    (x + PI).rem_euclid(2.0 * PI) - PI
}

fn periodic_distance(a: [f64; 2], b: [f64; 2]) -> f64 {
    let d = |x: f64, y: f64| wrap(x - y).abs();
    d(a[0], b[0]).hypot(d(a[1], b[1]))
}

/// Evaluate the landscape of `problem` on a `grid x grid` mesh and locate
/// its stationary points.
pub fn scan_landscape(problem: &Problem, grid: usize) -> Result<Landscape, CliError> {
    if grid < MIN_GRID {
        return Err(CliError::Usage(format!(
            "grid of {grid} points per axis is too coarse to refine; need at least {MIN_GRID}"
        )));
    }
    let surface = Surface::new(problem)?;
    let step = 2.0 * PI / (grid - 1) as f64;
    let axis: Vec<f64> = (0..grid).map(|i| -PI + i as f64 * step).collect();
    let energies: Vec<f64> = (0..grid)
        .into_par_iter()
        .flat_map_iter(|i0| {
            let surface = &surface;
            let axis = &axis;
            (0..grid).map(move |i1| surface.energy(axis[i0], axis[i1]))
        })
        .collect();

    // the last row and column repeat the first on the periodic grid
    let m = grid - 1;
    let at = |i: usize, j: usize| energies[(i % m) * grid + j % m];
    let grad2: Vec<f64> = (0..m * m)
        .map(|k| {
            let (i, j) = (k / m, k % m);
            let g0 = (at(i + 1, j) - at(i + m - 1, j)) / (2.0 * step);
            let g1 = (at(i, j + 1) - at(i, j + m - 1)) / (2.0 * step);
            g0 * g0 + g1 * g1
        })
        .collect();
    let seeds: Vec<[f64; 2]> = (0..m * m)
        .filter(|&k| {
            let (i, j) = (k / m, k % m);
            let g = grad2[k];
            (0..3).all(|di| {
                (0..3).all(|dj| {
                    let nk = ((i + m + di - 1) % m) * m + (j + m + dj - 1) % m;
                    // ties go to the lower flat index so plateaus yield one seed
                    nk == k || g < grad2[nk] || (g == grad2[nk] && k < nk)
                })
            })
        })
        .map(|k| [axis[k / m], axis[k % m]])
        .collect();

    let polish = OptimizerConfig {
        rho_begin: step,
        rho_end: 1e-9,
        max_evaluations: 600,
        f_tolerance: 0.0,
    };
    let mut found: Vec<StationaryPointReport> = seeds
        .par_iter()
        .filter_map(|seed| {
            let r = minimize_unconstrained(
                |t| {
                    let g = surface.gradient(t);
                    g[0] * g[0] + g[1] * g[1]
                },
                seed,
                &polish,
            )
            .ok()?;
            let t = [wrap(r.x_best[0]), wrap(r.x_best[1])];
            let g = surface.gradient(&t);
            let gradient_norm = g[0].hypot(g[1]);
            if gradient_norm > STATIONARY_TOLERANCE {
                return None;
            }
            let hessian_eigenvalues = surface.hessian_eigenvalues(&t);
            Some(StationaryPointReport {
                theta: t,
                energy: surface.energy(t[0], t[1]),
                index: hessian_eigenvalues.iter().filter(|&&v| v < -INDEX_TOLERANCE).count(),
                gradient_norm,
                hessian_eigenvalues,
                chart_singular: (t[0] / 2.0 + FRAC_PI_4).cos().abs() < SINGULAR_TOLERANCE,
            })
        })
        .collect();
    found.sort_by(|a, b| a.gradient_norm.total_cmp(&b.gradient_norm));
    let mut stationary: Vec<StationaryPointReport> = Vec::new();
    for p in found {
        if stationary.iter().all(|q| periodic_distance(p.theta, q.theta) > MERGE_DISTANCE) {
            stationary.push(p);
        }
    }
    stationary.sort_by(|a, b| {
        a.energy
            .total_cmp(&b.energy)
            .then(a.theta[0].total_cmp(&b.theta[0]))
            .then(a.theta[1].total_cmp(&b.theta[1]))
    });

    let reference = stationary
        .iter()
        .find(|p| p.index == 0 && !p.chart_singular)
        .map(|p| p.theta)
        .unwrap_or_else(|| {
            let k = (0..energies.len()).min_by(|&a, &b| energies[a].total_cmp(&energies[b])).unwrap_or(0);
            [axis[k / grid], axis[k % grid]]
        });
    let psi0 = Surface::amplitudes(reference[0], reference[1]);
    let locus = (0..grid * grid)
        .filter_map(|k| {
            let t = [axis[k / grid], axis[k % grid]];
            let a = Surface::amplitudes(t[0], t[1]);
            let overlap: f64 = (0..4).map(|i| a[i] * psi0[i]).sum();
            (overlap * overlap < ORTHOGONALITY_THRESHOLD).then_some(t)
        })
        .collect();

    Ok(Landscape {
        grid,
        axis,
        energies,
        stationary,
        locus,
    })
}

impl Landscape {
    pub fn energy_at(&self, i0: usize, i1: usize) -> f64 {
        self.energies[i0 * self.grid + i1]
    }

    /// Regular stationary points grouped by Hessian index and energy.
    pub fn classes(&self) -> Vec<StationaryClass> {
        let mut classes: Vec<StationaryClass> = Vec::new();
        for p in self.stationary.iter().filter(|p| !p.chart_singular) {
            match classes
                .iter_mut()
                .find(|c| c.index == p.index && (c.energy - p.energy).abs() < CLASS_TOLERANCE)
            {
                Some(c) => c.count += 1,
                None => classes.push(StationaryClass {
                    index: p.index,
                    energy: p.energy,
                    count: 1,
                }),
            }
        }
        classes
    }

    /// Distance on the torus from `theta` to the nearest locus point.
    pub fn distance_to_locus(&self, theta: [f64; 2]) -> f64 {
        self.locus
            .iter()
            .map(|&p| periodic_distance(p, theta))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn grid_csv(&self) -> String {
        let mut s = String::from("theta0,theta1,energy\n");
        for (i0, &t0) in self.axis.iter().enumerate() {
            for (i1, &t1) in self.axis.iter().enumerate() {
                let _ = writeln!(s, "{t0:.12},{t1:.12},{:.12}", self.energy_at(i0, i1));
            }
        }
        s
    }

    pub fn locus_csv(&self) -> String {
        let mut s = String::from("theta0,theta1\n");
        for p in &self.locus {
            let _ = writeln!(s, "{:.12},{:.12}", p[0], p[1]);
        }
        s
    }
}

#[derive(Serialize)]
struct Summary<'a> {
    grid: usize,
    stationary: &'a [StationaryPointReport],
    classes: Vec<StationaryClass>,
    locus_points: usize,
}

pub(super) fn cmd_landscape(a: &LandscapeArgs) -> Result<(), CliError> {
    if a.grid < MIN_GRID {
        return Err(CliError::Usage(format!("--grid must be at least {MIN_GRID}")));
    }
    let data = load_fcidump(&a.fcidump)?;
    let problem = Problem::from_integrals(&data.integrals)?;
    let land = scan_landscape(&problem, a.grid)?;
    if let Some(path) = &a.out {
        emit(Some(path), &land.grid_csv())?;
    }
    if let Some(path) = &a.locus {
        emit(Some(path), &land.locus_csv())?;
    }
    let summary = Summary {
        grid: land.grid,
        stationary: &land.stationary,
        classes: land.classes(),
        locus_points: land.locus.len(),
    };
    let line = serde_json::to_string(&summary).map_err(|e| CliError::Io(e.to_string()))?;
    emit(None, &(line + "\n"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qop::ActiveSpaceIntegrals;

    fn hubbard() -> Problem {
        let mut ints = ActiveSpaceIntegrals::zeros(2, 0.0);
        ints.set_one(0, 1, -1.0);
        ints.set_two(0, 0, 0, 0, 2.0);
        ints.set_two(1, 1, 1, 1, 2.0);
        Problem::from_integrals(&ints).unwrap()
    }

    #[test]
    fn hubbard_classes_are_the_three_singlets() {
        let land = scan_landscape(&hubbard(), 61).unwrap();
        let classes = land.classes();
        let expect = [(0, 1.0 - 5f64.sqrt()), (1, 2.0), (2, 1.0 + 5f64.sqrt())];
        assert_eq!(classes.len(), 3, "{classes:?}");
        for (c, (index, e)) in classes.iter().zip(expect) {
            assert_eq!(c.index, index);
            assert!((c.energy - e).abs() < 1e-3, "{c:?}");
        }
        let saddle = land.stationary.iter().find(|p| p.index == 1 && !p.chart_singular).unwrap();
        assert!(land.distance_to_locus(saddle.theta) < 2.0 * 2.0 * PI / 60.0);
    }

    #[test]
    fn landscape_is_periodic() {
        let land = scan_landscape(&hubbard(), 41).unwrap();
        let n = land.grid;
        for i in 0..n {
            assert!((land.energy_at(0, i) - land.energy_at(n - 1, i)).abs() < 1e-10);
            assert!((land.energy_at(i, 0) - land.energy_at(i, n - 1)).abs() < 1e-10);
        }
    }

    #[test]
    fn coarse_grid_rejected() {
        assert!(matches!(scan_landscape(&hubbard(), MIN_GRID - 1), Err(CliError::Usage(_))));
    }

    #[test]
    fn csv_shapes() {
        let land = scan_landscape(&hubbard(), 11).unwrap();
        assert_eq!(land.grid_csv().lines().count(), 1 + 121);
        assert_eq!(land.locus_csv().lines().next(), Some("theta0,theta1"));
    }
}
