//! Derivative-free minimization shared by the convex-roof and discord
//! searches: a Nelder-Mead simplex with adaptive coefficients, a seeded
//! multistart driver, and the real parametrization of unitaries both
//! searches run over.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::qstate::{CMatrix, C64};

/// Knobs for the multistart searches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    /// Independent random starts; the best local minimum wins.
    pub restarts: usize,
    /// Outcomes of Eve's measurement in the convex-roof search. `None` means
    /// `rank^2`.
    pub ensemble_size: Option<usize>,
    /// Iteration budget of one simplex pass.
    pub max_iters: usize,
    /// Stop when a full simplex pass improves the objective by less than this.
    pub tol: f64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            restarts: 32,
            ensemble_size: None,
            max_iters: 2000,
            tol: 1e-7,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    /// Defaults for the discord search, whose landscape has more local minima.
    pub fn discord() -> Self {
        OptimizerConfig {
            restarts: 64,
            ..Self::default()
        }
    }
}

/// Diagnostics of a multistart run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimizerInfo {
    pub restarts: usize,
    /// Restart that produced the reported minimum.
    pub best_restart: usize,
    /// Simplex iterations spent by that restart.
    pub best_iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub struct LocalResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Nelder-Mead with the dimension-adaptive coefficients of Gao and Han.
///
/// One call performs repeated passes: each pass rebuilds the simplex around
/// the incumbent, and the search stops once a pass improves the value by
/// less than `tol`. Rebuilding guards against the simplex collapsing onto a
/// non-stationary point, which plain Nelder-Mead is prone to above a handful
/// of dimensions.
#[derive(Debug, Clone, Copy)]
pub struct NelderMead {
    pub max_iters: usize,
    pub tol: f64,
    pub initial_step: f64,
    pub max_passes: usize,
}

impl NelderMead {
    pub fn new(max_iters: usize, tol: f64) -> Self {
        NelderMead {
            max_iters,
            tol,
            initial_step: 0.5,
            max_passes: 12,
        }
    }

    pub fn minimize<F: Fn(&[f64]) -> f64>(&self, f: &F, x0: &[f64]) -> LocalResult {
        let mut x = x0.to_vec();
        let mut value = f(&x);
        let mut iterations = 0;
        let mut step = self.initial_step;
        for _ in 0..self.max_passes {
            let pass = self.pass(f, &x, step);
            iterations += pass.iterations;
            let improvement = value - pass.value;
            if pass.value <= value {
                x = pass.x;
                value = pass.value;
            }
            if !pass.converged {
                return LocalResult {
                    x,
                    value,
                    iterations,
                    converged: false,
                };
            }
            if improvement <= self.tol {
                return LocalResult {
                    x,
                    value,
                    iterations,
                    converged: true,
                };
            }
            step = (step * 0.5).max(1e-2);
        }
        LocalResult {
            x,
            value,
            iterations,
            converged: false,
        }
    }

    fn pass<F: Fn(&[f64]) -> f64>(&self, f: &F, x0: &[f64], step: f64) -> LocalResult {
        let n = x0.len();
        if n == 0 {
            return LocalResult {
                x: Vec::new(),
                value: f(x0),
                iterations: 0,
                converged: true,
            };
        }
        let nf = n as f64;
        let (alpha, gamma, rho, sigma) = (1.0, 1.0 + 2.0 / nf, 0.75 - 0.5 / nf, 1.0 - 1.0 / nf);

        let eval = |v: &DVector<f64>| f(v.as_slice());
        let base = DVector::from_column_slice(x0);
        let mut simplex: Vec<(f64, DVector<f64>)> = Vec::with_capacity(n + 1);
        simplex.push((eval(&base), base.clone()));
        for i in 0..n {
            let mut v = base.clone();
            v[i] += step;
            simplex.push((eval(&v), v));
        }

        let mut iterations = 0;
        let mut converged = false;
        let mut centroid = DVector::zeros(n);
        while iterations < self.max_iters {
            simplex.sort_by(|a, b| a.0.total_cmp(&b.0));
            let spread = simplex[n].0 - simplex[0].0;
            let size = simplex[1..]
                .iter()
                .map(|(_, v)| (v - &simplex[0].1).amax())
                .fold(0.0, f64::max);
            if spread <= self.tol && size <= 1e-4 {
                converged = true;
                break;
            }
            iterations += 1;

            centroid.fill(0.0);
            for (_, v) in &simplex[..n] {
                centroid += v;
            }
            centroid /= nf;
            let worst = &simplex[n].1;
            let reflected = &centroid + (&centroid - worst) * alpha;
            let fr = eval(&reflected);
            if fr < simplex[0].0 {
                let expanded = &centroid + (&reflected - &centroid) * gamma;
                let fe = eval(&expanded);
                simplex[n] = if fe < fr {
                    (fe, expanded)
                } else {
                    (fr, reflected)
                };
                continue;
            }
            if fr < simplex[n - 1].0 {
                simplex[n] = (fr, reflected);
                continue;
            }
            let contracted = if fr < simplex[n].0 {
                &centroid + (&reflected - &centroid) * rho
            } else {
                &centroid + (worst - &centroid) * rho
            };
            let fc = eval(&contracted);
            if fc < simplex[n].0.min(fr) {
                simplex[n] = (fc, contracted);
                continue;
            }
            let best = simplex[0].1.clone();
            for (value, v) in simplex[1..].iter_mut() {
                *v = &best + (&*v - &best) * sigma;
                *value = eval(v);
            }
        }
        let (value, x) = simplex
            .into_iter()
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .expect("simplex is nonempty");
        LocalResult {
            x: x.as_slice().to_vec(),
            value,
            iterations,
            converged,
        }
    }
}

/// Best point over all restarts.
#[derive(Debug, Clone)]
pub struct MultiStartResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub info: OptimizerInfo,
}

/// Runs `cfg.restarts` local searches from seeded starting points.
///
/// Restart `r` draws its start from a ChaCha8 stream `r` keyed by
/// `cfg.seed`, so the outcome does not depend on thread scheduling. Restarts
/// run in parallel; the minimum is taken in restart order and the earliest
/// restart wins ties.
pub fn multistart<F, S>(cfg: &OptimizerConfig, objective: F, start: S) -> MultiStartResult
where
    F: Fn(&[f64]) -> f64 + Sync,
    S: Fn(usize, &mut ChaCha8Rng) -> Vec<f64> + Sync,
{
    let nm = NelderMead::new(cfg.max_iters, cfg.tol);
    let restarts = cfg.restarts.max(1);
    let runs: Vec<LocalResult> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(r as u64);
            let x0 = start(r, &mut rng);
            nm.minimize(&objective, &x0)
        })
        .collect();
    let mut best = 0;
    for (i, run) in runs.iter().enumerate() {
        if run.value < runs[best].value {
            best = i;
        }
    }
    let run = &runs[best];
    MultiStartResult {
        x: run.x.clone(),
        value: run.value,
        info: OptimizerInfo {
            restarts,
            best_restart: best,
            best_iterations: run.iterations,
            converged: run.converged,
        },
    }
}

/// Number of real parameters of an `n x n` unitary.
pub fn unitary_param_count(n: usize) -> usize {
    n * n
}

/// `exp(iH)` for the Hermitian `H` whose diagonal is `p[..n]` and whose
/// strictly upper entries take consecutive (re, im) pairs from the rest.
/// All-zero parameters give the identity.
pub fn unitary_from_params(p: &[f64], n: usize) -> CMatrix {
    assert_eq!(p.len(), unitary_param_count(n), "wrong parameter count");
    let mut h = CMatrix::zeros(n, n);
    let mut k = n;
    for i in 0..n {
        h[(i, i)] = C64::new(p[i], 0.0);
        for j in (i + 1)..n {
            let z = C64::new(p[k], p[k + 1]);
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
            k += 2;
        }
    }
    let eig = h.symmetric_eigen();
    let phases = CMatrix::from_diagonal(&eig.eigenvalues.map(|l| C64::new(0.0, l).exp()));
    &eig.eigenvectors * phases * eig.eigenvectors.adjoint()
}

/// Uniform random parameters in `[-pi, pi)`.
pub fn random_params<R: Rng + ?Sized>(count: usize, rng: &mut R) -> Vec<f64> {
    use std::f64::consts::PI;
    (0..count).map(|_| rng.random_range(-PI..PI)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::Basis;

    #[test]
    fn nelder_mead_finds_quadratic_minimum() {
        let f = |x: &[f64]| (x[0] - 1.0).powi(2) + 3.0 * (x[1] + 2.0).powi(2) + 0.5;
        let res = NelderMead::new(2000, 1e-12).minimize(&f, &[0.0, 0.0]);
        assert!(res.converged);
        assert!((res.value - 0.5).abs() < 1e-10);
        assert!((res.x[0] - 1.0).abs() < 1e-4 && (res.x[1] + 2.0).abs() < 1e-4);
    }

    #[test]
    fn nelder_mead_rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let res = NelderMead::new(5000, 1e-14).minimize(&f, &[-1.2, 1.0]);
        assert!(res.value < 1e-8, "value {}", res.value);
    }

    #[test]
    fn nelder_mead_reports_budget_exhaustion() {
        let f = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>();
        let res = NelderMead::new(3, 1e-14).minimize(&f, &[1.0; 6]);
        assert!(!res.converged);
    }

    #[test]
    fn unitary_parametrization() {
        let id = unitary_from_params(&[0.0; 9], 3);
        assert!((id - CMatrix::identity(3, 3)).camax() < 1e-15);
        let p: Vec<f64> = (0..16).map(|i| (i as f64 * 0.37).sin() * 2.0).collect();
        let u = unitary_from_params(&p, 4);
        assert!(Basis::new(u).is_ok());
    }

    #[test]
    fn multistart_is_deterministic_and_finds_global_minimum() {
        // double well: the right well is deeper
        let f = |x: &[f64]| (x[0] * x[0] - 1.0).powi(2) - 0.3 * x[0];
        let start = |_: usize, rng: &mut ChaCha8Rng| vec![rng.random_range(-2.0..2.0)];
        let cfg = OptimizerConfig {
            restarts: 8,
            seed: 11,
            tol: 1e-12,
            ..OptimizerConfig::default()
        };
        let a = multistart(&cfg, f, start);
        let b = multistart(&cfg, f, start);
        assert_eq!(a.x, b.x);
        assert_eq!(a.info, b.info);
        assert!(a.x[0] > 0.9);
    }
}
