//! Search for the measurement basis with the largest per-site factor
//! `f(U) = Σ_β |det A^β(U)|^{2/D}`.
//!
//! Bases are the columns of `U = exp(iH)` from
//! [`unitary_from_params`]. Each restart runs Nelder-Mead from a random
//! point and is re-seeded around its best vertex until a full run improves
//! by less than the tolerance.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::per_site_value;
use crate::error::Result;
use crate::fcs::{FcsTensor, MeasurementBasis};
use crate::spin::unitary_from_params;

#[derive(Clone, Copy, Debug)]
pub struct OptimizeOptions {
    pub restarts: usize,
    /// Stop once a full simplex run improves by less than this.
    pub tol: f64,
    pub seed: u64,
    /// Simplex iterations per run.
    pub max_iter: usize,
    /// Re-seeded runs per restart.
    pub max_rounds: usize,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        Self {
            restarts: 32,
            tol: 1e-10,
            seed: 0,
            max_iter: 4000,
            max_rounds: 50,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Optimum {
    pub basis: MeasurementBasis,
    pub value: f64,
    pub params: Vec<f64>,
    /// Whether the best restart met the tolerance before the caps.
    pub converged: bool,
    /// Best value of every restart, in restart order.
    pub restart_values: Vec<f64>,
}

fn objective(tensor: &FcsTensor, params: &[f64]) -> f64 {
    let d = tensor.phys_dim();
    let Ok(u) = unitary_from_params(params, d) else {
        return f64::NEG_INFINITY;
    };
    match MeasurementBasis::from_unitary(&u).and_then(|b| tensor.in_basis(&b)) {
        Ok(t) => per_site_value(&t),
        Err(_) => f64::NEG_INFINITY,
    }
}

/// Nelder-Mead maximization from `start` with initial step `step`.
fn nelder_mead(
    f: &impl Fn(&[f64]) -> f64,
    start: &[f64],
    step: f64,
    max_iter: usize,
    tol: f64,
) -> (Vec<f64>, f64) {
    let n = start.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((start.to_vec(), f(start)));
    for k in 0..n {
        let mut p = start.to_vec();
        p[k] += step;
        let v = f(&p);
        simplex.push((p, v));
    }
    for _ in 0..max_iter {
        // descending by value: best first
        simplex.sort_by(|a, b| b.1.total_cmp(&a.1));
        if simplex[0].1 - simplex[n].1 <= tol {
            break;
        }
        let centroid: Vec<f64> = (0..n)
            .map(|j| simplex[..n].iter().map(|p| p.0[j]).sum::<f64>() / n as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[n].0)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };
        let reflected = along(1.0);
        let fr = f(&reflected);
        if fr > simplex[0].1 {
            let expanded = along(2.0);
            let fe = f(&expanded);
            simplex[n] = if fe > fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr > simplex[n - 1].1 {
            simplex[n] = (reflected, fr);
        } else {
            let contracted = if fr > simplex[n].1 { along(0.5) } else { along(-0.5) };
            let fc = f(&contracted);
            if fc > simplex[n].1.max(fr) {
                simplex[n] = (contracted, fc);
            } else {
                let best = simplex[0].0.clone();
                for p in simplex.iter_mut().skip(1) {
                    let q: Vec<f64> = best.iter().zip(&p.0).map(|(b, x)| b + 0.5 * (x - b)).collect();
                    let v = f(&q);
                    *p = (q, v);
                }
            }
        }
    }
    simplex.sort_by(|a, b| b.1.total_cmp(&a.1));
    simplex.swap_remove(0)
}

/// Multi-start local maximization of `Σ_β |det A^β|^{2/D}` over
/// orthonormal bases. Restarts run in parallel; each has its own seeded
/// stream, so the result depends only on the options.
pub fn optimize_measurement_basis(tensor: &FcsTensor, options: &OptimizeOptions) -> Result<Optimum> {
    let d = tensor.phys_dim();
    let dim = d * d;
    let f = |p: &[f64]| objective(tensor, p);
    let runs: Vec<(Vec<f64>, f64, bool)> = (0..options.restarts.max(1))
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(options.seed.wrapping_add(k as u64));
            let start: Vec<f64> = (0..dim)
                .map(|_| rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI))
                .collect();
            let (mut best, mut value) = nelder_mead(&f, &start, 0.5, options.max_iter, options.tol);
            let mut converged = false;
            let mut step = 0.1;
            for _ in 0..options.max_rounds {
                let (p, v) = nelder_mead(&f, &best, step, options.max_iter, options.tol * 1e-2);
                let gain = v - value;
                if v > value {
                    best = p;
                    value = v;
                }
                if gain < options.tol {
                    converged = true;
                    break;
                }
                step = (step * 0.5).max(1e-4);
            }
            (best, value, converged)
        })
        .collect();
    let (best_k, _) = runs
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1).then(b.0.cmp(&a.0)))
        .expect("at least one restart");
    let (params, value, converged) = runs[best_k].clone();
    let basis = MeasurementBasis::from_unitary(&unitary_from_params(&params, d)?)?;
    Ok(Optimum {
        basis,
        value,
        params,
        converged,
        restart_values: runs.iter().map(|r| r.1).collect(),
    })
}
