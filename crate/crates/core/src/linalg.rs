//! Dense eigen-decompositions and numeric helpers.

use nalgebra::linalg::{Schur, SymmetricEigen};
use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::spin::hermitian_deviation;
use crate::tolerance::{EIGEN_RESIDUAL, STRUCTURAL};
use crate::{CMat, CVec, C64};

const MAX_SWEEPS: usize = 10_000;

/// Eigenvalues with matching eigenvectors (as columns), ordered by
/// descending magnitude. Ties keep the order produced by the decomposition.
#[derive(Clone, Debug)]
pub struct Eigensystem {
    pub values: Vec<C64>,
    pub vectors: CMat,
}

impl Eigensystem {
    pub fn magnitudes(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.norm()).collect()
    }

    pub fn vector(&self, k: usize) -> CVec {
        self.vectors.column(k).into_owned()
    }
}

fn frobenius(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Eigen-decomposition of a general square matrix.
///
/// Hermitian input (to [`STRUCTURAL`]) goes through the symmetric solver and
/// yields real eigenvalues with orthonormal eigenvectors. Anything else uses
/// a complex Schur form followed by triangular back-substitution. Every pair
/// is checked against `‖Av − λv‖ ≤ 1e-10·‖A‖`.
pub fn eigensystem(a: &CMat) -> Result<Eigensystem> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::Dimension(format!(
            "eigensystem needs a square matrix, got {}x{}",
            n,
            a.ncols()
        )));
    }
    let scale = frobenius(a);
    let hermitian = hermitian_deviation(a) <= STRUCTURAL * scale.max(1.0);

    let (values, vectors) = if hermitian {
        let eig = SymmetricEigen::try_new(a.clone(), f64::EPSILON, MAX_SWEEPS)
            .ok_or_else(|| Error::NoConvergence("hermitian solver".into()))?;
        let values: Vec<C64> = eig.eigenvalues.iter().map(|&x| C64::new(x, 0.0)).collect();
        (values, eig.eigenvectors)
    } else {
        schur_eigen(a, scale)?
    };

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[j].norm().total_cmp(&values[i].norm()));
    let values: Vec<C64> = order.iter().map(|&k| values[k]).collect();
    let vectors = CMat::from_fn(n, n, |r, col| vectors[(r, order[col])]);

    for (k, &lambda) in values.iter().enumerate() {
        let v = vectors.column(k);
        let residual = (a * v - v * lambda).norm();
        if residual > EIGEN_RESIDUAL * scale {
            return Err(Error::NoConvergence(format!(
                "eigenpair {k} (λ = {lambda}) has residual {residual:.3e}"
            )));
        }
    }
    Ok(Eigensystem { values, vectors })
}

fn schur_eigen(a: &CMat, scale: f64) -> Result<(Vec<C64>, CMat)> {
    let n = a.nrows();
    // the QR sweep can stall at machine epsilon on defective spectra; the
    // residual check in `eigensystem` guards the looser thresholds
    let schur = [1.0, 16.0, 256.0]
        .iter()
        .find_map(|k| Schur::try_new(a.clone(), k * f64::EPSILON, MAX_SWEEPS))
        .ok_or_else(|| Error::NoConvergence("Schur iteration".into()))?;
    let (q, t) = schur.unpack();
    let values: Vec<C64> = (0..n).map(|k| t[(k, k)]).collect();
    let small = f64::EPSILON * scale.max(f64::MIN_POSITIVE);

    let mut vectors = CMat::zeros(n, n);
    for k in 0..n {
        let lambda = values[k];
        let mut y = CVec::zeros(n);
        y[k] = C64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let mut acc = C64::new(0.0, 0.0);
            for j in (i + 1)..=k {
                acc += t[(i, j)] * y[j];
            }
            let mut pivot = t[(i, i)] - lambda;
            if pivot.norm() < small {
                pivot = C64::new(small, 0.0);
            }
            y[i] = -acc / pivot;
        }
        let v = &q * y;
        let norm = v.norm();
        vectors.set_column(k, &(v / C64::new(norm, 0.0)));
    }
    Ok((values, vectors))
}

/// Eigenvalues of a general matrix, descending magnitude.
pub fn eigenvalues(a: &CMat) -> Result<Vec<C64>> {
    Ok(eigensystem(a)?.values)
}

/// Real-input convenience wrapper.
pub fn eigenvalues_real(a: &DMatrix<f64>) -> Result<Vec<C64>> {
    eigenvalues(&a.map(|x| C64::new(x, 0.0)))
}

/// Ascending spectrum and eigenvectors of a hermitian matrix.
///
/// Purely real input is routed through the real symmetric solver.
pub fn hermitian_ascending(a: &CMat) -> Result<(Vec<f64>, CMat)> {
    let n = a.nrows();
    let real = a.iter().all(|z| z.im == 0.0);
    let (values, vectors): (Vec<f64>, CMat) = if real {
        let re = a.map(|z| z.re);
        let eig = SymmetricEigen::try_new(re, f64::EPSILON, MAX_SWEEPS)
            .ok_or_else(|| Error::NoConvergence("real symmetric solver".into()))?;
        (
            eig.eigenvalues.iter().copied().collect(),
            eig.eigenvectors.map(|x| C64::new(x, 0.0)),
        )
    } else {
        let eig = SymmetricEigen::try_new(a.clone(), f64::EPSILON, MAX_SWEEPS)
            .ok_or_else(|| Error::NoConvergence("hermitian solver".into()))?;
        (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let sorted = order.iter().map(|&k| values[k]).collect();
    let vecs = CMat::from_fn(n, n, |r, col| vectors[(r, order[col])]);
    Ok((sorted, vecs))
}

/// Neumaier-compensated sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<T: IntoIterator<Item = f64>>(iter: T) -> Self {
        let mut s = CompensatedSum::default();
        for x in iter {
            s.add(x);
        }
        s
    }
}

pub fn compensated_sum(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().collect::<CompensatedSum>().value()
}

/// Ordinary least-squares line `y = intercept + slope·x`.
#[derive(Clone, Copy, Debug)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square of the residuals.
    pub rms_residual: f64,
}

pub fn fit_line(xs: &[f64], ys: &[f64]) -> Option<LineFit> {
    let n = xs.len();
    if n < 2 || n != ys.len() {
        return None;
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    Some(LineFit {
        slope,
        intercept,
        rms_residual: (ss / nf).sqrt(),
    })
}
