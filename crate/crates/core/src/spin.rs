//! Spin algebra and small dense operator constructors.
//!
//! Index convention, fixed for the whole crate: in `kron(a, b)` the left
//! factor carries the slow index, so site 0 is the most significant digit of a
//! flattened multi-site index. Spin bases run over `m = s, s-1, ..., -s`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::{CMat, C64};

const I: C64 = C64 { re: 0.0, im: 1.0 };

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Tensor product, left factor slow.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Tensor product of a list of factors, first factor slowest.
pub fn kron_all<'a>(factors: impl IntoIterator<Item = &'a CMat>) -> CMat {
    factors
        .into_iter()
        .fold(identity(1), |acc, f| acc.kronecker(f))
}

/// Largest entrywise deviation from hermiticity.
pub fn hermitian_deviation(a: &CMat) -> f64 {
    if a.nrows() != a.ncols() {
        return f64::INFINITY;
    }
    (a - a.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn is_hermitian(a: &CMat, tol: f64) -> bool {
    hermitian_deviation(a) <= tol
}

pub fn is_unitary(u: &CMat, tol: f64) -> bool {
    u.nrows() == u.ncols()
        && (u * u.adjoint() - identity(u.nrows()))
            .iter()
            .all(|z| z.norm() <= tol)
}

/// Largest entry magnitude of `a - b`.
pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch in max_abs_diff");
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn pauli_x() -> CMat {
    CMat::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)])
}

pub fn pauli_y() -> CMat {
    CMat::from_row_slice(2, 2, &[c(0.0), -I, I, c(0.0)])
}

pub fn pauli_z() -> CMat {
    CMat::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)])
}

/// Cartesian spin matrices of one spin.
#[derive(Clone, Debug)]
pub struct SpinOps {
    pub x: CMat,
    pub y: CMat,
    pub z: CMat,
}

impl SpinOps {
    pub fn dim(&self) -> usize {
        self.z.nrows()
    }

    pub fn components(&self) -> [&CMat; 3] {
        [&self.x, &self.y, &self.z]
    }

    /// `S·S = Sx² + Sy² + Sz²`.
    pub fn casimir(&self) -> CMat {
        &self.x * &self.x + &self.y * &self.y + &self.z * &self.z
    }

    /// `exp(iπ Sz)`, the string phase of one site.
    pub fn string_phase(&self) -> CMat {
        let n = self.dim();
        let mut out = CMat::zeros(n, n);
        for k in 0..n {
            out[(k, k)] = (I * std::f64::consts::PI * self.z[(k, k)]).exp();
        }
        out
    }

    /// `exp(φ Sz)`.
    pub fn exp_z(&self, phi: f64) -> CMat {
        let n = self.dim();
        let mut out = CMat::zeros(n, n);
        for k in 0..n {
            out[(k, k)] = c((phi * self.z[(k, k)].re).exp());
        }
        out
    }
}

/// Spin matrices for spin `s` (`s` a positive multiple of 1/2).
pub fn spin_operators(s: f64) -> Result<SpinOps> {
    let twice = 2.0 * s;
    if !(twice.is_finite() && twice >= 1.0 && (twice - twice.round()).abs() < 1e-12) {
        return Err(Error::InvalidSpin(s));
    }
    let twice = twice.round() as usize;
    let s = twice as f64 / 2.0;
    let n = twice + 1;
    let m = |k: usize| s - k as f64;

    // S+ |m> = sqrt(s(s+1) - m(m+1)) |m+1>; basis index k carries m = s - k.
    let mut raise = CMat::zeros(n, n);
    for k in 1..n {
        let mk = m(k);
        raise[(k - 1, k)] = c((s * (s + 1.0) - mk * (mk + 1.0)).sqrt());
    }
    let lower = raise.adjoint();
    let x = (&raise + &lower) * c(0.5);
    let y = (&raise - &lower) * C64::new(0.0, -0.5);
    let mut z = CMat::zeros(n, n);
    for k in 0..n {
        z[(k, k)] = c(m(k));
    }
    Ok(SpinOps { x, y, z })
}

pub fn spin_one() -> SpinOps {
    spin_operators(1.0).expect("spin 1 is valid")
}

pub fn spin_half() -> SpinOps {
    spin_operators(0.5).expect("spin 1/2 is valid")
}

/// `S_a · S_b = Σ_α S_a^α ⊗ S_b^α` on the pair `(a, b)`.
pub fn heisenberg_coupling(a: &SpinOps, b: &SpinOps) -> CMat {
    a.components()
        .iter()
        .zip(b.components())
        .map(|(x, y)| kron(x, y))
        .fold(CMat::zeros(a.dim() * b.dim(), a.dim() * b.dim()), |acc, t| {
            acc + t
        })
}

/// Complete hermitian operator basis `{σ_0 = 𝟙, σ_1, ...}` on a `dim`
/// dimensional space, normalized as `Tr(σ_α σ_β) = dim · δ_αβ`.
///
/// For `dim = 2` this is `(𝟙, σx, σy, σz)` exactly, i.e. unnormalized Paulis
/// with `Tr(σ_α σ_β) = 2 δ_αβ`. Larger dimensions use rescaled generalized
/// Gell-Mann matrices in the order: symmetric and antisymmetric off-diagonal
/// pairs `(j, k)` for `j < k`, then the diagonal generators.
#[derive(Clone, Debug)]
pub struct HermitianBasis {
    dim: usize,
    elements: Vec<CMat>,
}

impl HermitianBasis {
    pub fn new(dim: usize) -> Self {
        assert!(dim >= 1, "hermitian basis needs a positive dimension");
        let scale = (dim as f64 / 2.0).sqrt();
        let mut elements = vec![identity(dim)];
        for j in 0..dim {
            for k in (j + 1)..dim {
                let mut sym = CMat::zeros(dim, dim);
                sym[(j, k)] = c(scale);
                sym[(k, j)] = c(scale);
                let mut anti = CMat::zeros(dim, dim);
                anti[(j, k)] = -I * scale;
                anti[(k, j)] = I * scale;
                elements.push(sym);
                elements.push(anti);
            }
        }
        for l in 1..dim {
            let norm = (2.0 / (l * (l + 1)) as f64).sqrt() * scale;
            let mut diag = CMat::zeros(dim, dim);
            for k in 0..l {
                diag[(k, k)] = c(norm);
            }
            diag[(l, l)] = c(-(l as f64) * norm);
            elements.push(diag);
        }
        Self { dim, elements }
    }

    /// The Pauli basis `(𝟙, σx, σy, σz)`.
    pub fn pauli() -> Self {
        Self::new(2)
    }

    /// Every element multiplied by `factor`. Only useful for exercising the
    /// verification harness with a deliberately broken normalization.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            dim: self.dim,
            elements: self.elements.iter().map(|e| e * c(factor)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[CMat] {
        &self.elements
    }

    pub fn get(&self, alpha: usize) -> &CMat {
        &self.elements[alpha]
    }

    /// Expansion coefficients `x_α = Tr(σ_α X) / dim`.
    pub fn coefficients(&self, x: &CMat) -> Vec<C64> {
        let d = c(self.dim as f64);
        self.elements
            .iter()
            .map(|s| (s * x).trace() / d)
            .collect()
    }
}

/// The 3×4 isometry from two qubits onto their symmetric (spin-1) subspace.
///
/// Rows are the spin-1 states `(+1, 0, -1)`, columns the qubit pairs
/// `|00>, |01>, |10>, |11>`: `|+1> = |00>`, `|0> = (|01> + |10>)/√2`,
/// `|-1> = |11>`.
pub fn symmetric_projector() -> CMat {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    CMat::from_row_slice(
        3,
        4,
        &[
            c(1.0),
            c(0.0),
            c(0.0),
            c(0.0),
            c(0.0),
            c(h),
            c(h),
            c(0.0),
            c(0.0),
            c(0.0),
            c(0.0),
            c(1.0),
        ],
    )
}

/// Unitary `exp(iH)` with `H` the hermitian matrix encoded by `params`.
///
/// Layout: `params[0..d]` is the diagonal of `H`; then for every pair
/// `j < k` in row-major order a real and an imaginary part of `H[j][k]`.
/// Every unitary is reached with parameters in `[-π, π]`.
pub fn unitary_from_params(params: &[f64], d: usize) -> Result<CMat> {
    if params.len() != d * d {
        return Err(Error::Dimension(format!(
            "unitary on {d} levels needs {} parameters, got {}",
            d * d,
            params.len()
        )));
    }
    let mut h = DMatrix::<C64>::zeros(d, d);
    for k in 0..d {
        h[(k, k)] = c(params[k]);
    }
    let mut next = d;
    for j in 0..d {
        for k in (j + 1)..d {
            let z = C64::new(params[next], params[next + 1]);
            next += 2;
            h[(j, k)] = z;
            h[(k, j)] = z.conj();
        }
    }
    Ok((h * I).exp())
}
