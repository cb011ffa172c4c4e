//! Nearest-neighbour Hamiltonians on `(qubit, spin-1, …, spin-1, qubit)`
//! chains and a dense exact-diagonalization oracle.
//!
//! Sites are numbered `0..=N+1`; term `k` acts on `(k, k+1)`. The two end
//! sites are spin-1/2, the bulk is spin-1. The dense layout is the one of
//! [`DenseState`](crate::fcs::DenseState), so ground vectors can be fed to
//! the measurement code unchanged.

use crate::error::{Error, Result};
use crate::fcs::{apply_pair, DenseState, MeasurementBasis};
use crate::linalg::hermitian_ascending;
use crate::spin::{c, heisenberg_coupling, identity, kron, spin_half, spin_one};
use crate::tolerance::STRUCTURAL;
use crate::{CMat, CVec};

/// Largest Hilbert-space dimension handed to the dense solver.
pub const DIAG_GUARD: usize = 20_000;

/// Eigenvalues closer than this count as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-8;

/// Projector onto total spin 2 of two spin-1s:
/// `(S·S)/2 + (S·S)²/6 + 1/3`.
pub fn aklt_term() -> CMat {
    let s = spin_one();
    let ss = heisenberg_coupling(&s, &s);
    &ss * c(0.5) + &ss * &ss * c(1.0 / 6.0) + identity(9) * c(1.0 / 3.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Projector onto total spin 3/2 of an end qubit and its spin-1 neighbour,
/// `(s·S + 1)/(3/2)`. The left term acts on `(qubit, spin-1)`, the right on
/// `(spin-1, qubit)`.
pub fn boundary_term(side: Side) -> CMat {
    let (half, one) = (spin_half(), spin_one());
    let coupling = match side {
        Side::Left => heisenberg_coupling(&half, &one),
        Side::Right => heisenberg_coupling(&one, &half),
    };
    (coupling + identity(6)) * c(2.0 / 3.0)
}

/// `Σ^φ = exp(φ Sz) = diag(e^φ, 1, e^-φ)` on spin 1.
pub fn sigma_phi(phi: f64) -> CMat {
    spin_one().exp_z(phi)
}

/// Deformation `exp(φ s_z)` of an end qubit.
fn qubit_phi(phi: f64) -> CMat {
    spin_half().exp_z(phi)
}

/// `T X T` with `T = Σ_k⁻¹ ⊗ Σ_{k+1}`.
fn deform(x: &CMat, left: &CMat, right: &CMat) -> CMat {
    let t = kron(left, right);
    &t * x * &t
}

/// One two-site term.
#[derive(Clone, Debug)]
pub struct Term {
    /// The term acts on sites `(site, site + 1)`.
    pub site: usize,
    pub op: CMat,
}

/// Nearest-neighbour Hamiltonian `H = Σ_k X_{k,k+1}`.
#[derive(Clone, Debug)]
pub struct HamiltonianSpec {
    pub site_dims: Vec<usize>,
    pub terms: Vec<Term>,
}

impl HamiltonianSpec {
    pub fn new(site_dims: Vec<usize>, terms: Vec<Term>) -> Result<Self> {
        for t in &terms {
            let (a, b) = match (site_dims.get(t.site), site_dims.get(t.site + 1)) {
                (Some(&a), Some(&b)) => (a, b),
                _ => return Err(Error::Index(format!("term on site {}", t.site))),
            };
            if t.op.shape() != (a * b, a * b) {
                return Err(Error::Dimension(format!(
                    "term on site {} is {}x{}, expected {}",
                    t.site,
                    t.op.nrows(),
                    t.op.ncols(),
                    a * b
                )));
            }
        }
        Ok(Self { site_dims, terms })
    }

    /// Number of bulk sites.
    pub fn bulk_len(&self) -> usize {
        self.site_dims.len().saturating_sub(2)
    }

    pub fn dim(&self) -> usize {
        self.site_dims.iter().product()
    }

    /// `𝟙 ⊗ X ⊗ 𝟙` for one term.
    pub fn embed(&self, term: &Term) -> CMat {
        let before: usize = self.site_dims[..term.site].iter().product();
        let after: usize = self.site_dims[term.site + 2..].iter().product();
        kron(&kron(&identity(before), &term.op), &identity(after))
    }

    pub fn to_dense(&self) -> Result<CMat> {
        let dim = self.dim();
        if dim > DIAG_GUARD {
            return Err(Error::SizeGuard {
                size: dim as u128,
                limit: DIAG_GUARD as u128,
            });
        }
        Ok(self
            .terms
            .iter()
            .fold(CMat::zeros(dim, dim), |acc, t| acc + self.embed(t)))
    }

    /// `X_k |v>` without forming the full matrix.
    pub fn apply_term(&self, term: &Term, v: &CVec) -> CVec {
        apply_pair(v, &self.site_dims, term.site, &term.op)
    }

    /// `H |v>` term by term.
    pub fn apply(&self, v: &CVec) -> CVec {
        self.terms
            .iter()
            .fold(CVec::zeros(v.len()), |acc, t| acc + self.apply_term(t, v))
    }

    /// Largest `‖X_k v‖ / ‖v‖` over all terms.
    pub fn max_term_residual(&self, v: &CVec) -> f64 {
        let norm = v.norm();
        self.terms
            .iter()
            .map(|t| self.apply_term(t, v).norm() / norm)
            .fold(0.0, f64::max)
    }
}

fn chain_dims(n: usize) -> Result<Vec<usize>> {
    if n == 0 {
        return Err(Error::Invalid("a chain needs at least one bulk site".into()));
    }
    let mut dims = vec![2];
    dims.extend(std::iter::repeat_n(3, n));
    dims.push(2);
    Ok(dims)
}

/// AKLT chain with spin-3/2 projectors at the ends.
pub fn aklt_hamiltonian(n: usize) -> Result<HamiltonianSpec> {
    deformed_hamiltonian(n, 0.0)
}

/// Deformed AKLT chain: bulk terms `(Σ⁻¹ ⊗ Σ) X (Σ⁻¹ ⊗ Σ)` with
/// `Σ = exp(φ Sz)`; the end qubits carry `exp(-φ s_z)` on the left and
/// `exp(φ s_z)` on the right in the same pattern.
pub fn deformed_hamiltonian(n: usize, phi: f64) -> Result<HamiltonianSpec> {
    if !phi.is_finite() {
        return Err(Error::Invalid(format!("deformation must be finite, got {phi}")));
    }
    let dims = chain_dims(n)?;
    let (sig, sig_inv) = (sigma_phi(phi), sigma_phi(-phi));
    let bulk = deform(&aklt_term(), &sig_inv, &sig);
    let mut terms = vec![Term {
        site: 0,
        op: deform(&boundary_term(Side::Left), &qubit_phi(phi), &sig),
    }];
    terms.extend((1..n).map(|k| Term {
        site: k,
        op: bulk.clone(),
    }));
    terms.push(Term {
        site: n,
        op: deform(&boundary_term(Side::Right), &sig_inv, &qubit_phi(phi)),
    });
    HamiltonianSpec::new(dims, terms)
}

/// Bilinear Heisenberg chain `Σ_k S_k·S_{k+1}` with spin-1/2 ends.
pub fn heisenberg_hamiltonian(n: usize) -> Result<HamiltonianSpec> {
    let dims = chain_dims(n)?;
    let (half, one) = (spin_half(), spin_one());
    let mut terms = vec![Term {
        site: 0,
        op: heisenberg_coupling(&half, &one),
    }];
    let bulk = heisenberg_coupling(&one, &one);
    terms.extend((1..n).map(|k| Term {
        site: k,
        op: bulk.clone(),
    }));
    terms.push(Term {
        site: n,
        op: heisenberg_coupling(&one, &half),
    });
    HamiltonianSpec::new(dims, terms)
}

/// `S_tot²` on a chain with the given site dimensions.
pub fn total_spin_squared(site_dims: &[usize]) -> Result<CMat> {
    let dim: usize = site_dims.iter().product();
    if dim > DIAG_GUARD {
        return Err(Error::SizeGuard {
            size: dim as u128,
            limit: DIAG_GUARD as u128,
        });
    }
    let ops = site_dims
        .iter()
        .map(|&d| crate::spin::spin_operators((d as f64 - 1.0) / 2.0))
        .collect::<Result<Vec<_>>>()?;
    let mut total = CMat::zeros(dim, dim);
    for axis in 0..3 {
        let mut component = CMat::zeros(dim, dim);
        for (k, op) in ops.iter().enumerate() {
            let before: usize = site_dims[..k].iter().product();
            let after: usize = site_dims[k + 1..].iter().product();
            component += kron(&kron(&identity(before), op.components()[axis]), &identity(after));
        }
        total += &component * &component;
    }
    Ok(total)
}

/// Lowest part of a spectrum.
#[derive(Clone, Debug)]
pub struct SpectrumReport {
    /// Ascending.
    pub values: Vec<f64>,
    pub degeneracy: usize,
    pub gap: f64,
    /// Orthonormal basis of the ground space.
    pub ground: Vec<CVec>,
    pub max_residual: f64,
}

impl SpectrumReport {
    /// Rows `index, eigenvalue`.
    pub fn to_csv(&self) -> Result<String> {
        let mut out = String::from("index,eigenvalue\n");
        for (k, v) in self.values.iter().enumerate() {
            out.push_str(&crate::report::row(&[k.to_string(), crate::report::number(*v)?]));
        }
        Ok(out)
    }

    /// First ground vector as a dense chain state in reference coordinates.
    pub fn ground_state(&self, h: &HamiltonianSpec) -> Result<DenseState> {
        let dims = &h.site_dims;
        let n = h.bulk_len();
        let bond = dims[0];
        if dims.len() < 3 || dims[dims.len() - 1] != bond || dims[1..=n].iter().any(|&d| d != dims[1]) {
            return Err(Error::Unsupported("ground state export needs a homogeneous chain".into()));
        }
        Ok(DenseState {
            n,
            bond_dim: bond,
            basis: MeasurementBasis::reference(dims[1]),
            amplitudes: self.ground[0].clone(),
        })
    }
}

/// Exact diagonalization, keeping the `k_lowest` eigenvalues.
pub fn diagonalize(h: &HamiltonianSpec, k_lowest: usize) -> Result<SpectrumReport> {
    let dense = h.to_dense()?;
    let (values, vectors) = hermitian_ascending(&dense)?;
    let dim = values.len();
    let k = k_lowest.clamp(1, dim);
    let scale = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let mut max_residual = 0.0f64;
    for j in 0..k {
        let v = vectors.column(j).into_owned();
        let r = (&dense * &v - &v * c(values[j])).norm();
        max_residual = max_residual.max(r);
    }
    if max_residual > 1e-9 * scale {
        return Err(Error::NoConvergence(format!(
            "eigen-residual {max_residual:e} exceeds tolerance"
        )));
    }
    let e0 = values[0];
    let degeneracy = values
        .iter()
        .take_while(|&&v| v - e0 <= DEGENERACY_TOL * scale)
        .count();
    let gap = values.get(degeneracy).map_or(0.0, |v| v - e0);
    Ok(SpectrumReport {
        values: values[..k].to_vec(),
        degeneracy,
        gap,
        ground: (0..degeneracy).map(|j| vectors.column(j).into_owned()).collect(),
        max_residual,
    })
}

/// Is `x` a projector (`X² = X`, hermitian) to [`STRUCTURAL`]?
pub fn is_projector(x: &CMat) -> bool {
    crate::spin::is_hermitian(x, STRUCTURAL)
        && crate::spin::max_abs_diff(&(x * x), x) <= STRUCTURAL
}
