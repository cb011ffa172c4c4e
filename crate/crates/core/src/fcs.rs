//! Finitely correlated states: site tensors, chains and dense amplitudes.
//!
//! A chain has `N` homogeneous bulk sites of dimension `d` and two end spins
//! of dimension `D` (the bond dimension), labelled `0̄` and `N+1`. For an
//! outcome string `α_1 … α_N` the end pair is left in
//!
//! ```text
//! χ_α = J · (F · A^{α_N} ⋯ A^{α_1})ᵀ        (χ[l][r] is the amplitude)
//! ```
//!
//! where `J` is the boundary bond state written as a `D×D` matrix
//! (`|I> = Σ J[l][r] |l r>`, unnormalized singlet `|01> - |10>` for `D = 2`)
//! and `F` is the right-end frame, the identity unless the chain was gauged.
//! With `F = 𝟙` this is `(𝟙 ⊗ A^{α_N} ⋯ A^{α_1}) |I>`.
//!
//! Site tensors are sliced from a `d×D²` map `A` by
//! `<β|A = <I_n| (A^β ⊗ 𝟙)` with `|I_n> = |I>/√D` normalized, so the
//! symmetric projector yields unit-determinant Paulis.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spin::{c, identity, max_abs_diff, symmetric_projector};
use crate::{CMat, CVec, C64};

/// Largest number of amplitudes a dense state may hold.
pub const DENSE_GUARD: u128 = 10_000_000;

/// Orthonormal, complete basis of one site's physical space.
///
/// Vectors are columns in the reference basis (descending `m`). The basis is
/// also the label set of a site tensor.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementBasis {
    labels: Vec<String>,
    vectors: Vec<CVec>,
}

impl MeasurementBasis {
    pub fn new(labels: Vec<String>, vectors: Vec<CVec>) -> Result<Self> {
        let d = vectors.len();
        if d == 0 || labels.len() != d || vectors.iter().any(|v| v.len() != d) {
            return Err(Error::Dimension(format!(
                "basis needs d labels and d vectors of length d (got {} labels, {} vectors)",
                labels.len(),
                d
            )));
        }
        let basis = Self { labels, vectors };
        let deviation = basis.gram_deviation();
        if deviation > 1e-10 {
            return Err(Error::InvalidBasis { deviation });
        }
        Ok(basis)
    }

    /// Columns of `u` as basis vectors, labelled `0..d`.
    pub fn from_unitary(u: &CMat) -> Result<Self> {
        let labels = (0..u.ncols()).map(|k| k.to_string()).collect();
        let vectors = (0..u.ncols()).map(|k| u.column(k).into_owned()).collect();
        Self::new(labels, vectors)
    }

    /// Computational basis, labelled by `m` for spin `(d-1)/2`.
    pub fn reference(d: usize) -> Self {
        let s = (d as f64 - 1.0) / 2.0;
        let labels = (0..d).map(|k| format_m(s - k as f64)).collect();
        let vectors = (0..d)
            .map(|k| {
                let mut v = CVec::zeros(d);
                v[k] = c(1.0);
                v
            })
            .collect();
        Self { labels, vectors }
    }

    /// The spin-1 Bell-measurement basis `{|0>, |+>, |->}` with
    /// `|±> = (|-1> ± |+1>)/√2`.
    ///
    /// `|+>` is stored with a phase `i`, which makes the AKLT slices exactly
    /// `(σz, σy, σx)`. A global phase per vector does not change the
    /// measurement.
    pub fn aklt() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let i = C64::new(0.0, h);
        Self {
            labels: vec!["0".into(), "+".into(), "-".into()],
            vectors: vec![
                CVec::from_vec(vec![c(0.0), c(1.0), c(0.0)]),
                CVec::from_vec(vec![i, c(0.0), i]),
                CVec::from_vec(vec![c(-h), c(0.0), c(h)]),
            ],
        }
    }

    /// The same measurement as [`MeasurementBasis::aklt`] with real vectors.
    pub fn aklt_real() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            labels: vec!["0".into(), "+".into(), "-".into()],
            vectors: vec![
                CVec::from_vec(vec![c(0.0), c(1.0), c(0.0)]),
                CVec::from_vec(vec![c(h), c(0.0), c(h)]),
                CVec::from_vec(vec![c(-h), c(0.0), c(h)]),
            ],
        }
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn vectors(&self) -> &[CVec] {
        &self.vectors
    }

    /// Basis vectors as the columns of a unitary.
    pub fn matrix(&self) -> CMat {
        CMat::from_columns(&self.vectors)
    }

    pub fn gram_deviation(&self) -> f64 {
        let v = self.matrix();
        max_abs_diff(&(v.adjoint() * &v), &identity(self.dim()))
    }

    /// `1 - max_π (1/d) Σ_k |<a_k|b_π(k)>|²`: zero iff the two bases define
    /// the same projective measurement.
    pub fn distance(&self, other: &MeasurementBasis) -> f64 {
        let d = self.dim();
        assert_eq!(d, other.dim(), "bases of different dimension");
        let overlaps: Vec<Vec<f64>> = self
            .vectors
            .iter()
            .map(|a| other.vectors.iter().map(|b| a.dotc(b).norm_sqr()).collect())
            .collect();
        let mut best = 0.0f64;
        let mut perm: Vec<usize> = (0..d).collect();
        permutations(&mut perm, 0, &mut |p| {
            let s: f64 = p.iter().enumerate().map(|(k, &j)| overlaps[k][j]).sum();
            best = best.max(s / d as f64);
        });
        1.0 - best
    }
}

fn format_m(m: f64) -> String {
    if (m - m.round()).abs() < 1e-12 {
        format!("{:+}", m.round() as i64)
    } else {
        format!("{:+}/2", (2.0 * m).round() as i64)
    }
}

fn permutations(p: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == p.len() {
        visit(p);
        return;
    }
    for j in k..p.len() {
        p.swap(k, j);
        permutations(p, k + 1, visit);
        p.swap(k, j);
    }
}

/// Default maximally entangled bond state as a `D×D` coefficient matrix:
/// the unnormalized singlet `|01> - |10>` for `D = 2`, `Σ_a |aa>` otherwise.
pub fn bond_matrix(bond_dim: usize) -> CMat {
    if bond_dim == 2 {
        CMat::from_row_slice(2, 2, &[c(0.0), c(1.0), c(-1.0), c(0.0)])
    } else {
        identity(bond_dim)
    }
}

/// Site tensor: one `D×D` matrix per physical basis state.
#[derive(Clone, Debug, PartialEq)]
pub struct FcsTensor {
    matrices: Vec<CMat>,
    basis: MeasurementBasis,
}

impl FcsTensor {
    pub fn new(matrices: Vec<CMat>, basis: MeasurementBasis) -> Result<Self> {
        if matrices.is_empty() || matrices.len() != basis.dim() {
            return Err(Error::Dimension(format!(
                "{} matrices for a {}-dimensional physical basis",
                matrices.len(),
                basis.dim()
            )));
        }
        let bond = matrices[0].nrows();
        if bond == 0 || matrices.iter().any(|m| m.nrows() != bond || m.ncols() != bond) {
            return Err(Error::Dimension("site matrices must all be DxD".into()));
        }
        if matrices.iter().all(|m| m.iter().all(|z| z.norm() == 0.0)) {
            return Err(Error::Invalid("all site matrices vanish".into()));
        }
        Ok(Self { matrices, basis })
    }

    pub fn phys_dim(&self) -> usize {
        self.matrices.len()
    }

    pub fn bond_dim(&self) -> usize {
        self.matrices[0].nrows()
    }

    pub fn matrices(&self) -> &[CMat] {
        &self.matrices
    }

    pub fn matrix(&self, beta: usize) -> &CMat {
        &self.matrices[beta]
    }

    pub fn basis(&self) -> &MeasurementBasis {
        &self.basis
    }

    /// `A^{α_N} ⋯ A^{α_1}` for the outcome string `α_1 … α_N`.
    pub fn product(&self, outcome: &[usize]) -> Result<CMat> {
        let mut b = identity(self.bond_dim());
        for &a in outcome {
            let m = self.matrices.get(a).ok_or_else(|| {
                Error::Index(format!("label {a} with {} physical levels", self.phys_dim()))
            })?;
            b = m * b;
        }
        Ok(b)
    }

    /// Re-slice in another measurement basis:
    /// `A^{b} = Σ_γ <b|γ> A^γ`.
    pub fn in_basis(&self, basis: &MeasurementBasis) -> Result<FcsTensor> {
        if basis.dim() != self.phys_dim() {
            return Err(Error::Dimension(format!(
                "basis of dimension {} for a {}-level tensor",
                basis.dim(),
                self.phys_dim()
            )));
        }
        let d = self.bond_dim();
        let matrices = basis
            .vectors()
            .iter()
            .map(|b| {
                self.basis
                    .vectors()
                    .iter()
                    .zip(&self.matrices)
                    .fold(CMat::zeros(d, d), |acc, (g, m)| acc + m * b.dotc(g))
            })
            .collect();
        FcsTensor::new(matrices, basis.clone())
    }

    /// All matrices multiplied by `factor`.
    pub fn scaled(&self, factor: C64) -> FcsTensor {
        FcsTensor {
            matrices: self.matrices.iter().map(|m| m * factor).collect(),
            basis: self.basis.clone(),
        }
    }

    /// `A^β → G A^β G⁻¹`.
    pub fn gauged(&self, g: &CMat) -> Result<FcsTensor> {
        let inv = invert(g)?;
        Ok(FcsTensor {
            matrices: self.matrices.iter().map(|m| g * m * &inv).collect(),
            basis: self.basis.clone(),
        })
    }

    /// The `d×D²` map `A` in reference coordinates, inverse of
    /// [`slice_projection`].
    pub fn reconstruct(&self) -> CMat {
        let d_bond = self.bond_dim();
        let bond = bond_matrix(d_bond).map(|z| z.conj());
        let scale = c(1.0 / (d_bond as f64).sqrt());
        let mut out = CMat::zeros(self.phys_dim(), d_bond * d_bond);
        for (v, m) in self.basis.vectors().iter().zip(&self.matrices) {
            let row = (m.transpose() * &bond) * scale;
            for a in 0..d_bond {
                for b in 0..d_bond {
                    for k in 0..v.len() {
                        out[(k, a * d_bond + b)] += v[k] * row[(a, b)];
                    }
                }
            }
        }
        out
    }
}

pub(crate) fn invert(g: &CMat) -> Result<CMat> {
    g.clone()
        .try_inverse()
        .ok_or_else(|| Error::Invalid("gauge matrix is singular".into()))
}

/// Slice a `d×D²` map into site matrices, one per basis vector:
/// `<β|A = <I_n| (A^β ⊗ 𝟙)`.
pub fn slice_projection(a_rect: &CMat, basis: &MeasurementBasis) -> Result<FcsTensor> {
    let cols = a_rect.ncols();
    let d_bond = (cols as f64).sqrt().round() as usize;
    if d_bond * d_bond != cols || a_rect.nrows() != basis.dim() {
        return Err(Error::Dimension(format!(
            "map is {}x{}, basis has {} vectors",
            a_rect.nrows(),
            cols,
            basis.dim()
        )));
    }
    let deviation = basis.gram_deviation();
    if deviation > 1e-10 {
        return Err(Error::InvalidBasis { deviation });
    }
    let bond_conj_inv = invert(&bond_matrix(d_bond).map(|z| z.conj()))?;
    let scale = c((d_bond as f64).sqrt());
    let matrices = basis
        .vectors()
        .iter()
        .map(|v| {
            let row = v.adjoint() * a_rect;
            let r = CMat::from_fn(d_bond, d_bond, |a, b| row[a * d_bond + b]);
            (r * &bond_conj_inv).transpose() * scale
        })
        .collect();
    FcsTensor::new(matrices, basis.clone())
}

/// AKLT tensor `(A^0, A^+, A^-) = (σz, σy, σx)` in the Bell-measurement basis.
pub fn aklt_tensor() -> FcsTensor {
    FcsTensor::new(
        vec![crate::spin::pauli_z(), crate::spin::pauli_y(), crate::spin::pauli_x()],
        MeasurementBasis::aklt(),
    )
    .expect("valid AKLT tensor")
}

/// Projector of the deformed model: rows `(+1, 0, -1)`, columns
/// `|00>, |01>, |10>, |11>`.
pub fn deformed_map(phi: f64) -> CMat {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let (up, down) = (phi.exp(), (-phi).exp());
    CMat::from_row_slice(
        3,
        4,
        &[
            c(up),
            c(0.0),
            c(0.0),
            c(0.0),
            c(0.0),
            c(down * h),
            c(up * h),
            c(0.0),
            c(0.0),
            c(0.0),
            c(0.0),
            c(down),
        ],
    )
}

/// Deformed AKLT tensor, sliced in the Bell-measurement basis.
pub fn deformed_tensor(phi: f64) -> Result<FcsTensor> {
    if !phi.is_finite() {
        return Err(Error::Invalid(format!("deformation must be finite, got {phi}")));
    }
    slice_projection(&deformed_map(phi), &MeasurementBasis::aklt())
}

/// AKLT tensor sliced from [`symmetric_projector`] in an arbitrary basis.
pub fn aklt_tensor_in(basis: &MeasurementBasis) -> Result<FcsTensor> {
    slice_projection(&symmetric_projector(), basis)
}

/// Open chain of `n` bulk sites with `D`-dimensional end spins.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainSpec {
    n: usize,
    tensor: FcsTensor,
    boundary: CVec,
    right_frame: CMat,
}

impl ChainSpec {
    /// Chain with the default bond state at the ends.
    pub fn new(n: usize, tensor: FcsTensor) -> Result<Self> {
        let bond = bond_matrix(tensor.bond_dim());
        let boundary = CVec::from_iterator(bond.len(), bond.transpose().iter().copied());
        Self::with_boundary(n, tensor, boundary, None)
    }

    /// Chain with an explicit boundary state (`D²` components, index
    /// `l·D + r`) and optional right-end frame.
    pub fn with_boundary(
        n: usize,
        tensor: FcsTensor,
        boundary: CVec,
        right_frame: Option<CMat>,
    ) -> Result<Self> {
        let d = tensor.bond_dim();
        if n == 0 {
            return Err(Error::Invalid("a chain needs at least one bulk site".into()));
        }
        if boundary.len() != d * d {
            return Err(Error::Dimension(format!(
                "boundary state has {} components, expected {}",
                boundary.len(),
                d * d
            )));
        }
        if boundary.norm() == 0.0 {
            return Err(Error::Invalid("boundary state vanishes".into()));
        }
        let right_frame = right_frame.unwrap_or_else(|| identity(d));
        if right_frame.shape() != (d, d) {
            return Err(Error::Dimension("right frame must be DxD".into()));
        }
        Ok(Self {
            n,
            tensor,
            boundary,
            right_frame,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn tensor(&self) -> &FcsTensor {
        &self.tensor
    }

    pub fn phys_dim(&self) -> usize {
        self.tensor.phys_dim()
    }

    pub fn bond_dim(&self) -> usize {
        self.tensor.bond_dim()
    }

    pub fn boundary(&self) -> &CVec {
        &self.boundary
    }

    /// Boundary state as the matrix `J[l][r]`.
    pub fn boundary_matrix(&self) -> CMat {
        let d = self.bond_dim();
        CMat::from_fn(d, d, |l, r| self.boundary[l * d + r])
    }

    pub fn right_frame(&self) -> &CMat {
        &self.right_frame
    }

    /// Same chain with a different number of bulk sites.
    pub fn resized(&self, n: usize) -> Result<Self> {
        Self::with_boundary(
            n,
            self.tensor.clone(),
            self.boundary.clone(),
            Some(self.right_frame.clone()),
        )
    }

    /// Same physical state, tensor re-sliced in `basis`.
    pub fn in_basis(&self, basis: &MeasurementBasis) -> Result<Self> {
        Self::with_boundary(
            self.n,
            self.tensor.in_basis(basis)?,
            self.boundary.clone(),
            Some(self.right_frame.clone()),
        )
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self {
            tensor: self.tensor.scaled(factor),
            ..self.clone()
        }
    }

    /// Bond gauge `A → G A G⁻¹` with the ends compensated so that the
    /// physical state is unchanged: `J → J Gᵀ`, `F → F G⁻¹`.
    pub fn gauged(&self, g: &CMat) -> Result<Self> {
        let inv = invert(g)?;
        let j = self.boundary_matrix() * g.transpose();
        let d = self.bond_dim();
        let boundary = CVec::from_fn(d * d, |k, _| j[(k / d, k % d)]);
        Self::with_boundary(
            self.n,
            self.tensor.gauged(g)?,
            boundary,
            Some(&self.right_frame * inv),
        )
    }

    /// End-pair state `χ = J (F B)ᵀ` for a bulk matrix product `B`.
    pub fn end_state(&self, product: &CMat) -> CMat {
        self.boundary_matrix() * (&self.right_frame * product).transpose()
    }

    fn check_outcome(&self, outcome: &[usize]) -> Result<()> {
        if outcome.len() != self.n {
            return Err(Error::Dimension(format!(
                "outcome of length {} for {} sites",
                outcome.len(),
                self.n
            )));
        }
        Ok(())
    }

    /// Coefficient of `|l> |α_1 … α_N> |r>` in the tensor's basis.
    pub fn amplitude(&self, outcome: &[usize], left: usize, right: usize) -> Result<C64> {
        self.check_outcome(outcome)?;
        let d = self.bond_dim();
        if left >= d || right >= d {
            return Err(Error::Index(format!("end index ({left}, {right}) with D = {d}")));
        }
        let chi = self.end_state(&self.tensor.product(outcome)?);
        Ok(chi[(left, right)])
    }

    /// Number of amplitudes in the dense state.
    pub fn dense_size(&self) -> u128 {
        let d = self.bond_dim() as u128;
        (self.phys_dim() as u128)
            .checked_pow(self.n as u32)
            .map_or(u128::MAX, |p| p.saturating_mul(d * d))
    }

    /// Full amplitude vector, layout `(l, α_1, …, α_N, r)` with `l` slowest.
    pub fn dense_state(&self) -> Result<DenseState> {
        let size = self.dense_size();
        if size > DENSE_GUARD {
            return Err(Error::SizeGuard {
                size,
                limit: DENSE_GUARD,
            });
        }
        let d = self.bond_dim();
        let p = self.phys_dim();
        let bulk = p.pow(self.n as u32);
        let mut amps = CVec::zeros(size as usize);
        let mut stack = vec![identity(d)];
        let mut outcome = Vec::with_capacity(self.n);
        self.fill(&mut stack, &mut outcome, &mut |idx, b| {
            let chi = self.end_state(b);
            for l in 0..d {
                for r in 0..d {
                    amps[(l * bulk + idx) * d + r] = chi[(l, r)];
                }
            }
        });
        Ok(DenseState {
            n: self.n,
            bond_dim: d,
            basis: self.tensor.basis().clone(),
            amplitudes: amps,
        })
    }

    fn fill(
        &self,
        stack: &mut Vec<CMat>,
        outcome: &mut Vec<usize>,
        visit: &mut impl FnMut(usize, &CMat),
    ) {
        if outcome.len() == self.n {
            let idx = outcome.iter().fold(0, |acc, &a| acc * self.phys_dim() + a);
            visit(idx, stack.last().expect("non-empty stack"));
            return;
        }
        for a in 0..self.phys_dim() {
            let next = self.tensor.matrix(a) * stack.last().expect("non-empty stack");
            stack.push(next);
            outcome.push(a);
            self.fill(stack, outcome, visit);
            outcome.pop();
            stack.pop();
        }
    }

    /// `<V|V>` straight from the amplitudes of every outcome.
    pub fn norm_sqr_enumerated(&self) -> Result<f64> {
        Ok(self.dense_state()?.norm_sqr())
    }
}

/// Dense state vector of a chain, layout `(l, α_1, …, α_N, r)`.
#[derive(Clone, Debug)]
pub struct DenseState {
    pub n: usize,
    pub bond_dim: usize,
    /// Basis the bulk indices refer to.
    pub basis: MeasurementBasis,
    pub amplitudes: CVec,
}

impl DenseState {
    pub fn phys_dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.norm_squared()
    }

    pub fn site_dims(&self) -> Vec<usize> {
        let mut dims = vec![self.bond_dim];
        dims.extend(std::iter::repeat_n(self.phys_dim(), self.n));
        dims.push(self.bond_dim);
        dims
    }

    /// Flat index of `(l, α, r)`.
    pub fn index(&self, left: usize, outcome: &[usize], right: usize) -> usize {
        let bulk = self.phys_dim().pow(self.n as u32);
        let idx = outcome.iter().fold(0, |acc, &a| acc * self.phys_dim() + a);
        (left * bulk + idx) * self.bond_dim + right
    }

    /// Re-express the bulk indices in another basis of the same space.
    pub fn in_basis(&self, basis: &MeasurementBasis) -> Result<DenseState> {
        if basis.dim() != self.phys_dim() {
            return Err(Error::Dimension("basis dimension mismatch".into()));
        }
        // amplitude in new basis: Σ_γ <b|γ> ψ_γ on every bulk site
        let change = basis.matrix().adjoint() * self.basis.matrix();
        let mut amps = self.amplitudes.clone();
        let dims = self.site_dims();
        for site in 1..=self.n {
            amps = apply_site(&amps, &dims, site, &change);
        }
        Ok(DenseState {
            n: self.n,
            bond_dim: self.bond_dim,
            basis: basis.clone(),
            amplitudes: amps,
        })
    }

    /// Bulk indices in the reference (descending `m`) basis.
    pub fn to_reference(&self) -> DenseState {
        self.in_basis(&MeasurementBasis::reference(self.phys_dim()))
            .expect("reference basis has matching dimension")
    }
}

/// Apply a single-site matrix to `site` of a product-space vector.
pub fn apply_site(v: &CVec, dims: &[usize], site: usize, op: &CMat) -> CVec {
    let inner: usize = dims[site + 1..].iter().product();
    let dim = dims[site];
    let outer = v.len() / (inner * dim);
    let mut out = CVec::zeros(v.len());
    for o in 0..outer {
        for i in 0..inner {
            for a in 0..dim {
                let mut acc = C64::new(0.0, 0.0);
                for b in 0..dim {
                    let x = op[(a, b)];
                    if x != C64::new(0.0, 0.0) {
                        acc += x * v[(o * dim + b) * inner + i];
                    }
                }
                out[(o * dim + a) * inner + i] = acc;
            }
        }
    }
    out
}

/// Apply a two-site matrix to sites `(site, site + 1)`.
pub fn apply_pair(v: &CVec, dims: &[usize], site: usize, op: &CMat) -> CVec {
    let inner: usize = dims[site + 2..].iter().product();
    let dim = dims[site] * dims[site + 1];
    let outer = v.len() / (inner * dim);
    let mut out = CVec::zeros(v.len());
    for o in 0..outer {
        for i in 0..inner {
            for a in 0..dim {
                let mut acc = C64::new(0.0, 0.0);
                for b in 0..dim {
                    let x = op[(a, b)];
                    if x != C64::new(0.0, 0.0) {
                        acc += x * v[(o * dim + b) * inner + i];
                    }
                }
                out[(o * dim + a) * inner + i] = acc;
            }
        }
    }
    out
}

/// Valence-bond construction: bonds `J` on `(0̄,1̄), (1,2̄), …, (N,N+1)`, then
/// the `d×D²` map on every site pair `(k̄, k)`.
///
/// Independent of the matrix-product route. For the singlet,
/// [`ChainSpec::dense_state`] in reference coordinates equals this vector
/// times `(-√D)^N`.
/// Layout `(l, m_1, …, m_N, r)`.
pub fn valence_bond_state(a_rect: &CMat, n: usize, bond: &CMat) -> Result<CVec> {
    let d = bond.nrows();
    if a_rect.ncols() != d * d {
        return Err(Error::Dimension("map width must be D²".into()));
    }
    let p = a_rect.nrows();
    let size = (d * d) as u128 * (p as u128).pow(n as u32);
    if size > DENSE_GUARD {
        return Err(Error::SizeGuard {
            size,
            limit: DENSE_GUARD,
        });
    }
    // psi[(l, phys, open)], open is the virtual spin waiting for its site
    let mut psi: Vec<C64> = (0..d)
        .flat_map(|l| (0..d).map(move |o| (l, o)))
        .map(|(l, o)| bond[(l, o)])
        .collect();
    let mut bulk = 1usize;
    for _ in 0..n {
        let mut next = vec![C64::new(0.0, 0.0); d * bulk * p * d];
        for l in 0..d {
            for x in 0..bulk {
                for cbar in 0..d {
                    let amp = psi[(l * bulk + x) * d + cbar];
                    if amp == C64::new(0.0, 0.0) {
                        continue;
                    }
                    for a in 0..d {
                        for m in 0..p {
                            let w = a_rect[(m, cbar * d + a)] * amp;
                            for b in 0..d {
                                next[((l * bulk + x) * p + m) * d + b] += w * bond[(a, b)];
                            }
                        }
                    }
                }
            }
        }
        psi = next;
        bulk *= p;
    }
    Ok(CVec::from_vec(psi))
}

#[derive(Serialize, Deserialize)]
struct TensorFile {
    format: String,
    version: u32,
    phys_dim: usize,
    bond_dim: usize,
    labels: Vec<String>,
    basis: Vec<Vec<[f64; 2]>>,
    /// `matrices[β][row][col]`
    matrices: Vec<Vec<Vec<[f64; 2]>>>,
}

#[derive(Serialize, Deserialize)]
struct ChainFile {
    format: String,
    version: u32,
    sites: usize,
    tensor: TensorFile,
    boundary: Vec<[f64; 2]>,
    right_frame: Vec<Vec<[f64; 2]>>,
}

const TENSOR_FORMAT: &str = "vbslab-fcs-tensor";
const CHAIN_FORMAT: &str = "vbslab-chain";
const FORMAT_VERSION: u32 = 1;

fn pair(z: &C64) -> [f64; 2] {
    [z.re, z.im]
}

fn unpair(p: &[f64; 2]) -> C64 {
    C64::new(p[0], p[1])
}

fn mat_rows(m: &CMat) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|k| pair(&m[(r, k)])).collect())
        .collect()
}

fn rows_mat(rows: &[Vec<[f64; 2]>]) -> Result<CMat> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != m) {
        return Err(Error::Dimension("ragged matrix in file".into()));
    }
    Ok(CMat::from_fn(n, m, |r, k| unpair(&rows[r][k])))
}

impl TensorFile {
    fn from_tensor(t: &FcsTensor) -> Self {
        Self {
            format: TENSOR_FORMAT.into(),
            version: FORMAT_VERSION,
            phys_dim: t.phys_dim(),
            bond_dim: t.bond_dim(),
            labels: t.basis.labels.clone(),
            basis: t.basis.vectors.iter().map(|v| v.iter().map(pair).collect()).collect(),
            matrices: t.matrices.iter().map(mat_rows).collect(),
        }
    }

    fn into_tensor(self) -> Result<FcsTensor> {
        if self.format != TENSOR_FORMAT || self.version != FORMAT_VERSION {
            return Err(Error::Invalid(format!(
                "unsupported tensor file {} v{}",
                self.format, self.version
            )));
        }
        let vectors = self
            .basis
            .iter()
            .map(|v| CVec::from_iterator(v.len(), v.iter().map(unpair)))
            .collect();
        let basis = MeasurementBasis::new(self.labels, vectors)?;
        let matrices = self
            .matrices
            .iter()
            .map(|m| rows_mat(m))
            .collect::<Result<Vec<_>>>()?;
        let t = FcsTensor::new(matrices, basis)?;
        if t.phys_dim() != self.phys_dim || t.bond_dim() != self.bond_dim {
            return Err(Error::Dimension("declared dimensions disagree with data".into()));
        }
        Ok(t)
    }
}

impl FcsTensor {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&TensorFile::from_tensor(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str::<TensorFile>(text)?.into_tensor()
    }
}

impl ChainSpec {
    pub fn to_json(&self) -> Result<String> {
        let file = ChainFile {
            format: CHAIN_FORMAT.into(),
            version: FORMAT_VERSION,
            sites: self.n,
            tensor: TensorFile::from_tensor(&self.tensor),
            boundary: self.boundary.iter().map(pair).collect(),
            right_frame: mat_rows(&self.right_frame),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ChainFile = serde_json::from_str(text)?;
        if file.format != CHAIN_FORMAT || file.version != FORMAT_VERSION {
            return Err(Error::Invalid(format!(
                "unsupported chain file {} v{}",
                file.format, file.version
            )));
        }
        let boundary = CVec::from_iterator(file.boundary.len(), file.boundary.iter().map(unpair));
        Self::with_boundary(
            file.sites,
            file.tensor.into_tensor()?,
            boundary,
            Some(rows_mat(&file.right_frame)?),
        )
    }
}

/// Is `a` a nonzero scalar multiple of `b`? Returns the scalar.
pub fn scalar_multiple(a: &CMat, b: &CMat, tol: f64) -> Option<C64> {
    let (k, pivot) = b
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))?;
    if pivot.norm() == 0.0 {
        return None;
    }
    let lambda = a.iter().nth(k)? / pivot;
    (max_abs_diff(a, &(b * lambda)) <= tol * (1.0 + a.norm())).then_some(lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tolerance::STRUCTURAL;
    use crate::spin::{pauli_x, pauli_y, pauli_z, unitary_from_params};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_map(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMat {
        CMat::from_fn(rows, cols, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    fn random_basis(rng: &mut ChaCha8Rng, d: usize) -> MeasurementBasis {
        let params: Vec<f64> = (0..d * d).map(|_| rng.gen_range(-3.0..3.0)).collect();
        MeasurementBasis::from_unitary(&unitary_from_params(&params, d).unwrap()).unwrap()
    }

    #[test]
    fn symmetric_projector_slices_to_paulis() {
        let t = aklt_tensor_in(&MeasurementBasis::aklt()).unwrap();
        assert!(max_abs_diff(t.matrix(0), &pauli_z()) < STRUCTURAL);
        assert!(max_abs_diff(t.matrix(1), &pauli_y()) < STRUCTURAL);
        assert!(max_abs_diff(t.matrix(2), &pauli_x()) < STRUCTURAL);
        // real basis vectors: same matrices up to a phase on the '+' slice
        let real = aklt_tensor_in(&MeasurementBasis::aklt_real()).unwrap();
        let expected = [pauli_z(), pauli_y(), pauli_x()];
        for (m, e) in real.matrices().iter().zip(&expected) {
            let k = scalar_multiple(m, e, STRUCTURAL).expect("proportional slice");
            assert!((k.norm() - 1.0).abs() < STRUCTURAL);
        }
    }

    #[test]
    fn aklt_tensor_basic_identities() {
        let t = aklt_tensor();
        assert_eq!(t.basis().labels(), &["0", "+", "-"]);
        for m in t.matrices() {
            assert!((m.determinant().norm() - 1.0).abs() < STRUCTURAL);
        }
        let sum = t
            .matrices()
            .iter()
            .fold(CMat::zeros(2, 2), |acc, m| acc + m.adjoint() * m);
        assert!(max_abs_diff(&sum, &(identity(2) * c(3.0))) < STRUCTURAL);
    }

    #[test]
    fn deformed_reduces_to_aklt() {
        let t = deformed_tensor(0.0).unwrap();
        for (a, b) in t.matrices().iter().zip(aklt_tensor().matrices()) {
            assert!(max_abs_diff(a, b) < STRUCTURAL);
        }
        assert!(deformed_tensor(f64::INFINITY).is_err());
    }

    #[test]
    fn slicing_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for d_bond in [2usize, 3] {
            for _ in 0..5 {
                let a = random_map(&mut rng, 3, d_bond * d_bond);
                let basis = random_basis(&mut rng, 3);
                let t = slice_projection(&a, &basis).unwrap();
                assert!(max_abs_diff(&t.reconstruct(), &a) < STRUCTURAL);
            }
        }
    }

    #[test]
    fn slicing_is_linear_in_the_basis() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = random_map(&mut rng, 3, 4);
        let b1 = random_basis(&mut rng, 3);
        let b2 = random_basis(&mut rng, 3);
        let t1 = slice_projection(&a, &b1).unwrap();
        let t2 = slice_projection(&a, &b2).unwrap();
        // A^{γ}_2 = Σ_β U_{γβ} A^β_1 with U_{γβ} = <b2_γ|b1_β>
        let u = b2.matrix().adjoint() * b1.matrix();
        for g in 0..3 {
            let combo = (0..3).fold(CMat::zeros(2, 2), |acc, b| acc + t1.matrix(b) * u[(g, b)]);
            assert!(max_abs_diff(&combo, t2.matrix(g)) < STRUCTURAL);
        }
        // and in_basis follows the same rule
        let t3 = t1.in_basis(&b2).unwrap();
        for g in 0..3 {
            assert!(max_abs_diff(t3.matrix(g), t2.matrix(g)) < STRUCTURAL);
        }
    }

    #[test]
    fn slicing_rejects_bad_bases() {
        let skew = MeasurementBasis {
            labels: vec!["a".into(), "b".into(), "c".into()],
            vectors: vec![
                CVec::from_vec(vec![c(1.0), c(0.0), c(0.0)]),
                CVec::from_vec(vec![c(1.0), c(1.0), c(0.0)]),
                CVec::from_vec(vec![c(0.0), c(0.0), c(1.0)]),
            ],
        };
        assert!(matches!(
            slice_projection(&symmetric_projector(), &skew),
            Err(Error::InvalidBasis { .. })
        ));
        assert!(MeasurementBasis::new(skew.labels.clone(), skew.vectors.clone()).is_err());
        assert!(slice_projection(&CMat::zeros(3, 5), &MeasurementBasis::aklt()).is_err());
    }

    #[test]
    fn amplitudes_follow_matrix_products() {
        let chain = ChainSpec::new(2, aklt_tensor()).unwrap();
        // σz σz = 𝟙 so the end pair is the singlet itself
        let amps: Vec<C64> = (0..2)
            .flat_map(|l| (0..2).map(move |r| (l, r)))
            .map(|(l, r)| chain.amplitude(&[0, 0], l, r).unwrap())
            .collect();
        assert_eq!(amps, vec![c(0.0), c(1.0), c(-1.0), c(0.0)]);
        assert!(chain.amplitude(&[0, 3], 0, 0).is_err());
        assert!(chain.amplitude(&[0], 0, 0).is_err());
        assert!(chain.amplitude(&[0, 0], 2, 0).is_err());
    }

    #[test]
    fn amplitude_is_multilinear() {
        let t = deformed_tensor(0.4).unwrap();
        let mut scaled = t.matrices().to_vec();
        scaled[1] *= c(2.5);
        let t2 = FcsTensor::new(scaled, t.basis().clone()).unwrap();
        let c1 = ChainSpec::new(3, t).unwrap();
        let c2 = ChainSpec::new(3, t2).unwrap();
        for outcome in [[0, 0, 2], [1, 0, 2], [1, 1, 0], [1, 1, 1]] {
            let count = outcome.iter().filter(|&&a| a == 1).count() as i32;
            let a1 = c1.amplitude(&outcome, 0, 1).unwrap();
            let a2 = c2.amplitude(&outcome, 0, 1).unwrap();
            assert!((a2 - a1 * 2.5f64.powi(count)).norm() < 1e-12);
        }
    }

    #[test]
    fn dense_matches_amplitudes() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in 1..=6 {
            let chain = ChainSpec::new(n, deformed_tensor(0.3).unwrap()).unwrap();
            let dense = chain.dense_state().unwrap();
            for _ in 0..200 {
                let outcome: Vec<usize> = (0..n).map(|_| rng.gen_range(0..3)).collect();
                let (l, r) = (rng.gen_range(0..2), rng.gen_range(0..2));
                let a = chain.amplitude(&outcome, l, r).unwrap();
                assert!((dense.amplitudes[dense.index(l, &outcome, r)] - a).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn matrix_product_form_equals_valence_bond_construction() {
        for (phi, n) in [(0.0, 1), (0.0, 2), (0.0, 4), (0.6, 3), (-0.9, 2)] {
            let chain = ChainSpec::new(n, deformed_tensor(phi).unwrap()).unwrap();
            let mps = chain.dense_state().unwrap().to_reference().amplitudes;
            let vb = valence_bond_state(&deformed_map(phi), n, &bond_matrix(2)).unwrap();
            // sliced matrices carry sqrt(D) per site relative to the bare map
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let factor = sign * 2f64.sqrt().powi(n as i32);
            let diff = (&mps - &vb * c(factor)).norm();
            assert!(diff < 1e-12, "phi={phi} n={n} diff={diff}");
        }
    }

    #[test]
    fn dense_guard_trips() {
        let chain = ChainSpec::new(15, aklt_tensor()).unwrap();
        assert!(matches!(chain.dense_state(), Err(Error::SizeGuard { .. })));
    }

    #[test]
    fn gauged_chain_is_the_same_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let chain = ChainSpec::new(3, deformed_tensor(0.5).unwrap()).unwrap();
        let base = chain.dense_state().unwrap().amplitudes;
        for _ in 0..10 {
            let g = random_map(&mut rng, 2, 2) + identity(2) * c(1.5);
            let gauged = chain.gauged(&g).unwrap();
            let amps = gauged.dense_state().unwrap().amplitudes;
            assert!((amps - &base).norm() < 1e-10);
        }
    }

    #[test]
    fn json_round_trip() {
        let chain = ChainSpec::new(4, deformed_tensor(0.7).unwrap()).unwrap();
        let back = ChainSpec::from_json(&chain.to_json().unwrap()).unwrap();
        assert_eq!(back, chain);
        let t = aklt_tensor();
        assert_eq!(FcsTensor::from_json(&t.to_json().unwrap()).unwrap(), t);
        assert!(FcsTensor::from_json("{\"format\":\"other\"}").is_err());
    }

    #[test]
    fn basis_distance() {
        let a = MeasurementBasis::aklt();
        assert!(a.distance(&MeasurementBasis::aklt_real()) < 1e-14);
        assert!(a.distance(&MeasurementBasis::reference(3)) > 0.1);
    }
}
