//! Transfer operators and everything computed from them.
//!
//! For a site observable `O` the transfer operator is the real `D²×D²`
//! matrix
//!
//! ```text
//! R_ij(O) = Σ_k M_ik Tr[(A† O A)(σ_j ⊗ σ_k)]
//! ```
//!
//! with `A` the site map in reference coordinates, `σ` the hermitian basis
//! of [`HermitianBasis`] and `M` fixed by the bond state (`diag(1,-1,-1,-1)`
//! for the singlet). Equivalently `R(O)` is the matrix, in the `σ` basis, of
//! the superoperator `Y ↦ Σ_ββ' <β|O|β'> A^β' Y A^β†`. Expectation values are
//! ratios of contractions of products of these matrices.

use std::fmt;
use std::ops::RangeInclusive;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::fcs::{bond_matrix, ChainSpec, FcsTensor};
use crate::linalg::{eigenvalues_real, fit_line};
use crate::spin::{c, identity, spin_operators, HermitianBasis};
use crate::tolerance::{CORRELATOR_FLOOR, REAL_PART, STRUCTURAL};
use crate::{CMat, CVec, C64};

/// Real transfer matrix of one site observable.
#[derive(Clone, Debug, PartialEq)]
pub struct TransferOperator {
    bond_dim: usize,
    matrix: DMatrix<f64>,
    source: String,
}

impl TransferOperator {
    /// Wrap a complex matrix, rejecting imaginary parts above
    /// [`REAL_PART`] (relative to the largest entry, floored at one).
    pub fn from_complex(bond_dim: usize, m: &CMat, source: impl Into<String>) -> Result<Self> {
        let scale = m.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let imag = m.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        if imag > REAL_PART * scale {
            return Err(Error::NotReal(imag));
        }
        Ok(Self {
            bond_dim,
            matrix: m.map(|z| z.re),
            source: source.into(),
        })
    }

    pub fn bond_dim(&self) -> usize {
        self.bond_dim
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Description of the observable.
    pub fn source(&self) -> &str {
        &self.source
    }

    /// Eigenvalues sorted by descending magnitude.
    pub fn eigenvalues(&self) -> Result<Vec<C64>> {
        eigenvalues_real(&self.matrix)
    }
}

/// The matrix `M` of the transfer formula for the default bond state of
/// dimension `bond_dim`: `M = Nᵀ`, `N_km = Tr(σ_m J σ_kᵀ J†) / D` with `J`
/// rescaled to a unitary.
pub fn bond_metric(bond_dim: usize, basis: &HermitianBasis) -> CMat {
    let j = bond_matrix(bond_dim);
    let scale = (bond_dim as f64).sqrt() / j.norm();
    let j = j * c(scale);
    let n = basis.len();
    let dim = c(bond_dim as f64);
    CMat::from_fn(n, n, |i, k| {
        // M_ik = N_ki
        (basis.get(i) * &j * basis.get(k).transpose() * j.adjoint()).trace() / dim
    })
}

/// `R(O)` for an observable given in the reference basis of the site.
pub fn transfer_operator(tensor: &FcsTensor, o: &CMat) -> Result<TransferOperator> {
    transfer_operator_with(tensor, o, &HermitianBasis::new(tensor.bond_dim()))
}

/// `R(O)` in an explicitly supplied hermitian basis.
pub fn transfer_operator_with(
    tensor: &FcsTensor,
    o: &CMat,
    basis: &HermitianBasis,
) -> Result<TransferOperator> {
    let d = tensor.phys_dim();
    let bond = tensor.bond_dim();
    if o.shape() != (d, d) {
        return Err(Error::Dimension(format!(
            "observable is {}x{}, site has {d} levels",
            o.nrows(),
            o.ncols()
        )));
    }
    if basis.dim() != bond {
        return Err(Error::Dimension(format!(
            "hermitian basis of dimension {} for bond dimension {bond}",
            basis.dim()
        )));
    }
    let a = tensor.reconstruct();
    let gram = a.adjoint() * o * &a;
    let m = bond_metric(bond, basis);
    let n = basis.len();
    let traces = CMat::from_fn(n, n, |j, k| {
        (&gram * basis.get(j).kronecker(basis.get(k))).trace()
    });
    let r = m * traces.transpose();
    // r[i][j] = Σ_k M_ik traces[j][k]
    TransferOperator::from_complex(bond, &r, describe(o))
}

/// `R(O)` straight from the superoperator `Y ↦ Σ <β|O|β'> A^β' Y A^β†`.
///
/// Independent of the reconstruction and of `M`; used to cross-check
/// [`transfer_operator`].
pub fn transfer_superoperator(tensor: &FcsTensor, o: &CMat) -> Result<CMat> {
    let d = tensor.phys_dim();
    if o.shape() != (d, d) {
        return Err(Error::Dimension("observable does not match the site".into()));
    }
    let v = tensor.basis().matrix();
    let local = v.adjoint() * o * &v;
    let basis = HermitianBasis::new(tensor.bond_dim());
    let n = basis.len();
    let dim = c(tensor.bond_dim() as f64);
    let mut r = CMat::zeros(n, n);
    for j in 0..n {
        let mut image = CMat::zeros(tensor.bond_dim(), tensor.bond_dim());
        for b in 0..d {
            for bp in 0..d {
                if local[(b, bp)] != c(0.0) {
                    image += tensor.matrix(bp) * basis.get(j) * tensor.matrix(b).adjoint()
                        * local[(b, bp)];
                }
            }
        }
        for i in 0..n {
            r[(i, j)] = (basis.get(i) * &image).trace() / dim;
        }
    }
    Ok(r)
}

fn describe(o: &CMat) -> String {
    if *o == identity(o.nrows()) {
        "identity".into()
    } else {
        format!("{}x{} observable", o.nrows(), o.ncols())
    }
}

/// `ln [R^n]_00` by normalized power iteration, safe for large `n`.
pub fn log_power_00(r: &TransferOperator, n: usize) -> Result<f64> {
    let dim = r.matrix.nrows();
    let mut v = nalgebra::DVector::<f64>::zeros(dim);
    v[0] = 1.0;
    let mut log = 0.0;
    for _ in 0..n {
        v = &r.matrix * v;
        let norm = v.norm();
        if norm == 0.0 {
            return Err(Error::Invalid("transfer power vanishes".into()));
        }
        v /= norm;
        log += norm.ln();
    }
    if v[0] <= 0.0 {
        return Err(Error::Invalid(format!("[R^{n}]_00 is not positive")));
    }
    Ok(log + v[0].ln())
}

/// `ln <V|V>` by iterating `Y ↦ Σ_β A^β Y A^β†` from `Y_0 = (J† J)ᵀ` and
/// closing with `Tr(F† F Y_N)`. Works for any bond state and frame.
pub fn log_norm_sqr(chain: &ChainSpec) -> Result<f64> {
    let j = chain.boundary_matrix();
    let f = chain.right_frame();
    let tensor = chain.tensor();
    let mut y = (j.adjoint() * &j).transpose();
    let mut log = 0.0;
    for _ in 0..chain.len() {
        y = tensor
            .matrices()
            .iter()
            .fold(CMat::zeros(y.nrows(), y.ncols()), |acc, a| acc + a * &y * a.adjoint());
        let scale = y.norm();
        if scale == 0.0 || !scale.is_finite() {
            return Err(Error::Invalid("chain state has zero norm".into()));
        }
        y /= c(scale);
        log += scale.ln();
    }
    let last = (f.adjoint() * f * y).trace().re;
    if last <= 0.0 {
        return Err(Error::Invalid("chain state has zero norm".into()));
    }
    Ok(log + last.ln())
}

/// Contract the chain with per-site transfer matrices and boundary
/// operators, returning `<V|X_L ⊗ ... ⊗ X_R|V> / <V|V>`.
///
/// The end-pair operator is carried as `Y_0 = (J† X_L J)ᵀ`, expanded in the
/// hermitian basis, propagated by the `R`s and closed with
/// `Tr(F† X_R F Y_N)`. Numerator and denominator are propagated together and
/// rescaled every step.
fn contract(
    chain: &ChainSpec,
    x_left: &CMat,
    sites: &[&TransferOperator],
    identity_op: &TransferOperator,
    x_right: &CMat,
) -> Result<C64> {
    let bond = chain.bond_dim();
    if x_left.shape() != (bond, bond) || x_right.shape() != (bond, bond) {
        return Err(Error::Dimension(format!("end operators must be {bond}x{bond}")));
    }
    let basis = HermitianBasis::new(bond);
    let j = chain.boundary_matrix();
    let f = chain.right_frame();
    let start = |x: &CMat| CVec::from_vec(basis.coefficients(&(j.adjoint() * x * &j).transpose()));
    let close = |x: &CMat, v: &CVec| {
        let z = f.adjoint() * x * f;
        basis
            .elements()
            .iter()
            .zip(v.iter())
            .map(|(s, vi)| (&z * s).trace() * vi)
            .sum::<C64>()
    };
    let mut num = start(x_left);
    let mut den = start(&identity(bond));
    let lift = |r: &TransferOperator| r.matrix.map(c);
    let one = lift(identity_op);
    for r in sites {
        num = lift(r) * num;
        den = &one * den;
        let scale = den.norm();
        if scale == 0.0 || !scale.is_finite() {
            return Err(Error::Invalid("normalization of the chain vanishes".into()));
        }
        num /= c(scale);
        den /= c(scale);
    }
    let denominator = close(&identity(bond), &den);
    if denominator.norm() <= f64::MIN_POSITIVE {
        return Err(Error::Invalid("chain state has zero norm".into()));
    }
    Ok(close(x_right, &num) / denominator)
}

fn check_ops(chain: &ChainSpec, ops: &[CMat]) -> Result<()> {
    if ops.len() != chain.len() {
        return Err(Error::Dimension(format!(
            "{} observables for {} sites",
            ops.len(),
            chain.len()
        )));
    }
    Ok(())
}

/// `<V| O_1 ⊗ ... ⊗ O_N |V> / <V|V>` for hermitian site observables.
pub fn expectation(chain: &ChainSpec, ops: &[CMat]) -> Result<f64> {
    let bond = chain.bond_dim();
    expectation_with_boundary(chain, &identity(bond), ops, &identity(bond))
}

/// Expectation value including operators on the two end spins.
pub fn expectation_with_boundary(
    chain: &ChainSpec,
    x_left: &CMat,
    ops: &[CMat],
    x_right: &CMat,
) -> Result<f64> {
    let z = boundary_matrix_element(chain, x_left, ops, x_right)?;
    if z.im.abs() > REAL_PART * z.norm().max(1.0) {
        return Err(Error::NotReal(z.im));
    }
    Ok(z.re)
}

/// Normalized matrix element for possibly non-hermitian end operators; the
/// bulk observables must still be hermitian.
pub fn boundary_matrix_element(
    chain: &ChainSpec,
    x_left: &CMat,
    ops: &[CMat],
    x_right: &CMat,
) -> Result<C64> {
    check_ops(chain, ops)?;
    let tensor = chain.tensor();
    let one = transfer_operator(tensor, &identity(chain.phys_dim()))?;
    let mut cache: Vec<(&CMat, TransferOperator)> = Vec::new();
    let mut rs = Vec::with_capacity(ops.len());
    for o in ops {
        let pos = match cache.iter().position(|(k, _)| *k == o) {
            Some(p) => p,
            None => {
                cache.push((o, transfer_operator(tensor, o)?));
                cache.len() - 1
            }
        };
        rs.push(pos);
    }
    let sites: Vec<&TransferOperator> = rs.iter().map(|&p| &cache[p].1).collect();
    contract(chain, x_left, &sites, &one, x_right)
}

/// Correlation length, possibly infinite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Length {
    Finite(f64),
    Infinite,
}

impl Length {
    pub fn value(self) -> f64 {
        match self {
            Length::Finite(x) => x,
            Length::Infinite => f64::INFINITY,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Length::Infinite)
    }
}

impl fmt::Display for Length {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Length::Finite(x) => write!(f, "{x}"),
            Length::Infinite => f.write_str("inf"),
        }
    }
}

/// `ξ_C = 1/ln|λ_1/λ_2|` from the two largest-magnitude eigenvalues of
/// `R(𝟙)`; [`Length::Infinite`] when they tie.
pub fn correlation_length_spectral(tensor: &FcsTensor) -> Result<Length> {
    correlation_length_spectral_with(tensor, &HermitianBasis::new(tensor.bond_dim()))
}

/// [`correlation_length_spectral`] with `R(𝟙)` built in `basis`.
pub fn correlation_length_spectral_with(tensor: &FcsTensor, basis: &HermitianBasis) -> Result<Length> {
    let one = transfer_operator_with(tensor, &identity(tensor.phys_dim()), basis)?;
    let mags: Vec<f64> = one.eigenvalues()?.iter().map(|z| z.norm()).collect();
    if mags.len() < 2 || mags[1] == 0.0 {
        return Ok(Length::Finite(0.0));
    }
    if mags[0] - mags[1] <= STRUCTURAL * mags[0] {
        return Ok(Length::Infinite);
    }
    Ok(Length::Finite(1.0 / (mags[0] / mags[1]).ln()))
}

/// Closed form for the deformed family: `1/ln(cosh 2φ + √(cosh² 2φ + 3))`.
pub fn deformed_xi_c(phi: f64) -> f64 {
    let ch = (2.0 * phi).cosh();
    1.0 / (ch + (ch * ch + 3.0).sqrt()).ln()
}

/// Connected two-point correlator and its exponential fit.
#[derive(Clone, Debug)]
pub struct CorrelationReport {
    pub observable: String,
    pub separations: Vec<usize>,
    pub values: Vec<f64>,
    /// Separations excluded from the fit because `|C(r)|` fell below the
    /// floor.
    pub dropped: Vec<usize>,
    pub xi: f64,
    pub residual: f64,
}

impl CorrelationReport {
    /// Rows `r, C(r), xi, residual`.
    pub fn to_csv(&self) -> Result<String> {
        let mut out = String::from("r,C(r),xi,residual\n");
        for (r, v) in self.separations.iter().zip(&self.values) {
            out.push_str(&crate::report::row(&[
                r.to_string(),
                crate::report::number(*v)?,
                crate::report::number(self.xi)?,
                crate::report::number(self.residual)?,
            ]));
        }
        Ok(out)
    }
}

/// Fit `ln|C(r)|` for `C(r) = <O_a O_{a+r}> - <O_a><O_{a+r}>` over the
/// separations in `window`, with the pair centred in the chain.
pub fn correlation_length_fit(
    chain: &ChainSpec,
    o: &CMat,
    label: &str,
    window: RangeInclusive<usize>,
) -> Result<CorrelationReport> {
    let n = chain.len();
    let (lo, hi) = (*window.start(), *window.end());
    if lo == 0 || hi < lo || hi + 2 > n {
        return Err(Error::Invalid(format!(
            "separation window {lo}..={hi} does not fit a chain of {n} sites"
        )));
    }
    let tensor = chain.tensor();
    let one = transfer_operator(tensor, &identity(chain.phys_dim()))?;
    let obs = transfer_operator(tensor, o)?;
    let bond_id = identity(chain.bond_dim());
    let eval = |positions: &[usize]| -> Result<f64> {
        let sites: Vec<&TransferOperator> = (1..=n)
            .map(|k| if positions.contains(&k) { &obs } else { &one })
            .collect();
        Ok(contract(chain, &bond_id, &sites, &one, &bond_id)?.re)
    };
    let mut report = CorrelationReport {
        observable: label.to_string(),
        separations: Vec::new(),
        values: Vec::new(),
        dropped: Vec::new(),
        xi: f64::NAN,
        residual: f64::NAN,
    };
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for r in lo..=hi {
        let a = (n - r) / 2 + 1;
        let b = a + r;
        let value = eval(&[a, b])? - eval(&[a])? * eval(&[b])?;
        report.separations.push(r);
        report.values.push(value);
        if value.abs() > CORRELATOR_FLOOR {
            xs.push(r as f64);
            ys.push(value.abs().ln());
        } else {
            report.dropped.push(r);
        }
    }
    if xs.len() < 2 {
        return Err(Error::NoCorrelation(format!(
            "{label}: only {} of {} separations above {CORRELATOR_FLOOR:e}",
            xs.len(),
            hi - lo + 1
        )));
    }
    let fit = fit_line(&xs, &ys).ok_or_else(|| Error::Fit("degenerate correlator fit".into()))?;
    if fit.slope >= 0.0 {
        return Err(Error::Fit(format!("{label}: correlator does not decay")));
    }
    report.xi = -1.0 / fit.slope;
    report.residual = fit.rms_residual;
    Ok(report)
}

/// Slowest-decaying channel among `Sx, Sy, Sz`.
pub fn model_correlation_length_fit(
    chain: &ChainSpec,
    window: RangeInclusive<usize>,
) -> Result<CorrelationReport> {
    let spin = spin_operators((chain.phys_dim() as f64 - 1.0) / 2.0)?;
    let mut best: Option<CorrelationReport> = None;
    let mut last_err = None;
    for (label, op) in [("Sx", &spin.x), ("Sy", &spin.y), ("Sz", &spin.z)] {
        match correlation_length_fit(chain, op, label, window.clone()) {
            Ok(rep) => {
                if best.as_ref().is_none_or(|b| rep.xi > b.xi) {
                    best = Some(rep);
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    best.ok_or_else(|| last_err.unwrap_or_else(|| Error::NoCorrelation("no channel".into())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fcs::{aklt_tensor, deformed_tensor, DenseState};
    use crate::spin::{kron_all, max_abs_diff, pauli_z, spin_one};
    use nalgebra::DVector;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dense_expectation(state: &DenseState, x_left: &CMat, ops: &[CMat], x_right: &CMat) -> f64 {
        let reference = state.to_reference();
        let mut factors = vec![x_left.clone()];
        factors.extend(ops.iter().cloned());
        factors.push(x_right.clone());
        let op = kron_all(&factors);
        let v = &reference.amplitudes;
        let z = v.dotc(&(op * v)) / c(v.norm_squared());
        z.re
    }

    fn random_hermitian(rng: &mut ChaCha8Rng, d: usize) -> CMat {
        let a = CMat::from_fn(d, d, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        (&a + a.adjoint()) * c(0.5)
    }

    #[test]
    fn aklt_identity_transfer() {
        let r = transfer_operator(&aklt_tensor(), &identity(3)).unwrap();
        let expected = DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, -1.0, -1.0, -1.0]));
        assert!((r.matrix() - expected).amax() < STRUCTURAL);
        assert_eq!(r.source(), "identity");
    }

    #[test]
    fn singlet_metric() {
        let m = bond_metric(2, &HermitianBasis::pauli());
        let expected = CMat::from_diagonal(&CVec::from_vec(vec![c(1.0), c(-1.0), c(-1.0), c(-1.0)]));
        assert!(max_abs_diff(&m, &expected) < STRUCTURAL);
    }

    #[test]
    fn deformed_identity_transfer_matches_closed_matrix() {
        for phi in [0.3, -0.7, 1.2] {
            let r = transfer_operator(&deformed_tensor(phi).unwrap(), &identity(3)).unwrap();
            let (ch, sh) = ((2.0 * phi).cosh(), (2.0 * phi).sinh());
            let expected = DMatrix::from_row_slice(
                4,
                4,
                &[
                    3.0 * ch, 0.0, 0.0, sh,
                    0.0, -1.0, 0.0, 0.0,
                    0.0, 0.0, -1.0, 0.0,
                    -3.0 * sh, 0.0, 0.0, -ch,
                ],
            );
            assert!((r.matrix() - expected).amax() < 1e-12, "phi={phi}");
            let eig = r.eigenvalues().unwrap();
            let root = (ch * ch + 3.0).sqrt();
            let mut re: Vec<f64> = eig.iter().map(|z| z.re).collect();
            re.sort_by(f64::total_cmp);
            let mut want = vec![ch + root, ch - root, -1.0, -1.0];
            want.sort_by(f64::total_cmp);
            for (a, b) in re.iter().zip(&want) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn literal_formula_equals_superoperator() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for phi in [0.0, 0.4, -1.1] {
            let t = deformed_tensor(phi).unwrap();
            for _ in 0..5 {
                let o = random_hermitian(&mut rng, 3);
                let lit = transfer_operator(&t, &o).unwrap();
                let sup = transfer_superoperator(&t, &o).unwrap();
                assert!(max_abs_diff(&lit.matrix().map(c), &sup) < 1e-12);
            }
        }
    }

    #[test]
    fn transfer_is_linear() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let t = deformed_tensor(0.6).unwrap();
        let (o1, o2) = (random_hermitian(&mut rng, 3), random_hermitian(&mut rng, 3));
        let (a, b) = (1.7, -0.4);
        let lhs = transfer_operator(&t, &(&o1 * c(a) + &o2 * c(b))).unwrap();
        let r1 = transfer_operator(&t, &o1).unwrap();
        let r2 = transfer_operator(&t, &o2).unwrap();
        assert!((lhs.matrix() - (r1.matrix() * a + r2.matrix() * b)).amax() < 1e-12);
    }

    #[test]
    fn power_multiplicativity() {
        let r = transfer_operator(&deformed_tensor(0.5).unwrap(), &identity(3)).unwrap();
        let m = r.matrix();
        let p = |k: u32| (0..k).fold(DMatrix::<f64>::identity(4, 4), |acc, _| m * acc);
        let lhs = p(7);
        let rhs = p(3) * p(4);
        assert!((&lhs - &rhs).amax() <= 1e-10 * lhs.amax());
        assert!((log_power_00(&r, 7).unwrap() - lhs[(0, 0)].ln()).abs() < 1e-12);
    }

    #[test]
    fn log_power_survives_long_chains() {
        let r = transfer_operator(&aklt_tensor(), &identity(3)).unwrap();
        let log = log_power_00(&r, 2000).unwrap();
        assert!((log - 2000.0 * 3f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn dense_norm_is_twice_the_power_element() {
        for n in 1..=5 {
            let chain = ChainSpec::new(n, deformed_tensor(0.35).unwrap()).unwrap();
            let r = transfer_operator(chain.tensor(), &identity(3)).unwrap();
            let norm = chain.dense_state().unwrap().norm_sqr();
            let power = log_power_00(&r, n).unwrap().exp();
            assert!((norm - 2.0 * power).abs() < 1e-10 * norm);
            assert!((log_norm_sqr(&chain).unwrap() - norm.ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn expectation_matches_dense_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=6 {
            let chain = ChainSpec::new(n, deformed_tensor(0.45).unwrap()).unwrap();
            let dense = chain.dense_state().unwrap();
            for _ in 0..8 {
                let ops: Vec<CMat> = (0..n).map(|_| random_hermitian(&mut rng, 3)).collect();
                let (xl, xr) = (random_hermitian(&mut rng, 2), random_hermitian(&mut rng, 2));
                let fast = expectation_with_boundary(&chain, &xl, &ops, &xr).unwrap();
                let slow = dense_expectation(&dense, &xl, &ops, &xr);
                assert!((fast - slow).abs() < 1e-10 * (1.0 + slow.abs()), "n={n}");
            }
        }
    }

    #[test]
    fn aklt_simple_expectations() {
        let sz = spin_one().z;
        let chain = ChainSpec::new(4, aklt_tensor()).unwrap();
        assert!((expectation(&chain, &vec![identity(3); 4]).unwrap() - 1.0).abs() < 1e-12);
        for k in 0..4 {
            let mut ops = vec![identity(3); 4];
            ops[k] = sz.clone();
            assert!(expectation(&chain, &ops).unwrap().abs() < 1e-12);
        }
        let ops = vec![sz.clone(), identity(3), identity(3), sz.clone()];
        let dense = chain.dense_state().unwrap();
        let want = dense_expectation(&dense, &identity(2), &ops, &identity(2));
        assert!((expectation(&chain, &ops).unwrap() - want).abs() < 1e-12);
        let three = ChainSpec::new(3, aklt_tensor()).unwrap();
        let v = expectation_with_boundary(&three, &pauli_z(), &vec![identity(3); 3], &identity(2)).unwrap();
        assert!(v.abs() < 1e-12);
        assert!(expectation(&chain, &vec![identity(3); 3]).is_err());
    }

    #[test]
    fn spectral_lengths() {
        let aklt = correlation_length_spectral(&aklt_tensor()).unwrap();
        assert!((aklt.value() - 1.0 / 3f64.ln()).abs() < 1e-12);
        let t = deformed_tensor(0.5).unwrap();
        let xi = correlation_length_spectral(&t).unwrap().value();
        assert!((xi - deformed_xi_c(0.5)).abs() < 1e-10);
        let scaled = correlation_length_spectral(&t.scaled(C64::new(0.3, 2.0))).unwrap().value();
        assert!((scaled - xi).abs() < 1e-10);
    }

    #[test]
    fn fitted_length_aklt() {
        let chain = ChainSpec::new(30, aklt_tensor()).unwrap();
        let rep = correlation_length_fit(&chain, &spin_one().z, "Sz", 2..=10).unwrap();
        assert!((rep.xi - 1.0 / 3f64.ln()).abs() < 1e-3);
        assert!(rep.dropped.is_empty());
        let csv = rep.to_csv().unwrap();
        assert_eq!(csv.lines().count(), 10);
    }

    #[test]
    fn product_state_has_no_correlations() {
        let basis = crate::fcs::MeasurementBasis::reference(3);
        let z = CMat::zeros(2, 2);
        let t = FcsTensor::new(vec![z.clone(), identity(2), z], basis).unwrap();
        let chain = ChainSpec::new(12, t).unwrap();
        let err = correlation_length_fit(&chain, &spin_one().z, "Sz", 2..=8).unwrap_err();
        assert!(matches!(err, Error::NoCorrelation(_)));
    }
}
