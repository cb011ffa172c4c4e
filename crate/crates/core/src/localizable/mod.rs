//! Localizable entanglement between the two end spins of a chain.
//!
//! Every bulk spin is measured in a fixed orthonormal basis. Outcome `α`
//! leaves the ends in `χ_α` (see [`crate::fcs`]) with probability
//! `‖χ_α‖²/<V|V>`, and its entanglement is the determinant concurrence
//!
//! ```text
//! C(χ) = D |det χ|^{2/D} / ‖χ‖²
//! ```
//!
//! normalized so that maximally entangled pairs give 1. The average
//! `Σ_α p_α C(χ_α)` is computed by enumeration, by the product formula that
//! follows from `det` being multiplicative, and for `D = 2` by the closed
//! form in the largest eigenvalue of `M R(𝟙) M R(𝟙)ᵀ`.

mod ensemble;
mod optimize;
mod string_order;

pub use ensemble::{
    average_entanglement_dense, average_entanglement_enumerated, average_entanglement_factorized,
    conditioned_state, enumerate, OutcomeEnsemble, OutcomeRecord, ENUMERATION_GUARD,
    ENSEMBLE_GUARD,
};
pub use optimize::{optimize_measurement_basis, OptimizeOptions, Optimum};
pub use string_order::{
    string_order, string_order_dense, string_order_reduced, string_order_reduced_dense,
};

use crate::error::{Error, Result};
use crate::fcs::FcsTensor;
use crate::linalg::{eigenvalues, fit_line};
use crate::spin::{c, identity, HermitianBasis};
use crate::tolerance::FLAT_SLOPE;
use crate::transfer::{bond_metric, log_power_00, transfer_operator_with, Length};
use crate::CMat;

/// Determinant concurrence of `(B ⊗ 𝟙)|I>` with `|I>` normalized.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Concurrence {
    pub value: f64,
    /// Set when `B = 0`; the value is then 0 by continuity.
    pub vanishing: bool,
}

/// `|det B|^{2/D} / (Tr(B†B)/D)`.
pub fn concurrence_d(b: &CMat) -> Result<Concurrence> {
    let d = b.nrows();
    if d == 0 || b.ncols() != d {
        return Err(Error::Dimension("concurrence needs a square matrix".into()));
    }
    let norm = b.norm_squared() / d as f64;
    if norm == 0.0 {
        return Ok(Concurrence {
            value: 0.0,
            vanishing: true,
        });
    }
    Ok(Concurrence {
        value: det_power(b) / norm,
        vanishing: false,
    })
}

/// `|det B|^{2/D}`.
pub fn det_power(b: &CMat) -> f64 {
    b.determinant().norm().powf(2.0 / b.nrows() as f64)
}

/// Concurrence of an end-pair state given as the `D×D` amplitude matrix
/// `χ[l][r]`: `D |det χ|^{2/D} / ‖χ‖²`, zero for the zero state.
pub fn state_concurrence(chi: &CMat) -> f64 {
    let norm = chi.norm_squared();
    if norm == 0.0 {
        return 0.0;
    }
    chi.nrows() as f64 * det_power(chi) / norm
}

/// Per-site factor `Σ_β |det A^β|^{2/D}` of the product formula.
pub fn per_site_value(tensor: &FcsTensor) -> f64 {
    tensor.matrices().iter().map(det_power).sum()
}

/// `√λ_max(M R(𝟙) M R(𝟙)ᵀ)`, the best per-site factor over measurement
/// bases for `D = 2`.
pub fn optimal_site_factor(tensor: &FcsTensor) -> Result<f64> {
    optimal_site_factor_with(tensor, &HermitianBasis::pauli())
}

/// [`optimal_site_factor`] with `R` and `M` built in `basis`.
pub fn optimal_site_factor_with(tensor: &FcsTensor, basis: &HermitianBasis) -> Result<f64> {
    if tensor.bond_dim() != 2 {
        return Err(Error::Unsupported(format!(
            "closed form needs D = 2, got D = {}",
            tensor.bond_dim()
        )));
    }
    let r = transfer_operator_with(tensor, &identity(tensor.phys_dim()), basis)?;
    let r = r.matrix().map(c);
    let m = bond_metric(2, basis);
    let product = &m * &r * &m * r.transpose();
    let lambda = eigenvalues(&product)?
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(lambda.max(0.0).sqrt())
}

/// Exact localizable entanglement of a `D = 2` chain with singlet ends:
/// `[√λ_max(M R M Rᵀ)]^N / [R^N]_00`.
pub fn le_closed_form(tensor: &FcsTensor, n: usize) -> Result<f64> {
    le_closed_form_with(tensor, n, &HermitianBasis::pauli())
}

/// [`le_closed_form`] with every transfer quantity built in `basis`.
pub fn le_closed_form_with(tensor: &FcsTensor, n: usize, basis: &HermitianBasis) -> Result<f64> {
    let factor = optimal_site_factor_with(tensor, basis)?;
    let r = transfer_operator_with(tensor, &identity(tensor.phys_dim()), basis)?;
    Ok((n as f64 * factor.ln() - log_power_00(&r, n)?).exp())
}

/// Closed form of the entanglement length of the deformed family,
/// `1/ln[(cosh 2φ + √(cosh² 2φ + 3))/3]`, infinite at `φ = 0`.
pub fn deformed_xi_e(phi: f64) -> Length {
    let ch = (2.0 * phi).cosh();
    let rate = ((ch + (ch * ch + 3.0).sqrt()) / 3.0).ln();
    if rate.abs() < FLAT_SLOPE {
        Length::Infinite
    } else {
        Length::Finite(1.0 / rate)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LeMethod {
    Enumeration,
    Factorized,
    ClosedForm,
}

impl LeMethod {
    pub fn name(self) -> &'static str {
        match self {
            LeMethod::Enumeration => "enumeration",
            LeMethod::Factorized => "factorized",
            LeMethod::ClosedForm => "closed_form",
        }
    }
}

/// `LE(N)` over a range of lengths with the fitted entanglement length.
#[derive(Clone, Debug)]
pub struct LeReport {
    pub ns: Vec<usize>,
    pub values: Vec<f64>,
    pub xi: Length,
    pub slope: f64,
    pub method: LeMethod,
}

/// Fit `ln LE(N) = a - N/ξ_E`. A slope below [`FLAT_SLOPE`] in magnitude
/// reports an infinite length.
pub fn fit_entanglement_length(ns: &[usize], values: &[f64], method: LeMethod) -> Result<LeReport> {
    if ns.len() < 3 || ns.len() != values.len() {
        return Err(Error::Fit(format!(
            "need at least 3 (N, LE) points, got {}",
            ns.len()
        )));
    }
    if let Some((n, v)) = ns.iter().zip(values).find(|(_, v)| !(**v > 0.0)) {
        return Err(Error::Fit(format!("LE({n}) = {v} is not positive")));
    }
    let xs: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    let ys: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let fit = fit_line(&xs, &ys).ok_or_else(|| Error::Fit("degenerate N range".into()))?;
    let xi = if fit.slope.abs() < FLAT_SLOPE {
        Length::Infinite
    } else if fit.slope > 0.0 {
        return Err(Error::Fit(format!("LE grows with N (slope {})", fit.slope)));
    } else {
        Length::Finite(-1.0 / fit.slope)
    };
    Ok(LeReport {
        ns: ns.to_vec(),
        values: values.to_vec(),
        xi,
        slope: fit.slope,
        method,
    })
}

/// Entanglement length from closed-form LE values over `ns`.
pub fn xi_e(tensor: &FcsTensor, ns: &[usize]) -> Result<LeReport> {
    xi_e_with(tensor, ns, &HermitianBasis::pauli())
}

/// [`xi_e`] with closed-form values built in `basis`.
pub fn xi_e_with(tensor: &FcsTensor, ns: &[usize], basis: &HermitianBasis) -> Result<LeReport> {
    let values = ns
        .iter()
        .map(|&n| le_closed_form_with(tensor, n, basis))
        .collect::<Result<Vec<_>>>()?;
    fit_entanglement_length(ns, &values, LeMethod::ClosedForm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fcs::{aklt_tensor, deformed_tensor};
    use crate::spin::{pauli_y, unitary_from_params};
    use crate::transfer::transfer_operator;
    use crate::C64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn wootters(b: &CMat) -> f64 {
        // |ψ> = (B ⊗ 𝟙)|Φ>, |Φ> = (|00> + |11>)/√2, normalized
        let mut psi = crate::CVec::zeros(4);
        for l in 0..2 {
            for r in 0..2 {
                psi[l * 2 + r] = b[(l, r)];
            }
        }
        psi /= c(psi.norm());
        let yy = crate::spin::kron(&pauli_y(), &pauli_y());
        psi.dot(&(yy * &psi)).norm()
    }

    #[test]
    fn unitary_gives_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for d in 2..=4 {
            let p: Vec<f64> = (0..d * d).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let u = unitary_from_params(&p, d).unwrap() * C64::new(0.0, 2.5);
            assert!((concurrence_d(&u).unwrap().value - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn diagonal_squeeze() {
        for phi in [0.1f64, 0.8, -1.5] {
            let b = CMat::from_diagonal(&crate::CVec::from_vec(vec![c(phi.exp()), c((-phi).exp())]));
            let v = concurrence_d(&b).unwrap().value;
            assert!((v - 1.0 / (2.0 * phi).cosh()).abs() < 1e-12);
        }
    }

    #[test]
    fn matches_wootters() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let b = CMat::from_fn(2, 2, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            let ours = concurrence_d(&b).unwrap().value;
            assert!((ours - wootters(&b)).abs() < 1e-10);
        }
    }

    #[test]
    fn zero_matrix_is_flagged() {
        let z = concurrence_d(&CMat::zeros(2, 2)).unwrap();
        assert_eq!(z.value, 0.0);
        assert!(z.vanishing);
    }

    #[test]
    fn aklt_closed_form_is_one() {
        for n in [1, 5, 40, 400] {
            assert!((le_closed_form(&aklt_tensor(), n).unwrap() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn optimal_factor_is_three_for_deformed_family() {
        for phi in [0.0, 0.3, -0.9, 1.5] {
            let f = optimal_site_factor(&deformed_tensor(phi).unwrap()).unwrap();
            assert!((f - 3.0).abs() < 1e-9, "phi={phi} f={f}");
            // the Bell basis attains it
            let t = deformed_tensor(phi).unwrap();
            assert!((per_site_value(&t) - 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn closed_form_against_direct_powers() {
        let t = deformed_tensor(0.5).unwrap();
        let r = transfer_operator(&t, &identity(3)).unwrap();
        let p = (0..10).fold(nalgebra::DMatrix::<f64>::identity(4, 4), |acc, _| r.matrix() * acc);
        let want = 3f64.powi(10) / p[(0, 0)];
        assert!((le_closed_form(&t, 10).unwrap() - want).abs() < 1e-12);
        // continuity at the isotropic point
        let near = deformed_tensor(1e-6).unwrap();
        assert!((le_closed_form(&near, 8).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn entanglement_length_closed_form() {
        // long chains: the finite-size transient of [R^N]_00 is negligible
        let ns: Vec<usize> = (40..=60).collect();
        for phi in [0.25, -0.5, 1.0] {
            let rep = xi_e(&deformed_tensor(phi).unwrap(), &ns).unwrap();
            let want = deformed_xi_e(phi).value();
            assert!((rep.xi.value() - want).abs() < 1e-6 * want.max(1.0), "phi={phi}");
        }
        assert!(xi_e(&aklt_tensor(), &ns).unwrap().xi.is_infinite());
        let short: Vec<usize> = (4..=20).collect();
        let rep = xi_e(&deformed_tensor(1.0).unwrap(), &short).unwrap();
        assert!((rep.xi.value() - deformed_xi_e(1.0).value()).abs() < 1e-6);
        assert!(deformed_xi_e(0.0).is_infinite());
    }

    #[test]
    fn fit_rejects_bad_input() {
        assert!(fit_entanglement_length(&[1, 2], &[1.0, 0.5], LeMethod::Enumeration).is_err());
        assert!(fit_entanglement_length(&[1, 2, 3], &[1.0, 0.0, 0.5], LeMethod::Enumeration).is_err());
    }

    #[test]
    fn closed_form_rejects_larger_bonds() {
        let basis = crate::fcs::MeasurementBasis::reference(2);
        let t = FcsTensor::new(vec![identity(3), identity(3)], basis).unwrap();
        assert!(matches!(le_closed_form(&t, 3), Err(Error::Unsupported(_))));
    }
}
