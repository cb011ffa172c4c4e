//! The acceptance checks, shared by the test suite and `vbslab verify`.
//!
//! Each criterion is a list of named numeric checks with the observed value,
//! the expected value or bound, and the tolerance pinned here.

use std::fmt;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::fcs::{aklt_tensor, deformed_tensor, ChainSpec, MeasurementBasis};
use crate::localizable::{
    average_entanglement_dense, average_entanglement_enumerated, average_entanglement_factorized,
    deformed_xi_e, enumerate, le_closed_form, le_closed_form_with, optimal_site_factor_with,
    optimize_measurement_basis, string_order, string_order_dense, string_order_reduced,
    string_order_reduced_dense, xi_e_with, OptimizeOptions,
};
use crate::models::{
    aklt_hamiltonian, aklt_term, boundary_term, deformed_hamiltonian, diagonalize,
    heisenberg_hamiltonian, Side,
};
use crate::spin::{c, identity, max_abs_diff, unitary_from_params, HermitianBasis};
use crate::transfer::{
    correlation_length_spectral, correlation_length_spectral_with, deformed_xi_c, expectation,
    model_correlation_length_fit, transfer_operator_with, Length,
};
use crate::{CMat, C64};

/// Deformation grid shared by several criteria.
pub const PHI_GRID: [f64; 7] = [0.0, 0.25, -0.25, 0.5, -0.5, 1.0, -1.0];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level {
    Fast,
    Full,
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    pub level: Level,
    /// Multiplies every hermitian basis element used for transfer
    /// quantities. Anything but 1 breaks the normalization on purpose.
    pub pauli_scale: f64,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            level: Level::Full,
            pauli_scale: 1.0,
            seed: 0,
        }
    }
}

impl VerifyOptions {
    fn pauli(&self) -> HermitianBasis {
        HermitianBasis::pauli().scaled(self.pauli_scale)
    }
}

#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub observed: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub relation: Relation,
    pub passed: bool,
    /// Listed in [`KNOWN_UNATTAINABLE`].
    pub known: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    /// `|observed - expected| ≤ tolerance`
    Close,
    /// `observed ≥ expected - tolerance`
    AtLeast,
    /// `observed > expected`
    Above,
    /// `observed` is exactly `expected`
    Equal,
}

impl Check {
    pub fn close(name: impl Into<String>, observed: f64, expected: f64, tolerance: f64) -> Self {
        let passed = (observed - expected).abs() <= tolerance
            || (observed.is_infinite() && observed == expected);
        Self::build(name, observed, expected, tolerance, Relation::Close, passed)
    }

    pub fn at_least(name: impl Into<String>, observed: f64, bound: f64, tolerance: f64) -> Self {
        let passed = observed >= bound - tolerance;
        Self::build(name, observed, bound, tolerance, Relation::AtLeast, passed)
    }

    pub fn above(name: impl Into<String>, observed: f64, bound: f64) -> Self {
        let passed = observed > bound;
        Self::build(name, observed, bound, 0.0, Relation::Above, passed)
    }

    pub fn equal(name: impl Into<String>, observed: f64, expected: f64) -> Self {
        let passed = observed == expected;
        Self::build(name, observed, expected, 0.0, Relation::Equal, passed)
    }

    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        let v = if ok { 1.0 } else { 0.0 };
        Self::build(name, v, 1.0, 0.0, Relation::Equal, ok)
    }

    /// A check that could not be evaluated.
    pub fn error(name: impl Into<String>, err: &crate::Error) -> Self {
        let name = format!("{} [error: {err}]", name.into());
        Self::build(name, f64::NAN, 0.0, 0.0, Relation::Equal, false)
    }

    fn build(
        name: impl Into<String>,
        observed: f64,
        expected: f64,
        tolerance: f64,
        relation: Relation,
        passed: bool,
    ) -> Self {
        Self {
            name: name.into(),
            observed,
            expected,
            tolerance,
            relation,
            passed: passed && !observed.is_nan(),
            known: false,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = match (self.passed, self.known) {
            (true, _) => "ok  ",
            (false, false) => "FAIL",
            (false, true) => "FAIL (known)",
        };
        let rel = match self.relation {
            Relation::Close => format!("expected {:.12} ± {:.0e}", self.expected, self.tolerance),
            Relation::AtLeast => format!("expected ≥ {:.12} - {:.0e}", self.expected, self.tolerance),
            Relation::Above => format!("expected > {:.12}", self.expected),
            Relation::Equal => format!("expected {}", self.expected),
        };
        write!(f, "{verdict} {}: observed {:.12}, {rel}", self.name, self.observed)
    }
}

#[derive(Clone, Debug)]
pub struct Criterion {
    pub id: u8,
    pub title: &'static str,
    pub checks: Vec<Check>,
    /// Free-form notes (recorded values that are not asserted).
    pub notes: Vec<String>,
    pub elapsed: Duration,
}

impl Criterion {
    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// Failing checks that are not listed in [`KNOWN_UNATTAINABLE`].
    pub fn unexpected_failures(&self) -> impl Iterator<Item = &Check> {
        self.failures().filter(|c| !c.known)
    }

    /// Every check passes or fails only where the target is known to be
    /// unattainable.
    pub fn acceptable(&self) -> bool {
        !self.checks.is_empty() && self.unexpected_failures().next().is_none()
    }

    /// One line: verdict, id, title, check count and time.
    pub fn summary(&self) -> String {
        let known = if !self.passed() && self.acceptable() { " [known]" } else { "" };
        format!(
            "{} {:>2}. {} ({}/{} checks, {:.2} s){known}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.checks.iter().filter(|c| c.passed).count(),
            self.checks.len(),
            self.elapsed.as_secs_f64()
        )
    }
}

struct Builder {
    id: u8,
    title: &'static str,
    checks: Vec<Check>,
    notes: Vec<String>,
    start: Instant,
}

impl Builder {
    fn new(id: u8, title: &'static str) -> Self {
        Self {
            id,
            title,
            checks: Vec::new(),
            notes: Vec::new(),
            start: Instant::now(),
        }
    }

    fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    /// Record the check produced by `f`, or the error it raised.
    fn try_push(&mut self, name: &str, f: impl FnOnce() -> Result<Check>) {
        match f() {
            Ok(c) => self.checks.push(c),
            Err(e) => self.checks.push(Check::error(name, &e)),
        }
    }

    fn finish(mut self) -> Criterion {
        for check in &mut self.checks {
            check.known = is_known(self.id, &check.name);
        }
        Criterion {
            id: self.id,
            title: self.title,
            checks: self.checks,
            notes: self.notes,
            elapsed: self.start.elapsed(),
        }
    }
}

/// Checks whose literal targets are off by an exact, understood amount:
/// `(criterion, check name)`. An entry ending in `*` matches any check whose
/// name contains the rest.
///
/// - 3: the fitted slope of `ln LE(N)` over `N = 4..20` still carries the
///   finite-size transient of `[R^N]_00` (`1e-3` at |φ| = 0.25, `6e-5` at
///   |φ| = 0.5).
/// - 6: the exact reduced diagonal is `[-1/4, 1/4, 1/4, -1/4] + (-1/3)^N/4`.
pub const KNOWN_UNATTAINABLE: [(u8, &str); 5] = [
    (3, "phi=0.25 fitted xi_E"),
    (3, "phi=-0.25 fitted xi_E"),
    (3, "phi=0.5 fitted xi_E"),
    (3, "phi=-0.5 fitted xi_E"),
    (6, "reduced diagonal*"),
];

fn is_known(id: u8, name: &str) -> bool {
    KNOWN_UNATTAINABLE.iter().any(|&(k, pattern)| {
        k == id
            && match pattern.strip_suffix('*') {
                Some(part) => name.contains(part),
                None => name == pattern,
            }
    })
}

pub const TITLES: [&str; 10] = [
    "AKLT Bell measurements localize a perfect singlet",
    "correlation length: spectral and fitted vs closed form",
    "entanglement length: fitted closed-form LE vs closed form",
    "LE by enumeration, product formula and closed form agree",
    "basis optimizer reaches the closed-form per-site optimum",
    "AKLT string order and reduced end operator",
    "AKLT and deformed Hamiltonians are frustration free",
    "Heisenberg chain with spin-1/2 ends: LE = 1",
    "entanglement length dominates correlation length",
    "invariance under rescaling and bond gauges",
];

/// Criterion 1: every outcome of the Bell measurement on the AKLT chain leaves a
/// maximally entangled end pair.
pub fn criterion_1(_opts: &VerifyOptions) -> Criterion {
    let mut b = Builder::new(1, TITLES[0]);
    let basis = MeasurementBasis::aklt();
    for n in 1..=8 {
        let chain = ChainSpec::new(n, aklt_tensor()).expect("valid chain");
        match enumerate(&chain, &basis) {
            Ok(ens) => {
                b.push(Check::close(format!("N={n} average"), ens.average_entanglement(), 1.0, 1e-10));
                let worst = ens
                    .records
                    .iter()
                    .map(|r| (r.entanglement - 1.0).abs())
                    .fold(0.0, f64::max);
                b.push(Check::close(format!("N={n} worst outcome |C-1|"), worst, 0.0, 1e-10));
            }
            Err(e) => b.push(Check::error(format!("N={n}"), &e)),
        }
    }
    b.finish()
}

/// 2. `ξ_C` from the spectrum of `R(𝟙)` and from correlator fits.
pub fn criterion_2(opts: &VerifyOptions) -> Criterion {
    let mut b = Builder::new(2, TITLES[1]);
    let pauli = opts.pauli();
    b.try_push("AKLT R(1) = diag(3,-1,-1,-1)", || {
        let r = transfer_operator_with(&aklt_tensor(), &identity(3), &pauli)?;
        let want = nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            3.0, -1.0, -1.0, -1.0,
        ]));
        Ok(Check::close(
            "AKLT R(1) = diag(3,-1,-1,-1), max deviation",
            (r.matrix() - want).amax(),
            0.0,
            1e-12,
        ))
    });
    for phi in PHI_GRID {
        let want = deformed_xi_c(phi);
        b.try_push(&format!("phi={phi} spectral"), || {
            let t = deformed_tensor(phi)?;
            let xi = correlation_length_spectral_with(&t, &pauli)?.value();
            Ok(Check::close(format!("phi={phi} spectral xi_C"), xi, want, 1e-9))
        });
        b.try_push(&format!("phi={phi} fit"), || {
            let chain = ChainSpec::new(30, deformed_tensor(phi)?)?;
            let rep = model_correlation_length_fit(&chain, 2..=12)?;
            Ok(Check::close(
                format!("phi={phi} fitted xi_C ({})", rep.observable),
                rep.xi,
                want,
                1e-3,
            ))
        });
    }
    b.finish()
}

/// 3. `ξ_E` from a linear fit of `ln LE(N)`, `N = 4..20`.
pub fn criterion_3(opts: &VerifyOptions) -> Criterion {
    let mut b = Builder::new(3, TITLES[2]);
    let pauli = opts.pauli();
    let ns: Vec<usize> = (4..=20).collect();
    for phi in PHI_GRID {
        let want = deformed_xi_e(phi);
        b.try_push(&format!("phi={phi}"), || {
            let rep = xi_e_with(&deformed_tensor(phi)?, &ns, &pauli)?;
            Ok(match want {
                Length::Infinite => Check::holds(
                    format!("phi={phi} infinite flag (slope {:.3e})", rep.slope),
                    rep.xi.is_infinite(),
                ),
                Length::Finite(w) => {
                    Check::close(format!("phi={phi} fitted xi_E"), rep.xi.value(), w, 1e-6)
                }
            })
        });
    }
    b.finish()
}

/// 4. Three routes to the LE in the Bell basis.
pub fn criterion_4(opts: &VerifyOptions) -> Criterion {
    let mut b = Builder::new(4, TITLES[3]);
    let pauli = opts.pauli();
    let basis = MeasurementBasis::aklt();
    for phi in [0.3, 0.8] {
        for n in 2..=6 {
            b.try_push(&format!("phi={phi} N={n}"), || {
                let chain = ChainSpec::new(n, deformed_tensor(phi)?)?;
                let e = average_entanglement_enumerated(&chain, &basis)?;
                let f = average_entanglement_factorized(&chain, &basis)?;
                let cf = le_closed_form_with(chain.tensor(), n, &pauli)?;
                let spread = (e - f).abs().max((e - cf).abs()).max((f - cf).abs());
                Ok(Check::close(
                    format!("phi={phi} N={n} max pairwise spread (LE={e:.9})"),
                    spread,
                    0.0,
                    1e-8,
                ))
            });
        }
    }
    b.finish()
}

/// 5. The basis search reaches `√λ_max(M R M Rᵀ)`.
pub fn criterion_5(opts: &VerifyOptions) -> Criterion {
    let mut b = Builder::new(5, TITLES[4]);
    let pauli = opts.pauli();
    for phi in [0.0, 0.5, 1.0] {
        let result = (|| -> Result<(f64, f64, f64)> {
            let t = deformed_tensor(phi)?;
            let target = optimal_site_factor_with(&t, &pauli)?;
            let options = OptimizeOptions {
                seed: opts.seed,
                ..OptimizeOptions::default()
            };
            let opt = optimize_measurement_basis(&t, &options)?;
            Ok((opt.value, target, opt.basis.distance(&MeasurementBasis::aklt())))
        })();
        match result {
            Ok((value, target, distance)) => {
                b.push(Check::at_least(format!("phi={phi} optimum"), value, target, 1e-6));
                b.notes.push(format!(
                    "phi={phi}: best {value:.12}, closed form {target:.12}, distance of optimal basis to the Bell basis {distance:.3e}"
                ));
            }
            Err(e) => b.push(Check::error(format!("phi={phi}"), &e)),
        }
    }
    b.finish()
}

/// Criterion 6: string order of the AKLT chain, by transfer contraction and by the
/// dense state.
pub fn criterion_6(_opts: &VerifyOptions) -> Criterion {
    let mut b = Builder::new(6, TITLES[5]);
    let literal = [0.25, -0.25, -0.25, 0.25];
    for n in 2..=6 {
        let chain = ChainSpec::new(n, aklt_tensor()).expect("valid chain");
        let routes: [(&str, Result<f64>, Result<CMat>); 2] = [
            ("transfer", string_order(&chain), string_order_reduced(&chain)),
            ("dense", string_order_dense(&chain), string_order_reduced_dense(&chain)),
        ];
        for (route, value, reduced) in routes {
            match value {
                Ok(v) => {
                    b.push(Check::close(format!("N={n} {route} |string order|"), v.abs(), 1.0, 1e-10));
                    b.notes.push(format!("N={n} {route}: string order {v:+.12}"));
                }
                Err(e) => b.push(Check::error(format!("N={n} {route} string order"), &e)),
            }
            match reduced {
                Ok(rho) => {
                    let dev = (0..4)
                        .map(|k| (rho[(k, k)] - c(literal[k])).norm())
                        .fold(0.0, f64::max);
                    b.push(Check::close(
                        format!("N={n} {route} reduced diagonal vs [1/4,-1/4,-1/4,1/4]"),
                        dev,
                        0.0,
                        1e-10,
                    ));
                    b.notes.push(format!(
                        "N={n} {route}: reduced diagonal [{:+.6}, {:+.6}, {:+.6}, {:+.6}]",
                        rho[(0, 0)].re,
                        rho[(1, 1)].re,
                        rho[(2, 2)].re,
                        rho[(3, 3)].re
                    ));
                }
                Err(e) => b.push(Check::error(format!("N={n} {route} reduced operator"), &e)),
            }
        }
    }
    b.finish()
}

/// 7. Projector identities and term-by-term annihilation.
pub fn criterion_7(_opts: &VerifyOptions) -> Criterion {
    let mut b = Builder::new(7, TITLES[6]);
    let x = aklt_term();
    b.push(Check::close("bulk X^2 = X", max_abs_diff(&(&x * &x), &x), 0.0, 1e-12));
    b.push(Check::close("bulk Tr X", x.trace().re, 5.0, 1e-12));
    for side in [Side::Left, Side::Right] {
        let t = boundary_term(side);
        b.push(Check::close(format!("{side:?} boundary X^2 = X"), max_abs_diff(&(&t * &t), &t), 0.0, 1e-12));
    }
    for (label, phi) in [("AKLT", 0.0), ("phi=0.5", 0.5)] {
        for n in 1..=4 {
            b.try_push(&format!("{label} N={n}"), || {
                let h = if phi == 0.0 { aklt_hamiltonian(n)? } else { deformed_hamiltonian(n, phi)? };
                let v = ChainSpec::new(n, deformed_tensor(phi)?)?
                    .dense_state()?
                    .to_reference()
                    .amplitudes;
                Ok(Check::close(
                    format!("{label} N={n} max term residual"),
                    h.max_term_residual(&v),
                    0.0,
                    1e-10,
                ))
            });
            match (|| diagonalize(&if phi == 0.0 { aklt_hamiltonian(n)? } else { deformed_hamiltonian(n, phi)? }, 3))() {
                Ok(rep) => {
                    b.push(Check::close(format!("{label} N={n} E0"), rep.values[0], 0.0, 1e-10));
                    b.push(Check::equal(format!("{label} N={n} ground degeneracy"), rep.degeneracy as f64, 1.0));
                    b.push(Check::above(format!("{label} N={n} gap"), rep.gap, 0.0));
                }
                Err(e) => b.push(Check::error(format!("{label} N={n} spectrum"), &e)),
            }
        }
    }
    b.finish()
}

/// Heisenberg ground-state LE in the Bell basis and the gap, for one `N`.
pub fn heisenberg_le(n: usize) -> Result<(f64, f64)> {
    let h = heisenberg_hamiltonian(n)?;
    let rep = diagonalize(&h, 2)?;
    let state = rep.ground_state(&h)?;
    Ok((average_entanglement_dense(&state, &MeasurementBasis::aklt())?, rep.gap))
}

/// 8. Heisenberg ground states, `N = 2..5` (`2..4` at the fast level).
pub fn criterion_8(opts: &VerifyOptions) -> Criterion {
    let mut b = Builder::new(8, TITLES[7]);
    let top = if opts.level == Level::Full { 5 } else { 4 };
    for n in 2..=top {
        match heisenberg_le(n) {
            Ok((le, gap)) => {
                b.push(Check::close(format!("N={n} LE"), le, 1.0, 1e-6));
                b.notes.push(format!("N={n}: gap {gap:.9}"));
            }
            Err(e) => b.push(Check::error(format!("N={n}"), &e)),
        }
    }
    b.finish()
}

/// 9. `ξ_E ≥ ξ_C`, strictly away from the isotropic point.
pub fn criterion_9(opts: &VerifyOptions) -> Criterion {
    let mut b = Builder::new(9, TITLES[8]);
    let pauli = opts.pauli();
    let ns: Vec<usize> = (4..=20).collect();
    for phi in PHI_GRID {
        let result = (|| -> Result<(f64, f64)> {
            let t = deformed_tensor(phi)?;
            let xe = xi_e_with(&t, &ns, &pauli)?.xi.value();
            let xc = model_correlation_length_fit(&ChainSpec::new(30, t)?, 2..=12)?.xi;
            Ok((xe, xc))
        })();
        match result {
            Ok((xe, xc)) => {
                b.push(Check::at_least(format!("phi={phi} xi_E >= xi_C"), xe, xc, 1e-6));
                if phi != 0.0 {
                    b.push(Check::above(format!("phi={phi} xi_E > xi_C"), xe, xc));
                }
            }
            Err(e) => b.push(Check::error(format!("phi={phi}"), &e)),
        }
    }
    b.finish()
}

fn random_gl(rng: &mut ChaCha8Rng) -> CMat {
    // well conditioned: identity-dominated random matrix
    CMat::from_fn(2, 2, |i, j| {
        let z = C64::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
        if i == j { z + c(1.5) } else { z }
    })
}

fn random_unitary(rng: &mut ChaCha8Rng) -> CMat {
    let p: Vec<f64> = (0..4).map(|_| rng.gen_range(-3.0..3.0)).collect();
    unitary_from_params(&p, 2).expect("4 parameters for a qubit")
}

/// Physical quantities of a chain used for the invariance suite.
fn fingerprint(chain: &ChainSpec, ops: &[CMat]) -> Result<Vec<(&'static str, f64)>> {
    let basis = MeasurementBasis::aklt();
    let mut out = vec![
        ("LE enumerated", average_entanglement_enumerated(chain, &basis)?),
        ("LE factorized", average_entanglement_factorized(chain, &basis)?),
        ("string order", string_order(chain)?),
        ("random correlator", expectation(chain, ops)?),
        ("spectral xi_C", correlation_length_spectral(chain.tensor())?.value()),
    ];
    let ens = enumerate(chain, &basis)?;
    let worst = ens.records.iter().map(|r| r.probability).fold(0.0, f64::max);
    out.push(("largest outcome probability", worst));
    out.push(("probability of outcome 0", ens.records[0].probability));
    Ok(out)
}

/// 10. Rescaling and bond gauges leave every reported quantity unchanged.
pub fn criterion_10(opts: &VerifyOptions) -> Criterion {
    let mut b = Builder::new(10, TITLES[9]);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x5eed);
    let n = 4;
    let result = (|| -> Result<()> {
        let chain = ChainSpec::new(n, deformed_tensor(0.5)?)?;
        let ops: Vec<CMat> = (0..n)
            .map(|_| {
                let a = CMat::from_fn(3, 3, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
                (&a + a.adjoint()) * c(0.5)
            })
            .collect();
        let base = fingerprint(&chain, &ops)?;
        let base_closed = le_closed_form(chain.tensor(), n)?;
        let mut worst = vec![0.0f64; base.len()];
        let mut worst_closed = 0.0f64;
        for _ in 0..100 {
            let scale = C64::from_polar(rng.gen_range(0.2..5.0), rng.gen_range(-3.0..3.0));
            let g = random_gl(&mut rng);
            let moved = chain.scaled(scale).gauged(&g)?;
            for (k, (_, v)) in fingerprint(&moved, &ops)?.iter().enumerate() {
                worst[k] = worst[k].max((v - base[k].1).abs());
            }
            let u = random_unitary(&mut rng);
            let unitary = chain.tensor().scaled(scale).gauged(&u)?;
            worst_closed = worst_closed.max((le_closed_form(&unitary, n)? - base_closed).abs());
        }
        for ((name, _), w) in base.iter().zip(worst) {
            b.push(Check::close(format!("{name}: max change over 100 gauges"), w, 0.0, 1e-10));
        }
        b.push(Check::close(
            "closed-form LE: max change over 100 unitary gauges",
            worst_closed,
            0.0,
            1e-10,
        ));
        Ok(())
    })();
    if let Err(e) = result {
        b.push(Check::error("invariance suite", &e));
    }
    b.finish()
}

/// Run one criterion by id (1 to 10).
pub fn run_criterion(id: u8, opts: &VerifyOptions) -> Option<Criterion> {
    Some(match id {
        1 => criterion_1(opts),
        2 => criterion_2(opts),
        3 => criterion_3(opts),
        4 => criterion_4(opts),
        5 => criterion_5(opts),
        6 => criterion_6(opts),
        7 => criterion_7(opts),
        8 => criterion_8(opts),
        9 => criterion_9(opts),
        10 => criterion_10(opts),
        _ => return None,
    })
}

/// Run all criteria in order.
pub fn run_all(opts: &VerifyOptions) -> Vec<Criterion> {
    (1..=10).filter_map(|id| run_criterion(id, opts)).collect()
}
