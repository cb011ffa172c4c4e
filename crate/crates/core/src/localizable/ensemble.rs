//! Measurement outcomes on all bulk sites.

use rayon::prelude::*;

use super::{det_power, per_site_value, state_concurrence};
use crate::error::{Error, Result};
use crate::fcs::{ChainSpec, DenseState, MeasurementBasis};
use crate::linalg::CompensatedSum;
use crate::spin::identity;
use crate::transfer::log_norm_sqr;
use crate::{CMat, CVec};

/// Most outcomes a streamed enumeration may visit.
pub const ENUMERATION_GUARD: u128 = 10_000_000;

/// Most outcome records [`enumerate`] will materialize.
pub const ENSEMBLE_GUARD: u128 = 1_000_000;

/// One measurement outcome.
#[derive(Clone, Debug)]
pub struct OutcomeRecord {
    pub outcome: Vec<usize>,
    pub probability: f64,
    /// `B = A^{β_N} ⋯ A^{β_1}`.
    pub matrix_part: CMat,
    /// Concurrence of the conditioned end pair.
    pub entanglement: f64,
}

/// Every outcome of measuring all bulk sites in one basis, in lexicographic
/// order of the outcome strings.
#[derive(Clone, Debug)]
pub struct OutcomeEnsemble {
    pub basis: MeasurementBasis,
    pub records: Vec<OutcomeRecord>,
    /// `<V|V>`.
    pub norm_sqr: f64,
}

impl OutcomeEnsemble {
    pub fn total_probability(&self) -> f64 {
        self.records
            .iter()
            .map(|r| r.probability)
            .collect::<CompensatedSum>()
            .value()
    }

    pub fn average_entanglement(&self) -> f64 {
        self.records
            .iter()
            .map(|r| r.probability * r.entanglement)
            .collect::<CompensatedSum>()
            .value()
    }
}

fn outcome_count(chain: &ChainSpec) -> u128 {
    (chain.phys_dim() as u128)
        .checked_pow(chain.len() as u32)
        .unwrap_or(u128::MAX)
}

fn guard(count: u128, limit: u128) -> Result<()> {
    if count > limit {
        return Err(Error::SizeGuard { size: count, limit });
    }
    Ok(())
}

/// The end-pair state `χ` as a `D²` vector (index `l·D + r`) after outcome
/// `outcome` in `basis`, with its probability `‖χ‖²/<V|V>`.
pub fn conditioned_state(
    chain: &ChainSpec,
    basis: &MeasurementBasis,
    outcome: &[usize],
) -> Result<(CVec, f64)> {
    let measured = chain.in_basis(basis)?;
    if outcome.len() != chain.len() {
        return Err(Error::Dimension(format!(
            "outcome of length {} for {} sites",
            outcome.len(),
            chain.len()
        )));
    }
    let chi = measured.end_state(&measured.tensor().product(outcome)?);
    let d = chain.bond_dim();
    let state = CVec::from_fn(d * d, |k, _| chi[(k / d, k % d)]);
    let p = chi.norm_squared() / log_norm_sqr(chain)?.exp();
    Ok((state, p))
}

/// Depth-first walk over outcomes below `prefix`, reusing partial
/// products. `visit` sees the outcome string and `B`.
fn walk(
    chain: &ChainSpec,
    outcome: &mut Vec<usize>,
    product: &CMat,
    visit: &mut impl FnMut(&[usize], &CMat),
) {
    if outcome.len() == chain.len() {
        visit(outcome, product);
        return;
    }
    for a in 0..chain.phys_dim() {
        let next = chain.tensor().matrix(a) * product;
        outcome.push(a);
        walk(chain, outcome, &next, visit);
        outcome.pop();
    }
}

/// Run `visit` over all outcomes, split by the first site's label across
/// threads. Returns the per-branch results in label order.
fn branches<T: Send>(
    chain: &ChainSpec,
    make: impl Fn() -> T + Sync,
    visit: impl Fn(&mut T, &[usize], &CMat) + Sync,
) -> Vec<T> {
    (0..chain.phys_dim())
        .into_par_iter()
        .map(|a| {
            let mut acc = make();
            let mut outcome = vec![a];
            let start = chain.tensor().matrix(a).clone();
            walk(chain, &mut outcome, &start, &mut |o, b| visit(&mut acc, o, b));
            acc
        })
        .collect()
}

/// Materialize every outcome record.
pub fn enumerate(chain: &ChainSpec, basis: &MeasurementBasis) -> Result<OutcomeEnsemble> {
    guard(outcome_count(chain), ENSEMBLE_GUARD)?;
    let measured = chain.in_basis(basis)?;
    let norm = log_norm_sqr(chain)?.exp();
    let parts = branches(
        &measured,
        Vec::new,
        |acc: &mut Vec<OutcomeRecord>, outcome, b| {
            let chi = measured.end_state(b);
            acc.push(OutcomeRecord {
                outcome: outcome.to_vec(),
                probability: chi.norm_squared() / norm,
                matrix_part: b.clone(),
                entanglement: state_concurrence(&chi),
            });
        },
    );
    Ok(OutcomeEnsemble {
        basis: basis.clone(),
        records: parts.into_iter().flatten().collect(),
        norm_sqr: norm,
    })
}

/// `Σ_α p_α C(χ_α)` by streaming over all `d^N` outcomes.
pub fn average_entanglement_enumerated(chain: &ChainSpec, basis: &MeasurementBasis) -> Result<f64> {
    guard(outcome_count(chain), ENUMERATION_GUARD)?;
    let measured = chain.in_basis(basis)?;
    let d = chain.bond_dim() as f64;
    let parts = branches(&measured, CompensatedSum::default, |acc, _, b| {
        // p·C = D |det χ|^{2/D} / <V|V>; the norm is divided out once below
        acc.add(d * det_power(&measured.end_state(b)));
    });
    let total: CompensatedSum = parts.iter().map(CompensatedSum::value).collect();
    Ok(total.value() / log_norm_sqr(chain)?.exp())
}

/// Product formula
/// `D |det J · det F|^{2/D} (Σ_β |det A^β|^{2/D})^N / <V|V>`.
pub fn average_entanglement_factorized(chain: &ChainSpec, basis: &MeasurementBasis) -> Result<f64> {
    let measured = chain.in_basis(basis)?;
    let d = chain.bond_dim() as f64;
    let ends = det_power(&chain.boundary_matrix()) * det_power(chain.right_frame());
    let log = d.ln() + ends.ln() + chain.len() as f64 * per_site_value(measured.tensor()).ln()
        - log_norm_sqr(chain)?;
    Ok(log.exp())
}

/// Average end-pair concurrence of an arbitrary dense state (for example an
/// exact ground state) when every bulk site is measured in `basis`.
pub fn average_entanglement_dense(state: &DenseState, basis: &MeasurementBasis) -> Result<f64> {
    let measured = state.in_basis(basis)?;
    let d = state.bond_dim;
    let p = state.phys_dim();
    let bulk = p.pow(state.n as u32);
    guard(bulk as u128, ENUMERATION_GUARD)?;
    let norm = measured.norm_sqr();
    if norm == 0.0 {
        return Err(Error::Invalid("state has zero norm".into()));
    }
    let amps = &measured.amplitudes;
    let mut total = CompensatedSum::default();
    let mut chi = identity(d);
    for idx in 0..bulk {
        for l in 0..d {
            for r in 0..d {
                chi[(l, r)] = amps[(l * bulk + idx) * d + r];
            }
        }
        total.add(d as f64 * det_power(&chi));
    }
    Ok(total.value() / norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fcs::{aklt_tensor, deformed_tensor};
    use crate::spin::{c, unitary_from_params};
    use crate::C64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_basis(rng: &mut ChaCha8Rng) -> MeasurementBasis {
        let p: Vec<f64> = (0..9).map(|_| rng.gen_range(-3.0..3.0)).collect();
        MeasurementBasis::from_unitary(&unitary_from_params(&p, 3).unwrap()).unwrap()
    }

    #[test]
    fn aklt_bell_outcomes_are_equiprobable_bell_pairs() {
        let chain = ChainSpec::new(2, aklt_tensor()).unwrap();
        let ens = enumerate(&chain, &MeasurementBasis::aklt()).unwrap();
        assert_eq!(ens.records.len(), 9);
        for r in &ens.records {
            assert!((r.probability - 1.0 / 9.0).abs() < 1e-12);
            assert!((r.entanglement - 1.0).abs() < 1e-12);
        }
        let first = &ens.records[0];
        assert_eq!(first.outcome, vec![0, 0]);
        assert!(crate::spin::max_abs_diff(&first.matrix_part, &identity(2)) < 1e-12);
        let (state, p) = conditioned_state(&chain, &MeasurementBasis::aklt(), &[0, 0]).unwrap();
        assert!((p - 1.0 / 9.0).abs() < 1e-12);
        assert_eq!(state, CVec::from_vec(vec![c(0.0), c(1.0), c(-1.0), c(0.0)]));
    }

    #[test]
    fn probabilities_sum_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for n in 1..=5 {
            let chain = ChainSpec::new(n, deformed_tensor(0.7).unwrap()).unwrap();
            let ens = enumerate(&chain, &random_basis(&mut rng)).unwrap();
            assert!((ens.total_probability() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn conditioned_state_matches_dense_projection() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for n in 1..=5 {
            let chain = ChainSpec::new(n, deformed_tensor(-0.4).unwrap()).unwrap();
            let basis = random_basis(&mut rng);
            let dense = chain.dense_state().unwrap().in_basis(&basis).unwrap();
            let norm = dense.norm_sqr();
            for _ in 0..10 {
                let outcome: Vec<usize> = (0..n).map(|_| rng.gen_range(0..3)).collect();
                let (state, p) = conditioned_state(&chain, &basis, &outcome).unwrap();
                let projected = CVec::from_fn(4, |k, _| dense.amplitudes[dense.index(k / 2, &outcome, k % 2)]);
                // equal up to a phase
                let overlap = projected.dotc(&state).norm();
                assert!((overlap - projected.norm() * state.norm()).abs() < 1e-10);
                assert!((p - projected.norm_squared() / norm).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn enumeration_matches_product_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        let chain = ChainSpec::new(4, aklt_tensor()).unwrap();
        for _ in 0..20 {
            let basis = random_basis(&mut rng);
            let e = average_entanglement_enumerated(&chain, &basis).unwrap();
            let f = average_entanglement_factorized(&chain, &basis).unwrap();
            assert!((e - f).abs() < 1e-10);
            assert!(e <= 1.0 + 1e-12);
        }
        let ens = enumerate(&chain, &MeasurementBasis::aklt()).unwrap();
        let e = average_entanglement_enumerated(&chain, &MeasurementBasis::aklt()).unwrap();
        assert!((ens.average_entanglement() - e).abs() < 1e-12);
    }

    #[test]
    fn sz_basis_localizes_less() {
        let chain = ChainSpec::new(3, aklt_tensor()).unwrap();
        let e = average_entanglement_enumerated(&chain, &MeasurementBasis::reference(3)).unwrap();
        assert!(e < 1.0 - 1e-3);
    }

    #[test]
    fn scaling_invariance() {
        let chain = ChainSpec::new(4, deformed_tensor(0.3).unwrap()).unwrap();
        let scaled = chain.scaled(C64::new(-1.7, 0.4));
        let b = MeasurementBasis::aklt();
        let (a1, a2) = (
            average_entanglement_factorized(&chain, &b).unwrap(),
            average_entanglement_factorized(&scaled, &b).unwrap(),
        );
        assert!((a1 - a2).abs() < 1e-12);
    }

    #[test]
    fn dense_route_agrees() {
        let chain = ChainSpec::new(4, deformed_tensor(0.6).unwrap()).unwrap();
        let dense = chain.dense_state().unwrap();
        let b = MeasurementBasis::aklt();
        let from_dense = average_entanglement_dense(&dense.to_reference(), &b).unwrap();
        let enumerated = average_entanglement_enumerated(&chain, &b).unwrap();
        assert!((from_dense - enumerated).abs() < 1e-12);
    }

    #[test]
    fn deformed_decay_ratio() {
        // LE(N+1)/LE(N) tends to 3/λ_1
        let ch = 1f64.cosh();
        let ratio = 3.0 / (ch + (ch * ch + 3.0).sqrt());
        let le: Vec<f64> = (1..=6)
            .map(|n| {
                let chain = ChainSpec::new(n, deformed_tensor(0.5).unwrap()).unwrap();
                average_entanglement_enumerated(&chain, &MeasurementBasis::aklt()).unwrap()
            })
            .collect();
        assert!((le[5] / le[4] - ratio).abs() < 1e-3);
    }

    #[test]
    fn guards() {
        let chain = ChainSpec::new(13, aklt_tensor()).unwrap();
        assert!(matches!(enumerate(&chain, &MeasurementBasis::aklt()), Err(Error::SizeGuard { .. })));
        let chain = ChainSpec::new(15, aklt_tensor()).unwrap();
        assert!(matches!(
            average_entanglement_enumerated(&chain, &MeasurementBasis::aklt()),
            Err(Error::SizeGuard { .. })
        ));
    }
}
