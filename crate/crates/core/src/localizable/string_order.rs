//! String order `<σz ⊗ exp(iπSz)^{⊗N} ⊗ σz>` between the end qubits.

use crate::error::{Error, Result};
use crate::fcs::ChainSpec;
use crate::spin::{c, identity, kron, kron_all, pauli_z, spin_one};
use crate::transfer::{boundary_matrix_element, expectation_with_boundary};
use crate::{CMat, C64};

fn check(chain: &ChainSpec) -> Result<()> {
    if chain.phys_dim() != 3 || chain.bond_dim() != 2 {
        return Err(Error::Dimension(format!(
            "string order needs spin-1 bulk and qubit ends, got d = {}, D = {}",
            chain.phys_dim(),
            chain.bond_dim()
        )));
    }
    Ok(())
}

/// `exp(iπSz) = diag(-1, 1, -1)`, rounded to exact entries.
fn phase() -> CMat {
    spin_one().string_phase().map(|z| c(z.re.round()))
}

/// String order through the transfer contraction; the sign is reported as
/// computed.
pub fn string_order(chain: &ChainSpec) -> Result<f64> {
    check(chain)?;
    let ops = vec![phase(); chain.len()];
    expectation_with_boundary(chain, &pauli_z(), &ops, &pauli_z())
}

/// `Tr_bulk[(⊗ exp(iπSz)) |V><V|] / <V|V>` as a 4×4 operator on the end
/// qubits (index `l·2 + r`), through transfer contractions.
pub fn string_order_reduced(chain: &ChainSpec) -> Result<CMat> {
    check(chain)?;
    let ops = vec![phase(); chain.len()];
    let mut rho = CMat::zeros(4, 4);
    for row in 0..4 {
        for col in 0..4 {
            let (l, r) = (row / 2, row % 2);
            let (lp, rp) = (col / 2, col % 2);
            // rho[(l r),(l' r')] = <V| |l'><l| ⊗ P ⊗ |r'><r| |V>
            let mut xl = CMat::zeros(2, 2);
            xl[(lp, l)] = c(1.0);
            let mut xr = CMat::zeros(2, 2);
            xr[(rp, r)] = c(1.0);
            rho[(row, col)] = boundary_matrix_element(chain, &xl, &ops, &xr)?;
        }
    }
    Ok(rho)
}

fn dense_string_operator(n: usize) -> CMat {
    let mut factors = vec![identity(2)];
    factors.extend(std::iter::repeat_n(phase(), n));
    factors.push(identity(2));
    kron_all(&factors)
}

/// String order from the dense state vector.
pub fn string_order_dense(chain: &ChainSpec) -> Result<f64> {
    check(chain)?;
    let rho = string_order_reduced_dense(chain)?;
    Ok((rho * kron(&pauli_z(), &pauli_z())).trace().re)
}

/// Reduced string operator from the dense state vector.
pub fn string_order_reduced_dense(chain: &ChainSpec) -> Result<CMat> {
    check(chain)?;
    let state = chain.dense_state()?.to_reference();
    let v = &state.amplitudes;
    let pv = dense_string_operator(chain.len()) * v;
    let bulk = 3usize.pow(chain.len() as u32);
    let norm = v.norm_squared();
    let mut rho = CMat::zeros(4, 4);
    for row in 0..4 {
        for col in 0..4 {
            let (l, r) = (row / 2, row % 2);
            let (lp, rp) = (col / 2, col % 2);
            let mut acc = C64::new(0.0, 0.0);
            for idx in 0..bulk {
                acc += pv[(l * bulk + idx) * 2 + r] * v[(lp * bulk + idx) * 2 + rp].conj();
            }
            rho[(row, col)] = acc / c(norm);
        }
    }
    Ok(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fcs::{aklt_tensor, deformed_tensor};
    use crate::spin::max_abs_diff;
    use crate::transfer::expectation;

    #[test]
    fn aklt_string_order_is_maximal() {
        for n in 1..=8 {
            let chain = ChainSpec::new(n, aklt_tensor()).unwrap();
            let v = string_order(&chain).unwrap();
            assert!((v.abs() - 1.0).abs() < 1e-10, "n={n} v={v}");
        }
    }

    #[test]
    fn transfer_and_dense_agree() {
        for (phi, n) in [(0.0, 2), (0.0, 5), (0.5, 3), (-1.0, 4)] {
            let chain = ChainSpec::new(n, deformed_tensor(phi).unwrap()).unwrap();
            let a = string_order(&chain).unwrap();
            let b = string_order_dense(&chain).unwrap();
            assert!((a - b).abs() < 1e-10);
            let ra = string_order_reduced(&chain).unwrap();
            let rb = string_order_reduced_dense(&chain).unwrap();
            assert!(max_abs_diff(&ra, &rb) < 1e-10);
        }
    }

    #[test]
    fn reduced_operator_is_consistent() {
        let chain = ChainSpec::new(4, deformed_tensor(0.3).unwrap()).unwrap();
        let rho = string_order_reduced(&chain).unwrap();
        let trace = rho.trace().re;
        let phases = expectation(&chain, &vec![phase(); 4]).unwrap();
        assert!((trace - phases).abs() < 1e-12);
        let zz = (&rho * kron(&pauli_z(), &pauli_z())).trace().re;
        assert!((zz - string_order(&chain).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn aklt_reduced_diagonal() {
        // traceless part -[1/4, -1/4, -1/4, 1/4] plus (-1/3)^N / 4 on the identity
        for n in 2..=6 {
            let chain = ChainSpec::new(n, aklt_tensor()).unwrap();
            let rho = string_order_reduced(&chain).unwrap();
            let offset = (-1.0f64 / 3.0).powi(n as i32) / 4.0;
            let want = [-0.25, 0.25, 0.25, -0.25];
            for k in 0..4 {
                assert!((rho[(k, k)].re - (want[k] + offset)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn deformed_string_order_stays_maximal() {
        // the deformation keeps total Sz = 0, so the full string is a parity
        for phi in [0.5, 1.0, -1.0] {
            for n in 1..=6 {
                let chain = ChainSpec::new(n, deformed_tensor(phi).unwrap()).unwrap();
                let v = string_order(&chain).unwrap();
                assert!((v.abs() - 1.0).abs() < 1e-10, "phi={phi} n={n} v={v}");
            }
        }
    }

    #[test]
    fn rejects_other_dimensions() {
        let basis = crate::fcs::MeasurementBasis::reference(2);
        let t = crate::fcs::FcsTensor::new(vec![identity(2), identity(2)], basis).unwrap();
        assert!(string_order(&ChainSpec::new(2, t).unwrap()).is_err());
    }
}
