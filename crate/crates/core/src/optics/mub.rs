//! Cascaded product-basis measurement for `d = 2^n` paths.
//!
//! Stage `q` pairs ports whose `x` differs in bit `q`: a plate array puts
//! the left beam in H and the right in V, `BD` brings them together, a
//! 22.5 degree plate interferes them and a PBS sends the difference port to
//! `y + 2^q`. After `n` stages output port `(0, k)` projects onto the
//! product-basis vector `k`, entries `(-1)^{popcount(k & p)} / sqrt d`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use super::{Element, Mode, Network, Pol};
use crate::{Error, Result};

fn check_n(n: u32) -> Result<()> {
    if !(1..=6).contains(&n) {
        return Err(Error::Unsupported(format!("MUB network with n = {n}")));
    }
    Ok(())
}

/// Output modes in order `k = 0..2^n`.
pub fn mub_output_modes(n: u32) -> Vec<Mode> {
    let d = 1usize << n;
    (0..d)
        .map(|k| Mode::new((0, k as i32), if (k >> (n - 1)) & 1 == 1 { Pol::V } else { Pol::H }))
        .collect()
}

/// Product-basis network with a phase `phases[p]` loaded on path `p`
/// (missing entries are zero). Output `k` then projects onto the vector with
/// entries `e^{-i phi_p} (-1)^{popcount(k & p)} / sqrt d`.
pub fn compile_mub_network(n: u32, phases: &[f64]) -> Result<Network> {
    compile_mub_network_with(n, phases, 22.5)
}

/// All stage plates at 0 degrees: output `k` receives path `k` only.
pub fn compile_computational_network(n: u32) -> Result<Network> {
    compile_mub_network_with(n, &[], 0.0)
}

/// Stage plates at `stage_angle_deg`.
pub fn compile_mub_network_with(n: u32, phases: &[f64], stage_angle_deg: f64) -> Result<Network> {
    check_n(n)?;
    let d = 1usize << n;
    if phases.len() > d {
        return Err(Error::DimensionMismatch { expected: d, actual: phases.len() });
    }
    let mut elements = Vec::new();
    let profile: BTreeMap<_, _> = phases.iter().enumerate().map(|(p, &phi)| ((p as i32, 0), phi)).collect();
    if !profile.is_empty() {
        elements.push(Element::SlmPhase { phases: profile });
    }
    for q in 0..n {
        let step = 1i32 << q;
        let mut angles = BTreeMap::new();
        for x in (0..d as i32).step_by(step as usize) {
            for y in 0..step {
                // Current polarization: V at the input, otherwise the bit the
                // previous splitter wrote into y.
                let is_v = q == 0 || (y >> (q - 1)) & 1 == 1;
                let want_v = (x >> q) & 1 == 1;
                if is_v != want_v {
                    angles.insert((x, y), 45.0);
                }
            }
        }
        elements.push(Element::HwpArray { angles });
        elements.push(Element::Bd { offset: (-step, 0) });
        elements.push(Element::Hwp { angle_deg: stage_angle_deg, ports: None });
        elements.push(Element::Pbs { reflect: (0, step) });
    }
    let inputs = (0..d).map(|p| Mode::new((p as i32, 0), Pol::V)).collect();
    Ok(Network::new(elements, inputs, mub_output_modes(n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::{transfer_matrix, unitarity_error};
    use crate::qstate::{computational_basis, product_mub_basis};
    use crate::C64;
    use approx::assert_abs_diff_eq;

    fn transfer(net: &Network) -> nalgebra::DMatrix<C64> {
        transfer_matrix(net, &net.inputs, &net.outputs).unwrap()
    }

    #[test]
    fn single_stage_is_balanced_interferometer() {
        let t = transfer(&compile_mub_network(1, &[]).unwrap());
        let h = core::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(t[(0, 0)].re, h, epsilon = 1e-15);
        assert_abs_diff_eq!(t[(0, 1)].re, h, epsilon = 1e-15);
        assert_abs_diff_eq!(t[(1, 0)].re, h, epsilon = 1e-15);
        assert_abs_diff_eq!(t[(1, 1)].re, -h, epsilon = 1e-15);
    }

    #[test]
    fn rows_match_product_basis() {
        for n in 1..=5u32 {
            let t = transfer(&compile_mub_network(n, &[]).unwrap());
            let basis = product_mub_basis(n).unwrap();
            assert!(unitarity_error(&t).unwrap() < 1e-10);
            for k in 0..(1usize << n) {
                let v = basis.vector(k);
                // Equal up to a global phase per row.
                let overlap: C64 = (0..v.len()).map(|p| t[(k, p)] * v[p]).sum();
                assert_abs_diff_eq!(overlap.norm(), 1.0, epsilon = 1e-10);
            }
            let comp = computational_basis(1 << n).unwrap();
            let rows: Vec<Vec<C64>> = (0..t.nrows()).map(|k| t.row(k).iter().map(|z| z.conj()).collect()).collect();
            let measured = crate::qstate::Basis::new(rows).unwrap();
            assert!(crate::qstate::unbiasedness(&measured, &comp).unwrap() < 1e-10);
        }
    }

    #[test]
    fn zero_degree_stages_give_computational_basis() {
        let t = transfer(&compile_computational_network(3).unwrap());
        for k in 0..8 {
            for p in 0..8 {
                let expect = if k == p { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(t[(k, p)].norm(), expect, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn phase_profile_rotates_basis() {
        let phases: Vec<f64> = (0..8).map(|p| 0.3 * p as f64).collect();
        let t = transfer(&compile_mub_network(3, &phases).unwrap());
        let plain = transfer(&compile_mub_network(3, &[]).unwrap());
        for k in 0..8 {
            for p in 0..8 {
                let expect = plain[(k, p)] * C64::from_polar(1.0, phases[p]);
                assert_abs_diff_eq!((t[(k, p)] - expect).norm(), 0.0, epsilon = 1e-12);
            }
        }
        assert!(unitarity_error(&t).unwrap() < 1e-10);
    }

    #[test]
    fn unsupported_sizes() {
        assert!(compile_mub_network(0, &[]).is_err());
        assert!(compile_mub_network(7, &[]).is_err());
        assert!(compile_mub_network(2, &[0.0; 5]).is_err());
    }
}
