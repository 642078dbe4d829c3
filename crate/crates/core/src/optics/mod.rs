//! Jones-calculus simulation of spatial-port (x) polarization networks.
//!
//! A mode is a lattice port `(x, y)` together with a polarization. Beam
//! displacers shift the vertical component by their offset and leave the
//! horizontal one in place. Half-wave plate angles are in degrees; SLM
//! phases in radians act on the vertical component only.

mod mub;
mod subspace;

pub use mub::{compile_computational_network, compile_mub_network, compile_mub_network_with, mub_output_modes};
pub use subspace::{
    compile_subspace, compile_subspace_projector, projector_amplitudes, subspace_input_modes, verify_subspace_setting,
    Role, Stage, StageFailure, SubspaceSetting, SubspaceVerification,
};

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec::Vec;

use nalgebra::DMatrix;

#[allow(unused_imports)]
use num_traits::Float;
use crate::{Error, Result, C64};

/// Lattice position of a beam.
pub type Port = (i32, i32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pol {
    H,
    V,
}

impl Pol {
    fn index(self) -> usize {
        match self {
            Pol::H => 0,
            Pol::V => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mode {
    pub port: Port,
    pub pol: Pol,
}

impl Mode {
    pub const fn new(port: Port, pol: Pol) -> Self {
        Self { port, pol }
    }
}

/// Half-wave plate at `theta_deg`: `[[cos 2t, sin 2t], [sin 2t, -cos 2t]]`
/// in the `(H, V)` basis.
pub fn hwp_jones(theta_deg: f64) -> [[C64; 2]; 2] {
    let t = 2.0 * theta_deg.to_radians();
    let (s, c) = t.sin_cos();
    [[C64::new(c, 0.0), C64::new(s, 0.0)], [C64::new(s, 0.0), C64::new(-c, 0.0)]]
}

/// Sparse amplitudes over modes.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ModeState {
    amps: BTreeMap<Port, [C64; 2]>,
}

impl ModeState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(mode: Mode) -> Self {
        let mut s = Self::new();
        s.add(mode, C64::new(1.0, 0.0));
        s
    }

    pub fn add(&mut self, mode: Mode, amp: C64) {
        self.amps.entry(mode.port).or_insert([C64::new(0.0, 0.0); 2])[mode.pol.index()] += amp;
    }

    pub fn amplitude(&self, mode: Mode) -> C64 {
        self.amps.get(&mode.port).map_or(C64::new(0.0, 0.0), |a| a[mode.pol.index()])
    }

    /// Modes with nonzero amplitude.
    pub fn support(&self) -> impl Iterator<Item = (Mode, C64)> + '_ {
        self.amps.iter().flat_map(|(&port, a)| {
            [(Mode::new(port, Pol::H), a[0]), (Mode::new(port, Pol::V), a[1])]
                .into_iter()
                .filter(|(_, z)| z.norm_sqr() > 0.0)
        })
    }

    pub fn norm_sqr(&self) -> f64 {
        crate::entropy::compensated_sum(self.amps.values().map(|a| a[0].norm_sqr() + a[1].norm_sqr()))
    }

    /// Total intensity at a port, both polarizations.
    pub fn intensity(&self, port: Port) -> f64 {
        self.amps.get(&port).map_or(0.0, |a| a[0].norm_sqr() + a[1].norm_sqr())
    }

    /// Ports carrying intensity above `threshold`.
    pub fn lit_ports(&self, threshold: f64) -> Vec<Port> {
        self.amps.keys().copied().filter(|&p| self.intensity(p) > threshold).collect()
    }
}

/// One optical element.
#[derive(Debug, Clone, PartialEq)]
pub enum Element {
    /// Half-wave plate; `ports: None` covers the whole aperture.
    Hwp { angle_deg: f64, ports: Option<Vec<Port>> },
    /// Plate array with one angle per listed port; other ports pass untouched.
    HwpArray { angles: BTreeMap<Port, f64> },
    /// Beam displacer: V moves by `offset`, H stays.
    Bd { offset: Port },
    /// Polarizing beam splitter: H is transmitted, V is reflected into the
    /// port shifted by `reflect`.
    Pbs { reflect: Port },
    /// Spatial light modulator: phase (radians) on V at each listed port.
    SlmPhase { phases: BTreeMap<Port, f64> },
    /// Keeps H, discards V.
    PostSelectH,
}

impl Element {
    pub fn kind(&self) -> &'static str {
        match self {
            Element::Hwp { .. } => "hwp",
            Element::HwpArray { .. } => "hwp_array",
            Element::Bd { .. } => "bd",
            Element::Pbs { .. } => "pbs",
            Element::SlmPhase { .. } => "slm_phase",
            Element::PostSelectH => "post_select_h",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let angle_ok = |a: f64| (0.0..180.0).contains(&a);
        match self {
            Element::Hwp { angle_deg, .. } if !angle_ok(*angle_deg) => {
                Err(Error::InvalidParameter { name: "hwp angle", value: *angle_deg })
            }
            Element::HwpArray { angles } => match angles.values().find(|a| !angle_ok(**a)) {
                Some(&a) => Err(Error::InvalidParameter { name: "hwp angle", value: a }),
                None => Ok(()),
            },
            Element::Bd { offset: (0, 0) } => Err(Error::Layout("beam displacer with zero offset".into())),
            Element::Pbs { reflect: (0, 0) } => Err(Error::Layout("beam splitter with zero reflection offset".into())),
            Element::SlmPhase { phases } => match phases.values().find(|p| !p.is_finite()) {
                Some(&p) => Err(Error::InvalidParameter { name: "slm phase", value: p }),
                None => Ok(()),
            },
            _ => Ok(()),
        }
    }

    /// Lossless elements preserve norm.
    pub fn is_lossless(&self) -> bool {
        !matches!(self, Element::PostSelectH)
    }

    fn apply(&self, state: &ModeState) -> Result<ModeState> {
        let mut out = ModeState::new();
        match self {
            Element::Hwp { angle_deg, ports } => {
                let j = hwp_jones(*angle_deg);
                let sel: Option<BTreeSet<Port>> = ports.as_ref().map(|p| p.iter().copied().collect());
                for (&port, a) in &state.amps {
                    let hit = sel.as_ref().is_none_or(|s| s.contains(&port));
                    out.amps.insert(port, if hit { rotate(&j, a) } else { *a });
                }
            }
            Element::HwpArray { angles } => {
                for (&port, a) in &state.amps {
                    let v = match angles.get(&port) {
                        Some(&t) => rotate(&hwp_jones(t), a),
                        None => *a,
                    };
                    out.amps.insert(port, v);
                }
            }
            Element::Bd { offset } | Element::Pbs { reflect: offset } => {
                let mut written = BTreeSet::new();
                for (&port, a) in &state.amps {
                    let moved = (port.0 + offset.0, port.1 + offset.1);
                    for (mode, amp) in [(Mode::new(port, Pol::H), a[0]), (Mode::new(moved, Pol::V), a[1])] {
                        if !written.insert(mode) {
                            return Err(Error::Layout(format!("modes collide at {:?}", mode)));
                        }
                        if amp.norm_sqr() > 0.0 {
                            out.add(mode, amp);
                        }
                    }
                }
            }
            Element::SlmPhase { phases } => {
                for (&port, a) in &state.amps {
                    let mut v = *a;
                    if let Some(&phi) = phases.get(&port) {
                        v[1] *= C64::from_polar(1.0, phi);
                    }
                    out.amps.insert(port, v);
                }
            }
            Element::PostSelectH => {
                for (&port, a) in &state.amps {
                    if a[0].norm_sqr() > 0.0 {
                        out.amps.insert(port, [a[0], C64::new(0.0, 0.0)]);
                    }
                }
            }
        }
        Ok(out)
    }
}

fn rotate(j: &[[C64; 2]; 2], a: &[C64; 2]) -> [C64; 2] {
    [j[0][0] * a[0] + j[0][1] * a[1], j[1][0] * a[0] + j[1][1] * a[1]]
}

/// Ordered element list with declared input and output modes.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    pub elements: Vec<Element>,
    pub inputs: Vec<Mode>,
    pub outputs: Vec<Mode>,
    /// Amplitude transmission applied after every element.
    pub transmission: f64,
}

impl Network {
    pub fn new(elements: Vec<Element>, inputs: Vec<Mode>, outputs: Vec<Mode>) -> Self {
        Self { elements, inputs, outputs, transmission: 1.0 }
    }

    pub fn with_transmission(mut self, t: f64) -> Self {
        self.transmission = t;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.transmission > 0.0 && self.transmission <= 1.0) {
            return Err(Error::InvalidParameter { name: "transmission", value: self.transmission });
        }
        self.elements.iter().try_for_each(Element::validate)
    }

    pub fn is_lossless(&self) -> bool {
        self.transmission == 1.0 && self.elements.iter().all(Element::is_lossless)
    }
}

/// Runs `input` through every element in order.
pub fn simulate(network: &Network, input: &ModeState) -> Result<ModeState> {
    network.validate()?;
    if !network.inputs.is_empty() {
        let declared: BTreeSet<Mode> = network.inputs.iter().copied().collect();
        if let Some((m, _)) = input.support().find(|(m, _)| !declared.contains(m)) {
            return Err(Error::Layout(format!("input mode {m:?} is not a declared input")));
        }
    }
    let mut state = input.clone();
    for el in &network.elements {
        state = el.apply(&state)?;
        if network.transmission != 1.0 {
            for a in state.amps.values_mut() {
                a[0] *= network.transmission;
                a[1] *= network.transmission;
            }
        }
    }
    Ok(state)
}

/// `T[o][k]`: amplitude at `outputs[o]` for unit input in `inputs[k]`.
pub fn transfer_matrix(network: &Network, inputs: &[Mode], outputs: &[Mode]) -> Result<DMatrix<C64>> {
    let mut t = DMatrix::zeros(outputs.len(), inputs.len());
    for (k, &m) in inputs.iter().enumerate() {
        let out = simulate(network, &ModeState::single(m))?;
        for (o, &om) in outputs.iter().enumerate() {
            t[(o, k)] = out.amplitude(om);
        }
    }
    Ok(t)
}

/// Every mode reached from any of `inputs`.
pub fn reachable_modes(network: &Network, inputs: &[Mode]) -> Result<Vec<Mode>> {
    let mut all = BTreeSet::new();
    for &m in inputs {
        for (mode, _) in simulate(network, &ModeState::single(m))?.support() {
            all.insert(mode);
        }
    }
    Ok(all.into_iter().collect())
}

/// `max |T^dagger T - 1|`; zero for an isometry.
pub fn isometry_error(t: &DMatrix<C64>) -> f64 {
    let g = t.adjoint() * t;
    let mut worst: f64 = 0.0;
    for r in 0..g.nrows() {
        for c in 0..g.ncols() {
            let target = if r == c { 1.0 } else { 0.0 };
            worst = worst.max((g[(r, c)] - C64::new(target, 0.0)).norm());
        }
    }
    worst
}

/// Isometry error in both directions; requires a square matrix.
pub fn unitarity_error(t: &DMatrix<C64>) -> Result<f64> {
    if t.nrows() != t.ncols() {
        return Err(Error::DimensionMismatch { expected: t.ncols(), actual: t.nrows() });
    }
    Ok(isometry_error(t).max(isometry_error(&t.adjoint())))
}

/// Displacer offsets of the 4 x 8 source geometry, in cascade order.
const SOURCE_OFFSETS: [Port; 5] = [(2, 0), (0, 2), (4, 0), (0, 4), (8, 0)];

/// Splits one horizontally polarized beam at `(0, 0)` into `d` equal beams on
/// a pitch-2 lattice: a 22.5 degree plate before every displacer, then a
/// plate array turning every V output to H.
pub fn build_source_array(d: usize) -> Result<Network> {
    if !d.is_power_of_two() || !(2..=32).contains(&d) {
        return Err(Error::Unsupported(format!("source array with d = {d}")));
    }
    let stages = d.trailing_zeros() as usize;
    let mut elements = Vec::new();
    let mut lit: Vec<(Port, Pol)> = alloc::vec![((0, 0), Pol::H)];
    for &offset in &SOURCE_OFFSETS[..stages] {
        elements.push(Element::Hwp { angle_deg: 22.5, ports: None });
        elements.push(Element::Bd { offset });
        lit = lit
            .iter()
            .flat_map(|&(p, _)| [(p, Pol::H), ((p.0 + offset.0, p.1 + offset.1), Pol::V)])
            .collect();
    }
    let angles = lit.iter().filter(|(_, pol)| *pol == Pol::V).map(|&(p, _)| (p, 45.0)).collect();
    elements.push(Element::HwpArray { angles });
    let outputs = lit.iter().map(|&(p, _)| Mode::new(p, Pol::H)).collect();
    Ok(Network::new(elements, alloc::vec![Mode::new((0, 0), Pol::H)], outputs))
}

/// Per-beam intensity regulator: 22.5 degree plate, SLM phase `phi`,
/// 22.5 degree plate, a 45 degree plate and H post-selection. The output H
/// amplitude is `(1 - e^{i phi}) / 2` of the input.
pub fn intensity_regulator(phi: f64) -> Network {
    let port = (0, 0);
    let mut phases = BTreeMap::new();
    phases.insert(port, phi);
    Network::new(
        alloc::vec![
            Element::Hwp { angle_deg: 22.5, ports: None },
            Element::SlmPhase { phases },
            Element::Hwp { angle_deg: 22.5, ports: None },
            Element::Hwp { angle_deg: 45.0, ports: None },
            Element::PostSelectH,
        ],
        alloc::vec![Mode::new(port, Pol::H)],
        alloc::vec![Mode::new(port, Pol::H)],
    )
}

/// `|1 - e^{i phi}|^2 / 4 = sin^2(phi / 2)`.
pub fn intensity_regulator_transmission(phi: f64) -> f64 {
    let s = (0.5 * phi).sin();
    s * s
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use core::f64::consts::{FRAC_1_SQRT_2, PI};

    fn h(port: Port) -> Mode {
        Mode::new(port, Pol::H)
    }

    fn v(port: Port) -> Mode {
        Mode::new(port, Pol::V)
    }

    #[test]
    fn plate_examples() {
        let j0 = hwp_jones(0.0);
        assert_eq!(j0[0][0], C64::new(1.0, 0.0));
        assert_eq!(j0[1][1], C64::new(-1.0, 0.0));
        let j45 = hwp_jones(45.0);
        assert_abs_diff_eq!(j45[0][0].norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(j45[1][0].re, 1.0, epsilon = 1e-15);
        let j = hwp_jones(22.5);
        assert_abs_diff_eq!(j[0][0].re, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(j[1][0].re, FRAC_1_SQRT_2, epsilon = 1e-15);
    }

    #[test]
    fn empty_network_is_identity() {
        let net = Network::new(Vec::new(), Vec::new(), Vec::new());
        let mut s = ModeState::new();
        s.add(h((1, 2)), C64::new(0.6, 0.0));
        s.add(v((0, 0)), C64::new(0.0, 0.8));
        assert_eq!(simulate(&net, &s).unwrap(), s);
    }

    #[test]
    fn displacer_moves_vertical_only() {
        let net = Network::new(alloc::vec![Element::Bd { offset: (3, -1) }], Vec::new(), Vec::new());
        let out = simulate(&net, &ModeState::single(v((0, 0)))).unwrap();
        assert_eq!(out.amplitude(v((3, -1))), C64::new(1.0, 0.0));
        let out = simulate(&net, &ModeState::single(h((0, 0)))).unwrap();
        assert_eq!(out.amplitude(h((0, 0))), C64::new(1.0, 0.0));
    }

    #[test]
    fn undeclared_input_and_bad_elements_rejected() {
        let net = Network::new(Vec::new(), alloc::vec![h((0, 0))], Vec::new());
        assert!(matches!(simulate(&net, &ModeState::single(v((0, 0)))), Err(Error::Layout(_))));
        let bad = Network::new(alloc::vec![Element::Bd { offset: (0, 0) }], Vec::new(), Vec::new());
        assert!(simulate(&bad, &ModeState::single(h((0, 0)))).is_err());
        let bad = Network::new(alloc::vec![Element::Hwp { angle_deg: 180.0, ports: None }], Vec::new(), Vec::new());
        assert!(simulate(&bad, &ModeState::single(h((0, 0)))).is_err());
    }

    #[test]
    fn regulator_matches_closed_form() {
        for k in 0..=16 {
            let phi = 2.0 * PI * k as f64 / 16.0;
            let out = simulate(&intensity_regulator(phi), &ModeState::single(h((0, 0)))).unwrap();
            let expect = (C64::new(1.0, 0.0) - C64::from_polar(1.0, phi)) * 0.5;
            assert_abs_diff_eq!((out.amplitude(h((0, 0))) - expect).norm(), 0.0, epsilon = 1e-14);
            assert_abs_diff_eq!(out.norm_sqr(), intensity_regulator_transmission(phi), epsilon = 1e-14);
        }
        assert_eq!(intensity_regulator_transmission(0.0), 0.0);
        assert_abs_diff_eq!(intensity_regulator_transmission(PI), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(intensity_regulator_transmission(PI / 2.0), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn source_array_is_uniform() {
        for d in [2usize, 4, 8, 16, 32] {
            let net = build_source_array(d).unwrap();
            let out = simulate(&net, &ModeState::single(h((0, 0)))).unwrap();
            let ports = out.lit_ports(1e-12);
            assert_eq!(ports.len(), d);
            assert_eq!(net.outputs.len(), d);
            for m in &net.outputs {
                assert_abs_diff_eq!(out.amplitude(*m).norm_sqr(), 1.0 / d as f64, epsilon = 1e-12);
                assert!(out.amplitude(v(m.port)).norm() < 1e-15);
            }
        }
        let out = simulate(&build_source_array(32).unwrap(), &ModeState::single(h((0, 0)))).unwrap();
        let ports = out.lit_ports(1e-12);
        let xs: BTreeSet<i32> = ports.iter().map(|p| p.0).collect();
        let ys: BTreeSet<i32> = ports.iter().map(|p| p.1).collect();
        assert_eq!(xs.into_iter().collect::<Vec<_>>(), (0..8).map(|k| 2 * k).collect::<Vec<_>>());
        assert_eq!(ys.into_iter().collect::<Vec<_>>(), [0, 2, 4, 6]);
        assert!(build_source_array(12).is_err());
        assert!(build_source_array(64).is_err());
    }

    #[test]
    fn lossless_source_is_isometric_and_loss_scales() {
        let mut net = build_source_array(8).unwrap();
        net.inputs.push(v((0, 0)));
        let out_modes = reachable_modes(&net, &[h((0, 0)), v((0, 0))]).unwrap();
        let t = transfer_matrix(&net, &[h((0, 0)), v((0, 0))], &out_modes).unwrap();
        assert!(isometry_error(&t) < 1e-12);
        let lossy = net.clone().with_transmission(0.99);
        let out = simulate(&lossy, &ModeState::single(h((0, 0)))).unwrap();
        let n = lossy.elements.len() as i32;
        assert_abs_diff_eq!(out.norm_sqr(), 0.99f64.powi(2 * n), epsilon = 1e-12);
        assert!(!lossy.is_lossless());
    }

    #[test]
    fn post_selection_only_removes_norm() {
        let mut s = ModeState::new();
        s.add(h((0, 0)), C64::new(0.6, 0.0));
        s.add(v((0, 0)), C64::new(0.8, 0.0));
        let net = Network::new(alloc::vec![Element::PostSelectH], Vec::new(), Vec::new());
        let out = simulate(&net, &s).unwrap();
        assert_abs_diff_eq!(out.norm_sqr(), 0.36, epsilon = 1e-15);
    }
}
