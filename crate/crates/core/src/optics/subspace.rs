//! Two-path subspace measurement by binary-address merging.
//!
//! Path `p < d = 2^n` enters vertically polarized at port `(p, 0)`. A fixed
//! plate array (HWPA1) turns even paths to H. Displacer `BD_k` shifts V by
//! `-2^k`, so after it every port that is a multiple of `2^(k+1)` holds two
//! paths: the one with address bit `k` clear in H and its partner in V. The
//! plate column after `BD_k` decides which of the two survives `BD_(k+1)`:
//! a path continues when its polarization equals its next address bit, so
//! the plate is a swap (45 degrees) exactly when bits `k` and `k+1` differ.
//!
//! Paths `i` and `j` first share a port after `BD_m`, `m` the most
//! significant bit where they differ; that column is the subspace
//! measurement stage (SSM), an SLM phase on V followed by a plate that sends
//! the chosen superposition into one polarization. Later columns pass the
//! survivor unchanged; a final whole-aperture plate and PBS reflect it into
//! the detector port at row `y = 1`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, PI};
use core::fmt;

use super::{simulate, Element, Mode, ModeState, Network, Pol, Port};
#[allow(unused_imports)]
use num_traits::Float;
use crate::measure::{ArmBasis, Sign};
use crate::{Error, Result, C64};

const VERIFY_TOL: f64 = 1e-9;

/// Role of one plate column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    /// Every tracked path keeps its polarization.
    Pass,
    /// At least one tracked path has its polarization flipped.
    Swap,
    /// Subspace measurement stage.
    Ssm,
    /// Final whole-aperture plate at 45 degrees.
    Final,
}

impl Role {
    /// Label in the layout of the published settings table.
    pub fn label(self) -> &'static str {
        match self {
            Role::Pass => "HWP@0°",
            Role::Swap => "θ2@0°",
            Role::Ssm => "SSM",
            Role::Final => "HWP1@45°",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// One plate column of the measurement network.
#[derive(Debug, Clone, PartialEq)]
pub struct Stage {
    /// `HWPA2`, `HWPA3`, ... or `HWP` for the final column.
    pub name: String,
    pub role: Role,
    /// Per-port plate angles in degrees (array columns only).
    pub plates: BTreeMap<Port, f64>,
    /// Whole-aperture plate angle (final column only).
    pub whole_plate: Option<f64>,
    /// SLM phase on V at one port, applied before the plate.
    pub phase: Option<(Port, f64)>,
}

/// Compiled network settings for projecting onto `alpha |i> + beta |j>`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceSetting {
    pub pair: (usize, usize),
    pub dim: usize,
    pub alpha: C64,
    pub beta: C64,
    pub stages: Vec<Stage>,
    pub detector: Mode,
}

fn address_bits(d: usize) -> Result<u32> {
    if d < 2 || !d.is_power_of_two() || d > 1 << 16 {
        return Err(Error::Unsupported(format!("subspace network with d = {d}")));
    }
    Ok(d.trailing_zeros())
}

fn bit(p: usize, k: u32) -> bool {
    (p >> k) & 1 == 1
}

/// Port of path `p` after `BD_k`.
fn track_port(p: usize, k: u32) -> Port {
    let mask = (1usize << (k + 1)) - 1;
    ((p & !mask) as i32, 0)
}

/// Input modes `((p, 0), V)` for `p < d`.
pub fn subspace_input_modes(d: usize) -> Vec<Mode> {
    (0..d).map(|p| Mode::new((p as i32, 0), Pol::V)).collect()
}

/// `(alpha, beta)` of the `X` or `Y` eigenvector with the given sign.
pub fn projector_amplitudes(basis: ArmBasis, sign: Sign) -> Result<(C64, C64)> {
    let a = C64::new(FRAC_1_SQRT_2, 0.0);
    let s = sign.value() * FRAC_1_SQRT_2;
    match basis {
        ArmBasis::X => Ok((a, C64::new(s, 0.0))),
        ArmBasis::Y => Ok((a, C64::new(0.0, s))),
        ArmBasis::Z => Err(Error::Unsupported("Z arms need no subspace network".into())),
    }
}

impl SubspaceSetting {
    pub fn ssm_stage(&self) -> Option<usize> {
        self.stages.iter().position(|s| s.role == Role::Ssm)
    }

    pub fn roles(&self) -> Vec<Role> {
        self.stages.iter().map(|s| s.role).collect()
    }

    fn bits(&self) -> u32 {
        self.dim.trailing_zeros()
    }

    /// HWPA1 and `BD_0`, followed by the first `columns` stages with the
    /// displacer after each array column.
    fn elements(&self, columns: usize) -> Vec<Element> {
        let n = self.bits() as usize;
        let hwpa1 = (0..self.dim)
            .map(|p| ((p as i32, 0), if p % 2 == 0 { 45.0 } else { 0.0 }))
            .collect();
        let mut els = alloc::vec![Element::HwpArray { angles: hwpa1 }, Element::Bd { offset: (-1, 0) }];
        for (c, stage) in self.stages.iter().enumerate().take(columns) {
            if let Some((port, phi)) = stage.phase {
                let mut phases = BTreeMap::new();
                phases.insert(port, phi);
                els.push(Element::SlmPhase { phases });
            }
            if c + 1 < n {
                els.push(Element::HwpArray { angles: stage.plates.clone() });
                els.push(Element::Bd { offset: (-(1i32 << (c + 1)), 0) });
            } else {
                els.push(Element::Hwp { angle_deg: stage.whole_plate.unwrap_or(0.0), ports: None });
                els.push(Element::Pbs { reflect: (0, 1) });
            }
        }
        els
    }

    fn prefix_network(&self, columns: usize) -> Network {
        Network::new(self.elements(columns), subspace_input_modes(self.dim), Vec::new())
    }

    /// The full measurement network; its single output is the detector.
    pub fn network(&self) -> Network {
        Network::new(self.elements(self.stages.len()), subspace_input_modes(self.dim), alloc::vec![self.detector])
    }
}

/// Setting for the `X+` projector `(|i> + |j>)/sqrt 2`.
pub fn compile_subspace(i: usize, j: usize, d: usize) -> Result<SubspaceSetting> {
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    compile_subspace_projector(i, j, d, h, h)
}

/// Setting projecting onto `alpha |i> + beta |j>` (normalised internally).
pub fn compile_subspace_projector(i: usize, j: usize, d: usize, alpha: C64, beta: C64) -> Result<SubspaceSetting> {
    let n = address_bits(d)?;
    if i >= j || j >= d {
        return Err(Error::InvalidPair(i, j, d));
    }
    let norm = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::DegenerateInput("projector amplitudes are zero"));
    }
    let (alpha, beta) = (alpha / norm, beta / norm);
    let m = (i ^ j).ilog2();
    let merge = track_port(i, m);
    let mut stages = Vec::with_capacity(n as usize);
    for c in 0..n {
        let name = if c + 1 < n { format!("HWPA{}", c + 2) } else { String::from("HWP") };
        let mut stage = Stage { name, role: Role::Pass, plates: BTreeMap::new(), whole_plate: None, phase: None };
        if c < m {
            for p in [i, j] {
                let swap = bit(p, c + 1) != bit(p, c);
                stage.plates.insert(track_port(p, c), if swap { 45.0 } else { 0.0 });
                if swap {
                    stage.role = Role::Swap;
                }
            }
        } else if c == m {
            stage.role = Role::Ssm;
        } else if c + 1 < n {
            stage.plates.insert(merge, 0.0);
        } else {
            stage.role = Role::Final;
            stage.whole_plate = Some(45.0);
        }
        stages.push(stage);
    }
    let mut setting = SubspaceSetting {
        pair: (i, j),
        dim: d,
        alpha,
        beta,
        stages,
        detector: Mode::new((merge.0, 1), Pol::V),
    };

    // Amplitudes of |i> and |j> on the merged port, as left by the prefix.
    let prefix = setting.prefix_network(m as usize);
    let u_i = simulate(&prefix, &ModeState::single(Mode::new((i as i32, 0), Pol::V)))?.amplitude(Mode::new(merge, Pol::H));
    let u_j = simulate(&prefix, &ModeState::single(Mode::new((j as i32, 0), Pol::V)))?.amplitude(Mode::new(merge, Pol::V));
    if u_i.norm() < 0.5 || u_j.norm() < 0.5 {
        return Err(Error::Miscompiled { stage: setting.stages[m as usize].name.clone(), reason: "paths not merged".into() });
    }
    let rel = (beta.conj().arg() - alpha.conj().arg()) + (u_i.arg() - u_j.arg());
    let last = m + 1 == n;
    let (two_theta, phi) = if last {
        // V output: sin2t a_H - cos2t e^{i phi} a_V.
        (alpha.norm().atan2(beta.norm()), rel + PI)
    } else {
        // H output: cos2t a_H + sin2t e^{i phi} a_V.
        (beta.norm().atan2(alpha.norm()), rel)
    };
    let theta = two_theta.to_degrees() / 2.0;
    let stage = &mut setting.stages[m as usize];
    stage.phase = Some((merge, num_traits::Euclid::rem_euclid(&phi, &(2.0 * PI))));
    if last {
        stage.whole_plate = Some(theta);
    } else {
        stage.plates.insert(merge, theta);
    }
    Ok(setting)
}

/// A failed check, attributed to the plate column responsible.
#[derive(Debug, Clone, PartialEq)]
pub struct StageFailure {
    pub stage: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceVerification {
    pub pair: (usize, usize),
    pub max_leakage: f64,
    pub born_error: f64,
    pub failures: Vec<StageFailure>,
}

impl SubspaceVerification {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// The first failure as an error.
    pub fn into_result(self) -> Result<Self> {
        match self.failures.first() {
            None => Ok(self),
            Some(f) => Err(Error::Miscompiled { stage: f.stage.clone(), reason: f.reason.clone() }),
        }
    }
}

/// Checks by simulation that `setting` realises the projection onto
/// `alpha |i> + beta |j>`:
///
/// 1. after every displacer up to the merge, `i` and `j` sit on their
///    address track, and after the merge `i` is H and `j` is V on one port;
/// 2. no other path reaches the detector (intensity below `1e-9`);
/// 3. detector probabilities equal `|alpha* psi_i + beta* psi_j|^2` for a
///    set of probe inputs within `1e-9`.
pub fn verify_subspace_setting(setting: &SubspaceSetting, alpha: C64, beta: C64) -> Result<SubspaceVerification> {
    let n = address_bits(setting.dim)?;
    let (i, j) = setting.pair;
    let d = setting.dim;
    if i >= j || j >= d {
        return Err(Error::InvalidPair(i, j, d));
    }
    if setting.stages.len() != n as usize {
        return Err(Error::DimensionMismatch { expected: n as usize, actual: setting.stages.len() });
    }
    let norm = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
    if !(norm > 0.0) {
        return Err(Error::DegenerateInput("projector amplitudes are zero"));
    }
    let (alpha, beta) = (alpha / norm, beta / norm);
    let m = (i ^ j).ilog2();
    let column_name = |k: u32| {
        if k == 0 {
            String::from("HWPA1")
        } else {
            setting.stages[k as usize - 1].name.clone()
        }
    };
    let mut failures = Vec::new();

    let ssm: Vec<usize> = setting.stages.iter().enumerate().filter(|(_, s)| s.role == Role::Ssm).map(|(c, _)| c).collect();
    if ssm != [m as usize] {
        failures.push(StageFailure {
            stage: setting.stages[m as usize].name.clone(),
            reason: format!("SSM expected here, found at {:?}", ssm.iter().map(|&c| &setting.stages[c].name).collect::<Vec<_>>()),
        });
    }

    // 1. Tracks up to and including the merge.
    'paths: for p in [i, j] {
        for k in 0..=m {
            let out = simulate(&setting.prefix_network(k as usize), &ModeState::single(Mode::new((p as i32, 0), Pol::V)))?;
            let pol = if bit(p, k) { Pol::V } else { Pol::H };
            let want = Mode::new(track_port(p, k), pol);
            let total = out.norm_sqr();
            let on_track = out.amplitude(want).norm_sqr();
            if !(total > 0.0) || on_track < total * (1.0 - VERIFY_TOL) {
                failures.push(StageFailure {
                    stage: column_name(k),
                    reason: format!("path {p} leaves its track before BD{k} ({:.3e} of intensity kept)", on_track / total.max(f64::MIN_POSITIVE)),
                });
                continue 'paths;
            }
        }
    }

    // 2 and 3 on the full network.
    let net = setting.network();
    let amps: Vec<C64> = (0..d)
        .map(|p| simulate(&net, &ModeState::single(Mode::new((p as i32, 0), Pol::V))).map(|s| s.amplitude(setting.detector)))
        .collect::<Result<_>>()?;
    let scale = net.transmission.powi(2 * net.elements.len() as i32);
    let mut max_leakage: f64 = 0.0;
    for (p, a) in amps.iter().enumerate() {
        if p != i && p != j {
            max_leakage = max_leakage.max(a.norm_sqr());
        }
    }
    if max_leakage > VERIFY_TOL {
        let worst = (0..d).filter(|&p| p != i && p != j).max_by(|&a, &b| amps[a].norm_sqr().total_cmp(&amps[b].norm_sqr()));
        failures.push(StageFailure {
            stage: setting.stages[m as usize].name.clone(),
            reason: format!("path {} leaks into the detector ({max_leakage:.3e})", worst.unwrap_or(0)),
        });
    }
    let h = FRAC_1_SQRT_2;
    let probes = [
        (C64::new(1.0, 0.0), C64::new(0.0, 0.0)),
        (C64::new(0.0, 0.0), C64::new(1.0, 0.0)),
        (C64::new(h, 0.0), C64::new(h, 0.0)),
        (C64::new(h, 0.0), C64::new(-h, 0.0)),
        (C64::new(h, 0.0), C64::new(0.0, h)),
        (C64::new(0.6, 0.0), C64::new(0.0, -0.8)),
    ];
    let mut born_error: f64 = 0.0;
    for (pi, pj) in probes {
        let got = (amps[i] * pi + amps[j] * pj).norm_sqr();
        let want = scale * (alpha.conj() * pi + beta.conj() * pj).norm_sqr();
        born_error = born_error.max((got - want).abs());
    }
    if born_error > VERIFY_TOL {
        failures.push(StageFailure {
            stage: setting.stages[m as usize].name.clone(),
            reason: format!("detector probabilities deviate from the projector by {born_error:.3e}"),
        });
    }
    Ok(SubspaceVerification { pair: (i, j), max_leakage, born_error, failures })
}
