//! Run configuration: state, noise stack and acquisition parameters.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use hdpath_core::measure::{plan_with, Acquisition, ExperimentPlan, Normalization, PlanOptions, MEASURED_CROSSTALK_BOUND};
use hdpath_core::qstate::{
    apply_crosstalk, apply_dephasing, apply_white_noise, isotropic_weight_for_fidelity, max_entangled,
    weighted_entangled, DensityMatrix,
};
use hdpath_core::C64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{PipelineError, Result};

pub const DEFAULT_RATE_HZ: f64 = 4000.0;
pub const DEFAULT_EFFICIENCY: f64 = 0.16;
pub const DEFAULT_WINDOW_S: f64 = 3e-9;
/// Per-setting acquisition time used when neither a duration nor a campaign
/// length is given. Gives a fidelity spread near 0.001 at `d = 32`.
pub const DEFAULT_SETTING_DURATION_S: f64 = 50.0;
pub const DEFAULT_RESAMPLES: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseKind {
    /// `p`: weight kept on the state, the rest goes to the maximally mixed state.
    White,
    /// `sigma`: Gaussian path-phase width.
    Dephase,
    /// `eps`: population leaked into each mismatched path pair.
    Crosstalk,
    /// `F`: white noise whose weight gives an isotropic state of fidelity `F`.
    Fidelity,
}

impl NoiseKind {
    fn as_str(self) -> &'static str {
        match self {
            NoiseKind::White => "white",
            NoiseKind::Dephase => "dephase",
            NoiseKind::Crosstalk => "crosstalk",
            NoiseKind::Fidelity => "fidelity",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseStep {
    pub kind: NoiseKind,
    pub params: Vec<f64>,
}

impl NoiseStep {
    pub fn new(kind: NoiseKind, value: f64) -> Self {
        Self { kind, params: vec![value] }
    }

    fn value(&self) -> Result<f64> {
        match self.params.as_slice() {
            [v] => Ok(*v),
            _ => Err(PipelineError::Config(format!(
                "noise '{}' takes one parameter, got {}",
                self.kind.as_str(),
                self.params.len()
            ))),
        }
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let v = self.value()?;
        let out = match self.kind {
            NoiseKind::White => apply_white_noise(rho, v)?,
            NoiseKind::Dephase => apply_dephasing(rho, v)?,
            NoiseKind::Crosstalk => apply_crosstalk(rho, v)?,
            NoiseKind::Fidelity => apply_white_noise(rho, isotropic_weight_for_fidelity(v, rho.dim_a())?)?,
        };
        Ok(out)
    }
}

impl fmt::Display for NoiseStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind.as_str())?;
        for p in &self.params {
            write!(f, ":{p}")?;
        }
        Ok(())
    }
}

/// Parses `white:0.9,dephase:0.16,crosstalk:4.49e-5`.
pub fn parse_noise(spec: &str) -> Result<Vec<NoiseStep>> {
    spec.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|item| {
            let (kind, value) = item
                .split_once(':')
                .ok_or_else(|| PipelineError::Config(format!("noise item '{item}' has no ':'")))?;
            let kind = match kind {
                "white" => NoiseKind::White,
                "dephase" => NoiseKind::Dephase,
                "crosstalk" => NoiseKind::Crosstalk,
                "fidelity" => NoiseKind::Fidelity,
                other => return Err(PipelineError::Config(format!("unknown noise kind '{other}'"))),
            };
            let value = f64::from_str(value)
                .map_err(|_| PipelineError::Config(format!("bad noise parameter '{value}'")))?;
            Ok(NoiseStep::new(kind, value))
        })
        .collect()
}

/// Everything `simulate` needs. Serialized as JSON; its hash goes into the
/// report provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub dim: usize,
    /// Per-path amplitudes `[re, im]` of `sum_i a_i |ii>`; `|Phi+>` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    pub noise: Vec<NoiseStep>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_rate")]
    pub rate_hz: f64,
    #[serde(default = "default_efficiency")]
    pub efficiency: f64,
    #[serde(default = "default_window")]
    pub coincidence_window_s: f64,
    /// Per-setting acquisition time.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration_s: Option<f64>,
    /// Total acquisition time, split evenly over the settings.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub campaign_s: Option<f64>,
    /// Detected singles rate per arm; adds accidental coincidences when set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub singles_hz: Option<f64>,
    #[serde(default = "default_resamples")]
    pub n_resamples: usize,
    /// Write Poisson means instead of sampled counts.
    #[serde(default)]
    pub exact: bool,
    /// Measure every `Z_i:Z_j`, not just `Z_i:Z_i`.
    #[serde(default)]
    pub full_grid: bool,
    /// Add the mixed `X:Y` and `Y:X` settings.
    #[serde(default)]
    pub imaginary: bool,
}

fn default_rate() -> f64 {
    DEFAULT_RATE_HZ
}
fn default_efficiency() -> f64 {
    DEFAULT_EFFICIENCY
}
fn default_window() -> f64 {
    DEFAULT_WINDOW_S
}
fn default_resamples() -> usize {
    DEFAULT_RESAMPLES
}

impl RunConfig {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            amplitudes: None,
            noise: Vec::new(),
            seed: 0,
            rate_hz: DEFAULT_RATE_HZ,
            efficiency: DEFAULT_EFFICIENCY,
            coincidence_window_s: DEFAULT_WINDOW_S,
            duration_s: None,
            campaign_s: None,
            singles_hz: None,
            n_resamples: DEFAULT_RESAMPLES,
            exact: false,
            full_grid: false,
            imaginary: false,
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(PipelineError::io(path))?;
        serde_json::from_str(&text).map_err(PipelineError::json(path))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(PipelineError::Config(what.to_string()));
        if !(2..=32).contains(&self.dim) || !self.dim.is_power_of_two() {
            return bad(&format!("dim must be a power of 2 in 2..=32, got {}", self.dim));
        }
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !positive(self.rate_hz) {
            return bad("rate_hz must be positive");
        }
        if !(positive(self.efficiency) && self.efficiency <= 1.0) {
            return bad("efficiency must be in (0, 1]");
        }
        if !positive(self.coincidence_window_s) {
            return bad("coincidence_window_s must be positive");
        }
        match (self.duration_s, self.campaign_s) {
            (Some(_), Some(_)) => return bad("give duration_s or campaign_s, not both"),
            (Some(t), None) | (None, Some(t)) if !positive(t) => return bad("durations must be positive"),
            _ => {}
        }
        if let Some(s) = self.singles_hz {
            if !(s >= 0.0 && s.is_finite()) {
                return bad("singles_hz must be non-negative");
            }
        }
        if let Some(a) = &self.amplitudes {
            if a.len() != self.dim {
                return bad(&format!("{} amplitudes for dim {}", a.len(), self.dim));
            }
        }
        if self.n_resamples < hdpath_core::certify::MIN_RESAMPLES {
            return bad(&format!("n_resamples must be at least {}", hdpath_core::certify::MIN_RESAMPLES));
        }
        self.noise.iter().try_for_each(|n| n.value().map(|_| ()))
    }

    pub fn plan(&self) -> Result<ExperimentPlan> {
        Ok(plan_with(self.dim, PlanOptions { full_grid: self.full_grid, imaginary: self.imaginary })?)
    }

    pub fn setting_duration(&self, n_settings: usize) -> f64 {
        match (self.duration_s, self.campaign_s) {
            (Some(t), _) => t,
            (None, Some(total)) => total / n_settings as f64,
            (None, None) => DEFAULT_SETTING_DURATION_S,
        }
    }

    pub fn acquisition(&self, n_settings: usize) -> Acquisition {
        Acquisition { rate_hz: self.rate_hz, duration_s: self.setting_duration(n_settings), efficiency: self.efficiency }
    }

    pub fn coincidence_rate(&self) -> f64 {
        self.rate_hz * self.efficiency
    }

    /// Initial state followed by the noise stack, in order.
    pub fn state(&self) -> Result<DensityMatrix> {
        let psi = match &self.amplitudes {
            Some(a) => weighted_entangled(&a.iter().map(|&[re, im]| C64::new(re, im)).collect::<Vec<_>>())?,
            None => max_entangled(self.dim)?,
        };
        self.noise.iter().try_fold(psi.density(), |rho, step| step.apply(&rho))
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        hash_json(self)
    }
}

pub(crate) fn hash_json<T: Serialize>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).expect("configuration serializes");
    hex::encode(Sha256::digest(&bytes))
}

/// How `certify` fixes the total coincidence rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum NormalizationChoice {
    /// Known detected pair rate.
    Calibrated { coincidence_rate_hz: f64 },
    /// Fixed population in every mismatched cell.
    Assumed { per_cell: f64 },
    /// Requires every `Z_i:Z_j` setting.
    FullGrid,
    /// Full grid when present, otherwise the measured crosstalk bound.
    Auto,
}

impl NormalizationChoice {
    pub fn resolve(self, records: &[hdpath_core::measure::CountsRecord], d: usize) -> Normalization {
        match self {
            NormalizationChoice::Calibrated { coincidence_rate_hz } => Normalization::Calibrated { coincidence_rate_hz },
            NormalizationChoice::Assumed { per_cell } => Normalization::AssumedCrosstalk { per_cell },
            NormalizationChoice::FullGrid => Normalization::FullGrid,
            NormalizationChoice::Auto => Normalization::detect(records, d),
        }
    }

    /// Parses `calibrated[:rate_hz]`, `assumed[:eps]`, `full-grid` or `auto`.
    /// A bare `calibrated` uses `default_rate_hz`.
    pub fn parse(s: &str, default_rate_hz: f64) -> Result<Self> {
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        let num = |a: Option<&str>, default: f64| -> Result<f64> {
            a.map(|v| v.parse::<f64>().map_err(|_| PipelineError::Config(format!("bad number '{v}'"))))
                .unwrap_or(Ok(default))
        };
        match head {
            "calibrated" => Ok(NormalizationChoice::Calibrated { coincidence_rate_hz: num(arg, default_rate_hz)? }),
            "assumed" => Ok(NormalizationChoice::Assumed { per_cell: num(arg, MEASURED_CROSSTALK_BOUND)? }),
            "full-grid" if arg.is_none() => Ok(NormalizationChoice::FullGrid),
            "auto" if arg.is_none() => Ok(NormalizationChoice::Auto),
            _ => Err(PipelineError::Config(format!("unknown normalization '{s}'"))),
        }
    }
}

/// Parameters of one certification run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertifyOptions {
    /// Path count of the data; inferred from the largest index when absent.
    pub data_dim: Option<usize>,
    /// Block sizes to analyze; even sizes up to the data dimension when absent.
    pub dims: Option<Vec<usize>>,
    pub normalization: NormalizationChoice,
    /// `0` skips the bootstrap.
    pub n_resamples: usize,
    pub seed: u64,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self {
            data_dim: None,
            dims: None,
            normalization: NormalizationChoice::Calibrated {
                coincidence_rate_hz: DEFAULT_RATE_HZ * DEFAULT_EFFICIENCY,
            },
            n_resamples: DEFAULT_RESAMPLES,
            seed: 0,
        }
    }
}

/// `2, 4, ...` up to `d`, plus `d` itself when odd.
pub fn default_dims(d: usize) -> Vec<usize> {
    let mut dims: Vec<usize> = (2..=d).step_by(2).collect();
    if d % 2 == 1 && d > 1 {
        dims.push(d);
    }
    dims
}

/// Parses `2,4,8`.
pub fn parse_list<T: FromStr>(s: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| x.parse::<T>().map_err(|_| PipelineError::Config(format!("bad list entry '{x}'"))))
        .collect()
}
