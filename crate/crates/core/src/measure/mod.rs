//! Single-outcome projective settings, Born probabilities, Poisson
//! coincidence simulation and density-matrix element estimators.
//!
//! Every setting projects each photon onto one vector: a path `|i>` (basis
//! `Z`) or an equal superposition of two paths `(|i> + s|j>)/sqrt 2` (basis
//! `X`) or `(|i> + s i|j>)/sqrt 2` (basis `Y`), with `s = +-1`.

mod estimate;

pub use estimate::{
    estimate_correlator, estimate_diagonals, estimate_offdiag, visibility, ElementEstimator,
    Normalization, OffDiagonalEstimate, MEASURED_CROSSTALK_BOUND,
};

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;
use core::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Poisson};

use crate::qstate::DensityMatrix;
use crate::{Error, Result, C64};

/// Local measurement basis of one arm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ArmBasis {
    Z,
    X,
    Y,
}

impl ArmBasis {
    pub fn as_str(self) -> &'static str {
        match self {
            ArmBasis::Z => "Z",
            ArmBasis::X => "X",
            ArmBasis::Y => "Y",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "Z" => Some(ArmBasis::Z),
            "X" => Some(ArmBasis::X),
            "Y" => Some(ArmBasis::Y),
            _ => None,
        }
    }
}

/// Eigenvalue label of a superposition projector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "+" => Some(Sign::Plus),
            "-" => Some(Sign::Minus),
            _ => None,
        }
    }

    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];
}

/// The single vector one arm projects onto.
///
/// For `Z` only `i` is meaningful and `j == i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ArmProjector {
    pub i: usize,
    pub j: usize,
    pub basis: ArmBasis,
    pub sign: Sign,
}

impl ArmProjector {
    pub fn z(i: usize) -> Self {
        Self { i, j: i, basis: ArmBasis::Z, sign: Sign::Plus }
    }

    pub fn x(i: usize, j: usize, sign: Sign) -> Self {
        Self { i, j, basis: ArmBasis::X, sign }
    }

    pub fn y(i: usize, j: usize, sign: Sign) -> Self {
        Self { i, j, basis: ArmBasis::Y, sign }
    }

    pub fn superposition(basis: ArmBasis, i: usize, j: usize, sign: Sign) -> Self {
        Self { i, j, basis, sign }
    }

    /// Nonzero components `(index, amplitude)`.
    pub fn support(&self) -> ([(usize, C64); 2], usize) {
        let s = self.sign.value();
        match self.basis {
            ArmBasis::Z => ([(self.i, C64::new(1.0, 0.0)), (0, C64::new(0.0, 0.0))], 1),
            ArmBasis::X => (
                [(self.i, C64::new(FRAC_1_SQRT_2, 0.0)), (self.j, C64::new(s * FRAC_1_SQRT_2, 0.0))],
                2,
            ),
            ArmBasis::Y => (
                [(self.i, C64::new(FRAC_1_SQRT_2, 0.0)), (self.j, C64::new(0.0, s * FRAC_1_SQRT_2))],
                2,
            ),
        }
    }

    /// Dense vector in `C^d`.
    pub fn vector(&self, d: usize) -> Result<Vec<C64>> {
        self.check(d)?;
        let mut v = alloc::vec![C64::new(0.0, 0.0); d];
        let (entries, n) = self.support();
        for &(k, a) in &entries[..n] {
            v[k] += a;
        }
        Ok(v)
    }

    fn check(&self, d: usize) -> Result<()> {
        for idx in [self.i, self.j] {
            if idx >= d {
                return Err(Error::IndexOutOfRange { index: idx, bound: d });
            }
        }
        if self.basis != ArmBasis::Z && self.i == self.j {
            return Err(Error::InvalidPair(self.i, self.j, d));
        }
        Ok(())
    }
}

impl fmt::Display for ArmProjector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.basis {
            ArmBasis::Z => write!(f, "Z{}", self.i),
            b => write!(f, "{}{}.{}{}", b.as_str(), self.i, self.j, self.sign.as_char()),
        }
    }
}

/// One product projector `|v_a><v_a| (x) |v_b><v_b|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectiveSetting {
    pub label: String,
    pub arm_a: ArmProjector,
    pub arm_b: ArmProjector,
}

impl ProjectiveSetting {
    /// Builds a setting with the canonical label (`A:B`, e.g. `Z3:Z3` or
    /// `X0.1+:Y0.1-`).
    pub fn new(arm_a: ArmProjector, arm_b: ArmProjector) -> Self {
        Self { label: format!("{arm_a}:{arm_b}"), arm_a, arm_b }
    }

    pub fn key(&self) -> (ArmProjector, ArmProjector) {
        (self.arm_a, self.arm_b)
    }

    /// Dense arm vectors `(v_a, v_b)`.
    pub fn vectors(&self, d: usize) -> Result<(Vec<C64>, Vec<C64>)> {
        Ok((self.arm_a.vector(d)?, self.arm_b.vector(d)?))
    }
}

/// Which optional setting families a plan includes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PlanOptions {
    /// Measure every `(i, j)` path combination, not only `i == j`.
    pub full_grid: bool,
    /// Add the mixed `XY`/`YX` settings needed for imaginary parts.
    pub imaginary: bool,
}

/// Ordered list of settings for a `d`-path experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentPlan {
    pub dim: usize,
    pub settings: Vec<ProjectiveSetting>,
}

impl ExperimentPlan {
    pub fn len(&self) -> usize {
        self.settings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.settings.is_empty()
    }
}

/// Default campaign: `d` same-path settings plus the 8 `XX`/`YY` settings
/// for every pair `i < j`, i.e. `d + 4 d (d - 1)` settings (4000 at d = 32).
pub fn plan_full(d: usize) -> Result<ExperimentPlan> {
    plan_with(d, PlanOptions::default())
}

pub fn plan_with(d: usize, options: PlanOptions) -> Result<ExperimentPlan> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    let mut settings = Vec::new();
    for i in 0..d {
        if options.full_grid {
            for j in 0..d {
                settings.push(ProjectiveSetting::new(ArmProjector::z(i), ArmProjector::z(j)));
            }
        } else {
            settings.push(ProjectiveSetting::new(ArmProjector::z(i), ArmProjector::z(i)));
        }
    }
    let mut kinds = alloc::vec![(ArmBasis::X, ArmBasis::X), (ArmBasis::Y, ArmBasis::Y)];
    if options.imaginary {
        kinds.push((ArmBasis::X, ArmBasis::Y));
        kinds.push((ArmBasis::Y, ArmBasis::X));
    }
    for i in 0..d {
        for j in (i + 1)..d {
            for &(ka, kb) in &kinds {
                for sa in Sign::BOTH {
                    for sb in Sign::BOTH {
                        settings.push(ProjectiveSetting::new(
                            ArmProjector::superposition(ka, i, j, sa),
                            ArmProjector::superposition(kb, i, j, sb),
                        ));
                    }
                }
            }
        }
    }
    Ok(ExperimentPlan { dim: d, settings })
}

/// Number of settings [`plan_full`] produces.
pub fn plan_full_len(d: usize) -> usize {
    d + 8 * d * (d - 1) / 2
}

/// Born probability `<v_a v_b| rho |v_a v_b>`, clamped to `[0, 1]`.
///
/// Uses the sparse support of the arm vectors, so the cost is independent of
/// the Hilbert-space size.
pub fn born_probability(rho: &DensityMatrix, setting: &ProjectiveSetting) -> Result<f64> {
    if rho.dim_a() != rho.dim_b() {
        return Err(Error::DimensionMismatch { expected: rho.dim_a(), actual: rho.dim_b() });
    }
    let d = rho.dim_a();
    setting.arm_a.check(d)?;
    setting.arm_b.check(d)?;
    let (sa, na) = setting.arm_a.support();
    let (sb, nb) = setting.arm_b.support();
    let mut product: [(usize, C64); 4] = [(0, C64::new(0.0, 0.0)); 4];
    let mut len = 0;
    for &(ia, va) in &sa[..na] {
        for &(ib, vb) in &sb[..nb] {
            product[len] = (ia * d + ib, va * vb);
            len += 1;
        }
    }
    let m = rho.matrix();
    let mut acc = C64::new(0.0, 0.0);
    for &(r, vr) in &product[..len] {
        for &(c, vc) in &product[..len] {
            acc += vr.conj() * m[(r, c)] * vc;
        }
    }
    Ok(acc.re.clamp(0.0, 1.0))
}

/// Born probability for arbitrary dense arm vectors.
pub fn born_probability_vectors(rho: &DensityMatrix, va: &[C64], vb: &[C64]) -> Result<f64> {
    let (da, db) = (rho.dim_a(), rho.dim_b());
    if va.len() != da || vb.len() != db {
        return Err(Error::DimensionMismatch { expected: da, actual: va.len() });
    }
    let psi: Vec<C64> = va.iter().flat_map(|a| vb.iter().map(move |b| a * b)).collect();
    let m = rho.matrix();
    let mut acc = C64::new(0.0, 0.0);
    for (r, vr) in psi.iter().enumerate() {
        if vr.norm_sqr() == 0.0 {
            continue;
        }
        for (c, vc) in psi.iter().enumerate() {
            acc += vr.conj() * m[(r, c)] * vc;
        }
    }
    Ok(acc.re.clamp(0.0, 1.0))
}

/// Coincidence counts for one setting.
///
/// `counts` is a float so that expected-value ("exact probability") data and
/// sampled integer data share one type.
#[derive(Debug, Clone, PartialEq)]
pub struct CountsRecord {
    pub label: String,
    pub arm_a: ArmProjector,
    pub arm_b: ArmProjector,
    pub counts: f64,
    pub duration_s: f64,
    /// Poisson mean rate used by the simulator, if known.
    pub expected_rate: Option<f64>,
}

impl CountsRecord {
    pub fn key(&self) -> (ArmProjector, ArmProjector) {
        (self.arm_a, self.arm_b)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.counts >= 0.0) || !self.counts.is_finite() {
            return Err(Error::InvalidParameter { name: "counts", value: self.counts });
        }
        if !(self.duration_s > 0.0) || !self.duration_s.is_finite() {
            return Err(Error::InvalidParameter { name: "duration_s", value: self.duration_s });
        }
        Ok(())
    }
}

/// Source and detection parameters for a counting campaign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Acquisition {
    /// Pair-emission rate of the source in Hz.
    pub rate_hz: f64,
    /// Per-setting acquisition time in seconds.
    pub duration_s: f64,
    /// Coincidence (pair detection) efficiency.
    pub efficiency: f64,
}

impl Acquisition {
    pub fn validate(&self) -> Result<()> {
        if !(self.rate_hz > 0.0) || !self.rate_hz.is_finite() {
            return Err(Error::InvalidParameter { name: "rate_hz", value: self.rate_hz });
        }
        if !(self.duration_s > 0.0) || !self.duration_s.is_finite() {
            return Err(Error::InvalidParameter { name: "duration_s", value: self.duration_s });
        }
        if !(self.efficiency > 0.0 && self.efficiency <= 1.0) {
            return Err(Error::InvalidParameter { name: "efficiency", value: self.efficiency });
        }
        Ok(())
    }

    /// Detected coincidence rate with every path collected, `rate * eta`.
    pub fn coincidence_rate(&self) -> f64 {
        self.rate_hz * self.efficiency
    }
}

/// Random stream for one `(seed, stream)` pair; streams are independent of
/// evaluation order.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Poisson draw that accepts a zero mean.
pub fn poisson_sample<R: rand::Rng + ?Sized>(mean: f64, rng: &mut R) -> f64 {
    if mean <= 0.0 {
        return 0.0;
    }
    match Poisson::new(mean) {
        Ok(dist) => dist.sample(rng),
        Err(_) => 0.0,
    }
}

fn record_for(setting: &ProjectiveSetting, counts: f64, acq: &Acquisition, rate: f64) -> CountsRecord {
    CountsRecord {
        label: setting.label.clone(),
        arm_a: setting.arm_a,
        arm_b: setting.arm_b,
        counts,
        duration_s: acq.duration_s,
        expected_rate: Some(rate),
    }
}

/// Poisson coincidence counts for every setting of `plan`, with mean
/// `P(setting) * rate * eta * T`. Setting `k` draws from stream `k` of `seed`.
pub fn simulate_counts(
    rho: &DensityMatrix,
    plan: &ExperimentPlan,
    acq: &Acquisition,
    seed: u64,
) -> Result<Vec<CountsRecord>> {
    acq.validate()?;
    plan.settings
        .iter()
        .enumerate()
        .map(|(k, setting)| {
            let rate = born_probability(rho, setting)? * acq.coincidence_rate();
            let mut rng = stream_rng(seed, k as u64);
            let counts = poisson_sample(rate * acq.duration_s, &mut rng);
            Ok(record_for(setting, counts, acq, rate))
        })
        .collect()
}

/// Detection probability of one arm projector alone, `<v| rho_arm |v>`.
pub fn arm_marginal(rho: &DensityMatrix, arm: &ArmProjector, first: bool) -> Result<f64> {
    let d = rho.dim_a();
    if rho.dim_b() != d {
        return Err(Error::DimensionMismatch { expected: d, actual: rho.dim_b() });
    }
    arm.check(d)?;
    let (support, n) = arm.support();
    let m = rho.matrix();
    let mut acc = C64::new(0.0, 0.0);
    for &(r, vr) in &support[..n] {
        for &(c, vc) in &support[..n] {
            for k in 0..d {
                let (row, col) = if first { (r * d + k, c * d + k) } else { (k * d + r, k * d + c) };
                acc += vr.conj() * m[(row, col)] * vc;
            }
        }
    }
    Ok(acc.re.clamp(0.0, 1.0))
}

/// [`simulate_counts`] with accidental coincidences added to every mean.
///
/// Each arm's singles rate is `singles_hz` times the marginal probability of
/// its projector; the accidental rate is their product times `window_s`.
pub fn simulate_counts_with_accidentals(
    rho: &DensityMatrix,
    plan: &ExperimentPlan,
    acq: &Acquisition,
    singles_hz: f64,
    window_s: f64,
    seed: u64,
) -> Result<Vec<CountsRecord>> {
    acq.validate()?;
    plan.settings
        .iter()
        .enumerate()
        .map(|(k, setting)| {
            let pa = arm_marginal(rho, &setting.arm_a, true)?;
            let pb = arm_marginal(rho, &setting.arm_b, false)?;
            let acc = accidental_rate(singles_hz * pa, singles_hz * pb, window_s)?;
            let rate = born_probability(rho, setting)? * acq.coincidence_rate() + acc;
            let mut rng = stream_rng(seed, k as u64);
            let counts = poisson_sample(rate * acq.duration_s, &mut rng);
            Ok(record_for(setting, counts, acq, rate))
        })
        .collect()
}

/// Noise-free records whose counts equal the Poisson means.
pub fn expected_counts(rho: &DensityMatrix, plan: &ExperimentPlan, acq: &Acquisition) -> Result<Vec<CountsRecord>> {
    acq.validate()?;
    plan.settings
        .iter()
        .map(|setting| {
            let rate = born_probability(rho, setting)? * acq.coincidence_rate();
            Ok(record_for(setting, rate * acq.duration_s, acq, rate))
        })
        .collect()
}

/// Accidental coincidence rate `S_a S_b tau` in Hz.
pub fn accidental_rate(singles_a_hz: f64, singles_b_hz: f64, window_s: f64) -> Result<f64> {
    for (name, v) in [("singles_a", singles_a_hz), ("singles_b", singles_b_hz), ("window", window_s)] {
        if !(v >= 0.0) || !v.is_finite() {
            return Err(Error::InvalidParameter { name, value: v });
        }
    }
    Ok(singles_a_hz * singles_b_hz * window_s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{apply_white_noise, max_entangled};
    use approx::assert_abs_diff_eq;

    #[test]
    fn plan_sizes() {
        assert_eq!(plan_full(2).unwrap().len(), 10);
        assert_eq!(plan_full(4).unwrap().len(), 52);
        assert_eq!(plan_full(32).unwrap().len(), 4000);
        for d in 2..=12 {
            assert_eq!(plan_full(d).unwrap().len(), plan_full_len(d));
        }
        let grid = plan_with(4, PlanOptions { full_grid: true, imaginary: true }).unwrap();
        assert_eq!(grid.len(), 16 + 16 * 6);
        assert!(plan_full(1).is_err());
    }

    #[test]
    fn labels_are_unique() {
        let plan = plan_with(5, PlanOptions { full_grid: true, imaginary: true }).unwrap();
        let mut labels: Vec<&str> = plan.settings.iter().map(|s| s.label.as_str()).collect();
        labels.sort_unstable();
        labels.dedup();
        assert_eq!(labels.len(), plan.len());
        assert_eq!(plan.settings[0].label, "Z0:Z0");
    }

    #[test]
    fn born_on_phi_plus() {
        let rho = max_entangled(2).unwrap().density();
        let p00 = ProjectiveSetting::new(ArmProjector::z(0), ArmProjector::z(0));
        let p01 = ProjectiveSetting::new(ArmProjector::z(0), ArmProjector::z(1));
        let pp = ProjectiveSetting::new(ArmProjector::x(0, 1, Sign::Plus), ArmProjector::x(0, 1, Sign::Plus));
        assert_abs_diff_eq!(born_probability(&rho, &p00).unwrap(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(born_probability(&rho, &p01).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(born_probability(&rho, &pp).unwrap(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn sparse_born_matches_dense() {
        let rho = apply_white_noise(&max_entangled(3).unwrap().density(), 0.6).unwrap();
        let plan = plan_with(3, PlanOptions { full_grid: true, imaginary: true }).unwrap();
        for s in &plan.settings {
            let (va, vb) = s.vectors(3).unwrap();
            let dense = born_probability_vectors(&rho, &va, &vb).unwrap();
            assert_abs_diff_eq!(born_probability(&rho, s).unwrap(), dense, epsilon = 1e-15);
        }
    }

    #[test]
    fn born_rejects_bad_indices() {
        let rho = max_entangled(2).unwrap().density();
        let s = ProjectiveSetting::new(ArmProjector::z(2), ArmProjector::z(0));
        assert!(born_probability(&rho, &s).is_err());
        let s = ProjectiveSetting::new(ArmProjector::x(1, 1, Sign::Plus), ArmProjector::z(0));
        assert!(born_probability(&rho, &s).is_err());
    }

    #[test]
    fn simulation_is_deterministic_and_zero_safe() {
        let rho = max_entangled(4).unwrap().density();
        let plan = plan_full(4).unwrap();
        let acq = Acquisition { rate_hz: 4000.0, duration_s: 1.0, efficiency: 0.16 };
        let a = simulate_counts(&rho, &plan, &acq, 9).unwrap();
        let b = simulate_counts(&rho, &plan, &acq, 9).unwrap();
        assert_eq!(a, b);
        let c = simulate_counts(&rho, &plan, &acq, 10).unwrap();
        assert_ne!(a, c);
        for r in &a {
            if r.expected_rate == Some(0.0) {
                assert_eq!(r.counts, 0.0);
            }
            assert_eq!(r.counts.fract(), 0.0);
        }
    }

    #[test]
    fn stream_independent_of_plan_prefix() {
        // Setting k always uses stream k: truncating the plan leaves earlier draws unchanged.
        let rho = max_entangled(3).unwrap().density();
        let plan = plan_full(3).unwrap();
        let short = ExperimentPlan { dim: 3, settings: plan.settings[..5].to_vec() };
        let acq = Acquisition { rate_hz: 4000.0, duration_s: 2.0, efficiency: 0.16 };
        let full = simulate_counts(&rho, &plan, &acq, 1).unwrap();
        let part = simulate_counts(&rho, &short, &acq, 1).unwrap();
        assert_eq!(&full[..5], &part[..]);
    }

    #[test]
    fn poisson_mean_within_five_sigma() {
        // P = 0.5, rate 4000, eta 0.16, T = 10 s: mean 3200.
        let rho = max_entangled(2).unwrap().density();
        let plan = ExperimentPlan {
            dim: 2,
            settings: alloc::vec![ProjectiveSetting::new(ArmProjector::z(0), ArmProjector::z(0))],
        };
        let acq = Acquisition { rate_hz: 4000.0, duration_s: 10.0, efficiency: 0.16 };
        for seed in 0..20 {
            let r = &simulate_counts(&rho, &plan, &acq, seed).unwrap()[0];
            assert_abs_diff_eq!(r.expected_rate.unwrap() * 10.0, 3200.0, epsilon = 1e-9);
            assert!((r.counts - 3200.0).abs() < 5.0 * 3200f64.sqrt());
        }
    }

    #[test]
    fn acquisition_validation() {
        let bad = [
            Acquisition { rate_hz: 0.0, duration_s: 1.0, efficiency: 0.5 },
            Acquisition { rate_hz: 1.0, duration_s: -1.0, efficiency: 0.5 },
            Acquisition { rate_hz: 1.0, duration_s: 1.0, efficiency: 0.0 },
            Acquisition { rate_hz: 1.0, duration_s: 1.0, efficiency: 1.5 },
        ];
        for acq in bad {
            assert!(acq.validate().is_err());
        }
    }

    #[test]
    fn marginals_and_accidental_background() {
        let rho = max_entangled(4).unwrap().density();
        assert_abs_diff_eq!(arm_marginal(&rho, &ArmProjector::z(2), true).unwrap(), 0.25, epsilon = 1e-15);
        let x = ArmProjector::x(0, 3, Sign::Minus);
        assert_abs_diff_eq!(arm_marginal(&rho, &x, false).unwrap(), 0.25, epsilon = 1e-15);
        let plan = plan_full(4).unwrap();
        let acq = Acquisition { rate_hz: 4000.0, duration_s: 1.0, efficiency: 0.16 };
        let plain = simulate_counts(&rho, &plan, &acq, 3).unwrap();
        let none = simulate_counts_with_accidentals(&rho, &plan, &acq, 0.0, 3e-9, 3).unwrap();
        assert_eq!(plain, none);
        let with = simulate_counts_with_accidentals(&rho, &plan, &acq, 1e5, 3e-9, 3).unwrap();
        let extra = with[1].expected_rate.unwrap() - plain[1].expected_rate.unwrap();
        assert_abs_diff_eq!(extra, 1e5 * 0.25 * 1e5 * 0.25 * 3e-9, epsilon = 1e-9);
    }

    #[test]
    fn accidentals() {
        assert_eq!(accidental_rate(0.0, 5e4, 3e-9).unwrap(), 0.0);
        assert_abs_diff_eq!(accidental_rate(1e5, 1e5, 3e-9).unwrap(), 30.0, epsilon = 1e-9);
        let one = accidental_rate(2e4, 3e4, 3e-9).unwrap();
        let two = accidental_rate(2e4, 3e4, 6e-9).unwrap();
        assert_abs_diff_eq!(two, 2.0 * one, epsilon = 1e-12);
        assert!(accidental_rate(-1.0, 1.0, 1.0).is_err());
    }
}
