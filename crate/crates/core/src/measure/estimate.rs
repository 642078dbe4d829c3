//! Density-matrix element estimators.
//!
//! Counts are first converted to rates (counts per second of acquisition), so
//! settings with different durations can be combined. Every estimate is a
//! rate divided by a total coincidence rate `C_T`; how `C_T` is obtained is
//! chosen by [`Normalization`].

use alloc::collections::BTreeMap;
use alloc::string::ToString;
use alloc::vec::Vec;

use super::{ArmBasis, ArmProjector, CountsRecord, ProjectiveSetting, Sign};
use crate::certify::{DiagonalData, OffDiagonalData};
use crate::entropy::compensated_sum;
use crate::{Error, Result, C64};

/// Upper bound on each mismatched population `<ij|rho|ij>`, `i != j`, of
/// the measured 32-path source.
pub const MEASURED_CROSSTALK_BOUND: f64 = 4.49e-5;

/// How the total coincidence rate `C_T` is determined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Normalization {
    /// Every `Z_i:Z_j` setting was measured; `C_T` is their summed rate.
    FullGrid,
    /// Only `Z_i:Z_i` was measured and every mismatched cell is assumed to
    /// hold `per_cell`: `C_T = sum_i C(ii) / (1 - (d^2 - d) per_cell)`.
    AssumedCrosstalk { per_cell: f64 },
    /// `C_T` is the known detected pair rate (source rate times efficiency).
    /// The mass `1 - N` not found on the same-path settings is spread evenly
    /// over the mismatched cells.
    Calibrated { coincidence_rate_hz: f64 },
}

impl Normalization {
    /// `FullGrid` when every `Z_i:Z_j` with `i, j < d` is present, otherwise
    /// the measured crosstalk bound.
    pub fn detect(records: &[CountsRecord], d: usize) -> Self {
        let keys: alloc::collections::BTreeSet<_> = records.iter().map(CountsRecord::key).collect();
        let full = (0..d).all(|i| (0..d).all(|j| keys.contains(&(ArmProjector::z(i), ArmProjector::z(j)))));
        if full {
            Normalization::FullGrid
        } else {
            Normalization::AssumedCrosstalk { per_cell: MEASURED_CROSSTALK_BOUND }
        }
    }

    fn validate(&self, d: usize) -> Result<()> {
        match *self {
            Normalization::FullGrid => Ok(()),
            Normalization::AssumedCrosstalk { per_cell } => {
                let cells = (d * d - d) as f64;
                if !(per_cell >= 0.0) || cells * per_cell >= 1.0 {
                    return Err(Error::InvalidParameter { name: "per_cell", value: per_cell });
                }
                Ok(())
            }
            Normalization::Calibrated { coincidence_rate_hz } => {
                if !(coincidence_rate_hz > 0.0) || !coincidence_rate_hz.is_finite() {
                    return Err(Error::InvalidParameter { name: "coincidence_rate_hz", value: coincidence_rate_hz });
                }
                Ok(())
            }
        }
    }
}

/// `<ii|rho|jj>` estimate; `im` is `None` when no mixed-basis settings were
/// measured.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OffDiagonalEstimate {
    pub re: f64,
    pub im: Option<f64>,
}

impl OffDiagonalEstimate {
    pub fn to_complex(&self) -> Option<C64> {
        self.im.map(|im| C64::new(self.re, im))
    }
}

/// Rates of a counts file, with the normalization for one `m x m` block.
#[derive(Debug, Clone)]
pub struct ElementEstimator {
    data_dim: usize,
    block: usize,
    rates: BTreeMap<(ArmProjector, ArmProjector), f64>,
    total: f64,
    cross: Option<f64>,
}

impl ElementEstimator {
    /// Estimator for the full `data_dim`-path data.
    pub fn new(records: &[CountsRecord], data_dim: usize, norm: Normalization) -> Result<Self> {
        Self::for_block(records, data_dim, data_dim, norm)
    }

    /// Estimator conditioned on paths `0..block` of both photons: all
    /// estimates are renormalised within the `block x block` grid.
    pub fn for_block(records: &[CountsRecord], data_dim: usize, block: usize, norm: Normalization) -> Result<Self> {
        if data_dim < 2 {
            return Err(Error::InvalidDimension(data_dim));
        }
        if block < 2 || block > data_dim {
            return Err(Error::InvalidDimension(block));
        }
        norm.validate(data_dim)?;
        let mut sums: BTreeMap<(ArmProjector, ArmProjector), (f64, f64)> = BTreeMap::new();
        for r in records {
            r.validate()?;
            for arm in [r.arm_a, r.arm_b] {
                check_arm(&arm, data_dim)?;
            }
            let e = sums.entry(r.key()).or_insert((0.0, 0.0));
            e.0 += r.counts;
            e.1 += r.duration_s;
        }
        let rates: BTreeMap<_, _> = sums.into_iter().map(|(k, (c, t))| (k, c / t)).collect();
        let mut est = Self { data_dim, block, rates, total: 0.0, cross: None };
        let (total, cross) = est.block_normalization(norm)?;
        if !(total > 0.0) {
            return Err(Error::DegenerateInput("no coincidences in the selected block"));
        }
        est.total = total;
        est.cross = cross;
        Ok(est)
    }

    pub fn data_dim(&self) -> usize {
        self.data_dim
    }

    pub fn block_dim(&self) -> usize {
        self.block
    }

    /// `C_T` restricted to the block, in Hz.
    pub fn total_rate(&self) -> f64 {
        self.total
    }

    fn rate(&self, a: ArmProjector, b: ArmProjector) -> Option<f64> {
        self.rates.get(&(a, b)).copied()
    }

    fn require(&self, keys: &[(ArmProjector, ArmProjector)]) -> Result<Vec<f64>> {
        let mut missing = Vec::new();
        let mut out = Vec::with_capacity(keys.len());
        for &(a, b) in keys {
            match self.rate(a, b) {
                Some(r) => out.push(r),
                None => missing.push(ProjectiveSetting::new(a, b).label),
            }
        }
        if missing.is_empty() {
            Ok(out)
        } else {
            Err(Error::IncompleteData { missing })
        }
    }

    fn same_path_rates(&self, upto: usize) -> Result<Vec<f64>> {
        let keys: Vec<_> = (0..upto).map(|i| (ArmProjector::z(i), ArmProjector::z(i))).collect();
        self.require(&keys)
    }

    fn block_normalization(&self, norm: Normalization) -> Result<(f64, Option<f64>)> {
        let m = self.block;
        let d = self.data_dim;
        let block_cells = (m * m - m) as f64;
        match norm {
            Normalization::FullGrid => {
                let keys: Vec<_> = (0..m)
                    .flat_map(|i| (0..m).map(move |j| (ArmProjector::z(i), ArmProjector::z(j))))
                    .collect();
                Ok((compensated_sum(self.require(&keys)?), None))
            }
            Normalization::AssumedCrosstalk { per_cell } => {
                let all = self.same_path_rates(d)?;
                let t_full = compensated_sum(all.iter().copied()) / (1.0 - (d * d - d) as f64 * per_cell);
                let weight = compensated_sum(all[..m].iter().map(|r| r / t_full)) + block_cells * per_cell;
                Ok((t_full * weight, Some(per_cell / weight)))
            }
            Normalization::Calibrated { coincidence_rate_hz } => {
                let all = self.same_path_rates(d)?;
                let n = compensated_sum(all.iter().map(|r| r / coincidence_rate_hz));
                let cell = (1.0 - n).max(0.0) / (d * d - d) as f64;
                let weight = compensated_sum(all[..m].iter().map(|r| r / coincidence_rate_hz)) + block_cells * cell;
                Ok((coincidence_rate_hz * weight, Some(cell / weight)))
            }
        }
    }

    fn check_pair(&self, i: usize, j: usize) -> Result<()> {
        if i == j || i.max(j) >= self.block {
            return Err(Error::InvalidPair(i, j, self.block));
        }
        Ok(())
    }

    /// Populations `<ab|rho|ab>` on the block.
    pub fn diagonals(&self) -> Result<DiagonalData> {
        let m = self.block;
        let same = self.same_path_rates(m)?;
        match self.cross {
            Some(cell) => {
                let p: Vec<f64> = same.iter().map(|r| r / self.total).collect();
                DiagonalData::from_same_path(&p, cell)
            }
            None => {
                let keys: Vec<_> = (0..m)
                    .flat_map(|i| (0..m).map(move |j| (ArmProjector::z(i), ArmProjector::z(j))))
                    .collect();
                let grid = self.require(&keys)?.into_iter().map(|r| r / self.total).collect();
                DiagonalData::new(m, grid)
            }
        }
    }

    /// `<sigma_a^{ij} (x) sigma_b^{ij}>` for `sigma` in `{X, Y}`, normalised
    /// by `C_T`.
    pub fn correlator(&self, i: usize, j: usize, kind_a: ArmBasis, kind_b: ArmBasis) -> Result<f64> {
        self.check_pair(i, j)?;
        if kind_a == ArmBasis::Z || kind_b == ArmBasis::Z {
            return Err(Error::Unsupported("correlators need X or Y arms".to_string()));
        }
        let (lo, hi) = (i.min(j), i.max(j));
        let mut keys = Vec::with_capacity(4);
        let mut signs = Vec::with_capacity(4);
        for sa in Sign::BOTH {
            for sb in Sign::BOTH {
                keys.push((
                    ArmProjector::superposition(kind_a, lo, hi, sa),
                    ArmProjector::superposition(kind_b, lo, hi, sb),
                ));
                signs.push(sa.value() * sb.value());
            }
        }
        let rates = self.require(&keys)?;
        let e = compensated_sum(rates.iter().zip(&signs).map(|(r, s)| s * r)) / self.total;
        // Swapping i and j flips the sign of sigma_y.
        let flip = |k: ArmBasis| if i > j && k == ArmBasis::Y { -1.0 } else { 1.0 };
        Ok(e * flip(kind_a) * flip(kind_b))
    }

    fn has_mixed(&self, i: usize, j: usize) -> bool {
        self.rates.keys().any(|&(a, b)| {
            a.i == i && a.j == j && b.i == i && b.j == j && a.basis != b.basis && a.basis != ArmBasis::Z
        })
    }

    /// `<ii|rho|jj>`: `Re = (E_xx - E_yy)/4`, `Im = -(E_xy + E_yx)/4`.
    pub fn offdiag(&self, i: usize, j: usize) -> Result<OffDiagonalEstimate> {
        self.check_pair(i, j)?;
        let re = 0.25 * (self.correlator(i, j, ArmBasis::X, ArmBasis::X)? - self.correlator(i, j, ArmBasis::Y, ArmBasis::Y)?);
        let im = if self.has_mixed(i.min(j), i.max(j)) {
            let xy = self.correlator(i, j, ArmBasis::X, ArmBasis::Y)?;
            let yx = self.correlator(i, j, ArmBasis::Y, ArmBasis::X)?;
            Some(-0.25 * (xy + yx))
        } else {
            None
        };
        Ok(OffDiagonalEstimate { re, im })
    }

    /// Every pair `i < j` of the block.
    pub fn offdiagonals(&self) -> Result<OffDiagonalData> {
        let m = self.block;
        let mut out = OffDiagonalData::new(m);
        let mut missing = Vec::new();
        for i in 0..m {
            for j in (i + 1)..m {
                match self.offdiag(i, j) {
                    Ok(e) => out.insert(i, j, e.re, e.im)?,
                    Err(Error::IncompleteData { missing: more }) => missing.extend(more),
                    Err(e) => return Err(e),
                }
            }
        }
        if missing.is_empty() {
            Ok(out)
        } else {
            Err(Error::IncompleteData { missing })
        }
    }

    /// Two-path visibility `2 Re<ii|rho|jj> / (p_ii + p_jj)`.
    pub fn visibility(&self, i: usize, j: usize) -> Result<f64> {
        self.check_pair(i, j)?;
        let pop = self.same_path_rates(self.block)?;
        let denom = (pop[i] + pop[j]) / self.total;
        if !(denom > 0.0) {
            return Err(Error::UndefinedVisibility(i, j));
        }
        Ok(2.0 * self.offdiag(i, j)?.re / denom)
    }

    /// Mean visibility over all pairs of the block with nonzero population.
    pub fn mean_visibility(&self) -> Result<f64> {
        let m = self.block;
        let mut vals = Vec::new();
        for i in 0..m {
            for j in (i + 1)..m {
                match self.visibility(i, j) {
                    Ok(v) => vals.push(v),
                    Err(Error::UndefinedVisibility(..)) => {}
                    Err(e) => return Err(e),
                }
            }
        }
        if vals.is_empty() {
            return Err(Error::DegenerateInput("no pair with nonzero population"));
        }
        Ok(compensated_sum(vals.iter().copied()) / vals.len() as f64)
    }
}

fn check_arm(arm: &ArmProjector, d: usize) -> Result<()> {
    for idx in [arm.i, arm.j] {
        if idx >= d {
            return Err(Error::IndexOutOfRange { index: idx, bound: d });
        }
    }
    if arm.basis == ArmBasis::Z && arm.i != arm.j {
        return Err(Error::InvalidPair(arm.i, arm.j, d));
    }
    if arm.basis != ArmBasis::Z && arm.i >= arm.j {
        return Err(Error::InvalidPair(arm.i, arm.j, d));
    }
    Ok(())
}

/// Populations of the full `d x d` grid.
pub fn estimate_diagonals(records: &[CountsRecord], d: usize, norm: Normalization) -> Result<DiagonalData> {
    ElementEstimator::new(records, d, norm)?.diagonals()
}

pub fn estimate_correlator(
    records: &[CountsRecord],
    d: usize,
    norm: Normalization,
    i: usize,
    j: usize,
    kind_a: ArmBasis,
    kind_b: ArmBasis,
) -> Result<f64> {
    ElementEstimator::new(records, d, norm)?.correlator(i, j, kind_a, kind_b)
}

pub fn estimate_offdiag(
    records: &[CountsRecord],
    d: usize,
    norm: Normalization,
    i: usize,
    j: usize,
) -> Result<OffDiagonalEstimate> {
    ElementEstimator::new(records, d, norm)?.offdiag(i, j)
}

pub fn visibility(records: &[CountsRecord], d: usize, norm: Normalization, i: usize, j: usize) -> Result<f64> {
    ElementEstimator::new(records, d, norm)?.visibility(i, j)
}
