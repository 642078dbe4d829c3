//! Per-dimension analysis of one data set and Poisson bootstrap errors.

use alloc::vec::Vec;

use super::{
    combine_entropy_terms, fidelity_from_elements, h_down_comp, h_down_mub, h_up_comp, h_up_mub, schmidt_number_bound,
};
#[allow(unused_imports)]
use num_traits::Float;
use crate::measure::{poisson_sample, stream_rng, CountsRecord, ElementEstimator, Normalization};
use crate::{Error, Result};

/// Minimum number of bootstrap resamples.
pub const MIN_RESAMPLES: usize = 100;

/// Certification results for one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct CertRow {
    pub d: usize,
    pub fidelity: f64,
    pub fidelity_std: Option<f64>,
    pub schmidt: usize,
    /// `None` when `F < 1/d`, where the unbiased-basis bound is unavailable.
    pub eof: Option<f64>,
    pub eof_std: Option<f64>,
    pub h_down_m: f64,
    pub h_up_mm: f64,
    pub h_down_mub: f64,
    pub h_up_mub: Option<f64>,
    /// Mean two-path visibility over the block.
    pub visibility: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CertReport {
    pub rows: Vec<CertRow>,
}

impl CertReport {
    pub fn row(&self, d: usize) -> Option<&CertRow> {
        self.rows.iter().find(|r| r.d == d)
    }
}

/// Certifies paths `0..m` of `data_dim`-path data, renormalising within the
/// `m x m` block.
///
/// Sampled fidelities can stray slightly outside `[0, 1]`; the entropy terms
/// use the clipped value while `fidelity` reports the raw estimate.
pub fn analyze_block(records: &[CountsRecord], data_dim: usize, m: usize, norm: Normalization) -> Result<CertRow> {
    let est = ElementEstimator::for_block(records, data_dim, m, norm)?;
    let diag = est.diagonals()?;
    let off = est.offdiagonals()?;
    let fidelity = fidelity_from_elements(&diag, &off, m)?;
    let f = fidelity.clamp(0.0, 1.0);
    let h_down_m = h_down_comp(&diag)?;
    let h_up_mm = h_up_comp(&diag)?;
    let h_down_mub = h_down_mub(f, m)?;
    let h_up_mub = match h_up_mub(f, m) {
        Ok(v) => Some(v),
        Err(Error::AssumptionViolated(_)) => None,
        Err(e) => return Err(e),
    };
    let eof = h_up_mub.map(|hu| combine_entropy_terms(h_up_mm, hu, h_down_m, h_down_mub, m));
    Ok(CertRow {
        d: m,
        fidelity,
        fidelity_std: None,
        schmidt: schmidt_number_bound(fidelity, m),
        eof,
        eof_std: None,
        h_down_m,
        h_up_mm,
        h_down_mub,
        h_up_mub,
        visibility: est.mean_visibility().ok(),
    })
}

fn check_dims(dims: &[usize], data_dim: usize) -> Result<()> {
    if dims.is_empty() {
        return Err(Error::DegenerateInput("no dimensions requested"));
    }
    for w in dims.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::InvalidDimension(w[1]));
        }
    }
    for &d in dims {
        if d < 2 || d > data_dim {
            return Err(Error::InvalidDimension(d));
        }
    }
    Ok(())
}

/// One row per entry of `dims` (strictly ascending, each in `2..=data_dim`).
pub fn nested_analysis(
    records: &[CountsRecord],
    data_dim: usize,
    dims: &[usize],
    norm: Normalization,
) -> Result<CertReport> {
    check_dims(dims, data_dim)?;
    let rows = dims
        .iter()
        .map(|&m| analyze_block(records, data_dim, m, norm))
        .collect::<Result<Vec<_>>>()?;
    Ok(CertReport { rows })
}

/// [`nested_analysis`] with bootstrap standard deviations of `F` and `E_oF`.
pub fn nested_analysis_with_errors(
    records: &[CountsRecord],
    data_dim: usize,
    dims: &[usize],
    norm: Normalization,
    n_resamples: usize,
    seed: u64,
) -> Result<CertReport> {
    let mut report = nested_analysis(records, data_dim, dims, norm)?;
    let stds = bootstrap_errors(
        records,
        |resampled| {
            let rep = nested_analysis(resampled, data_dim, dims, norm)?;
            Ok(rep.rows.iter().flat_map(|r| [r.fidelity, r.eof.unwrap_or(f64::NAN)]).collect())
        },
        n_resamples,
        seed,
    )?;
    for (row, pair) in report.rows.iter_mut().zip(stds.chunks(2)) {
        row.fidelity_std = pair[0];
        row.eof_std = if row.eof.is_some() { pair[1] } else { None };
    }
    Ok(report)
}

/// Poisson bootstrap: every count is redrawn from `Poisson(observed)`, the
/// pipeline is rerun, and the sample standard deviation of each output is
/// returned.
///
/// Resample `r` draws from stream `r` of `seed`, records in file order. NaN
/// outputs are skipped; an output with fewer than two finite values gets
/// `None`.
pub fn bootstrap_errors<F>(records: &[CountsRecord], pipeline: F, n_resamples: usize, seed: u64) -> Result<Vec<Option<f64>>>
where
    F: Fn(&[CountsRecord]) -> Result<Vec<f64>>,
{
    if n_resamples < MIN_RESAMPLES {
        return Err(Error::InvalidParameter { name: "n_resamples", value: n_resamples as f64 });
    }
    let mut samples: Vec<Vec<f64>> = Vec::new();
    let mut buf = records.to_vec();
    for r in 0..n_resamples {
        let mut rng = stream_rng(seed, r as u64);
        for (dst, src) in buf.iter_mut().zip(records) {
            dst.counts = poisson_sample(src.counts, &mut rng);
        }
        let out = pipeline(&buf)?;
        if samples.is_empty() {
            samples = alloc::vec![Vec::with_capacity(n_resamples); out.len()];
        }
        if out.len() != samples.len() {
            return Err(Error::DimensionMismatch { expected: samples.len(), actual: out.len() });
        }
        for (s, v) in samples.iter_mut().zip(out) {
            if v.is_finite() {
                s.push(v);
            }
        }
    }
    Ok(samples.iter().map(|s| sample_std(s)).collect())
}

fn sample_std(values: &[f64]) -> Option<f64> {
    if values.len() < 2 {
        return None;
    }
    let n = values.len() as f64;
    let mean = crate::entropy::compensated_sum(values.iter().copied()) / n;
    let ss = crate::entropy::compensated_sum(values.iter().map(|v| (v - mean) * (v - mean)));
    Some((ss / (n - 1.0)).sqrt())
}
