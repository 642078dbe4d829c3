//! Entanglement certification from diagonal correlations and two-path
//! coherences.
//!
//! Given `p_ij = <ij|rho|ij>` and `Re <ii|rho|jj>`, this module computes
//!
//! - the fidelity with `|Phi+>`, `F = (1/d) sum_{i,j} <ii|rho|jj>`;
//! - the Schmidt number certified by `F > (k - 1)/d`;
//! - separability / white-noise thresholds;
//! - a lower bound on the entanglement of formation from the conditional
//!   entropic uncertainty relation, assembled from four entropy bounds:
//!
//! ```text
//! E_oF >= -H_up(M,M) - H_up(M~,M~*) + H_down(M) + H_down(M~) + log2 d
//! ```
//!
//! `M` is the computational basis and `M~` a basis unbiased to it. The
//! computational-basis terms use the measured same-path populations; the
//! unbiased-basis terms follow from `F` alone through the `U (x) U*`
//! invariance of `|Phi+>`.

mod nested;

pub use nested::{
    analyze_block, bootstrap_errors, nested_analysis, nested_analysis_with_errors, CertReport, CertRow, MIN_RESAMPLES,
};

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use crate::entropy::{binary_entropy, compensated_sum, shannon_bits, surprisal_term};
use crate::qstate::DensityMatrix;
use crate::{Error, Result};

/// Slack allowed on `N = sum_i p_i <= 1`.
pub const NORM_TOL: f64 = 1e-9;

/// Estimated populations `<ij|rho|ij>` on a `d x d` path grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalData {
    d: usize,
    p_ab: Vec<f64>,
}

impl DiagonalData {
    /// Row-major `d x d` grid of populations. Entries must be finite, in
    /// `[0, 1 + tol]`, and the same-path sum `N` at most `1 + tol`.
    pub fn new(d: usize, p_ab: Vec<f64>) -> Result<Self> {
        if d < 1 {
            return Err(Error::InvalidDimension(d));
        }
        if p_ab.len() != d * d {
            return Err(Error::DimensionMismatch { expected: d * d, actual: p_ab.len() });
        }
        if let Some(&bad) = p_ab.iter().find(|&&x| !(0.0..=1.0 + NORM_TOL).contains(&x)) {
            return Err(Error::InvalidParameter { name: "population", value: bad });
        }
        let data = Self { d, p_ab };
        let n = data.same_path_total();
        if n > 1.0 + NORM_TOL {
            return Err(Error::InvalidParameter { name: "N", value: n });
        }
        Ok(data)
    }

    /// Same-path populations `p_i` with every mismatched cell set to `cross`.
    pub fn from_same_path(p_same: &[f64], cross: f64) -> Result<Self> {
        let d = p_same.len();
        let mut grid = alloc::vec![cross; d * d];
        for (i, &p) in p_same.iter().enumerate() {
            grid[i * d + i] = p;
        }
        Self::new(d, grid)
    }

    /// Exact populations of a density matrix.
    pub fn exact(rho: &DensityMatrix) -> Result<Self> {
        let d = rho.dim_a();
        if rho.dim_b() != d {
            return Err(Error::DimensionMismatch { expected: d, actual: rho.dim_b() });
        }
        let grid = (0..d)
            .flat_map(|i| (0..d).map(move |j| (i, j)))
            .map(|(i, j)| rho.matrix_element((i, j), (i, j)).map(|z| z.re.max(0.0)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(d, grid)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn p(&self, i: usize, j: usize) -> f64 {
        self.p_ab[i * self.d + j]
    }

    pub fn grid(&self) -> &[f64] {
        &self.p_ab
    }

    /// `p_i = <ii|rho|ii>`.
    pub fn p_same(&self) -> Vec<f64> {
        (0..self.d).map(|i| self.p(i, i)).collect()
    }

    /// `N = sum_i <ii|rho|ii>`.
    pub fn same_path_total(&self) -> f64 {
        compensated_sum((0..self.d).map(|i| self.p(i, i)))
    }
}

/// Estimated coherences `<ii|rho|jj>` for `i < j`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct OffDiagonalData {
    d: usize,
    re: BTreeMap<(usize, usize), f64>,
    im: BTreeMap<(usize, usize), f64>,
}

impl OffDiagonalData {
    pub fn new(d: usize) -> Self {
        Self { d, re: BTreeMap::new(), im: BTreeMap::new() }
    }

    /// Exact coherences of a density matrix.
    pub fn exact(rho: &DensityMatrix) -> Result<Self> {
        let d = rho.dim_a();
        let mut out = Self::new(d);
        for i in 0..d {
            for j in (i + 1)..d {
                let z = rho.matrix_element((i, i), (j, j))?;
                out.insert(i, j, z.re, Some(z.im))?;
            }
        }
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn insert(&mut self, i: usize, j: usize, re: f64, im: Option<f64>) -> Result<()> {
        if i >= j || j >= self.d {
            return Err(Error::InvalidPair(i, j, self.d));
        }
        self.re.insert((i, j), re);
        if let Some(im) = im {
            self.im.insert((i, j), im);
        }
        Ok(())
    }

    /// `Re <ii|rho|jj>`; the pair order is irrelevant.
    pub fn re(&self, i: usize, j: usize) -> Option<f64> {
        self.re.get(&(i.min(j), i.max(j))).copied()
    }

    /// `Im <ii|rho|jj>` if it was measured.
    pub fn im(&self, i: usize, j: usize) -> Option<f64> {
        let v = self.im.get(&(i.min(j), i.max(j))).copied()?;
        Some(if i <= j { v } else { -v })
    }

    pub fn pairs(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.re.iter().map(|(&k, &v)| (k, v))
    }
}

/// `F = (1/d) (sum_i p_i + 2 sum_{i<j} Re <ii|rho|jj>)`.
pub fn fidelity_from_elements(diag: &DiagonalData, offdiag: &OffDiagonalData, d: usize) -> Result<f64> {
    if diag.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, actual: diag.dim() });
    }
    let mut missing = Vec::new();
    let mut acc = crate::entropy::CompensatedSum::new();
    for i in 0..d {
        acc.add(diag.p(i, i));
    }
    for i in 0..d {
        for j in (i + 1)..d {
            match offdiag.re(i, j) {
                Some(re) => acc.add(2.0 * re),
                None => missing.push(format!("Re<{i}{i}|rho|{j}{j}>")),
            }
        }
    }
    if !missing.is_empty() {
        return Err(Error::IncompleteData { missing });
    }
    Ok(acc.value() / d as f64)
}

/// Largest `k` with `F > (k - 1)/d`, capped to `[1, d]`.
///
/// At an exact boundary `F = k/d` only `k` is certified: the witness needs
/// strict exceedance.
pub fn schmidt_number_bound(fidelity: f64, d: usize) -> usize {
    if d == 0 || !fidelity.is_finite() {
        return 1;
    }
    let x = fidelity * d as f64;
    let nearest = x.round();
    let floor = if (x - nearest).abs() <= 1e-12 * d as f64 {
        // Treat representation error at k/d as the boundary itself.
        nearest - 1.0
    } else {
        x.floor()
    };
    let k = floor + 1.0;
    if k < 1.0 {
        1
    } else {
        (k as usize).min(d)
    }
}

/// Separable fidelity bound `F_sep = 1/d`.
pub fn separability_threshold(d: usize) -> Result<f64> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    Ok(1.0 / d as f64)
}

/// White-noise weight at which the isotropic state reaches `F = 1/d`:
/// `p* = 1/(d + 1)`.
pub fn white_noise_threshold(d: usize) -> Result<f64> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    Ok(1.0 / (d as f64 + 1.0))
}

/// Fidelity of the isotropic state `p Phi+ + (1 - p) 1/d^2`.
pub fn isotropic_fidelity(p: f64, d: usize) -> f64 {
    p + (1.0 - p) / (d * d) as f64
}

fn checked_deficit(diag: &DiagonalData) -> Result<f64> {
    let n = diag.same_path_total();
    if n > 1.0 + NORM_TOL {
        return Err(Error::InvalidParameter { name: "N", value: n });
    }
    Ok((1.0 - n).max(0.0))
}

/// Lower bound on the computational-basis marginal entropy `H(M)`.
///
/// Bob's marginal satisfies `p^B_i >= p_i`; the missing mass `1 - N` is put
/// on the largest entry, which majorises every compatible marginal.
pub fn h_down_comp(diag: &DiagonalData) -> Result<f64> {
    let deficit = checked_deficit(diag)?;
    let mut marginal = diag.p_same();
    if let Some(top) = marginal
        .iter_mut()
        .max_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal))
    {
        *top += deficit;
    }
    Ok(shannon_bits(&marginal))
}

/// Upper bound on the computational-basis joint entropy `H(M, M)`: the
/// missing mass `1 - N` spread evenly over the `d^2 - d` mismatched cells.
pub fn h_up_comp(diag: &DiagonalData) -> Result<f64> {
    let deficit = checked_deficit(diag)?;
    let d = diag.dim();
    let same = shannon_bits(&diag.p_same());
    let cells = (d * d - d) as f64;
    let spread = if deficit > 0.0 && cells > 0.0 { -deficit * (deficit / cells).log2() } else { 0.0 };
    Ok(same + spread)
}

fn check_fidelity(f: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&f) {
        return Err(Error::InvalidParameter { name: "fidelity", value: f });
    }
    Ok(())
}

/// Lower bound on the unbiased-basis marginal entropy,
/// `H2(q) + q log2(d - 1)` with `q = (d - 1) F / d`.
pub fn h_down_mub(f: f64, d: usize) -> Result<f64> {
    check_fidelity(f)?;
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    let q = (d as f64 - 1.0) * f / d as f64;
    Ok(binary_entropy(q) + q * (d as f64 - 1.0).log2())
}

/// Upper bound on the unbiased-basis joint entropy: weight `F/d` on each of
/// the `d` correlated outcomes and `(1 - F)` spread over the other `d^2 - d`.
///
/// Requires `F/d >= (1 - F)/(d^2 - d)`, i.e. `F >= 1/d`.
pub fn h_up_mub(f: f64, d: usize) -> Result<f64> {
    check_fidelity(f)?;
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    let df = d as f64;
    if f * (df - 1.0) < 1.0 - f - 1e-12 {
        return Err(Error::AssumptionViolated("F/d >= (1-F)/(d^2-d) fails (F < 1/d)"));
    }
    let correlated = if f > 0.0 { -f * (f / df).log2() } else { 0.0 };
    let rest = 1.0 - f;
    let spread = if rest > 0.0 { -rest * (rest / (df * df - df)).log2() } else { 0.0 };
    Ok(correlated + spread)
}

/// The four entropy terms and the resulting bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EofBound {
    pub value: f64,
    pub h_down_m: f64,
    pub h_up_mm: f64,
    pub h_down_mub: f64,
    pub h_up_mub: f64,
}

/// `-H_up(M,M) - H_up(M~,M~*) + H_down(M) + H_down(M~) + log2 d`.
pub fn combine_entropy_terms(h_up_mm: f64, h_up_mub: f64, h_down_m: f64, h_down_mub: f64, d: usize) -> f64 {
    compensated_sum([-h_up_mm, -h_up_mub, h_down_m, h_down_mub, (d as f64).log2()])
}

/// Entanglement-of-formation lower bound in e-bits. Negative values are
/// returned as-is (the bound is then vacuous).
pub fn eof_bound(diag: &DiagonalData, f: f64, d: usize) -> Result<EofBound> {
    if diag.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, actual: diag.dim() });
    }
    let h_down_m = h_down_comp(diag)?;
    let h_up_mm = h_up_comp(diag)?;
    let h_down_mub = h_down_mub(f, d)?;
    let h_up_mub = h_up_mub(f, d)?;
    let value = combine_entropy_terms(h_up_mm, h_up_mub, h_down_m, h_down_mub, d);
    Ok(EofBound { value, h_down_m, h_up_mm, h_down_mub, h_up_mub })
}

/// `-x log2 x` re-exported for callers assembling custom entropy terms.
pub fn surprisal(x: f64) -> f64 {
    surprisal_term(x)
}
