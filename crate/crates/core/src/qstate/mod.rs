//! Bipartite path states, noise channels and measurement bases.
//!
//! Index convention: the product basis vector `|i>_A |j>_B` sits at flat
//! index `i * dim_b + j`.

mod basis;
pub mod random;

pub use basis::{computational_basis, fourier_basis, product_mub_basis, unbiasedness, Basis};

use alloc::vec::Vec;

use nalgebra::DMatrix;

#[allow(unused_imports)]
use num_traits::Float;
use crate::entropy::{compensated_sum, shannon_bits};
use crate::{Error, Result, C64};

/// Tolerance on normalisation, Hermiticity and trace.
pub const STATE_TOL: f64 = 1e-12;
/// Lowest admissible eigenvalue of a density matrix.
pub const PSD_TOL: f64 = 1e-10;

/// A normalised pure state of two path qudits.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    dim_a: usize,
    dim_b: usize,
    amplitudes: Vec<C64>,
}

impl PureState {
    /// Wraps an amplitude vector, checking length and normalisation.
    pub fn new(dim_a: usize, dim_b: usize, amplitudes: Vec<C64>) -> Result<Self> {
        if dim_a == 0 || dim_b == 0 {
            return Err(Error::InvalidDimension(dim_a.min(dim_b)));
        }
        if amplitudes.len() != dim_a * dim_b {
            return Err(Error::DimensionMismatch {
                expected: dim_a * dim_b,
                actual: amplitudes.len(),
            });
        }
        let norm2 = compensated_sum(amplitudes.iter().map(|a| a.norm_sqr()));
        if (norm2 - 1.0).abs() > STATE_TOL {
            return Err(Error::NotNormalized(norm2));
        }
        Ok(Self { dim_a, dim_b, amplitudes })
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// Amplitude of `|i>_A |j>_B`.
    pub fn amplitude(&self, i: usize, j: usize) -> C64 {
        self.amplitudes[i * self.dim_b + j]
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &PureState) -> Result<C64> {
        if self.amplitudes.len() != other.amplitudes.len() {
            return Err(Error::DimensionMismatch {
                expected: self.amplitudes.len(),
                actual: other.amplitudes.len(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// The projector `|psi><psi|`.
    pub fn density(&self) -> DensityMatrix {
        let n = self.amplitudes.len();
        let entries = DMatrix::from_fn(n, n, |r, c| self.amplitudes[r] * self.amplitudes[c].conj());
        DensityMatrix { dim_a: self.dim_a, dim_b: self.dim_b, entries }
    }
}

/// `(1/sqrt d) sum_i |ii>`.
pub fn max_entangled(d: usize) -> Result<PureState> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    let w = C64::new(1.0 / (d as f64).sqrt(), 0.0);
    let mut amps = alloc::vec![C64::new(0.0, 0.0); d * d];
    for i in 0..d {
        amps[i * d + i] = w;
    }
    Ok(PureState { dim_a: d, dim_b: d, amplitudes: amps })
}

/// `sum_i a_i |ii>`, normalised. Models unequal per-path pair amplitudes.
pub fn weighted_entangled(weights: &[C64]) -> Result<PureState> {
    let d = weights.len();
    if d == 0 {
        return Err(Error::InvalidDimension(0));
    }
    let norm = compensated_sum(weights.iter().map(|a| a.norm_sqr())).sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::DegenerateInput("weight vector has zero norm"));
    }
    let mut amps = alloc::vec![C64::new(0.0, 0.0); d * d];
    for (i, a) in weights.iter().enumerate() {
        amps[i * d + i] = a / norm;
    }
    Ok(PureState { dim_a: d, dim_b: d, amplitudes: amps })
}

/// Entanglement entropy (bits) of a pure bipartite state: Shannon entropy of
/// the squared Schmidt coefficients, i.e. the von Neumann entropy of the
/// reduced state.
pub fn entanglement_entropy_pure(psi: &PureState) -> f64 {
    let (da, db) = (psi.dim_a, psi.dim_b);
    let m = DMatrix::from_fn(da, db, |i, j| psi.amplitude(i, j));
    let reduced = &m * m.adjoint();
    let eig = nalgebra::SymmetricEigen::new(reduced);
    let spectrum: Vec<f64> = eig.eigenvalues.iter().map(|&x| x.max(0.0)).collect();
    shannon_bits(&spectrum)
}

/// A density operator on `C^dim_a (x) C^dim_b`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dim_a: usize,
    dim_b: usize,
    entries: DMatrix<C64>,
}

impl DensityMatrix {
    /// Wraps a matrix after checking shape, Hermiticity and unit trace.
    ///
    /// Positivity is not checked here (it costs an O(n^3) factorisation);
    /// call [`DensityMatrix::validate`] for the full check.
    pub fn from_matrix(dim_a: usize, dim_b: usize, entries: DMatrix<C64>) -> Result<Self> {
        let n = dim_a * dim_b;
        if n == 0 {
            return Err(Error::InvalidDimension(0));
        }
        if entries.nrows() != n || entries.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, actual: entries.nrows() });
        }
        let rho = Self { dim_a, dim_b, entries };
        rho.check_hermitian_trace()?;
        Ok(rho)
    }

    /// `1 / (dim_a dim_b)`.
    pub fn maximally_mixed(dim_a: usize, dim_b: usize) -> Result<Self> {
        let n = dim_a * dim_b;
        if n == 0 {
            return Err(Error::InvalidDimension(0));
        }
        let entries = DMatrix::from_diagonal_element(n, n, C64::new(1.0 / n as f64, 0.0));
        Ok(Self { dim_a, dim_b, entries })
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    /// Total Hilbert-space dimension `dim_a * dim_b`.
    pub fn size(&self) -> usize {
        self.dim_a * self.dim_b
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.entries
    }

    #[inline]
    pub(crate) fn flat(&self, i: usize, j: usize) -> usize {
        i * self.dim_b + j
    }

    /// `<ij|rho|kl>`.
    pub fn matrix_element(&self, (i, j): (usize, usize), (k, l): (usize, usize)) -> Result<C64> {
        for (idx, bound) in [(i, self.dim_a), (j, self.dim_b), (k, self.dim_a), (l, self.dim_b)] {
            if idx >= bound {
                return Err(Error::IndexOutOfRange { index: idx, bound });
            }
        }
        Ok(self.entries[(self.flat(i, j), self.flat(k, l))])
    }

    pub fn trace(&self) -> C64 {
        self.entries.trace()
    }

    /// `Tr(rho |Phi+><Phi+|) = (1/d) sum_{i,j} <ii|rho|jj>`.
    pub fn fidelity_max_entangled(&self) -> Result<f64> {
        if self.dim_a != self.dim_b {
            return Err(Error::DimensionMismatch { expected: self.dim_a, actual: self.dim_b });
        }
        let d = self.dim_a;
        let total = compensated_sum(
            (0..d).flat_map(|i| (0..d).map(move |j| (i, j))).map(|(i, j)| {
                self.entries[(self.flat(i, i), self.flat(j, j))].re
            }),
        );
        Ok(total / d as f64)
    }

    fn check_hermitian_trace(&self) -> Result<()> {
        let n = self.size();
        let mut worst = 0.0f64;
        for r in 0..n {
            for c in r..n {
                let dev = (self.entries[(r, c)] - self.entries[(c, r)].conj()).norm();
                worst = worst.max(dev);
            }
        }
        if worst > STATE_TOL {
            return Err(Error::NotHermitian(worst));
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::InvalidTrace(tr.re));
        }
        Ok(())
    }

    /// Smallest eigenvalue (dense Hermitian eigensolver).
    pub fn min_eigenvalue(&self) -> f64 {
        let eig = nalgebra::SymmetricEigen::new(self.entries.clone());
        eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Full density-operator check: Hermitian and unit trace within
    /// [`STATE_TOL`], smallest eigenvalue at least `-PSD_TOL`.
    pub fn validate(&self) -> Result<()> {
        self.check_hermitian_trace()?;
        // rho + tol*1 admits a Cholesky factor iff lambda_min(rho) >= -tol.
        let n = self.size();
        let shifted = &self.entries + DMatrix::from_diagonal_element(n, n, C64::new(PSD_TOL, 0.0));
        if hermitian_cholesky_succeeds(shifted) {
            return Ok(());
        }
        let lmin = self.min_eigenvalue();
        if lmin >= -PSD_TOL {
            Ok(())
        } else {
            Err(Error::NotPositive(lmin))
        }
    }
}

/// In-place Cholesky of a Hermitian matrix that fails on a non-positive
/// real pivot. (nalgebra's complex Cholesky takes complex square roots and
/// never fails, so it cannot detect indefiniteness.)
fn hermitian_cholesky_succeeds(mut a: DMatrix<C64>) -> bool {
    let n = a.nrows();
    for k in 0..n {
        let pivot = a[(k, k)].re;
        if !(pivot > 0.0) {
            return false;
        }
        let root = pivot.sqrt();
        for r in k..n {
            a[(r, k)] /= root;
        }
        for c in (k + 1)..n {
            let lck = a[(c, k)].conj();
            for r in c..n {
                let lrk = a[(r, k)];
                a[(r, c)] -= lrk * lck;
            }
        }
    }
    true
}

/// Isotropic mixture `p rho + (1 - p) 1/n`.
pub fn apply_white_noise(rho: &DensityMatrix, p: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter { name: "p", value: p });
    }
    let n = rho.size();
    let floor = (1.0 - p) / n as f64;
    let mut entries = rho.entries.map(|z| z * p);
    for k in 0..n {
        entries[(k, k)] += floor;
    }
    Ok(DensityMatrix { dim_a: rho.dim_a, dim_b: rho.dim_b, entries })
}

/// Adds a uniform background `eps` to every mismatched-path population
/// `<ij|rho|ij>`, `i != j`, then divides by the new trace.
pub fn apply_crosstalk(rho: &DensityMatrix, eps: f64) -> Result<DensityMatrix> {
    let cells = mismatched_cells(rho.dim_a, rho.dim_b);
    if !(eps >= 0.0) || eps * cells as f64 >= 1.0 {
        return Err(Error::InvalidParameter { name: "crosstalk", value: eps });
    }
    let scale = 1.0 / (1.0 + eps * cells as f64);
    let mut entries = rho.entries.clone();
    for i in 0..rho.dim_a {
        for j in 0..rho.dim_b {
            if i != j {
                let k = rho.flat(i, j);
                entries[(k, k)] += eps;
            }
        }
    }
    entries *= C64::new(scale, 0.0);
    Ok(DensityMatrix { dim_a: rho.dim_a, dim_b: rho.dim_b, entries })
}

/// Number of product cells `(i, j)` with `i != j`.
pub fn mismatched_cells(dim_a: usize, dim_b: usize) -> usize {
    dim_a * dim_b - dim_a.min(dim_b)
}

/// Gaussian path-phase noise on party A, averaged over the phase
/// distribution: every coherence between different A paths is multiplied by
/// `exp(-sigma^2)`. Populations `<ij|rho|ij>` are untouched.
pub fn apply_dephasing(rho: &DensityMatrix, sigma: f64) -> Result<DensityMatrix> {
    if !(sigma >= 0.0) {
        return Err(Error::InvalidParameter { name: "sigma", value: sigma });
    }
    let damping = (-sigma * sigma).exp();
    let db = rho.dim_b;
    let entries = DMatrix::from_fn(rho.size(), rho.size(), |r, c| {
        let z = rho.entries[(r, c)];
        if r / db != c / db {
            z * damping
        } else {
            z
        }
    });
    Ok(DensityMatrix { dim_a: rho.dim_a, dim_b: rho.dim_b, entries })
}

/// Phase width whose dephasing channel damps coherences by `damping`.
pub fn dephasing_width_for(damping: f64) -> Result<f64> {
    if !(damping > 0.0 && damping <= 1.0) {
        return Err(Error::InvalidParameter { name: "damping", value: damping });
    }
    Ok((-damping.ln()).sqrt())
}

/// White-noise weight `p` for which the isotropic state has fidelity `f`
/// with `|Phi+>` in dimension `d`: `p + (1 - p)/d^2 = f`.
pub fn isotropic_weight_for_fidelity(f: f64, d: usize) -> Result<f64> {
    let floor = 1.0 / (d * d) as f64;
    let p = (f - floor) / (1.0 - floor);
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter { name: "fidelity", value: f });
    }
    Ok(p)
}
