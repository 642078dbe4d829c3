//! Random states and unitaries for synthetic experiments and property tests.

use alloc::vec::Vec;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{DensityMatrix, PureState};
#[allow(unused_imports)]
use num_traits::Float;
use crate::entropy::compensated_sum;
use crate::{Error, Result, C64};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<C64> {
    DMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Haar-random pure state on `C^dim_a (x) C^dim_b`.
pub fn random_pure_state<R: Rng + ?Sized>(dim_a: usize, dim_b: usize, rng: &mut R) -> Result<PureState> {
    let n = dim_a * dim_b;
    if n == 0 {
        return Err(Error::InvalidDimension(0));
    }
    let raw: Vec<C64> = (0..n).map(|_| gaussian(rng)).collect();
    let norm = compensated_sum(raw.iter().map(|z| z.norm_sqr())).sqrt();
    PureState::new(dim_a, dim_b, raw.into_iter().map(|z| z / norm).collect())
}

/// Random density matrix `G G^dag / Tr(G G^dag)` with `G` an `n x rank`
/// complex Ginibre matrix (rank `n` gives the Hilbert-Schmidt measure).
pub fn random_density_matrix<R: Rng + ?Sized>(
    dim_a: usize,
    dim_b: usize,
    rank: usize,
    rng: &mut R,
) -> Result<DensityMatrix> {
    let n = dim_a * dim_b;
    if n == 0 || rank == 0 {
        return Err(Error::InvalidDimension(0));
    }
    let g = ginibre(n, rank, rng);
    let mut m = &g * g.adjoint();
    // Symmetrise away rounding so the Hermiticity check is exact.
    m = (&m + m.adjoint()) * C64::new(0.5, 0.0);
    let tr = m.trace().re;
    m /= C64::new(tr, 0.0);
    DensityMatrix::from_matrix(dim_a, dim_b, m)
}

/// Haar-random unitary via QR of a Ginibre matrix with the diagonal phase fix.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DMatrix<C64> {
    let qr = ginibre(d, d, rng).qr();
    let (mut q, r) = qr.unpack();
    for k in 0..d {
        let rkk = r[(k, k)];
        let phase = if rkk.norm() > 0.0 { rkk / rkk.norm() } else { C64::new(1.0, 0.0) };
        for row in 0..d {
            q[(row, k)] *= phase;
        }
    }
    q
}
