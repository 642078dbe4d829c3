use alloc::vec::Vec;
use core::f64::consts::PI;


use super::STATE_TOL;
#[allow(unused_imports)]
use num_traits::Float;
use crate::{Error, Result, C64};

/// An orthonormal basis of `C^d`, stored as a list of vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    dim: usize,
    vectors: Vec<Vec<C64>>,
}

impl Basis {
    /// Checks that `vectors` are `d` pairwise orthonormal vectors of length `d`.
    pub fn new(vectors: Vec<Vec<C64>>) -> Result<Self> {
        let d = vectors.len();
        if d == 0 {
            return Err(Error::InvalidDimension(0));
        }
        if let Some(bad) = vectors.iter().find(|v| v.len() != d) {
            return Err(Error::DimensionMismatch { expected: d, actual: bad.len() });
        }
        let basis = Self { dim: d, vectors };
        let dev = basis.orthonormality_error();
        if dev > STATE_TOL {
            return Err(Error::NotNormalized(dev));
        }
        Ok(basis)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vectors(&self) -> &[Vec<C64>] {
        &self.vectors
    }

    pub fn vector(&self, k: usize) -> &[C64] {
        &self.vectors[k]
    }

    /// `max |<b_j|b_k> - delta_jk|`.
    pub fn orthonormality_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for (j, a) in self.vectors.iter().enumerate() {
            for (k, b) in self.vectors.iter().enumerate().skip(j) {
                let ip = inner(a, b);
                let want = if j == k { 1.0 } else { 0.0 };
                worst = worst.max((ip - C64::new(want, 0.0)).norm());
            }
        }
        worst
    }
}

pub(crate) fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// `{|0>, ..., |d-1>}`.
pub fn computational_basis(d: usize) -> Result<Basis> {
    if d < 1 {
        return Err(Error::InvalidDimension(d));
    }
    let vectors = (0..d)
        .map(|k| {
            let mut v = alloc::vec![C64::new(0.0, 0.0); d];
            v[k] = C64::new(1.0, 0.0);
            v
        })
        .collect();
    Ok(Basis { dim: d, vectors })
}

/// `|L_k> = sum_j exp(2 pi i k j / d) |j> / sqrt d`.
pub fn fourier_basis(d: usize) -> Result<Basis> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    let norm = 1.0 / (d as f64).sqrt();
    let vectors = (0..d)
        .map(|k| {
            (0..d)
                .map(|j| {
                    // Reduce k*j mod d first so the phase argument stays small.
                    let t = 2.0 * PI * ((k * j) % d) as f64 / d as f64;
                    C64::from_polar(norm, t)
                })
                .collect()
        })
        .collect();
    Ok(Basis { dim: d, vectors })
}

/// Tensor product of `n` qubit bases `{(|0> +- |1>)/sqrt 2}` with the bit
/// string `b_1 ... b_n` (most significant first) encoding the path index.
///
/// Vector `k` has entries `(-1)^{popcount(k & p)} / sqrt(2^n)`.
pub fn product_mub_basis(n: u32) -> Result<Basis> {
    if n == 0 || n > 20 {
        return Err(Error::Unsupported(alloc::format!("product MUB with n = {n}")));
    }
    let d = 1usize << n;
    let norm = 1.0 / (d as f64).sqrt();
    let vectors = (0..d)
        .map(|k| {
            (0..d)
                .map(|p| {
                    let sign = if (k & p).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                    C64::new(sign * norm, 0.0)
                })
                .collect()
        })
        .collect();
    Ok(Basis { dim: d, vectors })
}

/// `max_{j,k} | |<a_j|b_k>|^2 - 1/d |`; zero for mutually unbiased bases.
pub fn unbiasedness(a: &Basis, b: &Basis) -> Result<f64> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch { expected: a.dim, actual: b.dim });
    }
    let target = 1.0 / a.dim as f64;
    let mut worst = 0.0f64;
    for u in &a.vectors {
        for v in &b.vectors {
            worst = worst.max((inner(u, v).norm_sqr() - target).abs());
        }
    }
    Ok(worst)
}
