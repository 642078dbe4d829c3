//! Base-2 entropy primitives.
//!
//! All entropies are in bits (e-bits for entanglement quantities), with the
//! convention `0 log 0 = 0`. Sums use Neumaier compensation.

#[allow(unused_imports)]
use num_traits::Float;

/// Neumaier (improved Kahan) running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl core::iter::FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Self::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated sum of an iterator of f64.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    values.into_iter().collect::<CompensatedSum>().value()
}

/// `-x log2 x`, zero at `x = 0`.
#[inline]
pub fn surprisal_term(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -x * x.log2()
    }
}

/// Shannon entropy in bits of a (not necessarily normalised) weight vector,
/// `-sum p log2 p`.
pub fn shannon_bits(p: &[f64]) -> f64 {
    compensated_sum(p.iter().map(|&x| surprisal_term(x)))
}

/// Binary entropy `H2(p)` in bits.
pub fn binary_entropy(p: f64) -> f64 {
    surprisal_term(p) + surprisal_term(1.0 - p)
}
