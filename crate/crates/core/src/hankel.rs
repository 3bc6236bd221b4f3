//! The Hankel lift `ℛ` and its normalized inverse `ℛ*`.
//!
//! `ℛ` maps a length-`N` vector to an `N1 × N2` matrix with
//! `X[i][j] = x[i + j]` (zero-based), where `N1 + N2 = N + 1`. `ℛ*` averages
//! along anti-diagonals, so `ℛ*ℛ = I` and `ℛℛ*` is the orthogonal projection
//! onto Hankel matrices.

use serde::{Deserialize, Serialize};

use crate::error::{dim, param, Result};
use crate::{CMatrix, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HankelShape {
    pub n1: usize,
    pub n2: usize,
}

impl HankelShape {
    pub fn new(n1: usize, n2: usize) -> Result<Self> {
        if n1 == 0 || n2 == 0 {
            return Err(param(format!("Hankel shape {n1}×{n2} has an empty side")));
        }
        Ok(Self { n1, n2 })
    }

    /// Near-square split: `N1 = ⌊N/2⌋ + 1`, `N2 = N + 1 − N1`.
    pub fn for_len(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(param("cannot lift an empty signal"));
        }
        let n1 = n / 2 + 1;
        Self::new(n1, n + 1 - n1)
    }

    /// Split with an explicit row count.
    pub fn with_rows(n: usize, n1: usize) -> Result<Self> {
        if n1 == 0 || n1 > n {
            return Err(param(format!("row count {n1} invalid for length {n}")));
        }
        Self::new(n1, n + 1 - n1)
    }

    /// Length of the vectors this shape lifts.
    pub fn signal_len(&self) -> usize {
        self.n1 + self.n2 - 1
    }

    pub fn min_side(&self) -> usize {
        self.n1.min(self.n2)
    }

    pub(crate) fn check_len(&self, n: usize) -> Result<()> {
        if self.signal_len() != n {
            return Err(dim(format!(
                "Hankel shape {}×{} lifts length {}, got {n}",
                self.n1,
                self.n2,
                self.signal_len()
            )));
        }
        Ok(())
    }
}

/// Builds the Hankel matrix `ℛx`.
pub fn hankelize(x: &[C64], shape: HankelShape) -> Result<CMatrix> {
    shape.check_len(x.len())?;
    Ok(CMatrix::from_fn(shape.n1, shape.n2, |i, j| x[i + j]))
}

/// Number of entries on each anti-diagonal, `w_g = min(g, N1, N2, N + 1 − g)`.
pub fn antidiag_counts(shape: HankelShape) -> Vec<f64> {
    let n = shape.signal_len();
    (1..=n)
        .map(|g| g.min(shape.n1).min(shape.n2).min(n + 1 - g) as f64)
        .collect()
}

/// Anti-diagonal sums of an arbitrary matrix (the true adjoint of `ℛ`).
///
/// Uses Neumaier compensated summation so that averaging an exact Hankel
/// matrix returns its generating vector to within an ulp or two.
pub fn antidiag_sums(m: &CMatrix) -> Vec<C64> {
    let (n1, n2) = m.shape();
    let zero = C64::new(0.0, 0.0);
    let mut sum = vec![zero; n1 + n2 - 1];
    let mut comp = vec![zero; n1 + n2 - 1];
    // Column-major storage: walk columns so memory access stays sequential.
    for j in 0..n2 {
        for (i, v) in m.column(j).iter().enumerate() {
            let g = i + j;
            sum[g].re = neumaier(sum[g].re, v.re, &mut comp[g].re);
            sum[g].im = neumaier(sum[g].im, v.im, &mut comp[g].im);
        }
    }
    sum.iter().zip(&comp).map(|(s, c)| s + c).collect()
}

#[inline]
fn neumaier(sum: f64, v: f64, comp: &mut f64) -> f64 {
    let t = sum + v;
    if sum.abs() >= v.abs() {
        *comp += (sum - t) + v;
    } else {
        *comp += (v - t) + sum;
    }
    t
}

/// Anti-diagonal averaging `ℛ*X`.
///
/// Works on any matrix; for a Hankel input it recovers the generating vector.
pub fn dehankelize(m: &CMatrix) -> Vec<C64> {
    let (n1, n2) = m.shape();
    if n1 == 0 || n2 == 0 {
        return Vec::new();
    }
    let shape = HankelShape { n1, n2 };
    let mut sums = antidiag_sums(m);
    for (s, w) in sums.iter_mut().zip(antidiag_counts(shape)) {
        *s /= w;
    }
    sums
}
