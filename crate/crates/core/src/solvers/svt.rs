use faer::{Mat, MatRef};

use crate::error::{param, Error, Result};
use crate::{CMatrix, C64};

fn check_finite(x: &CMatrix) -> Result<()> {
    if x.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::Numeric("matrix has non-finite entries".into()));
    }
    Ok(())
}

/// Borrows a column-major nalgebra matrix as a faer view.
fn view(x: &CMatrix) -> MatRef<'_, C64> {
    let (rows, cols) = x.shape();
    MatRef::from_column_major_slice(x.as_slice(), rows, cols)
}

/// Singular values in descending order.
pub fn singular_values(x: &CMatrix) -> Result<Vec<f64>> {
    if x.is_empty() {
        return Ok(Vec::new());
    }
    check_finite(x)?;
    let mut s: Vec<f64> = view(x)
        .singular_values()
        .map_err(|e| Error::Numeric(format!("SVD failed: {e:?}")))?;
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

pub fn nuclear_norm(x: &CMatrix) -> Result<f64> {
    Ok(singular_values(x)?.iter().sum())
}

/// Singular value soft-thresholding `U · max(Σ − t, 0) · V^H`, the proximal
/// operator of `t‖·‖_*`.
pub fn svt(x: &CMatrix, threshold: f64) -> Result<CMatrix> {
    svt_with_norm(x, threshold).map(|(z, _)| z)
}

/// [`svt`] that also returns the nuclear norm of the result.
pub(crate) fn svt_with_norm(x: &CMatrix, threshold: f64) -> Result<(CMatrix, f64)> {
    if !(threshold.is_finite() && threshold >= 0.0) {
        return Err(param(format!("threshold must be >= 0, got {threshold}")));
    }
    let (rows, cols) = x.shape();
    if x.is_empty() {
        return Ok((x.clone(), 0.0));
    }
    check_finite(x)?;
    let svd = view(x)
        .thin_svd()
        .map_err(|e| Error::Numeric(format!("SVD failed: {e:?}")))?;
    let s = svd.S().column_vector();
    // Singular values come out non-increasing, so the kept ones are a prefix.
    let kept = (0..s.nrows()).take_while(|&k| s[k].re > threshold).count();
    let mut norm = 0.0;
    let mut us = Mat::<C64>::zeros(rows, kept);
    for k in 0..kept {
        let shrunk = s[k].re - threshold;
        norm += shrunk;
        for i in 0..rows {
            us[(i, k)] = svd.U()[(i, k)] * shrunk;
        }
    }
    let v = svd.V().get(.., ..kept);
    let prod = &us * v.adjoint();
    let out = CMatrix::from_fn(rows, cols, |i, j| prod[(i, j)]);
    Ok((out, norm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{rng_from_seed, unit_f64};
    use crate::C64;

    fn random(rows: usize, cols: usize, seed: u64) -> CMatrix {
        let mut rng = rng_from_seed(seed);
        CMatrix::from_fn(rows, cols, |_, _| {
            C64::new(unit_f64(&mut rng) - 0.5, unit_f64(&mut rng) - 0.5)
        })
    }

    #[test]
    fn zero_threshold_is_identity() {
        let x = random(6, 4, 1);
        assert!((svt(&x, 0.0).unwrap() - &x).norm() < 1e-12);
    }

    #[test]
    fn large_threshold_gives_zero() {
        let x = random(5, 5, 2);
        let s1 = singular_values(&x).unwrap()[0];
        assert_eq!(svt(&x, s1).unwrap().norm(), 0.0);
        assert_eq!(svt(&x, 10.0 * s1).unwrap().norm(), 0.0);
    }

    #[test]
    fn diagonal_by_hand() {
        let d = |a: f64, b: f64, c: f64| {
            CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
                C64::new(a, 0.0),
                C64::new(b, 0.0),
                C64::new(c, 0.0),
            ]))
        };
        let out = svt(&d(3.0, 2.0, 1.0), 1.5).unwrap();
        assert!((out - d(1.5, 0.5, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn rejects_non_finite_input() {
        let mut x = random(3, 3, 4);
        x[(1, 1)] = C64::new(f64::NAN, 0.0);
        assert!(matches!(svt(&x, 1.0), Err(Error::Numeric(_))));
        assert!(svt(&random(2, 2, 0), -1.0).is_err());
    }

    /// Grid search over real 2×2 matrices in a neighbourhood of the
    /// candidate; the proximal objective must never beat the closed form.
    #[test]
    fn svt_minimizes_proximal_objective() {
        let objective = |z: &CMatrix, x: &CMatrix, t: f64| {
            0.5 * (z - x).norm_squared() + t * nuclear_norm(z).unwrap()
        };
        for seed in 0..4 {
            let mut x = random(2, 2, seed);
            x.iter_mut().for_each(|v| v.im = 0.0);
            let t = 0.2;
            let z = svt(&x, t).unwrap();
            let best = objective(&z, &x, t);
            let steps: Vec<f64> = (-6..=6).map(|k| k as f64 * 0.05).collect();
            let mut grid_min = f64::INFINITY;
            for &a in &steps {
                for &b in &steps {
                    for &c in &steps {
                        for &d in &steps {
                            let mut cand = z.clone();
                            cand[(0, 0)].re += a;
                            cand[(0, 1)].re += b;
                            cand[(1, 0)].re += c;
                            cand[(1, 1)].re += d;
                            grid_min = grid_min.min(objective(&cand, &x, t));
                        }
                    }
                }
            }
            assert!(best <= grid_min + 1e-12, "closed form {best}, grid {grid_min}");
        }
    }
}
