//! Quantitative yardsticks for reconstructions.

mod esprit;
mod params;
mod peaks;
mod spectral;

pub use esprit::{esprit, esprit_with_shape};
pub use params::{match_components, parameter_errors, ParameterErrors};
pub use peaks::{detect_peaks, match_peaks, peak_correlation, Peak, PeakMatching, PeakPair, PeakSet};
pub use spectral::{hankel_diagnostics, spectrum, HankelDiagnostics, Spectrum};

use crate::error::{dim, param, Error, Result};
use crate::C64;

/// Relative least normalized error `‖x − x̂‖₂ / ‖x‖₂`.
pub fn rlne(x_hat: &[C64], x: &[C64]) -> Result<f64> {
    if x_hat.len() != x.len() {
        return Err(dim(format!(
            "estimate has {} samples, reference {}",
            x_hat.len(),
            x.len()
        )));
    }
    let norm: f64 = x.iter().map(|v| v.norm_sqr()).sum();
    if norm == 0.0 {
        return Err(param("reference signal has zero norm"));
    }
    let diff: f64 = x_hat.iter().zip(x).map(|(a, b)| (a - b).norm_sqr()).sum();
    Ok((diff / norm).sqrt())
}

/// Pearson linear correlation coefficient.
pub fn pearson(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(dim(format!("lengths {} and {} differ", a.len(), b.len())));
    }
    if a.len() < 2 {
        return Err(param("correlation needs at least two points"));
    }
    let n = a.len() as f64;
    let mean_a = a.iter().sum::<f64>() / n;
    let mean_b = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (&x, &y) in a.iter().zip(b) {
        let (da, db) = (x - mean_a, y - mean_b);
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if saa == 0.0 || sbb == 0.0 {
        return Err(Error::DegenerateInput("constant input has no correlation".into()));
    }
    Ok((sab / (saa.sqrt() * sbb.sqrt())).clamp(-1.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn rlne_by_hand() {
        let x = [c(3.0, 0.0), c(0.0, 4.0)];
        assert_eq!(rlne(&x, &x).unwrap(), 0.0);
        assert_eq!(rlne(&[c(0.0, 0.0); 2], &x).unwrap(), 1.0);
        assert!((rlne(&[c(3.0, 0.0), c(0.0, 0.0)], &x).unwrap() - 0.8).abs() < 1e-15);
        assert!(rlne(&x, &[c(0.0, 0.0); 2]).is_err());
        assert!(rlne(&x[..1], &x).is_err());
    }

    #[test]
    fn pearson_by_hand() {
        let a = [1.0, 2.0, 3.0];
        assert!((pearson(&a, &a).unwrap() - 1.0).abs() < 1e-15);
        assert!((pearson(&a, &[-1.0, -2.0, -3.0]).unwrap() + 1.0).abs() < 1e-15);
        assert!((pearson(&a, &[2.0, 4.0, 6.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(pearson(&a, &[1.0; 3]), Err(Error::DegenerateInput(_))));
        assert!(pearson(&[1.0], &[2.0]).is_err());
    }

    proptest! {
        #[test]
        fn rlne_expansion_identity(v in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64), 2..40)) {
            let x: Vec<C64> = v.iter().map(|t| c(t.0, t.1)).collect();
            let xh: Vec<C64> = v.iter().map(|t| c(t.2, t.3)).collect();
            let nx: f64 = x.iter().map(|z| z.norm_sqr()).sum();
            prop_assume!(nx > 1e-6);
            let nh: f64 = xh.iter().map(|z| z.norm_sqr()).sum();
            let inner: f64 = xh.iter().zip(&x).map(|(a, b)| (a * b.conj()).re).sum();
            let lhs = rlne(&xh, &x).unwrap().powi(2);
            let rhs = 1.0 - 2.0 * inner / nx + nh / nx;
            prop_assert!((lhs - rhs).abs() < 1e-9 * (1.0 + lhs));
        }

        #[test]
        fn pearson_affine_invariance(v in prop::collection::vec((-5.0..5.0f64, -5.0..5.0f64), 3..30),
                                     alpha in 0.1..10.0f64, shift in -5.0..5.0f64) {
            let a: Vec<f64> = v.iter().map(|t| t.0).collect();
            let b: Vec<f64> = v.iter().map(|t| t.1).collect();
            prop_assume!(pearson(&a, &b).is_ok());
            let r = pearson(&a, &b).unwrap();
            let pos: Vec<f64> = a.iter().map(|x| alpha * x + shift).collect();
            let neg: Vec<f64> = a.iter().map(|x| -alpha * x + shift).collect();
            prop_assert!((pearson(&pos, &b).unwrap() - r).abs() < 1e-9);
            prop_assert!((pearson(&neg, &b).unwrap() + r).abs() < 1e-9);
        }
    }
}
