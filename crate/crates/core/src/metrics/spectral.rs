use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::hankel::{hankelize, HankelShape};
use crate::signal::TimeSignal;
use crate::solvers::singular_values;
use crate::C64;

/// Unnormalized forward DFT; bin `k` (zero-based) sits at normalized
/// frequency `k / N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub bins: Vec<C64>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }

    pub fn magnitude(&self) -> Vec<f64> {
        self.bins.iter().map(|v| v.norm()).collect()
    }

    pub fn bin_frequency(&self, bin: f64) -> f64 {
        bin / self.len() as f64
    }
}

pub fn spectrum(x: &TimeSignal) -> Spectrum {
    let mut bins = x.samples().to_vec();
    FftPlanner::<f64>::new()
        .plan_fft_forward(bins.len())
        .process(&mut bins);
    Spectrum { bins }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HankelDiagnostics {
    /// Singular values of `ℛx`, descending.
    pub singular_values: Vec<f64>,
    pub nuclear_norm: f64,
}

/// Singular spectrum and nuclear norm of the Hankel lift.
pub fn hankel_diagnostics(x: &[C64], shape: HankelShape) -> Result<HankelDiagnostics> {
    let s = singular_values(&hankelize(x, shape)?)?;
    Ok(HankelDiagnostics {
        nuclear_norm: s.iter().sum(),
        singular_values: s,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{synthesize, ExponentialComponent, ExponentialModel};

    #[test]
    fn constant_signal_is_dc() {
        let x = TimeSignal::from_samples(vec![C64::new(1.0, 0.0); 16]).unwrap();
        let m = spectrum(&x).magnitude();
        assert!((m[0] - 16.0).abs() < 1e-12);
        assert!(m[1..].iter().all(|v| *v < 1e-12));
    }

    #[test]
    fn on_grid_tone_lands_in_its_bin() {
        let model =
            ExponentialModel::new(vec![ExponentialComponent::new(1.0, 0.0, f64::INFINITY, 0.25).unwrap()], 1.0)
                .unwrap();
        let x = synthesize(&model, 256).unwrap();
        let m = spectrum(&x).magnitude();
        let argmax = (0..256).max_by(|&a, &b| m[a].total_cmp(&m[b])).unwrap();
        // Zero-based bin 64 is the 65th bin.
        assert_eq!(argmax, 64);
    }

    #[test]
    fn parseval() {
        let x = synthesize(&crate::signal::presets::five_peaks(), 255).unwrap();
        let s = spectrum(&x);
        let es: f64 = s.bins.iter().map(|v| v.norm_sqr()).sum();
        assert!((es - 255.0 * x.norm().powi(2)).abs() < 1e-9 * es);
    }

    #[test]
    fn zero_signal_diagnostics() {
        let d = hankel_diagnostics(&vec![C64::new(0.0, 0.0); 31], HankelShape::for_len(31).unwrap()).unwrap();
        assert!(d.singular_values.iter().all(|&s| s == 0.0));
        assert_eq!(d.nuclear_norm, 0.0);
    }

    #[test]
    fn single_exponential_is_rank_one() {
        let model =
            ExponentialModel::new(vec![ExponentialComponent::new(1.0, 0.5, 40.0, 0.3).unwrap()], 1.0)
                .unwrap();
        let x = synthesize(&model, 255).unwrap();
        let d = hankel_diagnostics(x.samples(), HankelShape::for_len(255).unwrap()).unwrap();
        let above = d
            .singular_values
            .iter()
            .filter(|&&s| s > 1e-10 * d.singular_values[0])
            .count();
        assert_eq!(above, 1);
    }

    #[test]
    fn global_phase_leaves_singular_values() {
        let x = synthesize(&crate::signal::presets::five_peaks(), 63).unwrap();
        let rot = C64::from_polar(1.0, 1.234);
        let y: Vec<C64> = x.samples().iter().map(|v| v * rot).collect();
        let shape = HankelShape::for_len(63).unwrap();
        let a = hankel_diagnostics(x.samples(), shape).unwrap();
        let b = hankel_diagnostics(&y, shape).unwrap();
        for (p, q) in a.singular_values.iter().zip(&b.singular_values) {
            assert!((p - q).abs() < 1e-12);
        }
    }
}
