use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::{check_inputs, check_truth, rel_change, rlne_against, IterationRecord, ReconResult};
use crate::error::{param, Result};
use crate::sampling::{zero_fill, SamplingMask};
use crate::signal::TimeSignal;
use crate::C64;

/// Iterative soft-thresholding settings. The threshold starts at the largest
/// spectral magnitude of the zero-filled data, shrinks by `decay` each
/// iteration and is floored at `noise_sigma·√N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsConfig {
    pub decay: f64,
    pub max_iters: usize,
    pub tol: f64,
    pub noise_sigma: f64,
}

impl Default for CsConfig {
    fn default() -> Self {
        Self {
            decay: 0.98,
            max_iters: 1000,
            tol: 1e-6,
            noise_sigma: 0.0,
        }
    }
}

impl CsConfig {
    fn validate(&self) -> Result<()> {
        if !(self.decay > 0.0 && self.decay < 1.0) {
            return Err(param(format!("decay must be in (0, 1), got {}", self.decay)));
        }
        if self.max_iters == 0 {
            return Err(param("max_iters must be >= 1"));
        }
        if !(self.tol > 0.0) || !(self.noise_sigma >= 0.0) {
            return Err(param("tol must be > 0 and noise_sigma >= 0"));
        }
        Ok(())
    }
}

/// Fourier-sparsity reconstruction: soft-threshold the DFT coefficients,
/// transform back and re-impose the measured samples.
pub fn cs_ist_reconstruct(
    y: &[C64],
    mask: &SamplingMask,
    cfg: &CsConfig,
    truth: Option<&TimeSignal>,
) -> Result<ReconResult> {
    cfg.validate()?;
    let n = mask.n();
    check_inputs(y, mask, n)?;
    check_truth(truth, n)?;

    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(n);
    let inverse = planner.plan_fft_inverse(n);
    let scale = 1.0 / n as f64;

    let mut x = zero_fill(y, mask)?.into_samples();
    let mut spec = x.clone();
    forward.process(&mut spec);
    let mut threshold = spec.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let floor = cfg.noise_sigma * (n as f64).sqrt();
    let mut history = Vec::new();
    let mut converged = false;

    if threshold == 0.0 {
        return Ok(ReconResult {
            x_hat: TimeSignal::from_samples(x)?,
            iterations: 0,
            history,
            converged: true,
        });
    }

    for _ in 0..cfg.max_iters {
        threshold = (threshold * cfg.decay).max(floor);
        let mut l1 = 0.0;
        for v in spec.iter_mut() {
            let mag = v.norm();
            if mag <= threshold {
                *v = C64::new(0.0, 0.0);
            } else {
                *v *= (mag - threshold) / mag;
                l1 += mag - threshold;
            }
        }
        let mut x_new = spec.clone();
        inverse.process(&mut x_new);
        x_new.iter_mut().for_each(|v| *v *= scale);
        for (&p, &v) in mask.positions().iter().zip(y) {
            x_new[p] = v;
        }

        let change = rel_change(&x_new, &x);
        x = x_new;
        history.push(IterationRecord {
            rel_change: change,
            factor_residual: None,
            nuclear_norm: None,
            rlne: rlne_against(&x, truth),
            spectral_l1: Some(l1),
        });
        if threshold <= floor && floor > 0.0 && change < cfg.tol {
            converged = true;
            break;
        }
        spec.copy_from_slice(&x);
        forward.process(&mut spec);
    }

    Ok(ReconResult {
        iterations: history.len(),
        x_hat: TimeSignal::from_samples(x)?,
        history,
        converged,
    })
}
