use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{dim, Result};
use crate::signal::ExponentialModel;

/// Absolute per-component errors, in the reference model's component order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterErrors {
    pub amplitude: Vec<f64>,
    pub damping: Vec<f64>,
    /// Wrapped to `(−π, π]` before taking the magnitude.
    pub phase: Vec<f64>,
    /// Circular distance on the unit frequency interval.
    pub frequency: Vec<f64>,
}

impl ParameterErrors {
    /// Mean error of each parameter: `[amplitude, damping, phase, frequency]`.
    pub fn means(&self) -> [f64; 4] {
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len().max(1) as f64;
        [
            mean(&self.amplitude),
            mean(&self.damping),
            mean(&self.phase),
            mean(&self.frequency),
        ]
    }
}

fn circular_frequency_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

fn wrapped_phase_gap(a: f64, b: f64) -> f64 {
    // Map into (−π, π].
    let mut d = (a - b).rem_euclid(TAU);
    if d > PI {
        d -= TAU;
    }
    d.abs()
}

/// Pairs reference components with estimates: reference components are
/// visited from largest amplitude down and each takes the unclaimed estimate
/// nearest in circular frequency. Returns, per reference component, the
/// index of its estimate.
pub fn match_components(est: &ExponentialModel, truth: &ExponentialModel) -> Result<Vec<usize>> {
    if est.len() != truth.len() {
        return Err(dim(format!(
            "estimate has {} components, reference {}",
            est.len(),
            truth.len()
        )));
    }
    let t = truth.components();
    let e = est.components();
    let mut order: Vec<usize> = (0..t.len()).collect();
    order.sort_by(|&a, &b| t[b].amplitude.total_cmp(&t[a].amplitude).then(a.cmp(&b)));
    let mut claimed = vec![false; e.len()];
    let mut assignment = vec![0usize; t.len()];
    for i in order {
        let k = (0..e.len())
            .filter(|&k| !claimed[k])
            .min_by(|&a, &b| {
                circular_frequency_gap(e[a].frequency, t[i].frequency)
                    .total_cmp(&circular_frequency_gap(e[b].frequency, t[i].frequency))
            })
            .expect("equal component counts");
        claimed[k] = true;
        assignment[i] = k;
    }
    Ok(assignment)
}

pub fn parameter_errors(est: &ExponentialModel, truth: &ExponentialModel) -> Result<ParameterErrors> {
    let assignment = match_components(est, truth)?;
    let e = est.components();
    let mut out = ParameterErrors {
        amplitude: Vec::with_capacity(truth.len()),
        damping: Vec::with_capacity(truth.len()),
        phase: Vec::with_capacity(truth.len()),
        frequency: Vec::with_capacity(truth.len()),
    };
    for (t, &k) in truth.components().iter().zip(&assignment) {
        let c = &e[k];
        out.amplitude.push((c.amplitude - t.amplitude).abs());
        out.damping.push(if c.damping == t.damping {
            0.0
        } else {
            (c.damping - t.damping).abs()
        });
        out.phase.push(wrapped_phase_gap(c.phase, t.phase));
        out.frequency.push(circular_frequency_gap(c.frequency, t.frequency));
    }
    Ok(out)
}
