use crate::error::{dim, param, Result};
use crate::sampling::SamplingMask;
use crate::signal::TimeSignal;
use crate::C64;

/// Blends an estimate with the measurements at the sampled positions:
/// `(x̃_n + λ y_n) / (1 + λ)` for `n ∈ Ω`, `x̃_n` elsewhere.
pub fn data_consistency(
    x_tilde: &TimeSignal,
    y: &[C64],
    mask: &SamplingMask,
    lambda: f64,
) -> Result<TimeSignal> {
    let mut out = x_tilde.samples().to_vec();
    data_consistency_samples(&mut out, y, mask, lambda)?;
    TimeSignal::new(out, x_tilde.dt())
}

/// In-place form of [`data_consistency`] on a bare sample vector.
pub fn data_consistency_samples(
    x: &mut [C64],
    y: &[C64],
    mask: &SamplingMask,
    lambda: f64,
) -> Result<()> {
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(param(format!("lambda must be >= 0, got {lambda}")));
    }
    if mask.n() != x.len() || mask.len() != y.len() {
        return Err(dim(format!(
            "mask {}/{} does not fit signal {} and measurements {}",
            mask.len(),
            mask.n(),
            x.len(),
            y.len()
        )));
    }
    let denom = 1.0 + lambda;
    for (&p, &v) in mask.positions().iter().zip(y) {
        x[p] = (x[p] + v * lambda) / denom;
    }
    Ok(())
}
