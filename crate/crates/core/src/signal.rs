//! Damped complex exponential signals.
//!
//! A signal is a sum of `J` components
//! `A e^{iφ} e^{-nΔt/τ} e^{i2πf nΔt}` evaluated at `n = 1..N`. The time index
//! starts at one, so the first stored sample already carries one step of
//! decay and rotation.

use std::f64::consts::TAU;

use rand::seq::index;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{param, Result};
use crate::rng::{rng_from_seed, unit_f64};
use crate::C64;

/// One damped exponential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentialComponent {
    pub amplitude: f64,
    /// Radians in `[0, 2π)`.
    pub phase: f64,
    /// Decay constant in samples; `f64::INFINITY` marks an undamped component.
    pub damping: f64,
    /// Normalized frequency in cycles per sample, `[0, 1)`.
    pub frequency: f64,
}

impl ExponentialComponent {
    pub fn new(amplitude: f64, phase: f64, damping: f64, frequency: f64) -> Result<Self> {
        let c = Self {
            amplitude,
            phase,
            damping,
            frequency,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.amplitude.is_finite() && self.amplitude > 0.0) {
            return Err(param(format!("amplitude must be > 0, got {}", self.amplitude)));
        }
        if !(0.0..TAU).contains(&self.phase) {
            return Err(param(format!("phase must be in [0, 2π), got {}", self.phase)));
        }
        if !(self.damping > 0.0) {
            return Err(param(format!("damping must be > 0, got {}", self.damping)));
        }
        if !(0.0..1.0).contains(&self.frequency) {
            return Err(param(format!(
                "frequency must be in [0, 1), got {}",
                self.frequency
            )));
        }
        Ok(())
    }

    /// Complex amplitude `A e^{iφ}`.
    pub fn complex_amplitude(&self) -> C64 {
        C64::from_polar(self.amplitude, self.phase)
    }

    /// Pole `e^{-Δt/τ} e^{i2πfΔt}`.
    pub fn pole(&self, dt: f64) -> C64 {
        C64::from_polar((-dt / self.damping).exp(), TAU * self.frequency * dt)
    }

    /// Value at time index `n` (one-based).
    pub fn eval(&self, n: usize, dt: f64) -> C64 {
        let t = n as f64 * dt;
        self.complex_amplitude() * C64::from_polar((-t / self.damping).exp(), TAU * self.frequency * t)
    }
}

/// A sum of exponentials with its sampling interval.
///
/// Components are kept sorted by ascending frequency so that two models
/// describing the same signal compare equal component by component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentialModel {
    components: Vec<ExponentialComponent>,
    dt: f64,
}

impl ExponentialModel {
    pub fn new(mut components: Vec<ExponentialComponent>, dt: f64) -> Result<Self> {
        if components.is_empty() {
            return Err(param("a model needs at least one component"));
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(param(format!("sampling interval must be > 0, got {dt}")));
        }
        for c in &components {
            c.validate()?;
        }
        components.sort_by(|a, b| a.frequency.total_cmp(&b.frequency));
        Ok(Self { components, dt })
    }

    /// Builds a model without validating component ranges. Used by estimators
    /// whose output may legitimately sit on a boundary (zero amplitude).
    pub(crate) fn from_estimates(mut components: Vec<ExponentialComponent>, dt: f64) -> Self {
        components.sort_by(|a, b| a.frequency.total_cmp(&b.frequency));
        Self { components, dt }
    }

    pub fn components(&self) -> &[ExponentialComponent] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Smallest circular distance between two component frequencies, or
    /// `1.0` for a single component.
    pub fn min_frequency_gap(&self) -> f64 {
        let f: Vec<f64> = self.components.iter().map(|c| c.frequency).collect();
        if f.len() < 2 {
            return 1.0;
        }
        // Sorted, so neighbours plus the wrap-around pair cover every minimum.
        let wrap = f[0] + 1.0 - f[f.len() - 1];
        f.windows(2).map(|w| w[1] - w[0]).fold(wrap, f64::min)
    }

    /// Union of two models sharing the same sampling interval.
    pub fn merged(&self, other: &ExponentialModel) -> Result<Self> {
        if self.dt != other.dt {
            return Err(param("cannot merge models with different sampling intervals"));
        }
        let mut components = self.components.clone();
        components.extend_from_slice(&other.components);
        Self::new(components, self.dt)
    }
}

/// A uniformly sampled complex time-domain signal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSignal {
    samples: Vec<C64>,
    dt: f64,
}

impl TimeSignal {
    pub fn new(samples: Vec<C64>, dt: f64) -> Result<Self> {
        if samples.len() < 2 {
            return Err(param(format!(
                "a signal needs at least 2 samples, got {}",
                samples.len()
            )));
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(param(format!("sampling interval must be > 0, got {dt}")));
        }
        if let Some(i) = samples.iter().position(|s| !(s.re.is_finite() && s.im.is_finite())) {
            return Err(param(format!("sample {i} is not finite")));
        }
        Ok(Self { samples, dt })
    }

    /// Signal with unit sampling interval.
    pub fn from_samples(samples: Vec<C64>) -> Result<Self> {
        Self::new(samples, 1.0)
    }

    pub fn samples(&self) -> &[C64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<C64> {
        self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        norm2(&self.samples)
    }
}

pub(crate) fn norm2(v: &[C64]) -> f64 {
    v.iter().map(|s| s.norm_sqr()).sum::<f64>().sqrt()
}

/// Closed interval used by [`GeneratorSpec`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    fn check(&self, name: &str) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite()) || self.lo > self.hi {
            return Err(param(format!(
                "{name} range [{}, {}] is empty",
                self.lo, self.hi
            )));
        }
        Ok(())
    }

    fn sample(&self, u: f64) -> f64 {
        self.lo + (self.hi - self.lo) * u
    }
}

/// Ranges for random model generation. Defaults reproduce the synthetic
/// training distribution: `J ∈ [1, 10]`, `A ∈ [0.05, 1]`, `f ∈ [0, 1)`,
/// `τ ∈ [10, 179.2]`, `φ ∈ [0, 2π)` and `N = 255`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    /// Inclusive bounds on the number of components.
    pub j_range: (usize, usize),
    pub amplitude_range: Interval,
    pub frequency_range: Interval,
    pub damping_range: Interval,
    pub phase_range: Interval,
    pub n_points: usize,
}

impl Default for GeneratorSpec {
    fn default() -> Self {
        Self {
            j_range: (1, 10),
            amplitude_range: Interval::new(0.05, 1.0),
            frequency_range: Interval::new(0.0, 1.0),
            damping_range: Interval::new(10.0, 179.2),
            phase_range: Interval::new(0.0, TAU),
            n_points: 255,
        }
    }
}

impl GeneratorSpec {
    /// Default ranges with a fixed number of components.
    pub fn with_components(j: usize) -> Self {
        Self {
            j_range: (j, j),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.j_range;
        if lo < 1 || lo > hi {
            return Err(param(format!("component range [{lo}, {hi}] is empty")));
        }
        self.amplitude_range.check("amplitude")?;
        self.frequency_range.check("frequency")?;
        self.damping_range.check("damping")?;
        self.phase_range.check("phase")?;
        if self.amplitude_range.lo <= 0.0 {
            return Err(param("amplitudes must be drawn from positive values"));
        }
        if self.damping_range.lo <= 0.0 {
            return Err(param("dampings must be drawn from positive values"));
        }
        if self.n_points < 2 {
            return Err(param("n_points must be at least 2"));
        }
        Ok(())
    }
}

/// Evaluates the model at `n = 1..=n_points`.
pub fn synthesize(model: &ExponentialModel, n_points: usize) -> Result<TimeSignal> {
    if n_points < 2 {
        return Err(param(format!("n_points must be at least 2, got {n_points}")));
    }
    for c in model.components() {
        c.validate()?;
    }
    let dt = model.dt();
    let samples = (1..=n_points)
        .map(|n| model.components().iter().map(|c| c.eval(n, dt)).sum())
        .collect();
    TimeSignal::new(samples, dt)
}

/// Draws a model with every parameter uniform on its range.
pub fn random_model(spec: &GeneratorSpec, seed: u64) -> Result<ExponentialModel> {
    spec.validate()?;
    let mut rng = rng_from_seed(seed);
    let (lo, hi) = spec.j_range;
    let span = (hi - lo + 1) as f64;
    let j = lo + ((unit_f64(&mut rng) * span) as usize).min(hi - lo);
    let components = (0..j)
        .map(|_| {
            let amplitude = spec.amplitude_range.sample(unit_f64(&mut rng));
            let frequency = spec.frequency_range.sample(unit_f64(&mut rng)).rem_euclid(1.0);
            let damping = spec.damping_range.sample(unit_f64(&mut rng));
            let phase = spec.phase_range.sample(unit_f64(&mut rng)).rem_euclid(TAU);
            ExponentialComponent::new(amplitude, phase, damping, frequency)
        })
        .collect::<Result<Vec<_>>>()?;
    ExponentialModel::new(components, 1.0)
}

/// Adds independent `N(0, sigma²)` noise to the real and imaginary part of
/// every sample.
pub fn add_noise(signal: &TimeSignal, sigma: f64, seed: u64) -> Result<TimeSignal> {
    let noisy = noisy_samples(signal.samples(), sigma, seed)?;
    TimeSignal::new(noisy, signal.dt())
}

/// Noise model applied to bare sample vectors, such as measurements.
pub fn noisy_samples(samples: &[C64], sigma: f64, seed: u64) -> Result<Vec<C64>> {
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(param(format!("noise sigma must be >= 0, got {sigma}")));
    }
    if sigma == 0.0 {
        return Ok(samples.to_vec());
    }
    let normal = Normal::new(0.0, sigma).map_err(|e| param(e.to_string()))?;
    let mut rng = rng_from_seed(seed);
    Ok(samples
        .iter()
        .map(|s| {
            let re = normal.sample(&mut rng);
            let im = normal.sample(&mut rng);
            s + C64::new(re, im)
        })
        .collect())
}

/// Adds uniform outliers to `⌊rate·N⌋` positions chosen without replacement.
///
/// The real part of each corruption is uniform on `±c·|mean(Re x)|`, the
/// imaginary part on `±c·|mean(Im x)|`.
pub fn corrupt_outliers(
    signal: &TimeSignal,
    rate: f64,
    scale_c: f64,
    seed: u64,
) -> Result<TimeSignal> {
    if !(0.0..=1.0).contains(&rate) {
        return Err(param(format!("outlier rate must be in [0, 1], got {rate}")));
    }
    if !(scale_c.is_finite() && scale_c > 0.0) {
        return Err(param(format!("outlier scale must be > 0, got {scale_c}")));
    }
    let n = signal.len();
    let count = (rate * n as f64).floor() as usize;
    let mut samples = signal.samples().to_vec();
    if count == 0 {
        return TimeSignal::new(samples, signal.dt());
    }
    let mean = samples.iter().sum::<C64>() / n as f64;
    let half_re = scale_c * mean.re.abs();
    let half_im = scale_c * mean.im.abs();
    let mut rng = rng_from_seed(seed);
    let mut positions = index::sample(&mut rng, n, count).into_vec();
    positions.sort_unstable();
    for pos in positions {
        let re = half_re * (2.0 * unit_f64(&mut rng) - 1.0);
        let im = half_im * (2.0 * unit_f64(&mut rng) - 1.0);
        samples[pos] += C64::new(re, im);
    }
    TimeSignal::new(samples, signal.dt())
}

/// Reference models used by the single-case experiments.
pub mod presets {
    use std::f64::consts::{PI, TAU};

    use super::{ExponentialComponent, ExponentialModel};

    fn build(rows: &[(f64, f64, f64, f64)]) -> ExponentialModel {
        let components = rows
            .iter()
            .map(|&(a, tau, phi, f)| {
                ExponentialComponent::new(a, phi.rem_euclid(TAU), tau, f)
                    .expect("preset parameters are valid")
            })
            .collect();
        ExponentialModel::new(components, 1.0).expect("preset model is valid")
    }

    /// Five zero-phase peaks whose weakest peak is about twenty times lower
    /// than the strongest.
    pub fn weak_peaks() -> ExponentialModel {
        build(&[
            (0.100, 50.0, 0.0, 0.1655),
            (0.300, 75.0, 0.0, 0.3349),
            (0.500, 100.0, 0.0, 0.5004),
            (0.700, 125.0, 0.0, 0.6698),
            (1.000, 150.0, 0.0, 0.8353),
        ])
    }

    /// Five peaks with staggered phases, used for the λ sweep and the
    /// per-block diagnostics.
    pub fn five_peaks() -> ExponentialModel {
        build(&[
            (0.5145, 26.47, 2.0 * PI / 5.0, 0.1532),
            (0.6623, 35.63, 4.0 * PI / 5.0, 0.3135),
            (0.7253, 48.78, 6.0 * PI / 5.0, 0.4716),
            (0.7825, 61.51, 8.0 * PI / 5.0, 0.6124),
            // 2π wraps to zero.
            (0.9872, 81.50, 2.0 * PI, 0.7831),
        ])
    }

    /// Four-peak model used for parameter estimation scoring.
    pub fn four_peaks() -> ExponentialModel {
        build(&[
            (0.717, 173.24, 3.5281, 0.0706),
            (1.000, 126.44, 5.6890, 0.1534),
            (0.601, 31.59, 2.1928, 0.4166),
            (0.454, 107.82, 3.8518, 0.4833),
        ])
    }

    /// Looks a preset up by its command-line name.
    pub fn by_name(name: &str) -> Option<ExponentialModel> {
        match name {
            "weak-peaks" => Some(weak_peaks()),
            "five-peaks" => Some(five_peaks()),
            "four-peaks" => Some(four_peaks()),
            _ => None,
        }
    }

    pub const NAMES: [&str; 3] = ["weak-peaks", "five-peaks", "four-peaks"];
}
