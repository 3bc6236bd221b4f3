//! Non-uniform sampling schedules and the undersampling operator `𝒰`.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::error::{dim, param, Error, Result};
use crate::rng::{rng_from_seed, unit_f64, Rng};
use crate::signal::TimeSignal;
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pattern {
    PoissonGap,
    UniformRandom,
    Truncation,
}

impl Pattern {
    pub const ALL: [Pattern; 3] = [Pattern::PoissonGap, Pattern::UniformRandom, Pattern::Truncation];

    pub fn name(&self) -> &'static str {
        match self {
            Pattern::PoissonGap => "poisson_gap",
            Pattern::UniformRandom => "uniform_random",
            Pattern::Truncation => "truncation",
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Pattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "poisson_gap" | "poisson-gap" | "poisson" => Ok(Pattern::PoissonGap),
            "uniform_random" | "uniform-random" | "uniform" => Ok(Pattern::UniformRandom),
            "truncation" => Ok(Pattern::Truncation),
            other => Err(param(format!("unknown sampling pattern '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaskSpec {
    pub n: usize,
    /// Fraction of points kept, `(0, 1]`.
    pub rate: f64,
    pub pattern: Pattern,
    pub seed: u64,
}

impl MaskSpec {
    pub fn new(n: usize, rate: f64, pattern: Pattern, seed: u64) -> Self {
        Self {
            n,
            rate,
            pattern,
            seed,
        }
    }

    /// Number of sampled points, `round(rate·n)` with ties rounded up.
    pub fn sample_count(&self) -> Result<usize> {
        if !(self.rate > 0.0 && self.rate <= 1.0) {
            return Err(param(format!("sampling rate must be in (0, 1], got {}", self.rate)));
        }
        let target = self.rate * self.n as f64;
        if target < 1.0 {
            return Err(param(format!(
                "rate {} keeps fewer than one of {} points",
                self.rate, self.n
            )));
        }
        Ok(((target + 0.5).floor() as usize).min(self.n))
    }
}

/// A set of sampled time positions.
///
/// Positions are stored zero-based and strictly increasing; the one-based
/// indices used by the file formats are available through
/// [`SamplingMask::indices_one_based`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplingMask {
    n: usize,
    positions: Vec<usize>,
    pattern: Pattern,
}

impl SamplingMask {
    /// Builds a mask from zero-based positions, validating them.
    pub fn from_positions(n: usize, positions: Vec<usize>, pattern: Pattern) -> Result<Self> {
        if positions.windows(2).any(|w| w[0] >= w[1]) {
            return Err(param("mask positions must be strictly increasing"));
        }
        if positions.last().is_some_and(|&p| p >= n) {
            return Err(param(format!("mask position out of range for length {n}")));
        }
        Ok(Self {
            n,
            positions,
            pattern,
        })
    }

    /// Builds a mask from one-based indices.
    pub fn from_one_based(n: usize, indices: &[u32], pattern: Pattern) -> Result<Self> {
        if indices.contains(&0) {
            return Err(param("one-based mask index 0"));
        }
        Self::from_positions(n, indices.iter().map(|&i| i as usize - 1).collect(), pattern)
    }

    /// The mask keeping every point.
    pub fn full(n: usize) -> Self {
        Self {
            n,
            positions: (0..n).collect(),
            pattern: Pattern::Truncation,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of sampled points `M`.
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn pattern(&self) -> Pattern {
        self.pattern
    }

    /// Zero-based sampled positions.
    pub fn positions(&self) -> &[usize] {
        &self.positions
    }

    pub fn indices_one_based(&self) -> Vec<u32> {
        self.positions.iter().map(|&p| p as u32 + 1).collect()
    }

    /// Indicator vector of sampled positions.
    pub fn indicator(&self) -> Vec<bool> {
        let mut out = vec![false; self.n];
        for &p in &self.positions {
            out[p] = true;
        }
        out
    }

    pub fn rate(&self) -> f64 {
        self.len() as f64 / self.n as f64
    }
}

/// Dispatches on `spec.pattern`.
pub fn make_mask(spec: &MaskSpec) -> Result<SamplingMask> {
    match spec.pattern {
        Pattern::PoissonGap => poisson_gap_mask(spec),
        Pattern::UniformRandom => uniform_mask(spec),
        Pattern::Truncation => truncation_mask(spec),
    }
}

fn full_if_complete(spec: &MaskSpec, m: usize) -> Option<SamplingMask> {
    (m == spec.n).then(|| SamplingMask {
        n: spec.n,
        positions: (0..spec.n).collect(),
        pattern: spec.pattern,
    })
}

/// Poisson-gap schedule.
///
/// Walking forward from position 0, each gap is Poisson distributed with
/// mean `λ·sin(π/2 · (p + ½)/(n + 1))`, so gaps are short at early times and
/// grow towards the end. The multiplier `λ` is bisected until exactly `M`
/// points fit. Within one attempt the uniforms driving the gaps are fixed,
/// so the point count is monotone in `λ`. When the count jumps over `M`, the
/// next attempt draws fresh uniforms from the same seeded stream.
pub fn poisson_gap_mask(spec: &MaskSpec) -> Result<SamplingMask> {
    let m = spec.sample_count()?;
    if let Some(full) = full_if_complete(spec, m) {
        return Ok(full);
    }
    let n = spec.n;
    let mut rng = rng_from_seed(spec.seed);
    // With the uniforms fixed, the point count is a step function of λ that
    // can jump over M. When that happens, a fresh set of uniforms from the
    // same stream is tried, so the result stays a function of the seed.
    for _ in 0..MAX_POISSON_ATTEMPTS {
        // At most n gaps are ever drawn.
        let uniforms: Vec<f64> = (0..n).map(|_| unit_f64(&mut rng)).collect();
        if let Some(positions) = poisson_gap_attempt(n, m, &uniforms)? {
            return Ok(SamplingMask {
                n,
                positions,
                pattern: Pattern::PoissonGap,
            });
        }
    }
    Err(Error::Numeric(format!(
        "Poisson-gap sampling could not place exactly {m} of {n} points"
    )))
}

const MAX_POISSON_ATTEMPTS: usize = 1000;

fn poisson_gap_attempt(n: usize, m: usize, uniforms: &[f64]) -> Result<Option<Vec<usize>>> {
    let walk = |lambda: f64| -> Vec<usize> {
        let mut positions = Vec::with_capacity(m + 1);
        let mut pos = 0usize;
        let mut k = 0usize;
        while pos < n {
            positions.push(pos);
            let weight = (FRAC_PI_2 * (pos as f64 + 0.5) / (n as f64 + 1.0)).sin();
            let gap = poisson_quantile(lambda * weight, uniforms[k], n);
            k += 1;
            pos += 1 + gap;
        }
        positions
    };

    // λ = 0 gives every point; grow an upper bracket until too few remain.
    let mut lo = 0.0f64;
    let mut hi = (n as f64 / m as f64).max(1.0);
    while walk(hi).len() > m {
        lo = hi;
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::Numeric("Poisson-gap bracket did not close".into()));
        }
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        let positions = walk(mid);
        match positions.len().cmp(&m) {
            std::cmp::Ordering::Equal => return Ok(Some(positions)),
            std::cmp::Ordering::Greater => lo = mid,
            std::cmp::Ordering::Less => hi = mid,
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    Ok(None)
}

/// Inverse-CDF Poisson draw, capped at `cap`.
fn poisson_quantile(lambda: f64, u: f64, cap: usize) -> usize {
    if lambda <= 0.0 {
        return 0;
    }
    let mut p = (-lambda).exp();
    if p == 0.0 {
        // The mean is far beyond any gap that still fits.
        return cap;
    }
    let mut cdf = p;
    let mut k = 0usize;
    while u >= cdf && k < cap {
        k += 1;
        p *= lambda / k as f64;
        cdf += p;
        if p == 0.0 {
            break;
        }
    }
    k
}

/// First point plus `M − 1` points drawn uniformly without replacement.
pub fn uniform_mask(spec: &MaskSpec) -> Result<SamplingMask> {
    let m = spec.sample_count()?;
    if let Some(full) = full_if_complete(spec, m) {
        return Ok(full);
    }
    let mut rng: Rng = rng_from_seed(spec.seed);
    let mut positions: Vec<usize> = index::sample(&mut rng, spec.n - 1, m - 1)
        .into_iter()
        .map(|p| p + 1)
        .collect();
    positions.push(0);
    positions.sort_unstable();
    Ok(SamplingMask {
        n: spec.n,
        positions,
        pattern: Pattern::UniformRandom,
    })
}

/// The first `M` points. The seed is ignored.
pub fn truncation_mask(spec: &MaskSpec) -> Result<SamplingMask> {
    let m = spec.sample_count()?;
    Ok(SamplingMask {
        n: spec.n,
        positions: (0..m).collect(),
        pattern: Pattern::Truncation,
    })
}

/// `y = 𝒰x`: the samples at the mask positions, in mask order.
pub fn undersample(x: &TimeSignal, mask: &SamplingMask) -> Result<Vec<C64>> {
    if mask.n() != x.len() {
        return Err(dim(format!(
            "mask covers {} points, signal has {}",
            mask.n(),
            x.len()
        )));
    }
    Ok(mask.positions().iter().map(|&p| x.samples()[p]).collect())
}

/// `𝒰*y`: measurements placed at their positions, zeros elsewhere.
pub fn zero_fill(y: &[C64], mask: &SamplingMask) -> Result<TimeSignal> {
    if y.len() != mask.len() {
        return Err(dim(format!(
            "{} measurements for a mask of {} points",
            y.len(),
            mask.len()
        )));
    }
    let mut out = vec![C64::new(0.0, 0.0); mask.n()];
    for (&p, &v) in mask.positions().iter().zip(y) {
        out[p] = v;
    }
    TimeSignal::from_samples(out)
}
