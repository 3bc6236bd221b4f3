use serde::{Deserialize, Serialize};

use super::{pearson, Spectrum};
use crate::error::{dim, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    /// Zero-based bin of the local maximum.
    pub bin: usize,
    pub magnitude: f64,
    /// Normalized frequency refined by parabolic interpolation.
    pub frequency: f64,
}

/// Local maxima of a magnitude spectrum, sorted by bin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakSet {
    /// Length of the spectrum the peaks came from.
    pub n: usize,
    pub peaks: Vec<Peak>,
}

impl PeakSet {
    pub fn len(&self) -> usize {
        self.peaks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.peaks.is_empty()
    }

    /// The peak with the smallest magnitude.
    pub fn weakest(&self) -> Option<usize> {
        (0..self.peaks.len()).min_by(|&a, &b| self.peaks[a].magnitude.total_cmp(&self.peaks[b].magnitude))
    }
}

/// Local maxima above `floor`. Neighbours wrap around, since the DFT is
/// periodic. The frequency is refined with a three-point parabola.
pub fn detect_peaks(s: &Spectrum, floor: f64) -> PeakSet {
    let m = s.magnitude();
    let n = m.len();
    let mut peaks = Vec::new();
    if n < 3 {
        return PeakSet { n, peaks };
    }
    for k in 0..n {
        let left = m[(k + n - 1) % n];
        let right = m[(k + 1) % n];
        let v = m[k];
        // Strict on the left, non-strict on the right: a flat top counts once.
        if v > floor && v > left && v >= right {
            let denom = left - 2.0 * v + right;
            let delta = if denom != 0.0 {
                (0.5 * (left - right) / denom).clamp(-0.5, 0.5)
            } else {
                0.0
            };
            peaks.push(Peak {
                bin: k,
                magnitude: v,
                frequency: ((k as f64 + delta) / n as f64).rem_euclid(1.0),
            });
        }
    }
    PeakSet { n, peaks }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeakPair {
    /// Index into the reference peak set.
    pub truth: usize,
    /// Index into the reconstructed peak set.
    pub recon: usize,
    /// Circular bin distance.
    pub distance: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakMatching {
    pub pairs: Vec<PeakPair>,
    /// Reference peaks with no reconstruction within `d_max`.
    pub missing: Vec<usize>,
}

fn circular_distance(a: usize, b: usize, n: usize) -> usize {
    let d = a.abs_diff(b);
    d.min(n - d)
}

/// Greedy nearest-bin matching. Reference peaks are visited from strongest
/// to weakest and each claims the closest unclaimed reconstructed peak; a
/// reference peak whose closest candidate is farther than `d_max` bins is
/// reported missing.
pub fn match_peaks(recon: &PeakSet, truth: &PeakSet, d_max: f64) -> PeakMatching {
    let n = truth.n.max(recon.n).max(1);
    let mut order: Vec<usize> = (0..truth.len()).collect();
    order.sort_by(|&a, &b| {
        truth.peaks[b]
            .magnitude
            .total_cmp(&truth.peaks[a].magnitude)
            .then(a.cmp(&b))
    });
    let mut claimed = vec![false; recon.len()];
    let mut pairs = Vec::new();
    let mut missing = Vec::new();
    for t in order {
        let best = (0..recon.len())
            .filter(|&r| !claimed[r])
            .map(|r| (circular_distance(truth.peaks[t].bin, recon.peaks[r].bin, n), r))
            .min();
        match best {
            Some((d, r)) if d as f64 <= d_max => {
                claimed[r] = true;
                pairs.push(PeakPair {
                    truth: t,
                    recon: r,
                    distance: d,
                });
            }
            _ => missing.push(t),
        }
    }
    pairs.sort_by_key(|p| p.truth);
    missing.sort_unstable();
    PeakMatching { pairs, missing }
}

/// Pearson correlation of the magnitude spectra over `[c − w, c + w]` around
/// each reference peak, clamped to the spectrum. A window in which the
/// reconstruction is flat carries no shape information and scores 0.
pub fn peak_correlation(
    recon: &Spectrum,
    truth: &Spectrum,
    truth_peaks: &PeakSet,
    window_w: usize,
) -> Result<Vec<f64>> {
    if recon.len() != truth.len() {
        return Err(dim(format!(
            "spectra have {} and {} bins",
            recon.len(),
            truth.len()
        )));
    }
    let ra = recon.magnitude();
    let ta = truth.magnitude();
    let n = ta.len();
    truth_peaks
        .peaks
        .iter()
        .map(|p| {
            let lo = p.bin.saturating_sub(window_w);
            let hi = (p.bin + window_w).min(n - 1);
            match pearson(&ra[lo..=hi], &ta[lo..=hi]) {
                Ok(r) => Ok(r),
                Err(crate::Error::DegenerateInput(_)) => Ok(0.0),
                Err(e) => Err(e),
            }
        })
        .collect()
}
