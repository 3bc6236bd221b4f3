//! Single reconstruction with a full diagnostic dump.

use hankel_core::metrics::{
    detect_peaks, hankel_diagnostics, match_peaks, peak_correlation, rlne, spectrum, PeakMatching, PeakSet,
};
use hankel_core::sampling::{make_mask, undersample, zero_fill};
use hankel_core::signal::{add_noise, synthesize};
use hankel_core::solvers::IterationRecord;
use hankel_core::{ExponentialModel, HankelShape, MaskSpec, Pattern, SamplingMask, TimeSignal, C64};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::method::{reconstruct, Method, SolverOverrides};

pub const DEFAULT_D_MAX: f64 = 3.0;
pub const DEFAULT_WINDOW: usize = 10;

/// Peaks lower than this fraction of the tallest reference peak are ignored,
/// which keeps truncation ripple out of noiseless spectra.
const RELATIVE_PEAK_FLOOR: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseSpec {
    pub model: ExponentialModel,
    pub n_points: usize,
    pub rate: f64,
    pub pattern: Pattern,
    pub mask_seed: u64,
    pub noise_sigma: f64,
    pub noise_seed: u64,
    pub method: Method,
    #[serde(default)]
    pub overrides: SolverOverrides,
    pub d_max: f64,
    pub window_w: usize,
}

impl CaseSpec {
    pub fn new(model: ExponentialModel, method: Method, rate: f64) -> Self {
        Self {
            model,
            n_points: 255,
            rate,
            pattern: Pattern::PoissonGap,
            mask_seed: 0,
            noise_sigma: 0.05,
            noise_seed: 1,
            method,
            overrides: SolverOverrides::default(),
            d_max: DEFAULT_D_MAX,
            window_w: DEFAULT_WINDOW,
        }
    }
}

/// Peak detection, matching and windowed correlation of a reconstruction
/// against its reference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakReport {
    pub floor: f64,
    pub truth: PeakSet,
    pub recon: PeakSet,
    pub matching: PeakMatching,
    /// Correlation around each reference peak, in reference order.
    pub correlation: Vec<f64>,
    /// Correlation around the weakest reference peak.
    pub weakest_correlation: Option<f64>,
}

/// Default detection floor: three noise standard deviations of a DFT bin
/// (`3σ√N`), and at least 1% of the tallest reference bin.
pub fn peak_floor(truth_magnitude: &[f64], noise_sigma: f64) -> f64 {
    let max = truth_magnitude.iter().copied().fold(0.0, f64::max);
    (3.0 * noise_sigma * (truth_magnitude.len() as f64).sqrt()).max(RELATIVE_PEAK_FLOOR * max)
}

pub fn peak_report(
    recon: &TimeSignal,
    truth: &TimeSignal,
    noise_sigma: f64,
    d_max: f64,
    window_w: usize,
) -> Result<PeakReport> {
    let st = spectrum(truth);
    let sr = spectrum(recon);
    let floor = peak_floor(&st.magnitude(), noise_sigma);
    let truth_peaks = detect_peaks(&st, floor);
    let recon_peaks = detect_peaks(&sr, floor);
    let matching = match_peaks(&recon_peaks, &truth_peaks, d_max);
    let correlation = peak_correlation(&sr, &st, &truth_peaks, window_w)?;
    let weakest_correlation = truth_peaks.weakest().map(|k| correlation[k]);
    Ok(PeakReport {
        floor,
        truth: truth_peaks,
        recon: recon_peaks,
        matching,
        correlation,
        weakest_correlation,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseReport {
    pub method: Method,
    pub n: usize,
    pub m: usize,
    pub rlne: f64,
    pub zero_fill_rlne: f64,
    pub iterations: usize,
    pub converged: bool,
    pub history: Vec<IterationRecord>,
    pub truth_spectrum: Vec<f64>,
    pub recon_spectrum: Vec<f64>,
    /// Singular values of the Hankel lift of the reconstruction.
    pub singular_values: Vec<f64>,
    pub peaks: PeakReport,
    /// One-based sampled indices.
    pub mask: Vec<u32>,
    pub x_hat: Vec<C64>,
}

/// Reconstructs from given measurements and compares against `truth`.
#[allow(clippy::too_many_arguments)]
pub fn run_case_on(
    truth: &TimeSignal,
    y: &[C64],
    mask: &SamplingMask,
    method: Method,
    overrides: &SolverOverrides,
    noise_sigma: f64,
    d_max: f64,
    window_w: usize,
) -> Result<CaseReport> {
    let res = reconstruct(method, y, mask, overrides, noise_sigma, Some(truth))?;
    let zf = zero_fill(y, mask)?;
    let shape = HankelShape::for_len(truth.len())?;
    Ok(CaseReport {
        method,
        n: truth.len(),
        m: mask.len(),
        rlne: rlne(res.x_hat.samples(), truth.samples())?,
        zero_fill_rlne: rlne(zf.samples(), truth.samples())?,
        iterations: res.iterations,
        converged: res.converged,
        truth_spectrum: spectrum(truth).magnitude(),
        recon_spectrum: spectrum(&res.x_hat).magnitude(),
        singular_values: hankel_diagnostics(res.x_hat.samples(), shape)?.singular_values,
        peaks: peak_report(&res.x_hat, truth, noise_sigma, d_max, window_w)?,
        mask: mask.indices_one_based(),
        x_hat: res.x_hat.samples().to_vec(),
        history: res.history,
    })
}

/// Synthesizes, samples and reconstructs one model.
pub fn run_case(spec: &CaseSpec) -> Result<CaseReport> {
    let clean = synthesize(&spec.model, spec.n_points)?;
    let mask = make_mask(&MaskSpec::new(spec.n_points, spec.rate, spec.pattern, spec.mask_seed))?;
    let y = undersample(&add_noise(&clean, spec.noise_sigma, spec.noise_seed)?, &mask)?;
    run_case_on(
        &clean,
        &y,
        &mask,
        spec.method,
        &spec.overrides,
        spec.noise_sigma,
        spec.d_max,
        spec.window_w,
    )
}
