//! Model-based reconstruction from undersampled measurements.
//!
//! - [`lrhmf_reconstruct`]: SVD-free low-rank Hankel factorization solved by
//!   ADMM over `(x, P, Q, D)`.
//! - [`lrhm_reconstruct`]: nuclear-norm minimization of the Hankel matrix,
//!   ADMM with a singular value thresholding step.
//! - [`cs_ist_reconstruct`]: Fourier-sparsity baseline by iterative soft
//!   thresholding.
//! - [`data_consistency`]: the λ-weighted blend of estimates and measurements
//!   at the sampled positions.

mod cs;
mod dc;
mod lrhm;
mod lrhmf;
mod svt;

pub use cs::{cs_ist_reconstruct, CsConfig};
pub use dc::{data_consistency, data_consistency_samples};
pub use lrhm::lrhm_reconstruct;
pub use lrhmf::{initial_factors, lrhmf_reconstruct, x_update, FactorPair};
pub use svt::{nuclear_norm, singular_values, svt};

use serde::{Deserialize, Serialize};

use crate::error::{dim, param, Result};
use crate::hankel::{antidiag_counts, antidiag_sums, dehankelize, HankelShape};
use crate::sampling::SamplingMask;
use crate::signal::TimeSignal;
use crate::{CMatrix, C64};

/// Data-consistency weight used by both model-based solvers on synthetic data.
pub const DEFAULT_LAMBDA: f64 = 316.227_766_016_837_94; // 10^2.5

/// Which map back from matrices to signals the x-update uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HankelAdjoint {
    /// Anti-diagonal sums, the adjoint of `ℛ`; `ℛ*ℛ = diag(w)` with `w_n`
    /// the anti-diagonal lengths. Each sample is weighed against the `w_n`
    /// matrix entries that share it.
    #[default]
    Sum,
    /// Anti-diagonal averages, so `ℛ*ℛ = I`. With λ ≫ 1 this lets the
    /// measured samples dominate and little noise is removed.
    Average,
}

impl HankelAdjoint {
    pub fn apply(self, m: &CMatrix) -> Vec<C64> {
        match self {
            Self::Sum => antidiag_sums(m),
            Self::Average => dehankelize(m),
        }
    }

    /// Diagonal of `ℛ*ℛ`.
    pub fn gram_diagonal(self, shape: HankelShape) -> Vec<f64> {
        match self {
            Self::Sum => antidiag_counts(shape),
            Self::Average => vec![1.0; shape.signal_len()],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Data-consistency weight λ.
    pub lambda: f64,
    /// ADMM penalty β.
    pub beta: f64,
    /// Multiplier step τ.
    pub step_tau: f64,
    /// Factorization rank R (LRHMF only).
    pub rank_r: usize,
    pub max_iters: usize,
    /// Stop once `‖x^{k+1} − x^k‖ / ‖x^k‖` drops below this.
    pub tol: f64,
    pub shape: HankelShape,
    #[serde(default)]
    pub adjoint: HankelAdjoint,
    /// Record `‖ℛx^k‖_*` every iteration. Costs one SVD per iteration.
    #[serde(default)]
    pub track_nuclear_norm: bool,
}

impl SolverConfig {
    /// Synthetic-benchmark defaults for signals of length `n`.
    pub fn for_len(n: usize) -> Result<Self> {
        Ok(Self {
            lambda: DEFAULT_LAMBDA,
            beta: 1.0,
            step_tau: 1.0,
            rank_r: 10,
            max_iters: 500,
            tol: 1e-6,
            shape: HankelShape::for_len(n)?,
            adjoint: HankelAdjoint::Sum,
            track_nuclear_norm: false,
        })
    }

    /// Preset for measured spectra: λ = 100, R = 10.
    pub fn realistic(n: usize) -> Result<Self> {
        Ok(Self {
            lambda: 100.0,
            ..Self::for_len(n)?
        })
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("lambda", self.lambda),
            ("beta", self.beta),
            ("step_tau", self.step_tau),
            ("tol", self.tol),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(param(format!("{name} must be > 0, got {v}")));
            }
        }
        if self.rank_r == 0 || self.rank_r > self.shape.min_side() {
            return Err(param(format!(
                "rank {} must be in [1, {}]",
                self.rank_r,
                self.shape.min_side()
            )));
        }
        if self.max_iters == 0 {
            return Err(param("max_iters must be >= 1"));
        }
        Ok(())
    }
}

/// Diagnostics for one solver iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    /// `‖x^{k+1} − x^k‖ / ‖x^k‖`.
    pub rel_change: f64,
    /// Splitting residual: `‖ℛx − PQ^H‖_F` for LRHMF, `‖ℛx − Z‖_F` for LRHM.
    pub factor_residual: Option<f64>,
    /// `‖ℛx^k‖_*` when tracked; LRHM always records it.
    pub nuclear_norm: Option<f64>,
    /// Error against the reference signal when one was supplied.
    pub rlne: Option<f64>,
    /// Spectral ℓ1 norm (CS baseline only).
    pub spectral_l1: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconResult {
    pub x_hat: TimeSignal,
    pub iterations: usize,
    pub history: Vec<IterationRecord>,
    pub converged: bool,
}

pub(crate) fn check_inputs(y: &[C64], mask: &SamplingMask, n: usize) -> Result<()> {
    if mask.n() != n {
        return Err(dim(format!(
            "mask covers {} points, solver expects {n}",
            mask.n()
        )));
    }
    if y.len() != mask.len() {
        return Err(dim(format!(
            "{} measurements for a mask of {} points",
            y.len(),
            mask.len()
        )));
    }
    if y.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(param("measurements must be finite"));
    }
    Ok(())
}

pub(crate) fn check_truth(truth: Option<&TimeSignal>, n: usize) -> Result<()> {
    match truth {
        Some(t) if t.len() != n => Err(dim(format!(
            "reference signal has {} points, expected {n}",
            t.len()
        ))),
        _ => Ok(()),
    }
}

pub(crate) fn rel_change(new: &[C64], old: &[C64]) -> f64 {
    let diff: f64 = new.iter().zip(old).map(|(a, b)| (a - b).norm_sqr()).sum();
    let base: f64 = old.iter().map(|v| v.norm_sqr()).sum();
    if base > 0.0 {
        (diff / base).sqrt()
    } else if diff > 0.0 {
        f64::INFINITY
    } else {
        0.0
    }
}

pub(crate) fn rlne_against(x: &[C64], truth: Option<&TimeSignal>) -> Option<f64> {
    truth.and_then(|t| {
        let norm = t.norm();
        (norm > 0.0).then(|| {
            let diff: f64 = x
                .iter()
                .zip(t.samples())
                .map(|(a, b)| (a - b).norm_sqr())
                .sum();
            diff.sqrt() / norm
        })
    })
}
