//! Reconstruction of sums of damped complex exponentials from non-uniformly
//! sampled data with low-rank Hankel methods.
//!
//! The crate is split along the data flow of a reconstruction experiment:
//!
//! - [`signal`]: the exponential model, synthetic generation, noise and outliers.
//! - [`hankel`]: the Hankel lift and its anti-diagonal averaging inverse.
//! - [`sampling`]: sampling masks (Poisson-gap, uniform, truncation) and the
//!   undersampling operator.
//! - [`solvers`]: LRHMF (factorization ADMM), LRHM (nuclear-norm ADMM),
//!   an iterative soft-thresholding CS baseline and data consistency.
//! - [`metrics`]: RLNE, Pearson correlation, spectra, peak matching, singular
//!   value diagnostics and ESPRIT parameter retrieval.

// Negated comparisons deliberately reject NaN alongside out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod hankel;
pub mod metrics;
pub mod rng;
pub mod sampling;
pub mod signal;
pub mod solvers;

pub use error::{Error, Result};
pub use hankel::HankelShape;
pub use sampling::{MaskSpec, Pattern, SamplingMask};
pub use signal::{ExponentialComponent, ExponentialModel, GeneratorSpec, TimeSignal};

/// Complex sample type used throughout the crate.
pub type C64 = num_complex::Complex<f64>;

/// Dense complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;
