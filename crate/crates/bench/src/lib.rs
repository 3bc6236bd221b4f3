//! Experiment driver for `hankel-core`: Monte-Carlo RLNE grids, single-case
//! reports, dataset generation, rank scoring and the file formats they use.
//!
//! The `nusrecon` binary exposes all of it on the command line.

pub mod case;
pub mod dataset;
pub mod error;
pub mod format;
pub mod golden;
pub mod grid;
pub mod method;
pub mod score;

pub use case::{run_case, CaseReport, CaseSpec};
pub use dataset::{make_dataset, DatasetManifest, DatasetSpec};
pub use error::{BenchError, Result};
pub use grid::{run_grid, ExperimentSpec, GridReport};
pub use method::{Method, SolverOverrides};
pub use score::{score_methods, MethodScore, MethodTrials};
