//! Monte-Carlo RLNE grids over component count and sampling rate.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use hankel_core::metrics::rlne;
use hankel_core::rng::derive_seed;
use hankel_core::sampling::{make_mask, undersample};
use hankel_core::signal::{add_noise, random_model, synthesize};
use hankel_core::{ExponentialModel, GeneratorSpec, MaskSpec, Pattern, SamplingMask, TimeSignal, C64};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{spec_err, Result};
use crate::method::{reconstruct, Method, SolverOverrides};

pub const CSV_HEADER: &str = "method,J,rate,trials,mean_rlne,std_rlne";

/// Slack allowed by the monotonicity sanity check.
const MONOTONE_SLACK: f64 = 0.01;
/// The monotonicity check only runs on cells with at least this many trials.
const MONOTONE_MIN_TRIALS: usize = 50;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub methods: Vec<Method>,
    /// Component counts `J`, one grid row each.
    pub components: Vec<usize>,
    /// Sampling rates in `(0, 1]`, one grid column each.
    pub rates: Vec<f64>,
    pub trials: usize,
    pub noise_sigma: f64,
    pub base_seed: u64,
    pub n_points: usize,
    pub pattern: Pattern,
    /// Parameter ranges for the random models; `j_range` and `n_points` are
    /// replaced per cell.
    #[serde(default)]
    pub generator: GeneratorSpec,
    #[serde(default)]
    pub overrides: BTreeMap<Method, SolverOverrides>,
    /// Run the trials of a cell on the rayon pool. Results do not depend on
    /// this flag.
    #[serde(default = "default_parallel")]
    pub parallel: bool,
}

fn default_parallel() -> bool {
    true
}

impl ExperimentSpec {
    /// A grid with desk-scale defaults: 50 trials, σ = 0.05, N = 255,
    /// Poisson-gap sampling.
    pub fn new(methods: Vec<Method>, components: Vec<usize>, rates: Vec<f64>) -> Self {
        Self {
            methods,
            components,
            rates,
            trials: 50,
            noise_sigma: 0.05,
            base_seed: 0,
            n_points: 255,
            pattern: Pattern::PoissonGap,
            generator: GeneratorSpec::default(),
            overrides: BTreeMap::new(),
            parallel: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() || self.components.is_empty() || self.rates.is_empty() {
            return Err(spec_err("methods, component counts and rates must be non-empty"));
        }
        if self.trials == 0 {
            return Err(spec_err("trials must be >= 1"));
        }
        if let Some(r) = self.rates.iter().find(|r| !(**r > 0.0 && **r <= 1.0)) {
            return Err(spec_err(format!("rate {r} is outside (0, 1]")));
        }
        if self.components.contains(&0) {
            return Err(spec_err("component counts must be >= 1"));
        }
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0) {
            return Err(spec_err(format!("noise sigma {} must be >= 0", self.noise_sigma)));
        }
        self.cell_generator(self.components[0]).validate()?;
        Ok(())
    }

    fn cell_generator(&self, j: usize) -> GeneratorSpec {
        GeneratorSpec {
            j_range: (j, j),
            n_points: self.n_points,
            ..self.generator.clone()
        }
    }

    pub fn overrides_for(&self, method: Method) -> SolverOverrides {
        self.overrides.get(&method).cloned().unwrap_or_default()
    }
}

/// One Monte-Carlo draw shared by every method of a cell.
#[derive(Debug, Clone)]
pub struct TrialDraw {
    pub model: ExponentialModel,
    pub clean: TimeSignal,
    pub mask: SamplingMask,
    pub y: Vec<C64>,
}

/// The cell key mixes `J` and the rate itself rather than grid positions, so
/// a cell draws the same trials whatever else is in the grid.
fn cell_seed(base: u64, j: usize, rate: f64) -> u64 {
    derive_seed(base, &[j as u64, (rate * 1e9).round() as u64])
}

/// Model, mask and noise for trial `trial` of cell `(j, rate)`. Each comes
/// from its own stream derived from the base seed.
pub fn draw_trial(spec: &ExperimentSpec, j: usize, rate: f64, trial: usize) -> Result<TrialDraw> {
    let seed = derive_seed(cell_seed(spec.base_seed, j, rate), &[trial as u64]);
    let model = random_model(&spec.cell_generator(j), derive_seed(seed, &[0]))?;
    let clean = synthesize(&model, spec.n_points)?;
    let mask = make_mask(&MaskSpec::new(spec.n_points, rate, spec.pattern, derive_seed(seed, &[1])))?;
    let noisy = add_noise(&clean, spec.noise_sigma, derive_seed(seed, &[2]))?;
    let y = undersample(&noisy, &mask)?;
    Ok(TrialDraw { model, clean, mask, y })
}

/// Where a mean RLNE falls relative to the 0.1 and 0.2 boundaries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Threshold {
    #[serde(rename = "below_0.1")]
    Below01,
    #[serde(rename = "0.1_to_0.2")]
    Between,
    #[serde(rename = "above_0.2")]
    Above02,
}

impl Threshold {
    pub fn classify(mean: f64) -> Self {
        if mean < 0.1 {
            Threshold::Below01
        } else if mean < 0.2 {
            Threshold::Between
        } else {
            Threshold::Above02
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialFailure {
    pub trial: usize,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub method: Method,
    #[serde(rename = "J")]
    pub j: usize,
    pub rate: f64,
    /// Trials that produced an RLNE.
    pub trials: usize,
    pub mean_rlne: Option<f64>,
    /// Sample standard deviation; 0 for a single trial.
    pub std_rlne: Option<f64>,
    pub threshold: Option<Threshold>,
    /// Per-trial RLNE, `None` where the trial failed.
    pub rlne: Vec<Option<f64>>,
    pub failures: Vec<TrialFailure>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridReport {
    pub spec: ExperimentSpec,
    pub cells: Vec<CellResult>,
    pub warnings: Vec<String>,
}

fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = if v.len() > 1 {
        v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var.sqrt())
}

type TrialOutcome = Vec<std::result::Result<f64, String>>;

fn run_trial(spec: &ExperimentSpec, j: usize, rate: f64, trial: usize) -> TrialOutcome {
    let draw = match draw_trial(spec, j, rate, trial) {
        Ok(d) => d,
        Err(e) => return vec![Err(e.to_string()); spec.methods.len()],
    };
    spec.methods
        .iter()
        .map(|&m| {
            let res = reconstruct(m, &draw.y, &draw.mask, &spec.overrides_for(m), spec.noise_sigma, None)
                .map_err(|e| e.to_string())?;
            let r = rlne(res.x_hat.samples(), draw.clean.samples()).map_err(|e| e.to_string())?;
            if r.is_finite() {
                Ok(r)
            } else {
                Err("reconstruction is not finite".into())
            }
        })
        .collect()
}

/// Mean and standard deviation of the RLNE for every (method, J, rate).
///
/// Every method of a cell sees the same draws. A failed trial is recorded
/// in the cell and left out of the statistics.
pub fn run_grid(spec: &ExperimentSpec) -> Result<GridReport> {
    spec.validate()?;
    let mut cells = Vec::new();
    for &j in &spec.components {
        for &rate in &spec.rates {
            let outcomes: Vec<TrialOutcome> = if spec.parallel {
                (0..spec.trials)
                    .into_par_iter()
                    .map(|t| run_trial(spec, j, rate, t))
                    .collect()
            } else {
                (0..spec.trials).map(|t| run_trial(spec, j, rate, t)).collect()
            };
            for (k, &method) in spec.methods.iter().enumerate() {
                let mut rlnes = Vec::with_capacity(spec.trials);
                let mut failures = Vec::new();
                for (t, o) in outcomes.iter().enumerate() {
                    match &o[k] {
                        Ok(r) => rlnes.push(Some(*r)),
                        Err(e) => {
                            rlnes.push(None);
                            failures.push(TrialFailure {
                                trial: t,
                                error: e.clone(),
                            });
                        }
                    }
                }
                let ok: Vec<f64> = rlnes.iter().flatten().copied().collect();
                let stats = (!ok.is_empty()).then(|| mean_std(&ok));
                cells.push(CellResult {
                    method,
                    j,
                    rate,
                    trials: ok.len(),
                    mean_rlne: stats.map(|s| s.0),
                    std_rlne: stats.map(|s| s.1),
                    threshold: stats.map(|s| Threshold::classify(s.0)),
                    rlne: rlnes,
                    failures,
                });
            }
        }
    }
    let warnings = monotonicity_warnings(&cells);
    Ok(GridReport {
        spec: spec.clone(),
        cells,
        warnings,
    })
}

/// LRHMF error should not grow with the sampling rate nor shrink with `J`.
/// Violations beyond the slack are reported, not treated as errors.
pub fn monotonicity_warnings(cells: &[CellResult]) -> Vec<String> {
    let lrhmf: Vec<(usize, f64, f64)> = cells
        .iter()
        .filter(|c| c.method == Method::Lrhmf && c.trials >= MONOTONE_MIN_TRIALS)
        .filter_map(|c| c.mean_rlne.map(|m| (c.j, c.rate, m)))
        .collect();
    let mut warnings = Vec::new();
    let mut js: Vec<usize> = lrhmf.iter().map(|c| c.0).collect();
    js.sort_unstable();
    js.dedup();
    for &j in &js {
        let mut row: Vec<(f64, f64)> = lrhmf.iter().filter(|c| c.0 == j).map(|c| (c.1, c.2)).collect();
        row.sort_by(|a, b| a.0.total_cmp(&b.0));
        for w in row.windows(2) {
            if w[1].1 > w[0].1 + MONOTONE_SLACK {
                warnings.push(format!(
                    "lrhmf J={j}: mean RLNE rises from {:.4} at rate {} to {:.4} at rate {}",
                    w[0].1, w[0].0, w[1].1, w[1].0
                ));
            }
        }
    }
    let mut rates: Vec<f64> = lrhmf.iter().map(|c| c.1).collect();
    rates.sort_by(f64::total_cmp);
    rates.dedup();
    for &rate in &rates {
        let mut col: Vec<(usize, f64)> = lrhmf.iter().filter(|c| c.1 == rate).map(|c| (c.0, c.2)).collect();
        col.sort_by_key(|c| c.0);
        for w in col.windows(2) {
            if w[1].1 < w[0].1 - MONOTONE_SLACK {
                warnings.push(format!(
                    "lrhmf rate {rate}: mean RLNE falls from {:.4} at J={} to {:.4} at J={}",
                    w[0].1, w[0].0, w[1].1, w[1].0
                ));
            }
        }
    }
    warnings
}

impl GridReport {
    /// One row per cell with at least one successful trial.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for c in &self.cells {
            if let (Some(mean), Some(std)) = (c.mean_rlne, c.std_rlne) {
                let _ = writeln!(out, "{},{},{},{},{},{}", c.method, c.j, c.rate, c.trials, mean, std);
            }
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn cell(&self, method: Method, j: usize, rate: f64) -> Option<&CellResult> {
        self.cells
            .iter()
            .find(|c| c.method == method && c.j == j && c.rate == rate)
    }
}
