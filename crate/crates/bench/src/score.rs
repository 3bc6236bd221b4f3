//! Cross-method rank scores for parameter estimation.
//!
//! For every trial and every parameter the methods are ranked by absolute
//! error. With `K` methods the best gets `K` points and the worst 1. Equal
//! errors are ordered by method name, so the lexicographically smaller name
//! ranks higher. Non-finite errors count as worse than any finite one.

use std::collections::BTreeMap;

use hankel_core::metrics::{esprit, parameter_errors};
use hankel_core::rng::derive_seed;
use hankel_core::sampling::{make_mask, undersample};
use hankel_core::signal::{add_noise, synthesize};
use hankel_core::{ExponentialModel, MaskSpec, Pattern};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{spec_err, Result};
use crate::method::{reconstruct, Method, SolverOverrides};

pub const PARAMETERS: [&str; 4] = ["amplitude", "damping", "phase", "frequency"];

/// Per-trial mean absolute errors of one method, in [`PARAMETERS`] order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodTrials {
    pub method: String,
    pub errors: Vec<[f64; 4]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodScore {
    pub method: String,
    pub mean: [f64; 4],
    /// Sample standard deviation over trials; 0 for a single trial.
    pub std: [f64; 4],
}

fn sort_key(e: f64) -> f64 {
    if e.is_finite() {
        e
    } else {
        f64::INFINITY
    }
}

/// Rank scores per method, in input order.
#[allow(clippy::needless_range_loop)]
pub fn score_methods(results: &[MethodTrials]) -> Result<Vec<MethodScore>> {
    if results.len() < 2 {
        return Err(spec_err("scoring needs at least two methods"));
    }
    let trials = results[0].errors.len();
    if trials == 0 || results.iter().any(|r| r.errors.len() != trials) {
        return Err(spec_err("every method needs the same, non-zero number of trials"));
    }
    let k = results.len();
    let mut names: Vec<&str> = results.iter().map(|r| r.method.as_str()).collect();
    names.sort_unstable();
    if names.windows(2).any(|w| w[0] == w[1]) {
        return Err(spec_err("method names must be distinct"));
    }
    // scores[method][parameter][trial]
    let mut scores = vec![vec![vec![0.0; trials]; 4]; k];
    let mut order: Vec<usize> = (0..k).collect();
    for t in 0..trials {
        for p in 0..4 {
            order.sort_by(|&a, &b| {
                sort_key(results[a].errors[t][p])
                    .total_cmp(&sort_key(results[b].errors[t][p]))
                    .then_with(|| results[a].method.cmp(&results[b].method))
            });
            for (place, &m) in order.iter().enumerate() {
                scores[m][p][t] = (k - place) as f64;
            }
        }
    }
    Ok(results
        .iter()
        .zip(&scores)
        .map(|(r, s)| {
            let mut mean = [0.0; 4];
            let mut std = [0.0; 4];
            for p in 0..4 {
                let n = trials as f64;
                mean[p] = s[p].iter().sum::<f64>() / n;
                if trials > 1 {
                    std[p] = (s[p].iter().map(|v| (v - mean[p]).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
                }
            }
            MethodScore {
                method: r.method.clone(),
                mean,
                std,
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreSpec {
    pub model: ExponentialModel,
    pub methods: Vec<Method>,
    pub trials: usize,
    pub rate: f64,
    pub pattern: Pattern,
    pub noise_sigma: f64,
    pub n_points: usize,
    pub base_seed: u64,
    #[serde(default)]
    pub overrides: BTreeMap<Method, SolverOverrides>,
}

/// Reconstructs a fixed model under fresh masks and noise, estimates its
/// parameters with ESPRIT and collects the per-trial errors of each method.
/// A failed reconstruction or estimate counts as an infinite error.
pub fn parameter_trials(spec: &ScoreSpec) -> Result<Vec<MethodTrials>> {
    if spec.trials == 0 || spec.methods.is_empty() {
        return Err(spec_err("need at least one method and one trial"));
    }
    let clean = synthesize(&spec.model, spec.n_points)?;
    let j = spec.model.len();
    let per_trial: Vec<Vec<[f64; 4]>> = (0..spec.trials)
        .into_par_iter()
        .map(|t| -> Result<Vec<[f64; 4]>> {
            let seed = derive_seed(spec.base_seed, &[t as u64]);
            let mask = make_mask(&MaskSpec::new(spec.n_points, spec.rate, spec.pattern, derive_seed(seed, &[1])))?;
            let y = undersample(&add_noise(&clean, spec.noise_sigma, derive_seed(seed, &[2]))?, &mask)?;
            Ok(spec
                .methods
                .iter()
                .map(|&m| {
                    let overrides = spec.overrides.get(&m).cloned().unwrap_or_default();
                    reconstruct(m, &y, &mask, &overrides, spec.noise_sigma, None)
                        .ok()
                        .and_then(|res| esprit(&res.x_hat, j).ok())
                        .and_then(|est| parameter_errors(&est, &spec.model).ok())
                        .map_or([f64::INFINITY; 4], |e| e.means())
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok(spec
        .methods
        .iter()
        .enumerate()
        .map(|(k, m)| MethodTrials {
            method: m.name().to_string(),
            errors: per_trial.iter().map(|row| row[k]).collect(),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trials(name: &str, errors: &[[f64; 4]]) -> MethodTrials {
        MethodTrials {
            method: name.into(),
            errors: errors.to_vec(),
        }
    }

    #[test]
    fn strictly_best_method_scores_the_maximum() {
        let r = score_methods(&[
            trials("a", &[[0.1; 4], [0.2; 4]]),
            trials("b", &[[0.5; 4], [0.6; 4]]),
            trials("c", &[[0.9; 4], [0.7; 4]]),
            trials("d", &[[1.0; 4], [0.8; 4]]),
        ])
        .unwrap();
        assert_eq!(r[0].mean, [4.0; 4]);
        assert_eq!(r[0].std, [0.0; 4]);
        assert_eq!(r[3].mean, [1.0; 4]);
    }

    #[test]
    fn ties_go_to_the_smaller_name() {
        let r = score_methods(&[trials("lrhmf", &[[0.3; 4]]), trials("lrhm", &[[0.3; 4]])]).unwrap();
        assert_eq!(r[1].mean, [2.0; 4]);
        assert_eq!(r[0].mean, [1.0; 4]);
    }

    #[test]
    fn non_finite_errors_rank_last() {
        let r = score_methods(&[
            trials("a", &[[f64::NAN, f64::INFINITY, 1.0, 1.0]]),
            trials("b", &[[9.0, 9.0, 2.0, 2.0]]),
        ])
        .unwrap();
        assert_eq!(r[0].mean, [1.0, 1.0, 2.0, 2.0]);
        assert_eq!(r[1].mean, [2.0, 2.0, 1.0, 1.0]);
    }

    #[test]
    fn malformed_inputs() {
        assert!(score_methods(&[trials("a", &[[0.0; 4]])]).is_err());
        assert!(score_methods(&[trials("a", &[[0.0; 4]]), trials("b", &[])]).is_err());
        assert!(score_methods(&[trials("a", &[[0.0; 4]]), trials("a", &[[0.0; 4]])]).is_err());
    }
}
