use std::fmt;
use std::str::FromStr;

use hankel_core::sampling::zero_fill;
use hankel_core::solvers::{
    cs_ist_reconstruct, lrhm_reconstruct, lrhmf_reconstruct, CsConfig, HankelAdjoint, ReconResult, SolverConfig,
};
use hankel_core::{SamplingMask, TimeSignal, C64};
use serde::{Deserialize, Serialize};

use crate::error::{spec_err, BenchError, Result};

/// Reconstruction methods the driver can run. The derived ordering is the
/// lexicographic order of the names, which breaks ties when scoring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Cs,
    Lrhm,
    Lrhmf,
    ZeroFill,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Cs, Method::Lrhm, Method::Lrhmf, Method::ZeroFill];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Cs => "cs",
            Method::Lrhm => "lrhm",
            Method::Lrhmf => "lrhmf",
            Method::ZeroFill => "zero_fill",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cs" | "cs_ist" | "cs-ist" => Ok(Method::Cs),
            "lrhm" => Ok(Method::Lrhm),
            "lrhmf" => Ok(Method::Lrhmf),
            "zero_fill" | "zero-fill" | "zf" => Ok(Method::ZeroFill),
            other => Err(spec_err(format!("unknown method '{other}'"))),
        }
    }
}

/// Per-method changes to the default solver settings.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SolverOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iters: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub adjoint: Option<HankelAdjoint>,
    #[serde(default)]
    pub track_nuclear_norm: bool,
}

impl SolverOverrides {
    /// Default settings for length `n` with the overrides applied.
    pub fn solver_config(&self, n: usize) -> Result<SolverConfig> {
        let mut cfg = SolverConfig::for_len(n)?;
        if let Some(v) = self.lambda {
            cfg.lambda = v;
        }
        if let Some(v) = self.beta {
            cfg.beta = v;
        }
        if let Some(v) = self.rank {
            cfg.rank_r = v;
        }
        if let Some(v) = self.max_iters {
            cfg.max_iters = v;
        }
        if let Some(v) = self.adjoint {
            cfg.adjoint = v;
        }
        cfg.track_nuclear_norm = self.track_nuclear_norm;
        cfg.validate()?;
        Ok(cfg)
    }

    /// CS settings; only the iteration cap carries over. The threshold
    /// floor follows the noise level of the experiment.
    pub fn cs_config(&self, noise_sigma: f64) -> CsConfig {
        let mut cfg = CsConfig {
            noise_sigma,
            ..CsConfig::default()
        };
        if let Some(v) = self.max_iters {
            cfg.max_iters = v;
        }
        cfg
    }
}

/// Runs one method on one set of measurements.
pub fn reconstruct(
    method: Method,
    y: &[C64],
    mask: &SamplingMask,
    overrides: &SolverOverrides,
    noise_sigma: f64,
    truth: Option<&TimeSignal>,
) -> Result<ReconResult> {
    let n = mask.n();
    let res = match method {
        Method::Lrhmf => lrhmf_reconstruct(y, mask, &overrides.solver_config(n)?, truth)?,
        Method::Lrhm => lrhm_reconstruct(y, mask, &overrides.solver_config(n)?, truth)?,
        Method::Cs => cs_ist_reconstruct(y, mask, &overrides.cs_config(noise_sigma), truth)?,
        Method::ZeroFill => ReconResult {
            x_hat: zero_fill(y, mask)?,
            iterations: 0,
            history: Vec::new(),
            converged: true,
        },
    };
    Ok(res)
}

/// Parses a comma-separated method list, keeping the given order and
/// dropping repeats.
pub fn parse_methods(list: &str) -> Result<Vec<Method>> {
    let mut out = Vec::new();
    for part in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let m: Method = part.parse()?;
        if !out.contains(&m) {
            out.push(m);
        }
    }
    if out.is_empty() {
        return Err(spec_err("no methods given"));
    }
    Ok(out)
}
