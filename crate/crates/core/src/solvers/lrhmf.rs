use nalgebra::Cholesky;
use serde::{Deserialize, Serialize};

use super::{check_inputs, check_truth, rel_change, rlne_against, IterationRecord, ReconResult, SolverConfig};
use crate::error::{Error, Result};
use crate::hankel::{hankelize, HankelShape};
use crate::sampling::{zero_fill, SamplingMask};
use crate::signal::TimeSignal;
use crate::solvers::svt::nuclear_norm;
use crate::{CMatrix, C64};

/// LRHMF state: `ℛx ≈ P Q^H` with multiplier `D`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorPair {
    /// `N1 × R`.
    pub p: CMatrix,
    /// `N2 × R`.
    pub q: CMatrix,
    /// `N1 × N2`.
    pub d: CMatrix,
}

impl FactorPair {
    pub fn rank(&self) -> usize {
        self.p.ncols()
    }

    /// `P Q^H`.
    pub fn product(&self) -> CMatrix {
        &self.p * self.q.adjoint()
    }

    /// `½(‖P‖_F² + ‖Q‖_F²)`, an upper bound on `‖P Q^H‖_*`.
    pub fn surrogate(&self) -> f64 {
        0.5 * (self.p.norm_squared() + self.q.norm_squared())
    }
}

/// Deterministic start: `P⁰` holds the first `R` columns of `ℛ(𝒰*y)` scaled
/// to unit norm, `Q⁰` is the identity padded to `N2 × R`, `D⁰ = 0`.
pub fn initial_factors(x0: &[C64], shape: HankelShape, rank: usize) -> Result<FactorPair> {
    let h = hankelize(x0, shape)?;
    let mut p = CMatrix::zeros(shape.n1, rank);
    for k in 0..rank {
        let col = h.column(k);
        let norm = col.norm();
        if norm > 0.0 {
            p.set_column(k, &(col / C64::new(norm, 0.0)));
        } else {
            // Keep P full column rank when a column of measurements is empty.
            p[(k % shape.n1, k)] = C64::new(1.0, 0.0);
        }
    }
    let q = CMatrix::from_fn(shape.n2, rank, |i, j| {
        if i == j {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    Ok(FactorPair {
        p,
        q,
        d: CMatrix::zeros(shape.n1, shape.n2),
    })
}

/// Closed-form solution of `(λ𝒰*𝒰 + βℛ*ℛ) x = λ𝒰*y + β r` with
/// `r = ℛ*(PQ^H − D)`. `ℛ*ℛ` is diagonal with entries `weights`, so the
/// solve is elementwise: `λ + β w_n` on sampled positions and `β w_n`
/// elsewhere.
pub fn x_update(
    x0: &[C64],
    sampled: &[bool],
    r: &[C64],
    weights: &[f64],
    lambda: f64,
    beta: f64,
) -> Vec<C64> {
    x0.iter()
        .zip(sampled)
        .zip(r.iter().zip(weights))
        .map(|((&y, &s), (&r, &w))| {
            if s {
                (y * lambda + r * beta) / (lambda + beta * w)
            } else {
                r / w
            }
        })
        .collect()
}

/// Solves `X (β A^H A + I) = B` for `X`, with `A^H A` Hermitian so the
/// system matrix is Hermitian positive definite.
fn right_solve_gram(b: &CMatrix, a: &CMatrix, beta: f64) -> Result<CMatrix> {
    let r = a.ncols();
    let gram = a.adjoint() * a * C64::new(beta, 0.0) + CMatrix::identity(r, r);
    let chol = Cholesky::new(gram)
        .ok_or_else(|| Error::Numeric("β A^H A + I lost positive definiteness".into()))?;
    // X M = B  ⇔  M X^H = B^H since M is Hermitian.
    Ok(chol.solve(&b.adjoint()).adjoint())
}

/// Low-rank Hankel matrix factorization by ADMM.
///
/// Each iteration performs, in order,
///
/// ```text
/// x ← (λ𝒰*𝒰 + βℛ*ℛ)⁻¹ (λ𝒰*y + βℛ*(PQ^H − D))
/// P ← β(ℛx + D) Q (βQ^H Q + I)⁻¹
/// Q ← β(ℛx + D)^H P (βP^H P + I)⁻¹
/// D ← D + τ(ℛx − PQ^H)
/// ```
///
/// where `ℛ*` is chosen by `cfg.adjoint`, and stops when the relative change
/// of `x` falls below `cfg.tol`.
pub fn lrhmf_reconstruct(
    y: &[C64],
    mask: &SamplingMask,
    cfg: &SolverConfig,
    truth: Option<&TimeSignal>,
) -> Result<ReconResult> {
    cfg.validate()?;
    let n = cfg.shape.signal_len();
    check_inputs(y, mask, n)?;
    check_truth(truth, n)?;

    let x0 = zero_fill(y, mask)?.into_samples();
    let sampled = mask.indicator();
    let weights = cfg.adjoint.gram_diagonal(cfg.shape);
    let mut state = initial_factors(&x0, cfg.shape, cfg.rank_r)?;
    let mut pq = state.product();
    let mut x = x0.clone();
    let mut history = Vec::with_capacity(cfg.max_iters.min(4096));
    let mut converged = false;
    let beta = C64::new(cfg.beta, 0.0);
    let step = C64::new(cfg.step_tau, 0.0);

    for _ in 0..cfg.max_iters {
        let r = cfg.adjoint.apply(&(&pq - &state.d));
        let x_new = x_update(&x0, &sampled, &r, &weights, cfg.lambda, cfg.beta);
        let hx = hankelize(&x_new, cfg.shape)?;

        let g = &hx + &state.d;
        state.p = right_solve_gram(&(&g * &state.q * beta), &state.q, cfg.beta)?;
        state.q = right_solve_gram(&(g.adjoint() * &state.p * beta), &state.p, cfg.beta)?;
        pq = state.product();

        let gap = &hx - &pq;
        state.d += &gap * step;

        let change = rel_change(&x_new, &x);
        x = x_new;
        if x.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::Numeric("LRHMF iterate diverged".into()));
        }
        history.push(IterationRecord {
            rel_change: change,
            factor_residual: Some(gap.norm()),
            nuclear_norm: if cfg.track_nuclear_norm {
                Some(nuclear_norm(&hx)?)
            } else {
                None
            },
            rlne: rlne_against(&x, truth),
            spectral_l1: None,
        });
        if change < cfg.tol {
            converged = true;
            break;
        }
    }

    Ok(ReconResult {
        iterations: history.len(),
        x_hat: TimeSignal::from_samples(x)?,
        history,
        converged,
    })
}
