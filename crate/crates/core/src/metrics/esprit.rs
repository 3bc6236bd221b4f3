use std::f64::consts::TAU;

use faer::MatRef;
use nalgebra::{DMatrix, SVD};

use crate::error::{param, Error, Result};
use crate::hankel::{hankelize, HankelShape};
use crate::signal::{ExponentialComponent, ExponentialModel, TimeSignal};
use crate::{CMatrix, C64};

/// Subspace rank threshold: `σ_j / σ_1` below this means the data do not
/// support `j` components.
const RANK_TOL: f64 = 1e-12;

/// ESPRIT estimate of a `j`-component model, using the default near-square
/// Hankel shape.
pub fn esprit(x: &TimeSignal, j: usize) -> Result<ExponentialModel> {
    esprit_with_shape(x, j, HankelShape::for_len(x.len())?)
}

/// ESPRIT on a given Hankel shape.
///
/// 1. Signal subspace: leading `j` left singular vectors `U` of `ℛx`.
/// 2. Poles: eigenvalues of `Φ = U↑⁺ U↓`, the least-squares shift operator
///    between the subspace with its last and first row removed.
/// 3. Amplitudes: least squares on the Vandermonde system `x_i = Σ c_k z_kⁱ`,
///    then `A e^{iφ} = c_k / z_k` because the time index starts at one.
///
/// Poles on or outside the unit circle are reported as undamped
/// (`damping = ∞`).
pub fn esprit_with_shape(x: &TimeSignal, j: usize, shape: HankelShape) -> Result<ExponentialModel> {
    let n = x.len();
    shape.check_len(n).map_err(|e| param(e.to_string()))?;
    if j == 0 || j + 1 > shape.min_side() {
        return Err(Error::ModelOrder(format!(
            "{j} components need a Hankel side of at least {}, have {}",
            j + 1,
            shape.min_side()
        )));
    }
    let h = hankelize(x.samples(), shape)?;
    if h.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::Numeric("signal has non-finite samples".into()));
    }
    let svd = MatRef::from_column_major_slice(h.as_slice(), shape.n1, shape.n2)
        .thin_svd()
        .map_err(|e| Error::Numeric(format!("SVD failed: {e:?}")))?;
    // Singular values come out non-increasing.
    let s = svd.S().column_vector();
    let s1 = s[0].re;
    let sj = s[j - 1].re;
    if !(s1 > 0.0) || sj / s1 < RANK_TOL {
        return Err(Error::ModelOrder(format!(
            "signal subspace has numerical rank below {j} (σ_j/σ_1 = {:.3e})",
            if s1 > 0.0 { sj / s1 } else { 0.0 }
        )));
    }
    let us = CMatrix::from_fn(shape.n1, j, |r, c| svd.U()[(r, c)]);
    let upper = us.rows(0, shape.n1 - 1).into_owned();
    let lower = us.rows(1, shape.n1 - 1).into_owned();
    let phi = least_squares(&upper, &lower)?;
    let poles: Vec<C64> = phi
        .eigenvalues()
        .ok_or_else(|| Error::Numeric("shift operator eigenvalues did not converge".into()))?
        .iter()
        .copied()
        .collect();

    let vander = CMatrix::from_fn(n, j, |i, k| poles[k].powu(i as u32));
    let rhs = DMatrix::from_column_slice(n, 1, x.samples());
    let coeffs = least_squares(&vander, &rhs)?;

    let dt = x.dt();
    let components = poles
        .iter()
        .zip(coeffs.column(0).iter())
        .map(|(&z, &c)| {
            let a = c / z;
            let radius = z.norm();
            let damping = if radius >= 1.0 {
                f64::INFINITY
            } else {
                -dt / radius.ln()
            };
            ExponentialComponent {
                amplitude: a.norm(),
                phase: wrap(a.arg(), TAU),
                damping,
                frequency: wrap(z.arg() / TAU, 1.0) / dt,
            }
        })
        .collect();
    Ok(ExponentialModel::from_estimates(components, dt))
}

/// Wraps into `[0, period)`, folding the rounding case that lands on `period`.
fn wrap(v: f64, period: f64) -> f64 {
    let w = v.rem_euclid(period);
    if w >= period {
        0.0
    } else {
        w
    }
}

/// Minimum-norm least-squares solution of `A X = B`.
fn least_squares(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    // nalgebra's own default tolerance; a bare machine epsilon stalls the
    // implicit-shift iteration short of full accuracy.
    let svd = SVD::try_new(a.clone(), true, true, 5.0 * f64::EPSILON, 0)
        .ok_or_else(|| Error::Numeric("SVD did not converge".into()))?;
    let smax = svd.singular_values.max();
    svd.solve(b, smax * 1e-14)
        .map_err(|e| Error::Numeric(e.to_string()))
}
