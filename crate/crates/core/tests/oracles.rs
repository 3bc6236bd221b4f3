//! Library results checked against independent dense or brute-force
//! computations written out here.

use hankel_core::hankel::{hankelize, HankelShape};
use hankel_core::metrics::hankel_diagnostics;
use hankel_core::rng::{rng_from_seed, unit_f64, Rng};
use hankel_core::sampling::{make_mask, zero_fill, MaskSpec, Pattern};
use hankel_core::signal::{random_model, synthesize, GeneratorSpec};
use hankel_core::solvers::{nuclear_norm, x_update, FactorPair, HankelAdjoint};
use hankel_core::{CMatrix, C64};
use nalgebra::{DMatrix, DVector};

fn cnum(rng: &mut Rng) -> C64 {
    C64::new(unit_f64(rng) - 0.5, unit_f64(rng) - 0.5)
}

fn random_matrix(rows: usize, cols: usize, rng: &mut Rng) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| cnum(rng))
}

/// `ℛ` as an explicit `(N1·N2) × N` matrix acting on column-major vec(X).
fn dense_lift(shape: HankelShape) -> DMatrix<C64> {
    let n = shape.signal_len();
    let mut r = DMatrix::zeros(shape.n1 * shape.n2, n);
    for j in 0..shape.n2 {
        for i in 0..shape.n1 {
            r[(j * shape.n1 + i, i + j)] = C64::new(1.0, 0.0);
        }
    }
    r
}

/// Singular values by one-sided Jacobi rotations on the columns.
fn jacobi_singular_values(m: &CMatrix) -> Vec<f64> {
    let mut a = if m.nrows() >= m.ncols() { m.clone() } else { m.adjoint() };
    let cols = a.ncols();
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let alpha: f64 = a.column(p).iter().map(|v| v.norm_sqr()).sum();
                let beta: f64 = a.column(q).iter().map(|v| v.norm_sqr()).sum();
                let gamma: C64 = a.column(p).iter().zip(a.column(q).iter()).map(|(x, y)| x.conj() * y).sum();
                let g = gamma.norm();
                if g <= 1e-15 * (alpha * beta).sqrt() || g == 0.0 {
                    continue;
                }
                rotated = true;
                // Rotate column q so the inner product becomes real, then
                // apply a real Jacobi rotation.
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..a.nrows() {
                    let ap = a[(i, p)];
                    let aq = a[(i, q)] / phase;
                    a[(i, p)] = ap * c - aq * s;
                    a[(i, q)] = ap * s + aq * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut s: Vec<f64> = (0..cols).map(|k| a.column(k).norm()).collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

#[test]
fn jacobi_oracle_agrees_on_a_diagonal() {
    let d = CMatrix::from_diagonal(&DVector::from_vec(vec![
        C64::new(0.0, 2.0),
        C64::new(-3.0, 0.0),
        C64::new(1.0, 0.0),
    ]));
    let s = jacobi_singular_values(&d);
    assert_eq!(s, vec![3.0, 2.0, 1.0]);
}

#[test]
fn diagnostics_match_jacobi_oracle() {
    let mut rng = rng_from_seed(41);
    for (k, n) in [5usize, 8, 13, 20, 32].into_iter().enumerate() {
        let x: Vec<C64> = (0..n).map(|_| cnum(&mut rng)).collect();
        let shape = HankelShape::for_len(n).unwrap();
        let diag = hankel_diagnostics(&x, shape).unwrap();
        let oracle = jacobi_singular_values(&hankelize(&x, shape).unwrap());
        assert_eq!(diag.singular_values.len(), oracle.len(), "case {k}");
        for (a, b) in diag.singular_values.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-10 * oracle[0], "case {k}: {a} vs {b}");
        }
        let total: f64 = oracle.iter().sum();
        assert!((diag.nuclear_norm - total).abs() < 1e-10 * total);
    }
}

#[test]
fn exponential_hankel_rank_equals_component_count() {
    let n = 255;
    let shape = HankelShape::for_len(n).unwrap();
    let mut checked = 0;
    let mut seed = 0u64;
    while checked < 12 {
        seed += 1;
        let model = random_model(&GeneratorSpec::default(), seed).unwrap();
        if model.min_frequency_gap() <= 4.0 / n as f64 {
            continue;
        }
        let x = synthesize(&model, n).unwrap();
        let s = hankel_diagnostics(x.samples(), shape).unwrap().singular_values;
        let j = model.len();
        assert!(s[j] / s[0] < 1e-8, "J={j}: σ_(J+1)/σ_1 = {}", s[j] / s[0]);
        assert!(s[j - 1] / s[0] > 1e-8);
        checked += 1;
    }
}

#[test]
fn split_factors_attain_the_nuclear_norm() {
    let mut rng = rng_from_seed(3);
    for _ in 0..20 {
        let x = random_matrix(8, 3, &mut rng) * random_matrix(3, 8, &mut rng);
        // Split from the eigenpairs of X^H X: Q = V Σ^{1/2}, P = X V Σ^{-1/2}.
        let eig = (x.adjoint() * &x).symmetric_eigen();
        let mut order: Vec<usize> = (0..8).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let v = CMatrix::from_fn(8, 3, |i, k| eig.eigenvectors[(i, order[k])]);
        let root = |k: usize| eig.eigenvalues[order[k]].sqrt().sqrt();
        let xv = &x * &v;
        let p = CMatrix::from_fn(8, 3, |i, k| xv[(i, k)] / root(k));
        let q = CMatrix::from_fn(8, 3, |i, k| v[(i, k)] * root(k));
        let pair = FactorPair {
            d: CMatrix::zeros(8, 8),
            p,
            q,
        };
        // Only three singular values are non-zero, so the split is exact.
        assert!((pair.product() - &x).norm() < 1e-10 * x.norm());
        let nuc = nuclear_norm(&x).unwrap();
        assert!((pair.surrogate() - nuc).abs() < 1e-10 * nuc);

        // Any other factorization of the same matrix costs at least as much.
        for _ in 0..5 {
            let g = random_matrix(3, 3, &mut rng) + CMatrix::identity(3, 3);
            let g_inv_h = g.clone().try_inverse().unwrap().adjoint();
            let other = FactorPair {
                d: CMatrix::zeros(8, 8),
                p: &pair.p * &g,
                q: &pair.q * g_inv_h,
            };
            assert!((other.product() - &x).norm() < 1e-8 * x.norm());
            assert!(other.surrogate() >= nuc * (1.0 - 1e-12));
        }
    }
}

/// Solves `(λ𝒰*𝒰 + β ℛ*ℛ) x = λ𝒰*y + β ℛ* vec(M)` densely, with `ℛ*` either
/// the adjoint `ℛ^H` or the left inverse `(ℛ^H ℛ)⁻¹ ℛ^H`.
fn dense_x_update(
    y_full: &[C64],
    sampled: &[bool],
    m: &CMatrix,
    shape: HankelShape,
    lambda: f64,
    beta: f64,
    adjoint: HankelAdjoint,
) -> Vec<C64> {
    let n = shape.signal_len();
    let r = dense_lift(shape);
    let r_star = match adjoint {
        HankelAdjoint::Sum => r.adjoint(),
        HankelAdjoint::Average => (r.adjoint() * &r).try_inverse().unwrap() * r.adjoint(),
    };
    let u = DMatrix::from_fn(n, n, |i, j| {
        C64::new(if i == j && sampled[i] { 1.0 } else { 0.0 }, 0.0)
    });
    let lhs = &u * C64::new(lambda, 0.0) + &r_star * &r * C64::new(beta, 0.0);
    let vec_m = DVector::from_iterator(m.len(), m.iter().cloned());
    let y = DVector::from_column_slice(y_full);
    let rhs = &u * y * C64::new(lambda, 0.0) + &r_star * vec_m * C64::new(beta, 0.0);
    lhs.lu().solve(&rhs).unwrap().iter().cloned().collect()
}

#[test]
fn closed_form_x_update_matches_dense_solve() {
    let n = 16;
    let shape = HankelShape::for_len(n).unwrap();
    let mut rng = rng_from_seed(77);
    for trial in 0..10u64 {
        let mask = make_mask(&MaskSpec::new(n, 0.5, Pattern::UniformRandom, trial)).unwrap();
        let y: Vec<C64> = (0..mask.len()).map(|_| cnum(&mut rng)).collect();
        let y_full = zero_fill(&y, &mask).unwrap().into_samples();
        let sampled = mask.indicator();
        let m = random_matrix(shape.n1, shape.n2, &mut rng);
        let lambda = 10f64.powf(4.0 * unit_f64(&mut rng) - 1.0);
        let beta = 0.1 + 2.0 * unit_f64(&mut rng);
        for adjoint in [HankelAdjoint::Sum, HankelAdjoint::Average] {
            let r = adjoint.apply(&m);
            let w = adjoint.gram_diagonal(shape);
            let ours = x_update(&y_full, &sampled, &r, &w, lambda, beta);
            let oracle = dense_x_update(&y_full, &sampled, &m, shape, lambda, beta, adjoint);
            let err: f64 = ours.iter().zip(&oracle).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
            let scale: f64 = oracle.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            assert!(err <= 1e-10 * scale, "{adjoint:?} trial {trial}: {err}");
        }
    }
}
