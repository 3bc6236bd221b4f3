use std::f64::consts::{PI, TAU};

use hankel_core::metrics::{esprit, parameter_errors, rlne};
use hankel_core::sampling::{make_mask, undersample, zero_fill, MaskSpec, Pattern};
use hankel_core::signal::{add_noise, random_model, synthesize, GeneratorSpec};
use hankel_core::solvers::{data_consistency, lrhmf_reconstruct, SolverConfig};
use hankel_core::TimeSignal;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn esprit_inverts_synthesis(seed in any::<u64>(), j in 1usize..=6) {
        let model = random_model(&GeneratorSpec::with_components(j), seed).unwrap();
        prop_assume!(model.min_frequency_gap() > 4.0 / 255.0);
        let x = synthesize(&model, 255).unwrap();
        let est = esprit(&x, j).unwrap();
        let err = parameter_errors(&est, &model).unwrap();
        for (k, c) in model.components().iter().enumerate() {
            prop_assert!(err.amplitude[k] <= 1e-6 * c.amplitude);
            prop_assert!(err.damping[k] <= 1e-6 * c.damping);
            prop_assert!(err.frequency[k] <= 1e-6);
            prop_assert!(err.phase[k] <= 1e-6);
        }
    }

    #[test]
    fn data_consistency_only_moves_sampled_points(seed in any::<u64>(), lambda in 0.0..1e3f64) {
        let model = random_model(&GeneratorSpec::with_components(3), seed).unwrap();
        let x = synthesize(&model, 64).unwrap();
        let mask = make_mask(&MaskSpec::new(64, 0.25, Pattern::PoissonGap, seed)).unwrap();
        let y = undersample(&add_noise(&x, 0.05, seed).unwrap(), &mask).unwrap();
        let out = data_consistency(&x, &y, &mask, lambda).unwrap();
        let sampled = mask.indicator();
        for (n, (a, b)) in out.samples().iter().zip(x.samples()).enumerate() {
            if !sampled[n] {
                prop_assert_eq!(a, b);
            }
        }
        // The blend sits on the segment between estimate and measurement.
        for (&p, &yv) in mask.positions().iter().zip(&y) {
            let t = lambda / (1.0 + lambda);
            let expect = x.samples()[p] * (1.0 - t) + yv * t;
            prop_assert!((out.samples()[p] - expect).norm() <= 1e-12 * (1.0 + expect.norm()));
        }
    }
}

#[test]
fn phase_errors_stay_in_half_turn() {
    let model = random_model(&GeneratorSpec::with_components(4), 9).unwrap();
    let x = synthesize(&model, 255).unwrap();
    let noisy = add_noise(&x, 0.2, 1).unwrap();
    let est = esprit(&noisy, 4).unwrap();
    let err = parameter_errors(&est, &model).unwrap();
    assert!(err.phase.iter().all(|&p| (0.0..=PI).contains(&p)));
    assert!(err.frequency.iter().all(|&f| (0.0..=0.5).contains(&f)));
    assert!(est.components().iter().all(|c| (0.0..TAU).contains(&c.phase)));
}

#[test]
fn lrhmf_improves_on_zero_fill() {
    let model = random_model(&GeneratorSpec::with_components(4), 21).unwrap();
    let x = synthesize(&model, 255).unwrap();
    let mask = make_mask(&MaskSpec::new(255, 0.25, Pattern::PoissonGap, 4)).unwrap();
    let y = undersample(&add_noise(&x, 0.05, 8).unwrap(), &mask).unwrap();
    let cfg = SolverConfig::for_len(255).unwrap();
    let res = lrhmf_reconstruct(&y, &mask, &cfg, Some(&x)).unwrap();
    let zf: TimeSignal = zero_fill(&y, &mask).unwrap();
    let recon = rlne(res.x_hat.samples(), x.samples()).unwrap();
    let base = rlne(zf.samples(), x.samples()).unwrap();
    assert!(recon < 0.5 * base, "lrhmf {recon} vs zero-fill {base}");
    assert_eq!(res.history.len(), res.iterations);
}
