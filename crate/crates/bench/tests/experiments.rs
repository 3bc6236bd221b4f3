use hankel_bench::grid::{draw_trial, CSV_HEADER};
use hankel_bench::score::{parameter_trials, ScoreSpec};
use hankel_bench::{run_case, run_grid, score_methods, CaseSpec, ExperimentSpec, Method, MethodTrials, SolverOverrides};
use hankel_core::metrics::rlne;
use hankel_core::sampling::{make_mask, undersample};
use hankel_core::signal::{add_noise, presets, synthesize};
use hankel_core::solvers::HankelAdjoint;
use hankel_core::{MaskSpec, Pattern};

fn small_grid() -> ExperimentSpec {
    let mut spec = ExperimentSpec::new(
        vec![Method::Lrhmf, Method::ZeroFill, Method::Cs],
        vec![2, 4],
        vec![0.3, 0.5],
    );
    spec.n_points = 63;
    spec.trials = 4;
    spec.base_seed = 11;
    spec
}

#[test]
fn grid_csv_is_deterministic_and_independent_of_parallelism() {
    let spec = small_grid();
    let a = run_grid(&spec).unwrap().to_csv();
    let b = run_grid(&spec).unwrap().to_csv();
    let mut seq = spec.clone();
    seq.parallel = false;
    let c = run_grid(&seq).unwrap().to_csv();
    assert_eq!(a, b);
    assert_eq!(a, c);
    let mut other = spec;
    other.base_seed = 12;
    assert_ne!(a, run_grid(&other).unwrap().to_csv());
}

#[test]
fn grid_csv_layout() {
    let report = run_grid(&small_grid()).unwrap();
    let csv = report.to_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some(CSV_HEADER));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 3 * 2 * 2);
    assert_eq!(rows[0][..4], ["lrhmf", "2", "0.3", "4"]);
    for row in &rows {
        assert_eq!(row.len(), 6);
        for cell in &row[4..] {
            assert!(cell.parse::<f64>().unwrap().is_finite());
        }
    }
    let json: serde_json::Value = serde_json::from_str(&report.to_json().unwrap()).unwrap();
    assert!(json["cells"][0]["threshold"].is_string());
}

#[test]
fn grid_statistics_match_a_manual_loop() {
    let spec = small_grid();
    let report = run_grid(&spec).unwrap();
    let cell = report.cell(Method::ZeroFill, 4, 0.5).unwrap();
    let manual: Vec<f64> = (0..spec.trials)
        .map(|t| {
            let d = draw_trial(&spec, 4, 0.5, t).unwrap();
            let zf = hankel_core::sampling::zero_fill(&d.y, &d.mask).unwrap();
            rlne(zf.samples(), d.clean.samples()).unwrap()
        })
        .collect();
    let mean = manual.iter().sum::<f64>() / manual.len() as f64;
    assert!((cell.mean_rlne.unwrap() - mean).abs() < 1e-15);
    assert_eq!(cell.rlne.iter().flatten().copied().collect::<Vec<_>>(), manual);
}

#[test]
fn failed_trials_are_recorded_not_fatal() {
    let mut spec = small_grid();
    spec.methods = vec![Method::Lrhmf, Method::ZeroFill];
    // Rank 40 exceeds the 32×32 Hankel matrix of N = 63.
    spec.overrides.insert(
        Method::Lrhmf,
        SolverOverrides {
            rank: Some(40),
            ..Default::default()
        },
    );
    let report = run_grid(&spec).unwrap();
    let bad = report.cell(Method::Lrhmf, 2, 0.3).unwrap();
    assert_eq!(bad.trials, 0);
    assert_eq!(bad.failures.len(), spec.trials);
    assert!(bad.mean_rlne.is_none());
    assert!(report.cell(Method::ZeroFill, 2, 0.3).unwrap().mean_rlne.is_some());
    assert!(!report.to_csv().contains("lrhmf"));
}

#[test]
fn full_noiseless_sampling_is_nearly_exact() {
    let methods = vec![Method::Lrhmf, Method::Lrhm];
    let mut spec = ExperimentSpec::new(methods.clone(), vec![3], vec![1.0]);
    spec.trials = 1;
    spec.noise_sigma = 0.0;
    spec.n_points = 127;
    // The averaging back-projection carries no λ-dependent bias.
    for m in methods {
        spec.overrides.insert(
            m,
            SolverOverrides {
                adjoint: Some(HankelAdjoint::Average),
                ..Default::default()
            },
        );
    }
    let report = run_grid(&spec).unwrap();
    for c in &report.cells {
        assert!(c.mean_rlne.unwrap() < 1e-3, "{:?}: {:?}", c.method, c.mean_rlne);
    }
}

#[test]
fn case_report_finds_all_five_peaks() {
    let spec = CaseSpec::new(presets::five_peaks(), Method::Lrhmf, 0.25);
    let report = run_case(&spec).unwrap();
    assert_eq!(report.peaks.truth.len(), 5);
    assert!(report.peaks.matching.missing.is_empty(), "{:?}", report.peaks.matching);
    assert_eq!(report.peaks.matching.pairs.len(), 5);
    assert!(report.rlne < report.zero_fill_rlne);
    assert_eq!(report.history.len(), report.iterations);
    assert_eq!(report.singular_values.len(), 128);
}

#[test]
fn zero_fill_case_matches_the_closed_form() {
    let mut spec = CaseSpec::new(presets::weak_peaks(), Method::ZeroFill, 0.25);
    spec.mask_seed = 5;
    spec.noise_seed = 6;
    let report = run_case(&spec).unwrap();
    let clean = synthesize(&spec.model, 255).unwrap();
    let mask = make_mask(&MaskSpec::new(255, 0.25, Pattern::PoissonGap, 5)).unwrap();
    let y = undersample(&add_noise(&clean, 0.05, 6).unwrap(), &mask).unwrap();
    let mut x0 = vec![hankel_core::C64::new(0.0, 0.0); 255];
    for (&p, &v) in mask.positions().iter().zip(&y) {
        x0[p] = v;
    }
    let oracle = rlne(&x0, clean.samples()).unwrap();
    assert_eq!(report.rlne, oracle);
    assert_eq!(report.zero_fill_rlne, oracle);
    assert_eq!(report.iterations, 0);
}

/// Scores by brute force: count, for every other method, whether this one
/// beats it (smaller error, or equal error and smaller name).
fn brute_force_scores(results: &[MethodTrials]) -> Vec<[f64; 4]> {
    let trials = results[0].errors.len();
    results
        .iter()
        .map(|me| {
            let mut total = [0.0; 4];
            for t in 0..trials {
                for (p, slot) in total.iter_mut().enumerate() {
                    let beaten = results
                        .iter()
                        .filter(|o| {
                            let (a, b) = (me.errors[t][p], o.errors[t][p]);
                            a < b || (a == b && me.method < o.method)
                        })
                        .count();
                    *slot += (beaten + 1) as f64;
                }
            }
            total.map(|s| s / trials as f64)
        })
        .collect()
}

#[test]
fn scores_match_hand_computation() {
    let table = vec![
        MethodTrials {
            method: "lrhmf".into(),
            errors: vec![[0.1, 0.5, 0.2, 0.3], [0.2, 0.2, 0.9, 0.1], [0.3, 0.1, 0.1, 0.1], [0.4, 0.6, 0.5, 0.2]],
        },
        MethodTrials {
            method: "cs".into(),
            errors: vec![[0.2, 0.4, 0.2, 0.1], [0.1, 0.3, 0.8, 0.1], [0.3, 0.5, 0.7, 0.4], [0.1, 0.6, 0.4, 0.3]],
        },
        MethodTrials {
            method: "lrhm".into(),
            errors: vec![[0.3, 0.1, 0.3, 0.2], [0.3, 0.1, 0.7, 0.2], [0.5, 0.2, 0.2, 0.3], [0.2, 0.7, 0.3, 0.1]],
        },
    ];
    let scores = score_methods(&table).unwrap();
    // Trial-by-trial by hand for amplitude: lrhmf 3,2,2,1; cs 2,3,3,3; lrhm 1,1,1,2.
    assert_eq!(scores[0].mean[0], 2.0);
    assert_eq!(scores[1].mean[0], 2.75);
    assert_eq!(scores[2].mean[0], 1.25);
    let oracle = brute_force_scores(&table);
    for (s, o) in scores.iter().zip(&oracle) {
        assert_eq!(&s.mean, o, "{}", s.method);
    }
    // Scores per trial always sum to 1 + 2 + 3.
    for p in 0..4 {
        let sum: f64 = scores.iter().map(|s| s.mean[p]).sum();
        assert!((sum - 6.0).abs() < 1e-12);
    }
}

#[test]
fn parameter_trials_feed_the_scorer() {
    let spec = ScoreSpec {
        model: presets::four_peaks(),
        methods: vec![Method::Lrhmf, Method::ZeroFill],
        trials: 3,
        rate: 0.25,
        pattern: Pattern::PoissonGap,
        noise_sigma: 0.05,
        n_points: 255,
        base_seed: 3,
        overrides: Default::default(),
    };
    let trials = parameter_trials(&spec).unwrap();
    assert_eq!(trials.len(), 2);
    assert!(trials.iter().all(|t| t.errors.len() == 3));
    let scores = score_methods(&trials).unwrap();
    // Frequencies from the reconstruction beat those from zero filling.
    assert!(scores[0].mean[3] >= scores[1].mean[3]);
}
