use std::fs;
use std::path::Path;

use hankel_bench::dataset::{make_dataset, make_record, DatasetManifest, DatasetSpec, Split};
use hankel_bench::golden::{golden_cases, read_golden, write_golden, GOLDEN_COUNT, GOLDEN_SEED};
use hankel_core::signal::synthesize;
use hankel_core::solvers::data_consistency;
use hankel_core::TimeSignal;

fn golden_path() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/data/dc_golden.bin"))
}

#[test]
fn golden_file_matches_data_consistency() {
    let bytes = fs::read(golden_path()).unwrap();
    let cases = read_golden(&mut bytes.as_slice()).unwrap();
    assert_eq!(cases.len(), GOLDEN_COUNT);
    let mut worst = 0.0f64;
    for c in &cases {
        let x = TimeSignal::from_samples(c.x_tilde.clone()).unwrap();
        let out = data_consistency(&x, &c.y, &c.mask, c.lambda).unwrap();
        for (a, b) in out.samples().iter().zip(&c.expected) {
            worst = worst.max((a - b).norm());
        }
    }
    assert!(worst < 1e-12, "max deviation {worst}");
}

#[test]
fn golden_file_is_reproducible() {
    let cases = golden_cases(GOLDEN_COUNT, GOLDEN_SEED).unwrap();
    let mut buf = Vec::new();
    write_golden(&mut buf, &cases).unwrap();
    assert_eq!(buf, fs::read(golden_path()).unwrap());
}

#[test]
fn golden_cases_cover_edge_weights() {
    let cases = golden_cases(12, 1).unwrap();
    assert!(cases.iter().any(|c| c.lambda == 0.0));
    // λ = 0 leaves the estimate untouched.
    for c in cases.iter().filter(|c| c.lambda == 0.0) {
        assert_eq!(c.expected, c.x_tilde);
    }
}

fn small_spec(count: usize) -> DatasetSpec {
    let mut spec = DatasetSpec::new(count, 17);
    spec.generator.n_points = 63;
    spec
}

#[test]
fn ten_records_split_nine_to_one() {
    let dir = tempfile::tempdir().unwrap();
    let m = make_dataset(&small_spec(10), dir.path()).unwrap();
    assert_eq!((m.train_count, m.validation_count), (9, 1));
    assert_eq!(m.records.len(), 10);
    assert_eq!(m.records.iter().filter(|r| r.split == Split::Train).count(), 9);
    let back = DatasetManifest::read(dir.path()).unwrap();
    assert_eq!(back, m);
    assert_eq!(back.load(dir.path(), Split::Train).unwrap().records.len(), 9);
    assert_eq!(back.load(dir.path(), Split::Validation).unwrap().records.len(), 1);
    assert_eq!(m.m, 16);
}

#[test]
fn rerun_is_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let m = make_dataset(&small_spec(6), a.path()).unwrap();
    make_dataset(&DatasetManifest::read(a.path()).unwrap().spec(), b.path()).unwrap();
    for name in ["train.bin", "validation.bin", "manifest.json"] {
        assert_eq!(
            fs::read(a.path().join(name)).unwrap(),
            fs::read(b.path().join(name)).unwrap(),
            "{name}"
        );
    }
    // Each record is also reproducible from its own seeds alone.
    let ds = m.load(a.path(), Split::Train).unwrap();
    for (rec, seeds) in ds.records.iter().zip(&m.records) {
        assert_eq!(&make_record(&m.spec(), seeds).unwrap(), rec);
    }
}

#[test]
fn first_record_resynthesizes() {
    let dir = tempfile::tempdir().unwrap();
    let m = make_dataset(&small_spec(3), dir.path()).unwrap();
    let ds = m.load(dir.path(), Split::Train).unwrap();
    let rec = &ds.records[0];
    let model = rec.model(ds.header.dt).unwrap().unwrap();
    let x = synthesize(&model, m.n).unwrap();
    let err = x
        .samples()
        .iter()
        .zip(&rec.x)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    assert!(err <= 1e-12, "{err}");
    // Measurements are the clean samples plus noise at the mask positions.
    let mask = rec.sampling_mask(m.pattern).unwrap();
    let resid: f64 = mask
        .positions()
        .iter()
        .zip(&rec.y)
        .map(|(&p, y)| (y - rec.x[p]).norm_sqr())
        .sum::<f64>();
    let per_component = (resid / (2.0 * mask.len() as f64)).sqrt();
    assert!(per_component > 0.02 && per_component < 0.1, "{per_component}");
}

#[test]
fn tampered_manifest_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let mut m = make_dataset(&small_spec(4), dir.path()).unwrap();
    m.generator.j_range = (1, 9);
    assert!(m.load(dir.path(), Split::Train).is_err());
}
