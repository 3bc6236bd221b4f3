//! Training and validation sets of `(y, Ω, x)` triples.

use std::path::{Path, PathBuf};

use hankel_core::rng::derive_seed;
use hankel_core::sampling::{make_mask, undersample};
use hankel_core::signal::{add_noise, random_model, synthesize};
use hankel_core::{GeneratorSpec, MaskSpec, Pattern};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{spec_err, Result};
use crate::format::{read_dataset_file, read_json, write_dataset_file, write_json, Dataset, Record, FORMAT_VERSION};

pub const TRAIN_FILE: &str = "train.bin";
pub const VALIDATION_FILE: &str = "validation.bin";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSpec {
    pub generator: GeneratorSpec,
    pub noise_sigma: f64,
    pub rate: f64,
    pub pattern: Pattern,
    pub count: usize,
    /// Fraction of records in the training file.
    pub split: f64,
    pub base_seed: u64,
}

impl DatasetSpec {
    /// Desk-scale defaults: 4000 records, J in [1, 5], 25% Poisson-gap,
    /// σ = 0.05 and a 90/10 split.
    pub fn new(count: usize, base_seed: u64) -> Self {
        Self {
            generator: GeneratorSpec {
                j_range: (1, 5),
                ..GeneratorSpec::default()
            },
            noise_sigma: 0.05,
            rate: 0.25,
            pattern: Pattern::PoissonGap,
            count,
            split: 0.9,
            base_seed,
        }
    }

    /// Number of records that go to the training file.
    pub fn train_count(&self) -> usize {
        ((self.split * self.count as f64).round() as usize).min(self.count)
    }

    pub fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(spec_err("dataset count must be >= 1"));
        }
        if !(0.0..=1.0).contains(&self.split) {
            return Err(spec_err(format!("split {} is outside [0, 1]", self.split)));
        }
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0) {
            return Err(spec_err(format!("noise sigma {} must be >= 0", self.noise_sigma)));
        }
        self.generator.validate()?;
        MaskSpec::new(self.generator.n_points, self.rate, self.pattern, 0).sample_count()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Validation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordSeeds {
    pub index: usize,
    pub split: Split,
    pub model: u64,
    pub mask: u64,
    pub noise: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub version: u64,
    pub n: usize,
    pub m: usize,
    pub count: usize,
    pub dt: f64,
    pub noise_sigma: f64,
    pub rate: f64,
    pub pattern: Pattern,
    pub split: f64,
    pub train_count: usize,
    pub validation_count: usize,
    pub train_file: String,
    pub validation_file: String,
    pub base_seed: u64,
    pub generator: GeneratorSpec,
    /// Hex SHA-256 of the compact JSON form of `generator`.
    pub generator_digest: String,
    pub records: Vec<RecordSeeds>,
}

pub fn generator_digest(spec: &GeneratorSpec) -> Result<String> {
    let bytes = serde_json::to_vec(spec)?;
    Ok(Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect())
}

/// Seeds of record `index`, derived from the base seed alone.
pub fn record_seeds(base_seed: u64, index: usize, split: Split) -> RecordSeeds {
    let seed = derive_seed(base_seed, &[index as u64]);
    RecordSeeds {
        index,
        split,
        model: derive_seed(seed, &[0]),
        mask: derive_seed(seed, &[1]),
        noise: derive_seed(seed, &[2]),
    }
}

/// Builds one record from its seeds.
pub fn make_record(spec: &DatasetSpec, seeds: &RecordSeeds) -> Result<Record> {
    let n = spec.generator.n_points;
    let model = random_model(&spec.generator, seeds.model)?;
    let clean = synthesize(&model, n)?;
    let mask = make_mask(&MaskSpec::new(n, spec.rate, spec.pattern, seeds.mask))?;
    let y = undersample(&add_noise(&clean, spec.noise_sigma, seeds.noise)?, &mask)?;
    Ok(Record::from_model(Some(&model), &mask, clean.into_samples(), y))
}

/// Writes the training file, the validation file and the manifest into
/// `dir`. The first `round(split·count)` records form the training set. A
/// split with no records writes no file for it.
pub fn make_dataset(spec: &DatasetSpec, dir: &Path) -> Result<DatasetManifest> {
    spec.validate()?;
    let train_count = spec.train_count();
    let seeds: Vec<RecordSeeds> = (0..spec.count)
        .map(|i| {
            let split = if i < train_count { Split::Train } else { Split::Validation };
            record_seeds(spec.base_seed, i, split)
        })
        .collect();
    let records = seeds
        .iter()
        .map(|s| make_record(spec, s))
        .collect::<Result<Vec<_>>>()?;
    let n = spec.generator.n_points;
    let m = records[0].mask.len();
    let (train, validation) = records.split_at(train_count);
    for (part, name) in [(train, TRAIN_FILE), (validation, VALIDATION_FILE)] {
        if !part.is_empty() {
            write_dataset_file(&dir.join(name), &Dataset::new(1.0, part.to_vec())?)?;
        }
    }
    let manifest = DatasetManifest {
        version: FORMAT_VERSION,
        n,
        m,
        count: spec.count,
        dt: 1.0,
        noise_sigma: spec.noise_sigma,
        rate: spec.rate,
        pattern: spec.pattern,
        split: spec.split,
        train_count,
        validation_count: spec.count - train_count,
        train_file: TRAIN_FILE.into(),
        validation_file: VALIDATION_FILE.into(),
        base_seed: spec.base_seed,
        generator: spec.generator.clone(),
        generator_digest: generator_digest(&spec.generator)?,
        records: seeds,
    };
    write_json(&dir.join(MANIFEST_FILE), &manifest)?;
    Ok(manifest)
}

impl DatasetManifest {
    pub fn read(dir: &Path) -> Result<Self> {
        read_json(&dir.join(MANIFEST_FILE))
    }

    /// The specification the manifest was written from.
    pub fn spec(&self) -> DatasetSpec {
        DatasetSpec {
            generator: self.generator.clone(),
            noise_sigma: self.noise_sigma,
            rate: self.rate,
            pattern: self.pattern,
            count: self.count,
            split: self.split,
            base_seed: self.base_seed,
        }
    }

    pub fn path(&self, dir: &Path, split: Split) -> PathBuf {
        match split {
            Split::Train => dir.join(&self.train_file),
            Split::Validation => dir.join(&self.validation_file),
        }
    }

    /// Reads one split back, checking it against the manifest.
    pub fn load(&self, dir: &Path, split: Split) -> Result<Dataset> {
        let ds = read_dataset_file(&self.path(dir, split))?;
        let expected = match split {
            Split::Train => self.train_count,
            Split::Validation => self.validation_count,
        };
        if ds.header.n as usize != self.n || ds.header.m as usize != self.m || ds.header.count as usize != expected {
            return Err(spec_err(format!(
                "{split:?} file header N={} M={} Q={} disagrees with the manifest",
                ds.header.n, ds.header.m, ds.header.count
            )));
        }
        if generator_digest(&self.generator)? != self.generator_digest {
            return Err(spec_err("generator digest does not match the recorded generator"));
        }
        Ok(ds)
    }
}
