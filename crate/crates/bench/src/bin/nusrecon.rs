//! Command-line front end: synthesize, sample, reconstruct and evaluate
//! signals, and run RLNE grids, dataset generation and rank scoring.
//!
//! Exit status is 0 on success, 2 on a usage error and 1 when the command
//! itself fails.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hankel_bench::case::{peak_report, run_case_on, DEFAULT_D_MAX, DEFAULT_WINDOW};
use hankel_bench::dataset::{make_dataset, DatasetSpec};
use hankel_bench::format::{read_dataset_file, read_json, write_dataset_file, write_json, Dataset, MaskFile, Record};
use hankel_bench::grid::{run_grid, ExperimentSpec};
use hankel_bench::method::{Method, SolverOverrides};
use hankel_bench::score::{parameter_trials, score_methods, MethodTrials, ScoreSpec, PARAMETERS};
use hankel_bench::{BenchError, Result};
use hankel_core::metrics::rlne;
use hankel_core::rng::derive_seed;
use hankel_core::sampling::make_mask;
use hankel_core::signal::{add_noise, presets, random_model, synthesize};
use hankel_core::{ExponentialModel, GeneratorSpec, MaskSpec, Pattern, SamplingMask, TimeSignal};

#[derive(Parser)]
#[command(name = "nusrecon", version, about = "Low-rank Hankel reconstruction of non-uniformly sampled signals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize a signal from a preset or a random model.
    Generate(GenerateArgs),
    /// Undersample a fully sampled signal file.
    Sample(SampleArgs),
    /// Reconstruct every record of a sampled signal file.
    Reconstruct(ReconstructArgs),
    /// Compare reconstructions against reference signals.
    Evaluate(EvaluateArgs),
    /// Monte-Carlo RLNE grid over component counts and sampling rates.
    Grid(GridArgs),
    /// Write a training/validation dataset and its manifest.
    Dataset(DatasetArgs),
    /// Rank methods by parameter-estimation error.
    Score(ScoreArgs),
}

#[derive(Args)]
struct SolverArgs {
    /// Data-consistency weight.
    #[arg(long)]
    lambda: Option<f64>,
    /// ADMM penalty.
    #[arg(long)]
    beta: Option<f64>,
    /// Factorization rank for lrhmf.
    #[arg(long)]
    rank: Option<usize>,
    #[arg(long)]
    max_iters: Option<usize>,
}

impl SolverArgs {
    fn overrides(&self) -> SolverOverrides {
        SolverOverrides {
            lambda: self.lambda,
            beta: self.beta,
            rank: self.rank,
            max_iters: self.max_iters,
            ..Default::default()
        }
    }
}

#[derive(Args)]
struct GenerateArgs {
    /// Named model: weak-peaks, five-peaks or four-peaks.
    #[arg(long, conflicts_with = "components")]
    preset: Option<String>,
    /// Number of components of a random model.
    #[arg(long)]
    components: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Standard deviation of the noise on each real and imaginary part.
    #[arg(long, default_value_t = 0.0)]
    sigma: f64,
    #[arg(long, default_value_t = 255)]
    n: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    rate: f64,
    #[arg(long, value_parser = parse_pattern, default_value = "poisson_gap")]
    pattern: Pattern,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Also write the mask of the first record as JSON.
    #[arg(long)]
    mask_out: Option<PathBuf>,
}

#[derive(Args)]
struct ReconstructArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    method: Method,
    #[command(flatten)]
    solver: SolverArgs,
    /// Noise level, used by the CS threshold floor and the peak floor.
    #[arg(long, default_value_t = 0.05)]
    sigma: f64,
    /// Signal file receiving the reconstructions.
    #[arg(long)]
    out: PathBuf,
    /// Full per-record JSON report with spectra, peaks and iteration history.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Record the Hankel nuclear norm every iteration.
    #[arg(long)]
    track_nuclear_norm: bool,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Reconstruction file.
    #[arg(long)]
    input: PathBuf,
    /// Reference signal file.
    #[arg(long)]
    truth: PathBuf,
    #[arg(long, default_value_t = 0.05)]
    sigma: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GridArgs {
    /// Comma-separated methods: lrhm, lrhmf, cs, zero_fill.
    #[arg(long, value_delimiter = ',', required = true)]
    method: Vec<Method>,
    /// Comma-separated component counts.
    #[arg(long = "components", short = 'j', value_delimiter = ',', required = true)]
    components: Vec<usize>,
    /// Comma-separated sampling rates.
    #[arg(long, value_delimiter = ',', required = true)]
    rate: Vec<f64>,
    #[arg(long, default_value_t = 50)]
    trials: usize,
    #[arg(long, default_value_t = 0.05)]
    sigma: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_parser = parse_pattern, default_value = "poisson_gap")]
    pattern: Pattern,
    #[arg(long, default_value_t = 255)]
    n: usize,
    #[command(flatten)]
    solver: SolverArgs,
    /// Run trials one after another instead of on the thread pool.
    #[arg(long)]
    sequential: bool,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the full JSON report here.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct DatasetArgs {
    #[arg(long, default_value_t = 4000)]
    count: usize,
    /// Fraction of records in the training file.
    #[arg(long, default_value_t = 0.9)]
    split: f64,
    #[arg(long, default_value_t = 0.05)]
    sigma: f64,
    #[arg(long, default_value_t = 0.25)]
    rate: f64,
    #[arg(long, value_parser = parse_pattern, default_value = "poisson_gap")]
    pattern: Pattern,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Largest component count of the random models.
    #[arg(long, default_value_t = 5)]
    max_components: usize,
    #[arg(long, default_value_t = 255)]
    n: usize,
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ScoreArgs {
    /// JSON list of per-method trial errors to score instead of running
    /// an experiment.
    #[arg(long, conflicts_with = "preset")]
    input: Option<PathBuf>,
    #[arg(long, default_value = "four-peaks")]
    preset: String,
    #[arg(long, value_delimiter = ',', default_value = "cs,lrhm,lrhmf,zero_fill")]
    method: Vec<Method>,
    #[arg(long, default_value_t = 50)]
    trials: usize,
    #[arg(long, default_value_t = 0.25)]
    rate: f64,
    #[arg(long, default_value_t = 0.05)]
    sigma: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_parser = parse_pattern, default_value = "poisson_gap")]
    pattern: Pattern,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_pattern(s: &str) -> std::result::Result<Pattern, String> {
    s.parse().map_err(|e: hankel_core::Error| e.to_string())
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn preset(name: &str) -> Result<ExponentialModel> {
    presets::by_name(name).ok_or_else(|| {
        BenchError::Spec(format!(
            "unknown preset '{name}', expected one of {}",
            presets::NAMES.join(", ")
        ))
    })
}

fn generate(a: &GenerateArgs) -> Result<()> {
    let model = match (&a.preset, a.components) {
        (Some(name), _) => preset(name)?,
        (None, j) => random_model(
            &GeneratorSpec {
                n_points: a.n,
                ..GeneratorSpec::with_components(j.unwrap_or(5))
            },
            a.seed,
        )?,
    };
    let clean = synthesize(&model, a.n)?;
    let noisy = add_noise(&clean, a.sigma, derive_seed(a.seed, &[2]))?;
    let record = Record::from_model(
        Some(&model),
        &SamplingMask::full(a.n),
        clean.into_samples(),
        noisy.into_samples(),
    );
    write_dataset_file(&a.out, &Dataset::new(model.dt(), vec![record])?)
}

fn sample(a: &SampleArgs) -> Result<()> {
    let ds = read_dataset_file(&a.input)?;
    if ds.header.m != ds.header.n {
        return Err(BenchError::Spec("input is already undersampled".into()));
    }
    let n = ds.header.n as usize;
    let mut first_mask = None;
    let records = ds
        .records
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let seed = derive_seed(a.seed, &[i as u64]);
            let mask = make_mask(&MaskSpec::new(n, a.rate, a.pattern, seed))?;
            let y = mask.positions().iter().map(|&p| r.y[p]).collect();
            let out = Record {
                params: r.params.clone(),
                mask: mask.indices_one_based(),
                x: r.x.clone(),
                y,
            };
            first_mask.get_or_insert((mask, seed));
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    write_dataset_file(&a.out, &Dataset::new(ds.header.dt, records)?)?;
    if let (Some(path), Some((mask, seed))) = (&a.mask_out, first_mask) {
        write_json(path, &MaskFile::new(&mask, seed))?;
    }
    Ok(())
}

fn reconstruct(a: &ReconstructArgs) -> Result<()> {
    let ds = read_dataset_file(&a.input)?;
    let mut overrides = a.solver.overrides();
    overrides.track_nuclear_norm = a.track_nuclear_norm;
    let mut reports = Vec::new();
    let mut out_records = Vec::new();
    for r in &ds.records {
        let truth = TimeSignal::new(r.x.clone(), ds.header.dt)?;
        let mask = r.sampling_mask(Pattern::PoissonGap)?;
        let rep = run_case_on(&truth, &r.y, &mask, a.method, &overrides, a.sigma, DEFAULT_D_MAX, DEFAULT_WINDOW)?;
        out_records.push(Record::from_model(None, &mask, rep.x_hat.clone(), r.y.clone()));
        reports.push(rep);
    }
    write_dataset_file(&a.out, &Dataset::new(ds.header.dt, out_records)?)?;
    if let Some(path) = &a.report {
        write_json(path, &reports)?;
    }
    let text = match a.format {
        Format::Csv => {
            let mut s = String::from("record,method,rlne,iterations,converged\n");
            for (i, r) in reports.iter().enumerate() {
                let _ = writeln!(s, "{i},{},{},{},{}", r.method, r.rlne, r.iterations, r.converged);
            }
            s
        }
        Format::Json => {
            let rows: Vec<_> = reports
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    serde_json::json!({
                        "record": i,
                        "method": r.method,
                        "rlne": r.rlne,
                        "iterations": r.iterations,
                        "converged": r.converged,
                    })
                })
                .collect();
            serde_json::to_string_pretty(&rows)? + "\n"
        }
    };
    emit(None, &text)
}

fn evaluate(a: &EvaluateArgs) -> Result<()> {
    let recon = read_dataset_file(&a.input)?;
    let truth = read_dataset_file(&a.truth)?;
    if recon.records.len() != truth.records.len() || recon.header.n != truth.header.n {
        return Err(BenchError::Spec("input and truth files hold different signals".into()));
    }
    let mut rows = Vec::new();
    for (i, (r, t)) in recon.records.iter().zip(&truth.records).enumerate() {
        let x_hat = TimeSignal::new(r.x.clone(), recon.header.dt)?;
        let x = TimeSignal::new(t.x.clone(), truth.header.dt)?;
        let peaks = peak_report(&x_hat, &x, a.sigma, DEFAULT_D_MAX, DEFAULT_WINDOW)?;
        rows.push(serde_json::json!({
            "record": i,
            "rlne": rlne(x_hat.samples(), x.samples())?,
            "peaks": peaks.truth.len(),
            "missing_peaks": peaks.matching.missing.len(),
            "weakest_peak_correlation": peaks.weakest_correlation,
        }));
    }
    let text = match a.format {
        Format::Json => serde_json::to_string_pretty(&rows)? + "\n",
        Format::Csv => {
            let mut s = String::from("record,rlne,peaks,missing_peaks,weakest_peak_correlation\n");
            for r in &rows {
                let corr = r["weakest_peak_correlation"].as_f64().map(|c| c.to_string()).unwrap_or_default();
                let _ = writeln!(
                    s,
                    "{},{},{},{},{corr}",
                    r["record"], r["rlne"], r["peaks"], r["missing_peaks"]
                );
            }
            s
        }
    };
    emit(a.out.as_deref(), &text)
}

fn grid(a: &GridArgs) -> Result<()> {
    let mut spec = ExperimentSpec::new(a.method.clone(), a.components.clone(), a.rate.clone());
    spec.trials = a.trials;
    spec.noise_sigma = a.sigma;
    spec.base_seed = a.seed;
    spec.pattern = a.pattern;
    spec.n_points = a.n;
    spec.parallel = !a.sequential;
    let overrides = a.solver.overrides();
    for &m in &a.method {
        spec.overrides.insert(m, overrides.clone());
    }
    let report = run_grid(&spec)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    if let Some(path) = &a.report {
        write_json(path, &report)?;
    }
    let text = match a.format {
        Format::Csv => report.to_csv(),
        Format::Json => report.to_json()? + "\n",
    };
    emit(a.out.as_deref(), &text)
}

fn dataset(a: &DatasetArgs) -> Result<()> {
    let mut spec = DatasetSpec::new(a.count, a.seed);
    spec.generator.j_range = (1, a.max_components);
    spec.generator.n_points = a.n;
    spec.split = a.split;
    spec.noise_sigma = a.sigma;
    spec.rate = a.rate;
    spec.pattern = a.pattern;
    std::fs::create_dir_all(&a.out)?;
    let manifest = make_dataset(&spec, &a.out)?;
    println!(
        "wrote {} training and {} validation records to {}",
        manifest.train_count,
        manifest.validation_count,
        a.out.display()
    );
    Ok(())
}

fn score(a: &ScoreArgs) -> Result<()> {
    let trials: Vec<MethodTrials> = match &a.input {
        Some(path) => read_json(path)?,
        None => {
            let overrides = a.solver.overrides();
            parameter_trials(&ScoreSpec {
                model: preset(&a.preset)?,
                methods: a.method.clone(),
                trials: a.trials,
                rate: a.rate,
                pattern: a.pattern,
                noise_sigma: a.sigma,
                n_points: 255,
                base_seed: a.seed,
                overrides: a.method.iter().map(|&m| (m, overrides.clone())).collect(),
            })?
        }
    };
    let scores = score_methods(&trials)?;
    let text = match a.format {
        Format::Json => serde_json::to_string_pretty(&scores)? + "\n",
        Format::Csv => {
            let mut s = String::from("method,parameter,mean_score,std_score\n");
            for m in &scores {
                for (p, name) in PARAMETERS.iter().enumerate() {
                    let _ = writeln!(s, "{},{name},{},{}", m.method, m.mean[p], m.std[p]);
                }
            }
            s
        }
    };
    emit(a.out.as_deref(), &text)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    let result = match &cli.command {
        Command::Generate(a) => generate(a),
        Command::Sample(a) => sample(a),
        Command::Reconstruct(a) => reconstruct(a),
        Command::Evaluate(a) => evaluate(a),
        Command::Grid(a) => grid(a),
        Command::Dataset(a) => dataset(a),
        Command::Score(a) => score(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
