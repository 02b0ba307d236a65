//! Command-line surface: data generation, training, prediction, bandwidth
//! cross-validation, and the benchmark harness.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::ard::{train_slr, AlphaRule, ArdConfig, TrainReport};
use crate::cslr::{train_cslr, CslrConfig};
use crate::data::{
    contaminate, fit_standardize, apply_standardize, generate_synthetic, load_csv,
    load_features_csv, save_csv, ContaminationMode, ContaminationSpec, Dataset, SyntheticSpec,
};
use crate::error::{DataError, ModelIoError, SelectError, TrainError};
use crate::logistic::{predict_dataset, train_mle, LinearModel, OptimizerConfig};
use crate::manifest::RunManifest;
use crate::model_io::{save_model, save_report, TrainMeta};
use crate::rng::derive_seed;
use crate::select::{
    default_bandwidth_grid, run_benchmark, select_bandwidth, Algorithm, BenchSpec, CvPlan,
    SigmaPolicy,
};

#[derive(Parser, Debug)]
#[command(
    name = "cslr",
    version,
    about = "Robust sparse logistic regression (SLR / CSLR) trainer and benchmark harness"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate the sparse synthetic classification task as CSV files
    Synth(SynthArgs),
    /// Fit a classifier on a CSV dataset and save the model
    Train(TrainArgs),
    /// Apply a saved model to a CSV dataset
    Predict(PredictArgs),
    /// Cross-validate the correntropy kernel bandwidth
    Cv(CvArgs),
    /// Run the Monte-Carlo contamination benchmark
    Bench(BenchArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum AlgorithmArg {
    Mle,
    Slr,
    Cslr,
}

impl From<AlgorithmArg> for Algorithm {
    fn from(a: AlgorithmArg) -> Self {
        match a {
            AlgorithmArg::Mle => Algorithm::Mle,
            AlgorithmArg::Slr => Algorithm::Slr,
            AlgorithmArg::Cslr => Algorithm::Cslr,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum AlphaRuleArg {
    Fast,
    Expectation,
}

impl From<AlphaRuleArg> for AlphaRule {
    fn from(a: AlphaRuleArg) -> Self {
        match a {
            AlphaRuleArg::Fast => AlphaRule::Fast,
            AlphaRuleArg::Expectation => AlphaRule::Expectation,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum ModeArg {
    Sample,
    Arbitrary,
}

impl From<ModeArg> for ContaminationMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Sample => ContaminationMode::Sample,
            ModeArg::Arbitrary => ContaminationMode::Arbitrary,
        }
    }
}

/// Relevance-determination knobs shared by `train`, `cv`, and `bench`.
#[derive(Args, Debug, Clone)]
pub struct ArdFlags {
    /// Prune a coordinate once its relevance parameter reaches this
    #[arg(long, default_value_t = 1e8)]
    pub alpha_max: f64,
    /// Outer iteration cap
    #[arg(long, default_value_t = 300)]
    pub max_iter: usize,
    /// Convergence tolerance on parameter changes
    #[arg(long, default_value_t = 1e-4)]
    pub tol: f64,
    /// Relevance update rule
    #[arg(long, value_enum, default_value_t = AlphaRuleArg::Fast)]
    pub alpha_rule: AlphaRuleArg,
    /// Keep the bias at a small fixed precision, exempt from pruning
    #[arg(long, default_value_t = false)]
    pub protect_bias: bool,
    /// Half-quadratic alternation cap per ω-step (cslr only)
    #[arg(long, default_value_t = 30)]
    pub hq_max_iter: usize,
}

impl ArdFlags {
    fn ard_config(&self) -> ArdConfig {
        ArdConfig {
            alpha_max: self.alpha_max,
            max_iter: self.max_iter,
            tol: self.tol,
            alpha_rule: self.alpha_rule.into(),
            protect_bias: self.protect_bias,
            ..ArdConfig::default()
        }
    }

    fn cslr_config(&self, sigma: f64) -> CslrConfig {
        let mut config = CslrConfig::new(sigma).with_ard(&self.ard_config());
        config.max_hq_iter = self.hq_max_iter;
        config
    }
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 500)]
    pub dim: usize,
    #[arg(long, default_value_t = 5)]
    pub relevant: usize,
    #[arg(long, default_value_t = 300)]
    pub n_train: usize,
    #[arg(long, default_value_t = 300)]
    pub n_test: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Contaminate the training set with this corruption model
    #[arg(long, value_enum)]
    pub contaminate: Option<ModeArg>,
    /// Proportion of rows/cells to corrupt
    #[arg(long, default_value_t = 0.0)]
    pub prop: f64,
    /// Standard deviation of the replacement noise
    #[arg(long, default_value_t = 1.0)]
    pub std: f64,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Args, Debug)]
pub struct TrainArgs {
    #[arg(long, value_enum)]
    pub algo: AlgorithmArg,
    #[arg(long)]
    pub data: PathBuf,
    /// Label column, by name or zero-based index
    #[arg(long, default_value = "label")]
    pub label: String,
    #[arg(long, default_value = "model.json")]
    pub out: PathBuf,
    /// Optional per-iteration trace CSV
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Kernel bandwidth (cslr); mutually exclusive with --sigma-cv
    #[arg(long, conflicts_with = "sigma_cv")]
    pub sigma: Option<f64>,
    /// Select the bandwidth by cross-validation (cslr)
    #[arg(long, default_value_t = false)]
    pub sigma_cv: bool,
    #[arg(long, default_value_t = 5)]
    pub cv_folds: usize,
    /// Comma-separated bandwidth candidates for --sigma-cv
    #[arg(long)]
    pub sigma_grid: Option<String>,
    #[command(flatten)]
    pub ard: ArdFlags,
}

#[derive(Args, Debug)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    /// Label column to drop from the input, if present
    #[arg(long)]
    pub label: Option<String>,
    #[arg(long, default_value = "predictions.csv")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct CvArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value = "label")]
    pub label: String,
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    /// Comma-separated bandwidth candidates
    #[arg(long)]
    pub sigma_grid: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Optionally write the selected bandwidth to this file
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub ard: ArdFlags,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 500)]
    pub dim: usize,
    #[arg(long, default_value_t = 5)]
    pub relevant: usize,
    #[arg(long, default_value_t = 300)]
    pub n_train: usize,
    #[arg(long, default_value_t = 300)]
    pub n_test: usize,
    #[arg(long, default_value_t = 20)]
    pub reps: usize,
    /// Comma-separated contamination proportions; defaults to 0..1 in
    /// steps of 0.05
    #[arg(long)]
    pub props: Option<String>,
    /// Comma-separated noise standard deviations
    #[arg(long, default_value = "0.1,0.3,0.7,1.0,2.0,3.0")]
    pub stds: String,
    /// Comma-separated corruption modes
    #[arg(long, default_value = "sample,arbitrary")]
    pub modes: String,
    /// Comma-separated algorithms to benchmark
    #[arg(long, default_value = "slr,cslr")]
    pub algos: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Fixed bandwidth for cslr; by default the bandwidth is
    /// cross-validated per repetition
    #[arg(long)]
    pub sigma_fixed: Option<f64>,
    #[arg(long, default_value_t = 5)]
    pub cv_folds: usize,
    /// Comma-separated bandwidth candidates for the per-repetition CV
    #[arg(long)]
    pub sigma_grid: Option<String>,
    /// Worker threads; results are identical for any value
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Record real wall times (makes outputs non-reproducible)
    #[arg(long, default_value_t = false)]
    pub timing: bool,
    #[arg(long, default_value = "bench-out")]
    pub out_dir: PathBuf,
    #[command(flatten)]
    pub ard: ArdFlags,
}

/// Anything a subcommand can fail with, mapped onto the stable exit codes:
/// 0 success, 2 usage, 3 data error, 4 numerical failure.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Train(#[from] TrainError),
    #[error(transparent)]
    Select(#[from] SelectError),
    #[error(transparent)]
    Io(#[from] ModelIoError),
    #[error("every benchmark cell failed")]
    AllCellsFailed,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Data(_) => 3,
            CliError::Train(TrainError::NumericalFailure(_)) => 4,
            CliError::Train(TrainError::InvalidConfig(_)) => 2,
            CliError::Train(_) => 3,
            CliError::Select(SelectError::InvalidPlan(_)) => 2,
            CliError::Select(SelectError::Train(TrainError::NumericalFailure(_))) => 4,
            CliError::Select(_) => 3,
            CliError::Io(_) => 3,
            CliError::AllCellsFailed => 4,
        }
    }
}

impl Cli {
    pub fn run(self) -> Result<(), CliError> {
        match self.command {
            Command::Synth(args) => cmd_synth(&args),
            Command::Train(args) => cmd_train(&args),
            Command::Predict(args) => cmd_predict(&args),
            Command::Cv(args) => cmd_cv(&args),
            Command::Bench(args) => cmd_bench(&args),
        }
    }
}

fn parse_f64_list(text: &str, what: &str) -> Result<Vec<f64>, CliError> {
    let mut values = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let v: f64 = part.parse().map_err(|_| {
            CliError::Data(DataError::InvalidSpec(format!(
                "cannot parse {what} value {part:?}"
            )))
        })?;
        values.push(v);
    }
    if values.is_empty() {
        return Err(CliError::Data(DataError::InvalidSpec(format!(
            "empty {what} list"
        ))));
    }
    Ok(values)
}

fn default_proportions() -> Vec<f64> {
    (0..=20).map(|i| f64::from(i) / 20.0).collect()
}

fn sigma_grid_from(flag: &Option<String>) -> Result<Vec<f64>, CliError> {
    match flag {
        Some(text) => parse_f64_list(text, "sigma-grid"),
        None => Ok(default_bandwidth_grid()),
    }
}

fn args_of_record(command: &str) -> Vec<String> {
    // skip argv[0]; the manifest stores the subcommand separately too
    let _ = command;
    std::env::args().skip(1).collect()
}

pub fn cmd_synth(args: &SynthArgs) -> Result<(), CliError> {
    let spec = SyntheticSpec::new(args.n_train, args.n_test, args.dim, args.relevant, args.seed)?;
    let (mut train, test, weights, mask) = generate_synthetic(&spec);
    if let Some(mode) = args.contaminate {
        let cspec = ContaminationSpec::new(
            mode.into(),
            args.prop,
            args.std,
            derive_seed(args.seed, "synth-contam", &[]),
        )?;
        train = contaminate(&train, &cspec);
    }
    fs::create_dir_all(&args.out_dir).map_err(|source| {
        CliError::Data(DataError::Io {
            path: args.out_dir.clone(),
            source,
        })
    })?;
    let mut manifest = RunManifest::begin("synth", args_of_record("synth"), Some(args.seed));
    let train_path = args.out_dir.join("train.csv");
    let test_path = args.out_dir.join("test.csv");
    let truth_path = args.out_dir.join("truth.csv");
    save_csv(&train, &train_path, "label")?;
    save_csv(&test, &test_path, "label")?;
    write_truth_csv(&truth_path, weights.as_slice().unwrap(), &mask)?;
    for p in [&train_path, &test_path, &truth_path] {
        manifest.record_output(p);
    }
    manifest.finish(&args.out_dir)?;
    log::info!(
        "synth: wrote {} train rows, {} test rows to {}",
        args.n_train,
        args.n_test,
        args.out_dir.display()
    );
    Ok(())
}

fn write_truth_csv(path: &Path, weights: &[f64], mask: &[bool]) -> Result<(), CliError> {
    let io_err = |source| {
        CliError::Data(DataError::Io {
            path: path.to_path_buf(),
            source,
        })
    };
    let mut out = fs::File::create(path).map_err(io_err)?;
    writeln!(out, "feature,weight,relevant").map_err(io_err)?;
    for (j, (&w, &r)) in weights.iter().zip(mask).enumerate() {
        writeln!(out, "f{},{},{}", j + 1, w, u8::from(r)).map_err(io_err)?;
    }
    Ok(())
}

pub fn cmd_train(args: &TrainArgs) -> Result<(), CliError> {
    let raw = load_csv(&args.data, &args.label)?;
    let stats = fit_standardize(&raw);
    let data = apply_standardize(&stats, &raw)?;

    let algorithm: Algorithm = args.algo.into();
    let (model, meta, report): (LinearModel, TrainMeta, Option<TrainReport>) = match algorithm {
        Algorithm::Mle => {
            let model = train_mle(&data, &OptimizerConfig::default())?;
            let meta = TrainMeta {
                seed: Some(args.seed),
                iterations: 0,
                objective_trace_last: None,
            };
            (model, meta, None)
        }
        Algorithm::Slr => {
            let (model, report) = train_slr(&data, &args.ard.ard_config())?;
            let meta = TrainMeta {
                seed: Some(args.seed),
                iterations: report.iterations(),
                objective_trace_last: report.final_objective(),
            };
            (model, meta, Some(report))
        }
        Algorithm::Cslr => {
            let sigma = match (args.sigma, args.sigma_cv) {
                (Some(sigma), _) => sigma,
                (None, true) => {
                    let plan = CvPlan::new(
                        args.cv_folds,
                        sigma_grid_from(&args.sigma_grid)?,
                        derive_seed(args.seed, "cv", &[]),
                    )?;
                    select_bandwidth(&data, &plan, &args.ard.cslr_config(1.0))?
                }
                (None, false) => {
                    return Err(CliError::Train(TrainError::InvalidConfig(
                        "cslr needs --sigma or --sigma-cv".into(),
                    )))
                }
            };
            let (model, report) = train_cslr(&data, &args.ard.cslr_config(sigma))?;
            let meta = TrainMeta {
                seed: Some(args.seed),
                iterations: report.iterations(),
                objective_trace_last: report.final_objective(),
            };
            (model, meta, Some(report))
        }
    };

    let model = model.with_standardization(stats);
    let mut manifest = RunManifest::begin("train", args_of_record("train"), Some(args.seed));
    save_model(&args.out, &model, algorithm.as_str(), &meta)?;
    manifest.record_output(&args.out);
    if let (Some(report_path), Some(report)) = (&args.report, &report) {
        save_report(report_path, report)?;
        manifest.record_output(report_path);
    }
    let manifest_dir = args.out.parent().filter(|p| !p.as_os_str().is_empty());
    manifest.finish(manifest_dir.unwrap_or(Path::new(".")))?;
    log::info!(
        "train: {} on {} samples × {} features, {} active coordinates",
        algorithm.as_str(),
        raw.n_samples(),
        raw.n_features(),
        model.n_active()
    );
    Ok(())
}

pub fn cmd_predict(args: &PredictArgs) -> Result<(), CliError> {
    let (model, _, _) = crate::model_io::load_model(&args.model)?;
    let (attributes, names) = load_features_csv(&args.data, args.label.as_deref())?;
    let n = attributes.nrows();
    let data = Dataset::new(attributes, vec![0; n], Some(names))?;
    let (probabilities, labels) = predict_dataset(&model, &data)?;

    let io_err = |source| {
        CliError::Data(DataError::Io {
            path: args.out.clone(),
            source,
        })
    };
    let mut out = fs::File::create(&args.out).map_err(io_err)?;
    writeln!(out, "probability,label").map_err(io_err)?;
    for (p, l) in probabilities.iter().zip(&labels) {
        writeln!(out, "{p},{l}").map_err(io_err)?;
    }
    let mut manifest = RunManifest::begin("predict", args_of_record("predict"), None);
    manifest.record_output(&args.out);
    let manifest_dir = args.out.parent().filter(|p| !p.as_os_str().is_empty());
    manifest.finish(manifest_dir.unwrap_or(Path::new(".")))?;
    Ok(())
}

pub fn cmd_cv(args: &CvArgs) -> Result<(), CliError> {
    let raw = load_csv(&args.data, &args.label)?;
    let stats = fit_standardize(&raw);
    let data = apply_standardize(&stats, &raw)?;
    let plan = CvPlan::new(
        args.folds,
        sigma_grid_from(&args.sigma_grid)?,
        derive_seed(args.seed, "cv", &[]),
    )?;
    let sigma = select_bandwidth(&data, &plan, &args.ard.cslr_config(1.0))?;
    println!("{sigma}");
    if let Some(out) = &args.out {
        let io_err = |source| {
            CliError::Data(DataError::Io {
                path: out.clone(),
                source,
            })
        };
        fs::write(out, format!("{sigma}\n")).map_err(io_err)?;
        let mut manifest = RunManifest::begin("cv", args_of_record("cv"), Some(args.seed));
        manifest.record_output(out);
        let manifest_dir = out.parent().filter(|p| !p.as_os_str().is_empty());
        manifest.finish(manifest_dir.unwrap_or(Path::new(".")))?;
    }
    Ok(())
}

pub fn cmd_bench(args: &BenchArgs) -> Result<(), CliError> {
    let proportions = match &args.props {
        Some(text) => parse_f64_list(text, "props")?,
        None => default_proportions(),
    };
    let noise_stds = parse_f64_list(&args.stds, "stds")?;
    let mut modes = Vec::new();
    for part in args.modes.split(',').filter(|p| !p.trim().is_empty()) {
        modes.push(ContaminationMode::parse(part.trim())?);
    }
    let mut algorithms = Vec::new();
    for part in args.algos.split(',').filter(|p| !p.trim().is_empty()) {
        algorithms.push(Algorithm::parse(part.trim())?);
    }
    let sigma_policy = match args.sigma_fixed {
        Some(sigma) => SigmaPolicy::Fixed(sigma),
        None => SigmaPolicy::CrossValidate {
            n_folds: args.cv_folds,
            candidates: sigma_grid_from(&args.sigma_grid)?,
        },
    };
    let spec = BenchSpec {
        synthetic: SyntheticSpec::new(args.n_train, args.n_test, args.dim, args.relevant, args.seed)?,
        modes,
        proportions,
        noise_stds,
        n_repetitions: args.reps,
        algorithms,
        seed: args.seed,
        sigma_policy,
        slr_config: args.ard.ard_config(),
        cslr_config: args.ard.cslr_config(1.0),
        mle_config: OptimizerConfig::default(),
        timing: args.timing,
    };

    let result = match args.jobs {
        Some(jobs) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs.max(1))
                .build()
                .map_err(|e| {
                    CliError::Select(SelectError::InvalidPlan(format!(
                        "cannot build thread pool: {e}"
                    )))
                })?;
            pool.install(|| run_benchmark(&spec))?
        }
        None => run_benchmark(&spec)?,
    };

    fs::create_dir_all(&args.out_dir).map_err(|source| {
        CliError::Data(DataError::Io {
            path: args.out_dir.clone(),
            source,
        })
    })?;
    let raw_path = args.out_dir.join("raw.csv");
    let agg_path = args.out_dir.join("aggregate.csv");
    result.write_raw_csv(&raw_path)?;
    result.write_aggregate_csv(&agg_path)?;
    let mut manifest = RunManifest::begin("bench", args_of_record("bench"), Some(args.seed));
    manifest.record_output(&raw_path);
    manifest.record_output(&agg_path);
    manifest.finish(&args.out_dir)?;

    let failures = result.raw.iter().filter(|r| r.outcome.is_err()).count();
    if failures > 0 {
        log::warn!("bench: {failures}/{} cells failed", result.raw.len());
    }
    if result.all_failed() {
        return Err(CliError::AllCellsFailed);
    }
    Ok(())
}
