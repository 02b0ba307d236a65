//! Bandwidth cross-validation, train/test splitting, and the Monte-Carlo
//! benchmark harness.

use std::path::Path;
use std::time::Instant;

use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::ard::{train_slr, ArdConfig};
use crate::cslr::{train_cslr, CslrConfig};
use crate::data::{
    apply_standardize, contaminate, fit_standardize, generate_synthetic, round_half_up,
    ContaminationMode, ContaminationSpec, Dataset, SyntheticSpec,
};
use crate::error::{DataError, SelectError, TrainError};
use crate::logistic::{predict_dataset, train_mle, LinearModel, OptimizerConfig};
use crate::metrics::{accuracy, selection_score};
use crate::error::ModelIoError;
use crate::rng::{derive_seed, grid_index, substream};

/// The default bandwidth candidate grid for cross-validation.
pub fn default_bandwidth_grid() -> Vec<f64> {
    vec![
        0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.2, 1.4, 1.6, 1.8, 2.0, 4.0, 7.0,
        10.0, 30.0, 100.0,
    ]
}

/// Cross-validation layout for bandwidth selection.
#[derive(Debug, Clone)]
pub struct CvPlan {
    pub n_folds: usize,
    pub candidate_bandwidths: Vec<f64>,
    pub seed: u64,
}

impl CvPlan {
    pub fn new(n_folds: usize, candidate_bandwidths: Vec<f64>, seed: u64) -> Result<Self, SelectError> {
        if n_folds < 2 {
            return Err(SelectError::InvalidPlan("need at least 2 folds".into()));
        }
        if candidate_bandwidths.is_empty() {
            return Err(SelectError::InvalidPlan("empty candidate list".into()));
        }
        if candidate_bandwidths.iter().any(|&s| !(s > 0.0)) {
            return Err(SelectError::InvalidPlan(
                "candidate bandwidths must be positive".into(),
            ));
        }
        Ok(Self {
            n_folds,
            candidate_bandwidths,
            seed,
        })
    }

    /// Five stratified folds over the default grid.
    pub fn default_with_seed(seed: u64) -> Self {
        Self {
            n_folds: 5,
            candidate_bandwidths: default_bandwidth_grid(),
            seed,
        }
    }
}

/// Deals class-0 and class-1 indices round-robin into `k` shuffled folds.
fn stratified_folds(labels: &[u8], k: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut rng = substream(seed, "cv-folds", &[]);
    let mut by_class: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    for (i, &t) in labels.iter().enumerate() {
        by_class[t as usize].push(i);
    }
    by_class[0].shuffle(&mut rng);
    by_class[1].shuffle(&mut rng);
    let mut folds = vec![Vec::new(); k];
    for class in &by_class {
        for (j, &ix) in class.iter().enumerate() {
            folds[j % k].push(ix);
        }
    }
    folds
}

/// Selects the kernel bandwidth by stratified k-fold cross-validation on
/// held-out accuracy, breaking ties toward the larger bandwidth. A single
/// candidate returns immediately without any training.
pub fn select_bandwidth(
    data: &Dataset,
    plan: &CvPlan,
    template: &CslrConfig,
) -> Result<f64, SelectError> {
    if plan.candidate_bandwidths.is_empty() {
        return Err(SelectError::InvalidPlan("empty candidate list".into()));
    }
    if plan.candidate_bandwidths.len() == 1 {
        return Ok(plan.candidate_bandwidths[0]);
    }
    if plan.n_folds < 2 {
        return Err(SelectError::InvalidPlan("need at least 2 folds".into()));
    }
    let folds = stratified_folds(data.labels(), plan.n_folds, plan.seed);
    for (fold_ix, fold) in folds.iter().enumerate() {
        let ones = fold.iter().filter(|&&i| data.labels()[i] == 1).count();
        if ones == 0 || ones == fold.len() {
            return Err(SelectError::FoldDegenerate { fold: fold_ix });
        }
    }
    // materialize each split once; every candidate reuses them
    let splits: Vec<(Dataset, Dataset)> = (0..plan.n_folds)
        .map(|held| {
            let train_rows: Vec<usize> = folds
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != held)
                .flat_map(|(_, f)| f.iter().copied())
                .collect();
            (data.select_rows(&train_rows), data.select_rows(&folds[held]))
        })
        .collect();

    let mut best: Option<(f64, f64)> = None; // (mean accuracy, sigma)
    for &sigma in &plan.candidate_bandwidths {
        let mut config = template.clone();
        config.sigma = sigma;
        let mut total = 0.0;
        for (train, held) in &splits {
            let (model, _) = train_cslr(train, &config)?;
            let (_, predicted) = predict_dataset(&model, held).map_err(SelectError::Train)?;
            total += accuracy(&predicted, held.labels()).expect("non-empty fold");
        }
        let mean = total / plan.n_folds as f64;
        let better = match best {
            None => true,
            Some((best_acc, best_sigma)) => {
                mean > best_acc || (mean == best_acc && sigma > best_sigma)
            }
        };
        if better {
            best = Some((mean, sigma));
        }
    }
    Ok(best.expect("at least one candidate").1)
}

/// Uniform shuffle-then-split. The train side gets the rounded fraction of
/// the rows; the two sides partition the input.
pub fn split(data: &Dataset, train_fraction: f64, seed: u64) -> Result<(Dataset, Dataset), DataError> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(DataError::InvalidSpec(format!(
            "train fraction {train_fraction} outside (0, 1)"
        )));
    }
    let n = data.n_samples();
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = substream(seed, "split", &[]);
    order.shuffle(&mut rng);
    let n_train = round_half_up(train_fraction * n as f64).min(n);
    Ok((
        data.select_rows(&order[..n_train]),
        data.select_rows(&order[n_train..]),
    ))
}

/// Which trainer a benchmark cell runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Mle,
    Slr,
    Cslr,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Mle => "mle",
            Algorithm::Slr => "slr",
            Algorithm::Cslr => "cslr",
        }
    }

    pub fn parse(s: &str) -> Result<Self, DataError> {
        match s {
            "mle" => Ok(Algorithm::Mle),
            "slr" => Ok(Algorithm::Slr),
            "cslr" => Ok(Algorithm::Cslr),
            other => Err(DataError::InvalidSpec(format!(
                "unknown algorithm {other:?} (expected mle|slr|cslr)"
            ))),
        }
    }
}

/// How the benchmark picks the CSLR bandwidth for each cell.
#[derive(Debug, Clone)]
pub enum SigmaPolicy {
    Fixed(f64),
    /// Per-repetition stratified CV over the candidate grid.
    CrossValidate { n_folds: usize, candidates: Vec<f64> },
}

/// Full description of a benchmark run.
#[derive(Debug, Clone)]
pub struct BenchSpec {
    pub synthetic: SyntheticSpec,
    pub modes: Vec<ContaminationMode>,
    pub proportions: Vec<f64>,
    pub noise_stds: Vec<f64>,
    pub n_repetitions: usize,
    pub algorithms: Vec<Algorithm>,
    pub seed: u64,
    pub sigma_policy: SigmaPolicy,
    pub slr_config: ArdConfig,
    pub cslr_config: CslrConfig,
    pub mle_config: OptimizerConfig,
    /// Record real wall times. Off by default so repeated runs produce
    /// byte-identical result files.
    pub timing: bool,
}

impl BenchSpec {
    pub fn validate(&self) -> Result<(), SelectError> {
        if self.proportions.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(SelectError::InvalidPlan("proportions must lie in [0, 1]".into()));
        }
        if self.modes.is_empty()
            || self.proportions.is_empty()
            || self.noise_stds.is_empty()
            || self.algorithms.is_empty()
            || self.n_repetitions == 0
        {
            return Err(SelectError::InvalidPlan("empty benchmark grid".into()));
        }
        Ok(())
    }
}

/// Metrics of one successful (algorithm, cell, repetition) run.
#[derive(Debug, Clone, PartialEq)]
pub struct CellMetrics {
    pub accuracy: f64,
    pub n_selected: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub wall_time_ms: f64,
}

/// One raw benchmark row; failures carry the error text instead of metrics.
#[derive(Debug, Clone)]
pub struct RawRow {
    pub algorithm: Algorithm,
    pub mode: ContaminationMode,
    pub proportion: f64,
    pub noise_std: f64,
    pub repetition: usize,
    pub outcome: Result<CellMetrics, String>,
}

/// Mean and sample standard deviation (denominator n−1; 0 when n < 2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

pub fn mean_std(values: &[f64]) -> MeanStd {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = if values.len() > 1 {
        (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    MeanStd { mean, std }
}

/// Aggregated statistics of one (algorithm, cell) over its repetitions.
#[derive(Debug, Clone)]
pub struct AggregateRow {
    pub algorithm: Algorithm,
    pub mode: ContaminationMode,
    pub proportion: f64,
    pub noise_std: f64,
    /// Successful repetitions feeding the aggregates.
    pub n: usize,
    pub accuracy: Option<MeanStd>,
    pub n_selected: Option<MeanStd>,
    pub precision: Option<MeanStd>,
    pub recall: Option<MeanStd>,
    pub f1: Option<MeanStd>,
    pub wall_time_ms: Option<MeanStd>,
}

/// Raw rows plus per-cell aggregates of a benchmark run.
#[derive(Debug, Clone)]
pub struct BenchResult {
    pub raw: Vec<RawRow>,
    pub aggregates: Vec<AggregateRow>,
}

struct Task {
    algorithm: Algorithm,
    mode: ContaminationMode,
    proportion: f64,
    noise_std: f64,
    repetition: usize,
}

fn mode_tag(mode: ContaminationMode) -> u64 {
    match mode {
        ContaminationMode::Sample => 0,
        ContaminationMode::Arbitrary => 1,
    }
}

fn run_task(spec: &BenchSpec, task: &Task) -> Result<CellMetrics, TrainError> {
    let rep = task.repetition as u64;
    let cell_key = [
        rep,
        mode_tag(task.mode),
        grid_index(task.proportion),
        grid_index(task.noise_std),
    ];

    // same clean data for every cell of a repetition, same contaminated
    // train for every algorithm of a cell
    let mut synth = spec.synthetic.clone();
    synth.seed = derive_seed(spec.seed, "synth", &[rep]);
    let (train_clean, test, _true_weights, relevant_mask) = generate_synthetic(&synth);
    let contamination = ContaminationSpec::new(
        task.mode,
        task.proportion,
        task.noise_std,
        derive_seed(spec.seed, "contam", &cell_key),
    )
    .map_err(|e| TrainError::InvalidConfig(e.to_string()))?;
    let train = contaminate(&train_clean, &contamination);

    let stats = fit_standardize(&train);
    let train_std = apply_standardize(&stats, &train)
        .map_err(|e| TrainError::InvalidConfig(e.to_string()))?;
    let test_std = apply_standardize(&stats, &test)
        .map_err(|e| TrainError::InvalidConfig(e.to_string()))?;

    let started = Instant::now();
    let model: LinearModel = match task.algorithm {
        Algorithm::Mle => train_mle(&train_std, &spec.mle_config)?,
        Algorithm::Slr => train_slr(&train_std, &spec.slr_config)?.0,
        Algorithm::Cslr => {
            let sigma = match &spec.sigma_policy {
                SigmaPolicy::Fixed(sigma) => *sigma,
                SigmaPolicy::CrossValidate { n_folds, candidates } => {
                    let plan = CvPlan {
                        n_folds: *n_folds,
                        candidate_bandwidths: candidates.clone(),
                        seed: derive_seed(spec.seed, "cv", &cell_key),
                    };
                    select_bandwidth(&train_std, &plan, &spec.cslr_config)
                        .map_err(|e| TrainError::NumericalFailure(e.to_string()))?
                }
            };
            let mut config = spec.cslr_config.clone();
            config.sigma = sigma;
            train_cslr(&train_std, &config)?.0
        }
    };
    let wall_time_ms = if spec.timing {
        started.elapsed().as_secs_f64() * 1e3
    } else {
        0.0
    };

    let (_, predicted) = predict_dataset(&model, &test_std)?;
    let acc = accuracy(&predicted, test.labels())
        .map_err(|e| TrainError::NumericalFailure(e.to_string()))?;
    let score = selection_score(&model.selected_mask(), &relevant_mask)
        .map_err(|e| TrainError::NumericalFailure(e.to_string()))?;
    Ok(CellMetrics {
        accuracy: acc,
        n_selected: model.n_selected(),
        precision: score.precision,
        recall: score.recall,
        f1: score.f1,
        wall_time_ms,
    })
}

/// Runs the full grid. Every (algorithm, cell, repetition) task is
/// independent and draws its randomness from substreams keyed by the cell
/// values, so results are deterministic regardless of how the work is
/// scheduled, and per-cell failures are recorded rather than fatal.
pub fn run_benchmark(spec: &BenchSpec) -> Result<BenchResult, SelectError> {
    spec.validate()?;
    let mut tasks = Vec::new();
    for &algorithm in &spec.algorithms {
        for &mode in &spec.modes {
            for &proportion in &spec.proportions {
                for &noise_std in &spec.noise_stds {
                    for repetition in 0..spec.n_repetitions {
                        tasks.push(Task {
                            algorithm,
                            mode,
                            proportion,
                            noise_std,
                            repetition,
                        });
                    }
                }
            }
        }
    }

    let raw: Vec<RawRow> = tasks
        .par_iter()
        .map(|task| RawRow {
            algorithm: task.algorithm,
            mode: task.mode,
            proportion: task.proportion,
            noise_std: task.noise_std,
            repetition: task.repetition,
            outcome: run_task(spec, task).map_err(|e| e.to_string()),
        })
        .collect();

    let aggregates = aggregate(&raw, spec.n_repetitions);
    Ok(BenchResult { raw, aggregates })
}

/// Aggregates raw rows, which arrive grouped per cell with repetitions
/// consecutive and in order.
fn aggregate(raw: &[RawRow], n_repetitions: usize) -> Vec<AggregateRow> {
    raw.chunks(n_repetitions)
        .map(|cell| {
            let ok: Vec<&CellMetrics> = cell.iter().filter_map(|r| r.outcome.as_ref().ok()).collect();
            let field = |f: &dyn Fn(&CellMetrics) -> f64| -> Option<MeanStd> {
                if ok.is_empty() {
                    None
                } else {
                    Some(mean_std(&ok.iter().map(|m| f(m)).collect::<Vec<_>>()))
                }
            };
            AggregateRow {
                algorithm: cell[0].algorithm,
                mode: cell[0].mode,
                proportion: cell[0].proportion,
                noise_std: cell[0].noise_std,
                n: ok.len(),
                accuracy: field(&|m| m.accuracy),
                n_selected: field(&|m| m.n_selected as f64),
                precision: field(&|m| m.precision),
                recall: field(&|m| m.recall),
                f1: field(&|m| m.f1),
                wall_time_ms: field(&|m| m.wall_time_ms),
            }
        })
        .collect()
}

impl BenchResult {
    /// One row per (algorithm, cell, repetition) in stable order.
    pub fn write_raw_csv(&self, path: &Path) -> Result<(), ModelIoError> {
        let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
        w.write_record([
            "algorithm",
            "mode",
            "proportion",
            "noise_std",
            "repetition",
            "accuracy",
            "n_selected",
            "precision",
            "recall",
            "f1",
            "wall_time_ms",
            "error",
        ])
        .map_err(|e| csv_err(path, e))?;
        for row in &self.raw {
            let mut record = vec![
                row.algorithm.as_str().to_string(),
                row.mode.as_str().to_string(),
                row.proportion.to_string(),
                row.noise_std.to_string(),
                row.repetition.to_string(),
            ];
            match &row.outcome {
                Ok(m) => {
                    record.extend([
                        m.accuracy.to_string(),
                        m.n_selected.to_string(),
                        m.precision.to_string(),
                        m.recall.to_string(),
                        m.f1.to_string(),
                        m.wall_time_ms.to_string(),
                        String::new(),
                    ]);
                }
                Err(message) => {
                    record.extend([
                        String::new(),
                        String::new(),
                        String::new(),
                        String::new(),
                        String::new(),
                        String::new(),
                        message.clone(),
                    ]);
                }
            }
            w.write_record(&record).map_err(|e| csv_err(path, e))?;
        }
        w.flush().map_err(|e| ModelIoError::Io {
            path: path.to_path_buf(),
            source: e,
        })
    }

    /// One row per (algorithm, cell) with mean/std pairs over repetitions.
    pub fn write_aggregate_csv(&self, path: &Path) -> Result<(), ModelIoError> {
        let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
        w.write_record([
            "algorithm",
            "mode",
            "proportion",
            "noise_std",
            "n",
            "accuracy_mean",
            "accuracy_std",
            "n_selected_mean",
            "n_selected_std",
            "precision_mean",
            "precision_std",
            "recall_mean",
            "recall_std",
            "f1_mean",
            "f1_std",
            "wall_time_ms_mean",
            "wall_time_ms_std",
        ])
        .map_err(|e| csv_err(path, e))?;
        for row in &self.aggregates {
            let mut record = vec![
                row.algorithm.as_str().to_string(),
                row.mode.as_str().to_string(),
                row.proportion.to_string(),
                row.noise_std.to_string(),
                row.n.to_string(),
            ];
            for stats in [
                &row.accuracy,
                &row.n_selected,
                &row.precision,
                &row.recall,
                &row.f1,
                &row.wall_time_ms,
            ] {
                match stats {
                    Some(ms) => {
                        record.push(ms.mean.to_string());
                        record.push(ms.std.to_string());
                    }
                    None => {
                        record.push(String::new());
                        record.push(String::new());
                    }
                }
            }
            w.write_record(&record).map_err(|e| csv_err(path, e))?;
        }
        w.flush().map_err(|e| ModelIoError::Io {
            path: path.to_path_buf(),
            source: e,
        })
    }

    /// All cells failed — the CLI turns this into a nonzero exit.
    pub fn all_failed(&self) -> bool {
        self.raw.iter().all(|r| r.outcome.is_err())
    }
}

fn csv_err(path: &Path, e: csv::Error) -> ModelIoError {
    ModelIoError::Malformed {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick_spec() -> BenchSpec {
        BenchSpec {
            synthetic: SyntheticSpec::new(40, 30, 8, 2, 0).unwrap(),
            modes: vec![ContaminationMode::Sample],
            proportions: vec![0.0, 0.2],
            noise_stds: vec![1.0],
            n_repetitions: 2,
            algorithms: vec![Algorithm::Slr, Algorithm::Cslr],
            seed: 99,
            sigma_policy: SigmaPolicy::Fixed(1.0),
            slr_config: ArdConfig::default(),
            cslr_config: CslrConfig::new(1.0),
            mle_config: OptimizerConfig::default(),
            timing: false,
        }
    }

    #[test]
    fn split_is_deterministic_and_partitions() {
        let (data, _, _, _) = generate_synthetic(&SyntheticSpec::new(360, 10, 4, 2, 3).unwrap());
        let (train, test) = split(&data, 0.8, 5).unwrap();
        assert_eq!(train.n_samples(), 288);
        assert_eq!(test.n_samples(), 72);
        let (train2, _) = split(&data, 0.8, 5).unwrap();
        assert_eq!(train.attributes(), train2.attributes());

        // union of outputs = input multiset
        let mut seen: Vec<(u64, u8)> = Vec::new();
        for part in [&train, &test] {
            for (row, &t) in part.attributes().rows().into_iter().zip(part.labels()) {
                seen.push((row[0].to_bits(), t));
            }
        }
        let mut original: Vec<(u64, u8)> = data
            .attributes()
            .rows()
            .into_iter()
            .zip(data.labels())
            .map(|(row, &t)| (row[0].to_bits(), t))
            .collect();
        seen.sort_unstable();
        original.sort_unstable();
        assert_eq!(seen, original);
    }

    #[test]
    fn default_grid_has_twenty_values() {
        let grid = default_bandwidth_grid();
        assert_eq!(grid.len(), 20);
        assert_eq!(grid[0], 0.1);
        assert_eq!(grid[19], 100.0);
        assert!(grid.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn single_candidate_returns_without_training() {
        // single-class data would make any training fail, proving no
        // training happens on the single-candidate shortcut
        let attrs = ndarray::Array2::from_shape_vec((4, 1), vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let data = Dataset::new(attrs, vec![1, 1, 1, 1], None).unwrap();
        let plan = CvPlan::new(5, vec![0.7], 1).unwrap();
        let sigma = select_bandwidth(&data, &plan, &CslrConfig::new(1.0)).unwrap();
        assert_eq!(sigma, 0.7);
    }

    #[test]
    fn degenerate_fold_is_reported() {
        // 3 samples of class 1, 5 folds: some fold has no class-1 sample
        let attrs = ndarray::Array2::from_shape_vec(
            (8, 1),
            vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0],
        )
        .unwrap();
        let data = Dataset::new(attrs, vec![0, 0, 0, 0, 0, 1, 1, 1], None).unwrap();
        let plan = CvPlan::new(5, vec![0.5, 1.0], 1).unwrap();
        let err = select_bandwidth(&data, &plan, &CslrConfig::new(1.0)).unwrap_err();
        assert!(matches!(err, SelectError::FoldDegenerate { .. }));
    }

    #[test]
    fn tie_break_prefers_larger_bandwidth() {
        // easy separable toy where both moderate candidates reach fold
        // accuracy 1.0
        let (data, _, _, _) = generate_synthetic(&SyntheticSpec::new(60, 10, 2, 2, 8).unwrap());
        let stats = fit_standardize(&data);
        let data = apply_standardize(&stats, &data).unwrap();
        let plan = CvPlan::new(5, vec![0.8, 1.0, 1.2], 21).unwrap();
        let sigma = select_bandwidth(&data, &plan, &CslrConfig::new(1.0)).unwrap();
        assert_eq!(sigma, 1.2);
    }

    #[test]
    fn benchmark_rows_and_determinism() {
        let spec = quick_spec();
        let result = run_benchmark(&spec).unwrap();
        // 2 algorithms × 1 mode × 2 proportions × 1 std × 2 reps
        assert_eq!(result.raw.len(), 8);
        assert_eq!(result.aggregates.len(), 4);
        assert!(result.raw.iter().all(|r| r.outcome.is_ok()));

        let again = run_benchmark(&spec).unwrap();
        for (a, b) in result.raw.iter().zip(&again.raw) {
            assert_eq!(a.outcome.as_ref().unwrap(), b.outcome.as_ref().unwrap());
        }
    }

    #[test]
    fn aggregates_match_recount_exactly() {
        let result = run_benchmark(&quick_spec()).unwrap();
        for (cell_ix, agg) in result.aggregates.iter().enumerate() {
            let rows = &result.raw[cell_ix * 2..(cell_ix + 1) * 2];
            let accs: Vec<f64> = rows
                .iter()
                .filter_map(|r| r.outcome.as_ref().ok())
                .map(|m| m.accuracy)
                .collect();
            let expect = mean_std(&accs);
            let got = agg.accuracy.unwrap();
            assert_eq!(got.mean.to_bits(), expect.mean.to_bits());
            assert_eq!(got.std.to_bits(), expect.std.to_bits());
        }
    }

    #[test]
    fn csv_outputs_are_stable(){
        let result = run_benchmark(&quick_spec()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let raw_a = dir.path().join("raw_a.csv");
        let raw_b = dir.path().join("raw_b.csv");
        result.write_raw_csv(&raw_a).unwrap();
        result.write_raw_csv(&raw_b).unwrap();
        assert_eq!(
            std::fs::read(&raw_a).unwrap(),
            std::fs::read(&raw_b).unwrap()
        );
        let header = std::fs::read_to_string(&raw_a).unwrap();
        assert!(header.starts_with(
            "algorithm,mode,proportion,noise_std,repetition,accuracy,n_selected,precision,recall,f1,wall_time_ms,error"
        ));
    }
}
