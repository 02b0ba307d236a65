//! Dataset representation, CSV ingestion, z-score standardization,
//! synthetic-data generation, and the two contamination models.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use ndarray::{Array1, Array2};
use rand::seq::index;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::DataError;
use crate::rng::substream;

/// A labeled sample matrix. Rows are samples, columns are features,
/// labels are strictly {0, 1}. Immutable after construction.
#[derive(Debug, Clone)]
pub struct Dataset {
    attributes: Array2<f64>,
    labels: Vec<u8>,
    feature_names: Option<Vec<String>>,
}

impl Dataset {
    /// Builds a dataset, validating shape, binary labels, and finiteness.
    pub fn new(
        attributes: Array2<f64>,
        labels: Vec<u8>,
        feature_names: Option<Vec<String>>,
    ) -> Result<Self, DataError> {
        let (n, d) = attributes.dim();
        if n == 0 || d == 0 {
            return Err(DataError::Empty);
        }
        if labels.len() != n {
            return Err(DataError::DimensionMismatch {
                expected: n,
                got: labels.len(),
            });
        }
        if let Some(row) = labels.iter().position(|&t| t > 1) {
            return Err(DataError::NonBinaryLabel {
                row,
                value: labels[row].to_string(),
            });
        }
        for ((r, c), &v) in attributes.indexed_iter() {
            if !v.is_finite() {
                return Err(DataError::NonFinite { row: r, column: c });
            }
        }
        if let Some(names) = &feature_names {
            if names.len() != d {
                return Err(DataError::DimensionMismatch {
                    expected: d,
                    got: names.len(),
                });
            }
        }
        Ok(Self {
            attributes,
            labels,
            feature_names,
        })
    }

    pub fn n_samples(&self) -> usize {
        self.attributes.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.attributes.ncols()
    }

    pub fn attributes(&self) -> &Array2<f64> {
        &self.attributes
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    /// Labels as floats, for likelihood arithmetic.
    pub fn labels_f64(&self) -> Array1<f64> {
        self.labels.iter().map(|&t| f64::from(t)).collect()
    }

    pub fn feature_names(&self) -> Option<&[String]> {
        self.feature_names.as_deref()
    }

    /// Number of samples in each class, as `(n_class0, n_class1)`.
    pub fn class_counts(&self) -> (usize, usize) {
        let ones = self.labels.iter().filter(|&&t| t == 1).count();
        (self.labels.len() - ones, ones)
    }

    /// New dataset containing the given rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Dataset {
        let d = self.n_features();
        let mut attributes = Array2::zeros((rows.len(), d));
        let mut labels = Vec::with_capacity(rows.len());
        for (i, &r) in rows.iter().enumerate() {
            attributes.row_mut(i).assign(&self.attributes.row(r));
            labels.push(self.labels[r]);
        }
        Dataset {
            attributes,
            labels,
            feature_names: self.feature_names.clone(),
        }
    }
}

/// Per-feature location/scale fitted on a training set.
///
/// A standard deviation of exactly `0.0` flags a constant feature; applying
/// the stats maps such features to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardizationStats {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

impl StandardizationStats {
    pub fn dim(&self) -> usize {
        self.means.len()
    }

    pub fn is_constant(&self, feature: usize) -> bool {
        self.stds[feature] == 0.0
    }
}

/// Fits per-feature mean and population standard deviation (denominator N).
///
/// Features whose spread is indistinguishable from rounding noise are
/// flagged constant by storing a standard deviation of exactly zero.
pub fn fit_standardize(data: &Dataset) -> StandardizationStats {
    let x = data.attributes();
    let n = x.nrows() as f64;
    let d = x.ncols();
    let mut means = Vec::with_capacity(d);
    let mut stds = Vec::with_capacity(d);
    for col in x.columns() {
        let mean = col.sum() / n;
        let var = col.iter().map(|&v| (v - mean) * (v - mean)).sum::<f64>() / n;
        let std = var.sqrt();
        means.push(mean);
        stds.push(if std <= 1e-12 * (1.0 + mean.abs()) {
            0.0
        } else {
            std
        });
    }
    StandardizationStats { means, stds }
}

/// Applies fitted stats: `x' = (x - mean) / std`, constant features map to 0.
pub fn apply_standardize(stats: &StandardizationStats, data: &Dataset) -> Result<Dataset, DataError> {
    if stats.dim() != data.n_features() {
        return Err(DataError::DimensionMismatch {
            expected: stats.dim(),
            got: data.n_features(),
        });
    }
    let mut attributes = data.attributes().clone();
    for (j, mut col) in attributes.columns_mut().into_iter().enumerate() {
        if stats.is_constant(j) {
            col.fill(0.0);
        } else {
            let (m, s) = (stats.means[j], stats.stds[j]);
            col.mapv_inplace(|v| (v - m) / s);
        }
    }
    Dataset::new(attributes, data.labels().to_vec(), data.feature_names().map(<[String]>::to_vec))
}

/// Inverse of [`apply_standardize`]: `x = x'·std + mean`.
/// Constant features recover their fitted mean.
pub fn invert_standardize(stats: &StandardizationStats, data: &Dataset) -> Result<Dataset, DataError> {
    if stats.dim() != data.n_features() {
        return Err(DataError::DimensionMismatch {
            expected: stats.dim(),
            got: data.n_features(),
        });
    }
    let mut attributes = data.attributes().clone();
    for (j, mut col) in attributes.columns_mut().into_iter().enumerate() {
        let (m, s) = (stats.means[j], stats.stds[j]);
        if stats.is_constant(j) {
            col.fill(m);
        } else {
            col.mapv_inplace(|v| v * s + m);
        }
    }
    Dataset::new(attributes, data.labels().to_vec(), data.feature_names().map(<[String]>::to_vec))
}

/// Parameters of the separable synthetic task: i.i.d. standard-normal
/// attributes, a sparse true weight vector, labels from its sign.
#[derive(Debug, Clone)]
pub struct SyntheticSpec {
    pub n_train: usize,
    pub n_test: usize,
    pub dim: usize,
    pub n_relevant: usize,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn new(
        n_train: usize,
        n_test: usize,
        dim: usize,
        n_relevant: usize,
        seed: u64,
    ) -> Result<Self, DataError> {
        if n_relevant > dim {
            return Err(DataError::InvalidSpec(format!(
                "n_relevant ({n_relevant}) exceeds dim ({dim})"
            )));
        }
        if n_train == 0 || n_test == 0 || dim == 0 {
            return Err(DataError::InvalidSpec(
                "n_train, n_test, and dim must be positive".into(),
            ));
        }
        Ok(Self {
            n_train,
            n_test,
            dim,
            n_relevant,
            seed,
        })
    }
}

/// Generates the synthetic task.
///
/// The true weight vector has exactly `n_relevant` leading nonzero entries,
/// each standard normal; a sample's label is 1 iff its inner product with
/// the true weights is positive. No bias enters the generating rule.
pub fn generate_synthetic(spec: &SyntheticSpec) -> (Dataset, Dataset, Array1<f64>, Vec<bool>) {
    let mut weights = Array1::zeros(spec.dim);
    {
        let mut rng = substream(spec.seed, "true-weights", &[]);
        for w in weights.iter_mut().take(spec.n_relevant) {
            *w = rng.sample(StandardNormal);
        }
    }
    let relevant_mask: Vec<bool> = (0..spec.dim).map(|d| d < spec.n_relevant).collect();
    let train = sample_from_rule(spec.n_train, spec.dim, &weights, spec.seed, "train-attributes");
    let test = sample_from_rule(spec.n_test, spec.dim, &weights, spec.seed, "test-attributes");
    (train, test, weights, relevant_mask)
}

fn sample_from_rule(n: usize, d: usize, weights: &Array1<f64>, seed: u64, tag: &str) -> Dataset {
    let mut rng = substream(seed, tag, &[]);
    let mut attributes = Array2::zeros((n, d));
    for v in attributes.iter_mut() {
        *v = rng.sample(StandardNormal);
    }
    let labels = attributes
        .rows()
        .into_iter()
        .map(|row| u8::from(row.dot(weights) > 0.0))
        .collect();
    Dataset::new(attributes, labels, None).expect("generated data is valid by construction")
}

/// Corruption model: replace whole rows or individual cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContaminationMode {
    /// Entire rows have every attribute replaced.
    Sample,
    /// Individual cells anywhere in the attribute matrix are replaced.
    Arbitrary,
}

impl ContaminationMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ContaminationMode::Sample => "sample",
            ContaminationMode::Arbitrary => "arbitrary",
        }
    }

    pub fn parse(s: &str) -> Result<Self, DataError> {
        match s {
            "sample" => Ok(ContaminationMode::Sample),
            "arbitrary" => Ok(ContaminationMode::Arbitrary),
            other => Err(DataError::InvalidSpec(format!(
                "unknown contamination mode {other:?} (expected sample|arbitrary)"
            ))),
        }
    }
}

/// Parameters of a contamination pass over a dataset's attributes.
#[derive(Debug, Clone)]
pub struct ContaminationSpec {
    pub mode: ContaminationMode,
    pub proportion: f64,
    pub noise_std: f64,
    pub seed: u64,
}

impl ContaminationSpec {
    pub fn new(
        mode: ContaminationMode,
        proportion: f64,
        noise_std: f64,
        seed: u64,
    ) -> Result<Self, DataError> {
        if !(0.0..=1.0).contains(&proportion) {
            return Err(DataError::InvalidSpec(format!(
                "proportion {proportion} outside [0, 1]"
            )));
        }
        if !(noise_std >= 0.0) {
            return Err(DataError::InvalidSpec(format!(
                "noise_std {noise_std} must be non-negative"
            )));
        }
        Ok(Self {
            mode,
            proportion,
            noise_std,
            seed,
        })
    }
}

/// Round to nearest, ties at .5 rounding up. Gives deterministic counts
/// for the contamination and split arithmetic.
pub(crate) fn round_half_up(x: f64) -> usize {
    (x + 0.5).floor() as usize
}

/// Replaces attributes with zero-mean Gaussian noise of the given standard
/// deviation. Sample mode corrupts whole rows, arbitrary mode individual
/// cells; in both, the count is the rounded proportion of the total and the
/// positions are drawn uniformly without replacement. Labels are never
/// modified. Deterministic given the spec's seed.
pub fn contaminate(data: &Dataset, spec: &ContaminationSpec) -> Dataset {
    let mut rng = substream(spec.seed, "contaminate", &[]);
    let (n, d) = data.attributes().dim();
    let mut attributes = data.attributes().clone();
    match spec.mode {
        ContaminationMode::Sample => {
            let k = round_half_up(spec.proportion * n as f64);
            for r in index::sample(&mut rng, n, k) {
                for v in attributes.row_mut(r) {
                    *v = spec.noise_std * rng.sample::<f64, _>(StandardNormal);
                }
            }
        }
        ContaminationMode::Arbitrary => {
            let k = round_half_up(spec.proportion * (n * d) as f64);
            for cell in index::sample(&mut rng, n * d, k) {
                attributes[[cell / d, cell % d]] =
                    spec.noise_std * rng.sample::<f64, _>(StandardNormal);
            }
        }
    }
    Dataset::new(attributes, data.labels().to_vec(), data.feature_names().map(<[String]>::to_vec))
        .expect("contamination preserves validity")
}

/// Resolves a `--label`-style selector against a CSV header: exact column
/// name first, then a numeric column index.
fn resolve_label_column(headers: &[String], label: &str) -> Result<usize, DataError> {
    if let Some(ix) = headers.iter().position(|h| h == label) {
        return Ok(ix);
    }
    if let Ok(ix) = label.parse::<usize>() {
        if ix < headers.len() {
            return Ok(ix);
        }
    }
    Err(DataError::MissingColumn {
        column: label.to_string(),
    })
}

/// Loads a dataset from a headered CSV file. `label` selects the label
/// column by name or zero-based index; every other column becomes a
/// feature, in file order.
pub fn load_csv(path: &Path, label: &str) -> Result<Dataset, DataError> {
    let file = File::open(path).map_err(|source| DataError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::Reader::from_reader(BufReader::new(file));
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| DataError::Csv {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?
        .iter()
        .map(str::to_string)
        .collect();
    let label_ix = resolve_label_column(&headers, label)?;
    let feature_names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != label_ix)
        .map(|(_, h)| h.clone())
        .collect();

    let mut rows: Vec<f64> = Vec::new();
    let mut labels: Vec<u8> = Vec::new();
    for (row_ix, record) in reader.records().enumerate() {
        let record = record.map_err(|e| DataError::Csv {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        if record.len() != headers.len() {
            return Err(DataError::Csv {
                path: path.to_path_buf(),
                message: format!(
                    "row {row_ix} has {} fields, header has {}",
                    record.len(),
                    headers.len()
                ),
            });
        }
        for (col_ix, cell) in record.iter().enumerate() {
            if col_ix == label_ix {
                labels.push(match cell.trim() {
                    "0" => 0,
                    "1" => 1,
                    other => {
                        return Err(DataError::NonBinaryLabel {
                            row: row_ix,
                            value: other.to_string(),
                        })
                    }
                });
            } else {
                let value: f64 = cell.trim().parse().map_err(|_| DataError::NonNumericCell {
                    row: row_ix,
                    column: headers[col_ix].clone(),
                })?;
                if !value.is_finite() {
                    return Err(DataError::NonNumericCell {
                        row: row_ix,
                        column: headers[col_ix].clone(),
                    });
                }
                rows.push(value);
            }
        }
    }
    let n = labels.len();
    let d = headers.len() - 1;
    if n == 0 || d == 0 {
        return Err(DataError::Empty);
    }
    let attributes = Array2::from_shape_vec((n, d), rows).expect("shape checked per row");
    Dataset::new(attributes, labels, Some(feature_names))
}

/// Loads a feature matrix from a headered CSV with no label validation,
/// optionally dropping one column. For prediction inputs, which may or may
/// not carry a label column.
pub fn load_features_csv(
    path: &Path,
    exclude: Option<&str>,
) -> Result<(Array2<f64>, Vec<String>), DataError> {
    let file = File::open(path).map_err(|source| DataError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::Reader::from_reader(BufReader::new(file));
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| DataError::Csv {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?
        .iter()
        .map(str::to_string)
        .collect();
    let skip_ix = match exclude {
        Some(label) => Some(resolve_label_column(&headers, label)?),
        None => None,
    };
    let names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|&(i, _)| Some(i) != skip_ix)
        .map(|(_, h)| h.clone())
        .collect();
    let mut rows: Vec<f64> = Vec::new();
    let mut n = 0;
    for (row_ix, record) in reader.records().enumerate() {
        let record = record.map_err(|e| DataError::Csv {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        for (col_ix, cell) in record.iter().enumerate() {
            if Some(col_ix) == skip_ix {
                continue;
            }
            let value: f64 = cell.trim().parse().map_err(|_| DataError::NonNumericCell {
                row: row_ix,
                column: headers.get(col_ix).cloned().unwrap_or_default(),
            })?;
            rows.push(value);
        }
        n += 1;
    }
    let d = names.len();
    if n == 0 || d == 0 {
        return Err(DataError::Empty);
    }
    let attributes = Array2::from_shape_vec((n, d), rows).map_err(|_| DataError::Csv {
        path: path.to_path_buf(),
        message: "ragged rows".into(),
    })?;
    Ok((attributes, names))
}

/// Writes a dataset as headered CSV with the label in the last column.
/// Values use the shortest representation that parses back bit-exactly.
pub fn save_csv(data: &Dataset, path: &Path, label_name: &str) -> Result<(), DataError> {
    let file = File::create(path).map_err(|source| DataError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut out = BufWriter::new(file);
    let io_err = |source| DataError::Io {
        path: path.to_path_buf(),
        source,
    };
    let names: Vec<String> = match data.feature_names() {
        Some(names) => names.to_vec(),
        None => (1..=data.n_features()).map(|j| format!("f{j}")).collect(),
    };
    writeln!(out, "{},{}", names.join(","), label_name).map_err(io_err)?;
    for (row, &t) in data.attributes().rows().into_iter().zip(data.labels()) {
        let mut line = String::new();
        for v in row {
            line.push_str(&format!("{v},"));
        }
        line.push_str(&t.to_string());
        writeln!(out, "{line}").map_err(io_err)?;
    }
    out.flush().map_err(io_err)
}
