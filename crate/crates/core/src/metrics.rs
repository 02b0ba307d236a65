//! Classification, feature-selection, and reconstruction metrics.

use crate::error::MetricsError;
use crate::logistic::LinearModel;

/// Confusion counts and derived scores of a selected-feature set against
/// the ground-truth relevant set ("relevant" is the positive class).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectionScore {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub tn: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Fraction of correctly classified samples.
pub fn accuracy(predictions: &[u8], labels: &[u8]) -> Result<f64, MetricsError> {
    if predictions.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    if predictions.len() != labels.len() {
        return Err(MetricsError::DimensionMismatch {
            expected: labels.len(),
            got: predictions.len(),
        });
    }
    let matches = predictions
        .iter()
        .zip(labels)
        .filter(|(p, t)| p == t)
        .count();
    Ok(matches as f64 / predictions.len() as f64)
}

/// Precision, recall, and F1 of a selected-feature mask against the
/// relevant-feature mask. F1 is defined as 0 when precision + recall is 0.
pub fn selection_score(selected: &[bool], relevant: &[bool]) -> Result<SelectionScore, MetricsError> {
    if selected.len() != relevant.len() {
        return Err(MetricsError::DimensionMismatch {
            expected: relevant.len(),
            got: selected.len(),
        });
    }
    let mut tp = 0;
    let mut fp = 0;
    let mut fn_ = 0;
    let mut tn = 0;
    for (&s, &r) in selected.iter().zip(relevant) {
        match (s, r) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => tn += 1,
        }
    }
    let precision = if tp + fp > 0 {
        tp as f64 / (tp + fp) as f64
    } else {
        0.0
    };
    let recall = if tp + fn_ > 0 {
        tp as f64 / (tp + fn_) as f64
    } else {
        0.0
    };
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    Ok(SelectionScore {
        tp,
        fp,
        fn_,
        tn,
        precision,
        recall,
        f1,
    })
}

/// Per-group share of the model's absolute weight mass,
/// `W(g) = Σ_{d∈g} |ω_d| / Σ_d |ω_d|`, bias excluded. The groups must
/// partition the feature indices `0..D`.
pub fn grouped_contribution(
    model: &LinearModel,
    groups: &[Vec<usize>],
) -> Result<Vec<f64>, MetricsError> {
    let d = model.dim();
    let mut seen = vec![false; d];
    for group in groups {
        for &ix in group {
            if ix >= d {
                return Err(MetricsError::InvalidPartition(format!(
                    "index {ix} out of range for {d} features"
                )));
            }
            if seen[ix] {
                return Err(MetricsError::InvalidPartition(format!(
                    "index {ix} appears in more than one group"
                )));
            }
            seen[ix] = true;
        }
    }
    if let Some(missing) = seen.iter().position(|&s| !s) {
        return Err(MetricsError::InvalidPartition(format!(
            "index {missing} belongs to no group"
        )));
    }
    let total: f64 = model.weights().iter().map(|w| w.abs()).sum();
    if total == 0.0 {
        return Err(MetricsError::AllZeroWeights);
    }
    Ok(groups
        .iter()
        .map(|group| group.iter().map(|&ix| model.weights()[ix].abs()).sum::<f64>() / total)
        .collect())
}

/// Pearson correlation coefficient.
pub fn pearson(a: &[f64], b: &[f64]) -> Result<f64, MetricsError> {
    if a.len() != b.len() {
        return Err(MetricsError::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    if a.len() < 2 {
        return Err(MetricsError::ConstantInput);
    }
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (&x, &y) in a.iter().zip(b) {
        cov += (x - ma) * (y - mb);
        va += (x - ma) * (x - ma);
        vb += (y - mb) * (y - mb);
    }
    if va == 0.0 || vb == 0.0 {
        return Err(MetricsError::ConstantInput);
    }
    Ok(cov / (va.sqrt() * vb.sqrt()))
}

/// Mean squared error `(1/K) Σ (a_k − b_k)²`.
pub fn mse(a: &[f64], b: &[f64]) -> Result<f64, MetricsError> {
    if a.len() != b.len() {
        return Err(MetricsError::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    if a.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    Ok(a.iter()
        .zip(b)
        .map(|(&x, &y)| (x - y) * (x - y))
        .sum::<f64>()
        / a.len() as f64)
}
