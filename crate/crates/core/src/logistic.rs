//! Linear discriminant, sigmoid probability, Bernoulli log-likelihood, and
//! a maximum-likelihood logistic-regression baseline.

use ndarray::Array1;

use crate::data::{Dataset, StandardizationStats};
use crate::error::TrainError;
use crate::linalg::{active_design, RepairedCholesky};

/// Largest probability strictly below 1 and smallest above 0 that the
/// sigmoid may return. Keeps every log term finite.
const PROB_FLOOR: f64 = f64::MIN_POSITIVE;
const PROB_CEIL: f64 = 1.0 - f64::EPSILON / 2.0;

/// Numerically stable sigmoid, clamped away from {0, 1}.
pub fn sigmoid(f: f64) -> f64 {
    let y = if f >= 0.0 {
        1.0 / (1.0 + (-f).exp())
    } else {
        let e = f.exp();
        e / (1.0 + e)
    };
    y.clamp(PROB_FLOOR, PROB_CEIL)
}

/// A fitted linear classifier: bias, per-feature weights, and the mask of
/// coordinates still active after pruning (index 0 is the bias).
///
/// The standardization stats of the training set and the correntropy kernel
/// bandwidth, when applicable, travel with the model.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    bias: f64,
    weights: Array1<f64>,
    active_mask: Vec<bool>,
    standardization: Option<StandardizationStats>,
    bandwidth: Option<f64>,
}

impl LinearModel {
    /// Builds a model, enforcing that inactive positions carry weight
    /// exactly 0 and that all parameters are finite.
    pub fn new(bias: f64, weights: Array1<f64>, active_mask: Vec<bool>) -> Result<Self, TrainError> {
        if active_mask.len() != weights.len() + 1 {
            return Err(TrainError::DimensionMismatch {
                expected: weights.len() + 1,
                got: active_mask.len(),
            });
        }
        if !bias.is_finite() || weights.iter().any(|w| !w.is_finite()) {
            return Err(TrainError::NumericalFailure(
                "model parameters must be finite".into(),
            ));
        }
        if !active_mask[0] && bias != 0.0 {
            return Err(TrainError::NumericalFailure(
                "inactive bias must be exactly zero".into(),
            ));
        }
        for (d, &w) in weights.iter().enumerate() {
            if !active_mask[d + 1] && w != 0.0 {
                return Err(TrainError::NumericalFailure(format!(
                    "inactive weight {d} must be exactly zero"
                )));
            }
        }
        Ok(Self {
            bias,
            weights,
            active_mask,
            standardization: None,
            bandwidth: None,
        })
    }

    /// All-zero model with every coordinate active.
    pub fn zeros(dim: usize) -> Self {
        Self {
            bias: 0.0,
            weights: Array1::zeros(dim),
            active_mask: vec![true; dim + 1],
            standardization: None,
            bandwidth: None,
        }
    }

    pub fn with_standardization(mut self, stats: StandardizationStats) -> Self {
        self.standardization = Some(stats);
        self
    }

    pub fn with_bandwidth(mut self, sigma: f64) -> Self {
        self.bandwidth = Some(sigma);
        self
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn weights(&self) -> &Array1<f64> {
        &self.weights
    }

    /// Activity mask over bias and weights; index 0 is the bias.
    pub fn active_mask(&self) -> &[bool] {
        &self.active_mask
    }

    pub fn standardization(&self) -> Option<&StandardizationStats> {
        self.standardization.as_ref()
    }

    pub fn bandwidth(&self) -> Option<f64> {
        self.bandwidth
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    /// Active coordinates including the bias.
    pub fn n_active(&self) -> usize {
        self.active_mask.iter().filter(|&&a| a).count()
    }

    /// Active non-bias features, i.e. the selected-feature count.
    pub fn n_selected(&self) -> usize {
        self.active_mask[1..].iter().filter(|&&a| a).count()
    }

    /// Mask over the D features only (bias dropped).
    pub fn selected_mask(&self) -> Vec<bool> {
        self.active_mask[1..].to_vec()
    }
}

fn check_dim(model: &LinearModel, x: &[f64]) -> Result<(), TrainError> {
    if x.len() != model.dim() {
        return Err(TrainError::DimensionMismatch {
            expected: model.dim(),
            got: x.len(),
        });
    }
    Ok(())
}

/// Linear discriminant `f(x, ω) = Σ_d ω_d x_d + ω₀`.
pub fn discriminant(model: &LinearModel, x: &[f64]) -> Result<f64, TrainError> {
    check_dim(model, x)?;
    let mut f = model.bias;
    for (w, v) in model.weights.iter().zip(x) {
        f += w * v;
    }
    Ok(f)
}

/// Probability of class 1 through the sigmoid of the discriminant.
pub fn predict_prob(model: &LinearModel, x: &[f64]) -> Result<f64, TrainError> {
    Ok(sigmoid(discriminant(model, x)?))
}

/// Hard label: class 1 iff the discriminant is strictly positive.
pub fn predict_label(model: &LinearModel, x: &[f64]) -> Result<u8, TrainError> {
    Ok(u8::from(discriminant(model, x)? > 0.0))
}

/// Bernoulli log-likelihood `Σ_n t_n log y_n + (1−t_n) log(1−y_n)`,
/// with probabilities clamped away from {0, 1}.
pub fn log_likelihood(model: &LinearModel, data: &Dataset) -> Result<f64, TrainError> {
    if data.n_features() != model.dim() {
        return Err(TrainError::DimensionMismatch {
            expected: model.dim(),
            got: data.n_features(),
        });
    }
    let mut total = 0.0;
    for (row, &t) in data.attributes().rows().into_iter().zip(data.labels()) {
        let mut f = model.bias;
        for (w, v) in model.weights.iter().zip(row) {
            f += w * v;
        }
        let y = sigmoid(f);
        total += if t == 1 { y.ln() } else { (1.0 - y).ln() };
    }
    Ok(total)
}

/// Predicts the whole dataset, applying the model's stored standardization
/// stats first when present. Returns per-row probabilities and labels.
pub fn predict_dataset(model: &LinearModel, data: &Dataset) -> Result<(Vec<f64>, Vec<u8>), TrainError> {
    let standardized;
    let eval = match model.standardization() {
        Some(stats) => {
            standardized = crate::data::apply_standardize(stats, data).map_err(|_| {
                TrainError::DimensionMismatch {
                    expected: stats.dim(),
                    got: data.n_features(),
                }
            })?;
            &standardized
        }
        None => data,
    };
    if eval.n_features() != model.dim() {
        return Err(TrainError::DimensionMismatch {
            expected: model.dim(),
            got: eval.n_features(),
        });
    }
    let mut probs = Vec::with_capacity(eval.n_samples());
    let mut labels = Vec::with_capacity(eval.n_samples());
    for row in eval.attributes().rows() {
        let mut f = model.bias;
        for (w, v) in model.weights.iter().zip(row) {
            f += w * v;
        }
        probs.push(sigmoid(f));
        labels.push(u8::from(f > 0.0));
    }
    Ok((probs, labels))
}

/// Settings for the damped-Newton maximum-likelihood fit.
#[derive(Debug, Clone)]
pub struct OptimizerConfig {
    /// Stop when the largest absolute parameter change falls below this.
    pub tol: f64,
    pub max_iter: usize,
    /// Ridge added to the Newton system; separable data makes the plain
    /// Hessian singular.
    pub damping: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            tol: 1e-5,
            max_iter: 300,
            damping: 1e-8,
        }
    }
}

pub(crate) fn bernoulli_log_likelihood(f: &Array1<f64>, t: &Array1<f64>) -> f64 {
    f.iter()
        .zip(t)
        .map(|(&fi, &ti)| {
            let y = sigmoid(fi);
            ti * y.ln() + (1.0 - ti) * (1.0 - y).ln()
        })
        .sum()
}

/// Maximum-likelihood logistic regression by damped Newton (IRLS) with
/// step-halving. All coordinates stay active.
pub fn train_mle(data: &Dataset, config: &OptimizerConfig) -> Result<LinearModel, TrainError> {
    let (n0, n1) = data.class_counts();
    if n0 == 0 || n1 == 0 {
        return Err(TrainError::Degenerate(
            "training data contains a single class".into(),
        ));
    }
    let d = data.n_features();
    let active: Vec<usize> = (0..=d).collect();
    let design = active_design(data.attributes(), &active);
    let t = data.labels_f64();
    let mut omega = Array1::zeros(d + 1);
    let mut f = design.dot(&omega);
    let mut obj = bernoulli_log_likelihood(&f, &t);

    for _ in 0..config.max_iter {
        let y = f.mapv(sigmoid);
        let grad = design.t().dot(&(&t - &y));
        let w = y.mapv(|yi| yi * (1.0 - yi));
        let mut weighted = design.clone();
        for (mut row, &wi) in weighted.rows_mut().into_iter().zip(w.iter()) {
            row.mapv_inplace(|v| v * wi);
        }
        let mut hess = design.t().dot(&weighted);
        for i in 0..=d {
            hess[[i, i]] += config.damping;
        }
        let delta = RepairedCholesky::new(&hess)?.solve(&grad);

        // step-halving line search: accept the first non-decreasing step
        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let candidate = &omega + &(&delta * step);
            let f_new = design.dot(&candidate);
            let obj_new = bernoulli_log_likelihood(&f_new, &t);
            if obj_new.is_finite() && obj_new >= obj {
                let max_change = delta.iter().map(|v| (v * step).abs()).fold(0.0, f64::max);
                omega = candidate;
                f = f_new;
                obj = obj_new;
                accepted = true;
                if max_change < config.tol {
                    return finish_mle(&omega);
                }
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break; // no ascent direction left at this scale
        }
    }
    finish_mle(&omega)
}

fn finish_mle(omega: &Array1<f64>) -> Result<LinearModel, TrainError> {
    let d = omega.len() - 1;
    LinearModel::new(
        omega[0],
        omega.slice(ndarray::s![1..]).to_owned(),
        vec![true; d + 1],
    )
}

/// Gradient of the (unpenalized) log-likelihood; exposed for tests.
pub fn mle_gradient(model: &LinearModel, data: &Dataset) -> Array1<f64> {
    let d = data.n_features();
    let active: Vec<usize> = (0..=d).collect();
    let design = active_design(data.attributes(), &active);
    let t = data.labels_f64();
    let mut omega = Array1::zeros(d + 1);
    omega[0] = model.bias();
    for (i, &w) in model.weights().iter().enumerate() {
        omega[i + 1] = w;
    }
    let y = design.dot(&omega).mapv(sigmoid);
    design.t().dot(&(&t - &y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{generate_synthetic, SyntheticSpec};
    use ndarray::{array, Array2};
    use rand::Rng;

    fn model(bias: f64, weights: Vec<f64>) -> LinearModel {
        let d = weights.len();
        LinearModel::new(bias, Array1::from_vec(weights), vec![true; d + 1]).unwrap()
    }

    #[test]
    fn discriminant_examples() {
        let zero = model(0.0, vec![0.0, 0.0]);
        assert_eq!(discriminant(&zero, &[3.0, -1.0]).unwrap(), 0.0);
        let m = model(1.0, vec![2.0]);
        assert_eq!(discriminant(&m, &[0.5]).unwrap(), 2.0);
        assert!(matches!(
            discriminant(&m, &[0.5, 1.0]),
            Err(TrainError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn discriminant_matches_naive_loop() {
        let mut rng = crate::rng::substream(5, "disc-test", &[]);
        for _ in 0..20 {
            let d = 8;
            let w: Vec<f64> = (0..d).map(|_| rng.random::<f64>() - 0.5).collect();
            let x: Vec<f64> = (0..d).map(|_| rng.random::<f64>() * 4.0 - 2.0).collect();
            let bias = rng.random::<f64>();
            let m = model(bias, w.clone());
            let mut expect = bias;
            for i in 0..d {
                expect += w[i] * x[i];
            }
            assert!((discriminant(&m, &x).unwrap() - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn sigmoid_examples() {
        assert_eq!(sigmoid(0.0), 0.5);
        // high-precision value of 1/(1+e^-2)
        assert!((sigmoid(2.0) - 0.880_797_077_977_882_3).abs() < 1e-15);
        let y = sigmoid(-800.0);
        assert!(y > 0.0 && y.is_finite());
        let y = sigmoid(1000.0);
        assert!(y < 1.0 && y.is_finite());
        assert!(y.ln().is_finite() && (1.0 - y).ln().is_finite());
    }

    #[test]
    fn sigmoid_is_strictly_monotone_in_range() {
        let mut prev = sigmoid(-30.0);
        for i in -29..=30 {
            let y = sigmoid(f64::from(i));
            assert!(y > prev);
            prev = y;
        }
    }

    #[test]
    fn predict_label_boundary() {
        let m = model(0.0, vec![1.0]);
        assert_eq!(predict_label(&m, &[0.1]).unwrap(), 1);
        assert_eq!(predict_label(&m, &[0.0]).unwrap(), 0); // f = 0 → class 0
        assert_eq!(predict_label(&m, &[-3.0]).unwrap(), 0);
    }

    #[test]
    fn log_likelihood_examples() {
        let data = Dataset::new(array![[1.0], [2.0], [-1.0]], vec![1, 0, 1], None).unwrap();
        let zero = model(0.0, vec![0.0]);
        let ll = log_likelihood(&zero, &data).unwrap();
        assert!((ll - 3.0 * 0.5f64.ln()).abs() < 1e-12);

        // confident and correct: likelihood approaches 0 from below
        let strong = model(0.0, vec![50.0]);
        let data = Dataset::new(array![[1.0], [-1.0]], vec![1, 0], None).unwrap();
        let ll = log_likelihood(&strong, &data).unwrap();
        assert!(ll < 0.0 && ll > -1e-10);
    }

    #[test]
    fn log_likelihood_matches_per_sample_oracle() {
        let spec = SyntheticSpec::new(40, 1, 6, 3, 17).unwrap();
        let (data, _, _, _) = generate_synthetic(&spec);
        let mut rng = crate::rng::substream(17, "ll-test", &[]);
        let w: Vec<f64> = (0..6).map(|_| rng.random::<f64>() - 0.5).collect();
        let m = model(0.3, w);
        let ll = log_likelihood(&m, &data).unwrap();
        let mut oracle = 0.0;
        for i in 0..data.n_samples() {
            let x: Vec<f64> = data.attributes().row(i).to_vec();
            let y = predict_prob(&m, &x).unwrap();
            oracle += if data.labels()[i] == 1 {
                y.ln()
            } else {
                (1.0 - y).ln()
            };
        }
        assert!((ll - oracle).abs() < 1e-10);
    }

    fn separable_toy() -> Dataset {
        let mut attrs = Vec::new();
        let mut labels = Vec::new();
        for _ in 0..10 {
            attrs.push(-1.0);
            labels.push(0u8);
            attrs.push(1.0);
            labels.push(1u8);
        }
        Dataset::new(Array2::from_shape_vec((20, 1), attrs).unwrap(), labels, None).unwrap()
    }

    #[test]
    fn mle_separable_toy_is_perfect() {
        let data = separable_toy();
        let m = train_mle(&data, &OptimizerConfig::default()).unwrap();
        let (_, labels) = predict_dataset(&m, &data).unwrap();
        assert_eq!(labels, data.labels());
        assert!(m.bias().is_finite() && m.weights().iter().all(|w| w.is_finite()));
    }

    #[test]
    fn mle_gradient_small_at_optimum_nonseparable() {
        // overlapping classes: finite optimum
        let attrs = array![
            [0.2], [0.5], [-0.1], [1.2], [0.9], [-0.4],
            [-0.9], [-1.3], [0.1], [-0.2], [-1.0], [0.6]
        ];
        let labels = vec![1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0];
        let data = Dataset::new(attrs, labels, None).unwrap();
        let cfg = OptimizerConfig::default();
        let m = train_mle(&data, &cfg).unwrap();
        let g = mle_gradient(&m, &data);
        let ginf = g.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        assert!(ginf < 10.0 * cfg.tol, "gradient norm {ginf}");
    }

    #[test]
    fn mle_single_class_is_degenerate() {
        let data = Dataset::new(array![[1.0], [2.0]], vec![1, 1], None).unwrap();
        assert!(matches!(
            train_mle(&data, &OptimizerConfig::default()),
            Err(TrainError::Degenerate(_))
        ));
    }

    #[test]
    fn inactive_weight_must_be_zero() {
        let err = LinearModel::new(0.0, array![1.0], vec![true, false]).unwrap_err();
        assert!(matches!(err, TrainError::NumericalFailure(_)));
    }
}
