//! Correntropy-based robust sparse logistic regression: the correntropy
//! objective with its analytic gradient and Hessian, the half-quadratic
//! ω-step, Laplace variances, and the full training loop.
//!
//! The trainer shares the outer alternating loop, α updates, and pruning
//! with the baseline in [`crate::ard`]; only the ω-step differs.

use ndarray::{Array1, Array2};

use crate::ard::{
    run_ard_loop, run_single_omega_step, ActiveStep, AlphaRule, ArdConfig, OmegaSolver,
    PosteriorApprox, RelevanceState, TrainReport,
};
use crate::data::Dataset;
use crate::error::TrainError;
use crate::linalg::{active_design, RepairedCholesky};
use crate::logistic::{sigmoid, LinearModel};

/// Settings for the correntropy trainer.
#[derive(Debug, Clone)]
pub struct CslrConfig {
    /// Gaussian kernel bandwidth σ.
    pub sigma: f64,
    pub alpha_max: f64,
    pub max_iter: usize,
    pub tol: f64,
    pub alpha_rule: AlphaRule,
    pub protect_bias: bool,
    /// Cap on half-quadratic alternations per ω-step.
    pub max_hq_iter: usize,
    /// Relative energy-change tolerance ending the half-quadratic loop.
    pub hq_tol: f64,
    /// Cap on gradient-ascent steps per inner solve.
    pub inner_max_iter: usize,
    /// Gradient infinity-norm target for the inner solve at σ = 1. The
    /// effective target is `inner_tol/σ²`, tracking how the data term of
    /// the objective scales with the bandwidth.
    pub inner_tol: f64,
}

impl CslrConfig {
    pub fn new(sigma: f64) -> Self {
        Self {
            sigma,
            alpha_max: 1e8,
            max_iter: 300,
            tol: 1e-4,
            alpha_rule: AlphaRule::Fast,
            protect_bias: false,
            max_hq_iter: 30,
            hq_tol: 1e-8,
            inner_max_iter: 200,
            inner_tol: 1e-6,
        }
    }

    /// Copies the shared knobs from an [`ArdConfig`], keeping σ and the
    /// half-quadratic settings.
    pub fn with_ard(mut self, ard: &ArdConfig) -> Self {
        self.alpha_max = ard.alpha_max;
        self.max_iter = ard.max_iter;
        self.tol = ard.tol;
        self.alpha_rule = ard.alpha_rule;
        self.protect_bias = ard.protect_bias;
        self
    }

    pub fn validate(&self) -> Result<(), TrainError> {
        if !(self.sigma > 0.0) {
            return Err(TrainError::InvalidConfig("sigma must be positive".into()));
        }
        if !(self.alpha_max > 0.0) || !(self.tol > 0.0) {
            return Err(TrainError::InvalidConfig(
                "alpha_max and tol must be positive".into(),
            ));
        }
        if self.max_iter == 0 || self.max_hq_iter == 0 || self.inner_max_iter == 0 {
            return Err(TrainError::InvalidConfig(
                "iteration caps must be nonzero".into(),
            ));
        }
        Ok(())
    }
}

/// Gaussian kernel `exp(-x²/2σ²)`.
#[inline]
fn kernel(x: f64, sigma: f64) -> f64 {
    (-(x * x) / (2.0 * sigma * sigma)).exp()
}

/// Empirical correntropy `(1/N) Σ_n exp(-(t_n - y_n)²/2σ²)`.
pub fn correntropy_estimate(targets: &[f64], predictions: &[f64], sigma: f64) -> Result<f64, TrainError> {
    if targets.len() != predictions.len() {
        return Err(TrainError::DimensionMismatch {
            expected: targets.len(),
            got: predictions.len(),
        });
    }
    if !(sigma > 0.0) {
        return Err(TrainError::InvalidConfig("sigma must be positive".into()));
    }
    if targets.is_empty() {
        return Err(TrainError::Degenerate("empty input".into()));
    }
    let total: f64 = targets
        .iter()
        .zip(predictions)
        .map(|(&t, &y)| kernel(t - y, sigma))
        .sum();
    Ok(total / targets.len() as f64)
}

fn penalty(alphas: &[f64], omega: &[f64]) -> f64 {
    0.5 * alphas
        .iter()
        .zip(omega)
        .map(|(&a, &w)| a * w * w)
        .sum::<f64>()
}

/// Objective, gradient, and Hessian in active coordinates against an
/// explicit design matrix. The public dataset-level wrappers below gather
/// the active coordinates first.
struct ActiveObjective<'a> {
    design: &'a Array2<f64>,
    targets: &'a Array1<f64>,
    alphas: &'a [f64],
    sigma: f64,
}

impl ActiveObjective<'_> {
    fn n(&self) -> f64 {
        self.design.nrows() as f64
    }

    fn predictions(&self, omega: &Array1<f64>) -> Array1<f64> {
        self.design.dot(omega).mapv(sigmoid)
    }

    fn value(&self, omega: &Array1<f64>) -> f64 {
        let y = self.predictions(omega);
        let corr: f64 = self
            .targets
            .iter()
            .zip(&y)
            .map(|(&t, &yi)| kernel(t - yi, self.sigma))
            .sum();
        corr / self.n() - penalty(self.alphas, omega.as_slice().unwrap())
    }

    fn gradient(&self, omega: &Array1<f64>) -> Array1<f64> {
        let s2 = self.sigma * self.sigma;
        let y = self.predictions(omega);
        let coeff: Array1<f64> = self
            .targets
            .iter()
            .zip(&y)
            .map(|(&t, &yi)| {
                let e = t - yi;
                kernel(e, self.sigma) * e * yi * (1.0 - yi)
            })
            .collect();
        let mut grad = self.design.t().dot(&coeff) / (self.n() * s2);
        for ((g, &a), &w) in grad.iter_mut().zip(self.alphas).zip(omega) {
            *g -= a * w;
        }
        grad
    }

    fn hessian(&self, omega: &Array1<f64>) -> Array2<f64> {
        let s2 = self.sigma * self.sigma;
        let y = self.predictions(omega);
        let coeff: Array1<f64> = self
            .targets
            .iter()
            .zip(&y)
            .map(|(&t, &yi)| {
                let e = t - yi;
                let v = yi * (1.0 - yi);
                kernel(e, self.sigma) * ((e * e / s2 - 1.0) * v * v + e * v * (1.0 - 2.0 * yi))
            })
            .collect();
        let mut weighted = self.design.clone();
        for (mut row, &c) in weighted.rows_mut().into_iter().zip(coeff.iter()) {
            row.mapv_inplace(|v| v * c);
        }
        let mut hess = self.design.t().dot(&weighted) / (self.n() * s2);
        // the product is symmetric up to summation order; make it exact
        for i in 0..hess.nrows() {
            for j in (i + 1)..hess.ncols() {
                hess[[j, i]] = hess[[i, j]];
            }
        }
        for (i, &a) in self.alphas.iter().enumerate() {
            hess[[i, i]] -= a;
        }
        hess
    }
}

fn gather_active(model: &LinearModel, active: &[usize]) -> Vec<f64> {
    active
        .iter()
        .map(|&c| {
            if c == 0 {
                model.bias()
            } else {
                model.weights()[c - 1]
            }
        })
        .collect()
}

fn active_problem<'a>(
    data: &Dataset,
    state: &'a RelevanceState,
    sigma: f64,
) -> (Vec<usize>, Array2<f64>, Array1<f64>, Vec<f64>) {
    let active = state.active_indices();
    let design = active_design(data.attributes(), &active);
    let targets = data.labels_f64();
    let alphas: Vec<f64> = active.iter().map(|&c| state.alphas()[c]).collect();
    let _ = sigma;
    (active, design, targets, alphas)
}

/// Correntropy objective `(1/N) Σ exp(-e_n²/2σ²) − ½ωᵀΛω` over the active
/// coordinates.
pub fn cslr_objective(data: &Dataset, model: &LinearModel, state: &RelevanceState, sigma: f64) -> f64 {
    let (active, design, targets, alphas) = active_problem(data, state, sigma);
    let omega = Array1::from_vec(gather_active(model, &active));
    ActiveObjective {
        design: &design,
        targets: &targets,
        alphas: &alphas,
        sigma,
    }
    .value(&omega)
}

/// Analytic gradient of [`cslr_objective`] with respect to the active
/// coordinates (bias first).
pub fn cslr_gradient(
    data: &Dataset,
    model: &LinearModel,
    state: &RelevanceState,
    sigma: f64,
) -> Array1<f64> {
    let (active, design, targets, alphas) = active_problem(data, state, sigma);
    let omega = Array1::from_vec(gather_active(model, &active));
    ActiveObjective {
        design: &design,
        targets: &targets,
        alphas: &alphas,
        sigma,
    }
    .gradient(&omega)
}

/// Analytic Hessian of [`cslr_objective`] over the active coordinates.
pub fn cslr_hessian(
    data: &Dataset,
    model: &LinearModel,
    state: &RelevanceState,
    sigma: f64,
) -> Array2<f64> {
    let (active, design, targets, alphas) = active_problem(data, state, sigma);
    let omega = Array1::from_vec(gather_active(model, &active));
    ActiveObjective {
        design: &design,
        targets: &targets,
        alphas: &alphas,
        sigma,
    }
    .hessian(&omega)
}

/// Per-sample auxiliary variables of the half-quadratic reformulation,
/// together with the data part of the surrogate objective at the update
/// point.
#[derive(Debug, Clone)]
pub struct HqState {
    /// `v_n = -exp(-e_n²/2σ²)`, always in `[-1, 0)`.
    pub auxiliaries: Vec<f64>,
    /// `(1/N) Σ (v_n e_n²/2σ² − φ(v_n))` at the errors the auxiliaries were
    /// computed from; equals the empirical correntropy of those errors.
    pub surrogate_objective: f64,
}

/// Dual potential `φ(v) = -v log(-v) + v` of the Gaussian kernel.
fn phi(v: f64) -> f64 {
    -v * (-v).ln() + v
}

/// Auxiliary update `v_n = -exp(-e_n²/2σ²)`, the supremum point of the
/// half-quadratic bound at the current errors.
pub fn hq_update_auxiliaries(errors: &[f64], sigma: f64) -> HqState {
    let auxiliaries: Vec<f64> = errors
        .iter()
        // clamp keeps v strictly negative even if the kernel underflows
        .map(|&e| -kernel(e, sigma).max(f64::MIN_POSITIVE))
        .collect();
    let s2 = 2.0 * sigma * sigma;
    let data_term: f64 = auxiliaries
        .iter()
        .zip(errors)
        .map(|(&v, &e)| v * e * e / s2 - phi(v))
        .sum::<f64>()
        / errors.len().max(1) as f64;
    HqState {
        auxiliaries,
        surrogate_objective: data_term,
    }
}

/// Full half-quadratic energy `E(ω, v)` in active coordinates.
fn hq_energy(
    design: &Array2<f64>,
    targets: &Array1<f64>,
    alphas: &[f64],
    omega: &Array1<f64>,
    aux: &[f64],
    sigma: f64,
) -> f64 {
    let y = design.dot(omega).mapv(sigmoid);
    let s2 = 2.0 * sigma * sigma;
    let data_term: f64 = targets
        .iter()
        .zip(&y)
        .zip(aux)
        .map(|((&t, &yi), &v)| {
            let e = t - yi;
            v * e * e / s2 - phi(v)
        })
        .sum::<f64>()
        / design.nrows() as f64;
    data_term - penalty(alphas, omega.as_slice().unwrap())
}

/// Gradient ascent with Armijo backtracking on the fixed-auxiliary
/// surrogate `(1/N) Σ v_n e_n²/2σ² − ½ωᵀΛω`. Returns the new iterate and
/// the carried step scale.
fn hq_inner_ascent(
    design: &Array2<f64>,
    targets: &Array1<f64>,
    alphas: &[f64],
    aux: &[f64],
    sigma: f64,
    warm: Array1<f64>,
    max_iter: usize,
    grad_tol: f64,
    step_scale: &mut f64,
) -> Result<Array1<f64>, TrainError> {
    let n = design.nrows() as f64;
    let s2 = sigma * sigma;
    let surrogate = |omega: &Array1<f64>| -> (Array1<f64>, f64) {
        let y = design.dot(omega).mapv(sigmoid);
        let data: f64 = targets
            .iter()
            .zip(&y)
            .zip(aux)
            .map(|((&t, &yi), &v)| {
                let e = t - yi;
                v * e * e / (2.0 * s2)
            })
            .sum();
        let value = data / n - penalty(alphas, omega.as_slice().unwrap());
        (y, value)
    };

    let mut omega = warm;
    let (mut y, mut value) = surrogate(&omega);
    if !value.is_finite() {
        return Err(TrainError::NumericalFailure(
            "non-finite surrogate at warm start".into(),
        ));
    }
    let grad_tol = grad_tol / s2; // the data term scales as 1/σ²

    for _ in 0..max_iter {
        let coeff: Array1<f64> = targets
            .iter()
            .zip(&y)
            .zip(aux)
            .map(|((&t, &yi), &v)| -v * (t - yi) * yi * (1.0 - yi))
            .collect();
        let mut grad = design.t().dot(&coeff) / (n * s2);
        for ((g, &a), &w) in grad.iter_mut().zip(alphas).zip(&omega) {
            *g -= a * w;
        }
        let ginf = grad.iter().fold(0.0f64, |m, &g| m.max(g.abs()));
        if !ginf.is_finite() {
            return Err(TrainError::NumericalFailure("non-finite gradient".into()));
        }
        if ginf < grad_tol {
            break;
        }
        let gnorm2: f64 = grad.iter().map(|g| g * g).sum();

        let mut step = *step_scale;
        let mut accepted = false;
        for _ in 0..60 {
            let cand = &omega + &(&grad * step);
            let (y_c, value_c) = surrogate(&cand);
            if value_c.is_finite() && value_c >= value + 1e-4 * step * gnorm2 {
                omega = cand;
                y = y_c;
                value = value_c;
                // try a larger step next time, the cheap way to adapt
                *step_scale = (step * 2.0).min(1e8);
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break; // step collapsed: at numerical stationarity for this v
        }
    }
    Ok(omega)
}

/// Single inner solve of the half-quadratic scheme at fixed auxiliaries,
/// starting from `warm_start`. Pruned coordinates stay exactly zero.
pub fn hq_inner_solve(
    data: &Dataset,
    state: &RelevanceState,
    auxiliaries: &HqState,
    warm_start: &LinearModel,
    config: &CslrConfig,
) -> Result<LinearModel, TrainError> {
    config.validate()?;
    if auxiliaries.auxiliaries.iter().any(|&v| v >= 0.0) {
        return Err(TrainError::InvalidConfig(
            "auxiliary variables must be strictly negative".into(),
        ));
    }
    let active = state.active_indices();
    if active.is_empty() {
        return Err(TrainError::Degenerate("no active coordinates".into()));
    }
    let design = active_design(data.attributes(), &active);
    let targets = data.labels_f64();
    let alphas: Vec<f64> = active.iter().map(|&c| state.alphas()[c]).collect();
    let warm = Array1::from_vec(gather_active(warm_start, &active));
    let mut step_scale = 1.0;
    let omega = hq_inner_ascent(
        &design,
        &targets,
        &alphas,
        &auxiliaries.auxiliaries,
        config.sigma,
        warm,
        config.inner_max_iter,
        config.inner_tol,
        &mut step_scale,
    )?;
    let n_coords = state.n_coords();
    let mut full = vec![0.0; n_coords];
    for (j, &c) in active.iter().enumerate() {
        full[c] = omega[j];
    }
    let mask: Vec<bool> = state.pruned().iter().map(|&p| !p).collect();
    LinearModel::new(full[0], Array1::from_iter(full[1..].iter().copied()), mask)
}

/// The half-quadratic ω-step: alternates auxiliary updates and inner
/// ascents until the energy stabilizes, then computes Laplace variances
/// from the repaired negative Hessian at the maximizer.
pub(crate) struct CslrSolver {
    pub sigma: f64,
    pub max_hq_iter: usize,
    pub hq_tol: f64,
    pub inner_max_iter: usize,
    pub inner_tol: f64,
}

impl CslrSolver {
    fn from_config(cfg: &CslrConfig) -> Self {
        Self {
            sigma: cfg.sigma,
            max_hq_iter: cfg.max_hq_iter,
            hq_tol: cfg.hq_tol,
            inner_max_iter: cfg.inner_max_iter,
            inner_tol: cfg.inner_tol,
        }
    }
}

impl OmegaSolver for CslrSolver {
    fn step(
        &self,
        design: &Array2<f64>,
        targets: &Array1<f64>,
        alphas: &[f64],
        warm: &[f64],
    ) -> Result<ActiveStep, TrainError> {
        let mut omega = Array1::from_iter(warm.iter().copied());
        let mut energies = Vec::new();
        let mut step_scale = 1.0;
        for hq_iter in 0..self.max_hq_iter {
            let y = design.dot(&omega).mapv(sigmoid);
            let errors: Vec<f64> = targets.iter().zip(&y).map(|(&t, &yi)| t - yi).collect();
            let aux = hq_update_auxiliaries(&errors, self.sigma);
            omega = hq_inner_ascent(
                design,
                targets,
                alphas,
                &aux.auxiliaries,
                self.sigma,
                omega,
                self.inner_max_iter,
                self.inner_tol,
                &mut step_scale,
            )?;
            let energy = hq_energy(design, targets, alphas, &omega, &aux.auxiliaries, self.sigma);
            if !energy.is_finite() {
                return Err(TrainError::NumericalFailure(
                    "non-finite half-quadratic energy".into(),
                ));
            }
            energies.push(energy);
            if hq_iter > 0 {
                let prev = energies[hq_iter - 1];
                if (energy - prev).abs() < self.hq_tol * (1.0 + energy.abs()) {
                    break;
                }
            }
        }

        let problem = ActiveObjective {
            design,
            targets,
            alphas,
            sigma: self.sigma,
        };
        let objective = problem.value(&omega);
        if !objective.is_finite() {
            return Err(TrainError::NumericalFailure(
                "non-finite correntropy objective".into(),
            ));
        }
        let neg_hess = problem.hessian(&omega).mapv(|h| -h);
        let chol = RepairedCholesky::new(&neg_hess)?;
        let variances = chol.inverse_diagonal();

        Ok(ActiveStep {
            mean: omega.to_vec(),
            variances: variances.to_vec(),
            objective,
            pd_repair: chol.ridge,
            hq_energies: energies,
        })
    }
}

/// Single CSLR ω-step against the full dataset; posterior entries at pruned
/// coordinates are zero.
pub fn omega_step_cslr(
    data: &Dataset,
    state: &RelevanceState,
    warm_start: &LinearModel,
    config: &CslrConfig,
) -> Result<PosteriorApprox, TrainError> {
    config.validate()?;
    run_single_omega_step(data, state, warm_start, &CslrSolver::from_config(config))
}

/// Trains the correntropy-based robust sparse classifier. The returned
/// model records the kernel bandwidth it was trained with.
pub fn train_cslr(data: &Dataset, config: &CslrConfig) -> Result<(LinearModel, TrainReport), TrainError> {
    config.validate()?;
    let solver = CslrSolver::from_config(config);
    let (model, report) = run_ard_loop(
        data,
        config.alpha_max,
        config.max_iter,
        config.tol,
        config.alpha_rule,
        config.protect_bias,
        &solver,
    )?;
    Ok((model.with_bandwidth(config.sigma), report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ard::{omega_step_slr, ALPHA_MIN};
    use crate::data::{generate_synthetic, SyntheticSpec};
    use crate::rng::substream;
    use crate::train_slr;
    use ndarray::array;
    use rand::Rng;

    fn random_instance(
        n: usize,
        d: usize,
        seed: u64,
    ) -> (Dataset, LinearModel, RelevanceState) {
        let mut rng = substream(seed, "cslr-instance", &[]);
        let mut attrs = Array2::zeros((n, d));
        for v in attrs.iter_mut() {
            *v = rng.random::<f64>() * 2.0 - 1.0;
        }
        let labels: Vec<u8> = (0..n).map(|i| (i % 2) as u8).collect();
        let data = Dataset::new(attrs, labels, None).unwrap();
        let weights: Vec<f64> = (0..d).map(|_| rng.random::<f64>() - 0.5).collect();
        let bias = rng.random::<f64>() - 0.5;
        let model =
            LinearModel::new(bias, Array1::from_vec(weights), vec![true; d + 1]).unwrap();
        let alphas: Vec<f64> = (0..=d).map(|_| 0.2 + rng.random::<f64>()).collect();
        let state = RelevanceState::from_alphas(alphas, 1e8);
        (data, model, state)
    }

    #[test]
    fn correntropy_examples() {
        let t = [1.0, 0.0, 1.0];
        assert_eq!(correntropy_estimate(&t, &t, 1.0).unwrap(), 1.0);
        // single pair with |error| = σ
        let v = correntropy_estimate(&[1.0], &[1.0 - 0.7], 0.7).unwrap();
        assert!((v - 0.606_530_659_712_633_4).abs() < 1e-15);
        // flat-kernel limit
        let v = correntropy_estimate(&[1.0, 0.0], &[0.0, 1.0], 1e6).unwrap();
        assert!(v >= 1.0 - 1e-12);
        assert!(matches!(
            correntropy_estimate(&[1.0], &[1.0, 0.0], 1.0),
            Err(TrainError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn objective_at_zero_model_is_kernel_of_half() {
        let (data, _, state) = random_instance(16, 3, 1);
        let zero = LinearModel::zeros(3);
        for sigma in [0.5, 1.0, 2.0] {
            let got = cslr_objective(&data, &zero, &state, sigma);
            let expect = (-1.0 / (8.0 * sigma * sigma)).exp();
            assert!((got - expect).abs() < 1e-15, "sigma {sigma}");
        }
    }

    #[test]
    fn objective_reduces_to_correntropy_without_prior() {
        let (data, model, _) = random_instance(20, 4, 2);
        let free = RelevanceState::from_alphas(vec![0.0; 5], 1e8);
        let got = cslr_objective(&data, &model, &free, 0.8);
        let (probs, _) = crate::logistic::predict_dataset(&model, &data).unwrap();
        let targets = data.labels_f64();
        let expect = correntropy_estimate(targets.as_slice().unwrap(), &probs, 0.8).unwrap();
        assert!((got - expect).abs() < 1e-15);
    }

    #[test]
    fn objective_matches_naive_loop() {
        let (data, model, state) = random_instance(25, 4, 3);
        let sigma = 1.3;
        let got = cslr_objective(&data, &model, &state, sigma);
        // per-sample oracle
        let mut corr = 0.0;
        for i in 0..data.n_samples() {
            let x: Vec<f64> = data.attributes().row(i).to_vec();
            let y = crate::logistic::predict_prob(&model, &x).unwrap();
            let e = f64::from(data.labels()[i]) - y;
            corr += (-e * e / (2.0 * sigma * sigma)).exp();
        }
        corr /= data.n_samples() as f64;
        let mut pen = 0.5 * state.alphas()[0] * model.bias() * model.bias();
        for d in 0..4 {
            pen += 0.5 * state.alphas()[d + 1] * model.weights()[d] * model.weights()[d];
        }
        assert!((got - (corr - pen)).abs() < 1e-12);
    }

    #[test]
    fn gradient_matches_central_differences() {
        for seed in 0..6 {
            let (data, model, state) = random_instance(20, 5, 100 + seed);
            for sigma in [0.5, 1.0, 2.0] {
                let grad = cslr_gradient(&data, &model, &state, sigma);
                let h = 1e-5;
                for c in 0..=5 {
                    let perturb = |delta: f64| {
                        let mut bias = model.bias();
                        let mut w = model.weights().clone();
                        if c == 0 {
                            bias += delta;
                        } else {
                            w[c - 1] += delta;
                        }
                        let m = LinearModel::new(bias, w, vec![true; 6]).unwrap();
                        cslr_objective(&data, &m, &state, sigma)
                    };
                    let fd = (perturb(h) - perturb(-h)) / (2.0 * h);
                    let scale = grad[c].abs().max(fd.abs()).max(1e-8);
                    assert!(
                        (grad[c] - fd).abs() / scale < 1e-5,
                        "seed {seed} sigma {sigma} coord {c}: analytic {} fd {fd}",
                        grad[c]
                    );
                }
            }
        }
    }

    #[test]
    fn gradient_bias_positive_when_all_labels_one() {
        let mut rng = substream(8, "bias-positive", &[]);
        let mut attrs = Array2::zeros((12, 2));
        for v in attrs.iter_mut() {
            *v = rng.random::<f64>() - 0.5;
        }
        let data = Dataset::new(attrs, vec![1; 12], None).unwrap();
        let state = RelevanceState::from_alphas(vec![1.0; 3], 1e8);
        let grad = cslr_gradient(&data, &LinearModel::zeros(2), &state, 1.0);
        assert!(grad[0] > 0.0);
    }

    #[test]
    fn hessian_symmetric_and_matches_gradient_differences() {
        for seed in 0..4 {
            let (data, model, state) = random_instance(15, 4, 200 + seed);
            let sigma = 0.9;
            let hess = cslr_hessian(&data, &model, &state, sigma);
            // exact symmetry by construction
            for i in 0..5 {
                for j in 0..5 {
                    assert_eq!(hess[[i, j]], hess[[j, i]]);
                }
            }
            let h = 1e-5;
            for c in 0..=4 {
                let perturb = |delta: f64| {
                    let mut bias = model.bias();
                    let mut w = model.weights().clone();
                    if c == 0 {
                        bias += delta;
                    } else {
                        w[c - 1] += delta;
                    }
                    let m = LinearModel::new(bias, w, vec![true; 5]).unwrap();
                    cslr_gradient(&data, &m, &state, sigma)
                };
                let gp = perturb(h);
                let gm = perturb(-h);
                for r in 0..5 {
                    let fd = (gp[r] - gm[r]) / (2.0 * h);
                    let scale = hess[[r, c]].abs().max(fd.abs()).max(1e-6);
                    assert!(
                        (hess[[r, c]] - fd).abs() / scale < 1e-4,
                        "entry ({r},{c}): analytic {} fd {fd}",
                        hess[[r, c]]
                    );
                }
            }
        }
    }

    #[test]
    fn hessian_is_linear_in_the_prior() {
        let (data, model, _) = random_instance(15, 3, 50);
        let sigma = 1.1;
        let zero = RelevanceState::from_alphas(vec![0.0; 4], 1e8);
        let ten = RelevanceState::from_alphas(vec![10.0; 4], 1e8);
        let h0 = cslr_hessian(&data, &model, &zero, sigma);
        let h10 = cslr_hessian(&data, &model, &ten, sigma);
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j { -10.0 } else { 0.0 };
                assert_eq!(h10[[i, j]] - h0[[i, j]], expect);
            }
        }
    }

    #[test]
    fn auxiliary_update_examples() {
        let sigma = 0.7;
        let state = hq_update_auxiliaries(&[0.0, sigma, 50.0], sigma);
        assert_eq!(state.auxiliaries[0], -1.0);
        assert!((state.auxiliaries[1] + 0.606_530_659_712_633_4).abs() < 1e-15);
        assert!(state.auxiliaries[2] > -1e-6 && state.auxiliaries[2] < 0.0);
        for &v in &state.auxiliaries {
            assert!((-1.0..0.0).contains(&v));
        }
    }

    #[test]
    fn auxiliary_surrogate_equals_correntropy_of_errors() {
        let errors = [0.3, -0.5, 0.1, 0.9];
        let sigma = 0.8;
        let state = hq_update_auxiliaries(&errors, sigma);
        let corr: f64 = errors
            .iter()
            .map(|&e| (-e * e / (2.0 * sigma * sigma)).exp())
            .sum::<f64>()
            / errors.len() as f64;
        assert!((state.surrogate_objective - corr).abs() < 1e-14);
    }

    #[test]
    fn inner_solve_improves_surrogate_and_respects_huge_prior() {
        let (data, _, _) = random_instance(30, 3, 60);
        let config = CslrConfig::new(1.0);
        // huge prior: solution collapses to ~0 from any warm start
        let heavy = RelevanceState::from_alphas(vec![1e12; 4], f64::INFINITY);
        let w = LinearModel::new(0.4, array![0.3, -0.2, 0.1], vec![true; 4])
            .unwrap()
            .with_bandwidth(1.0);
        let errors: Vec<f64> = {
            let (probs, _) = crate::logistic::predict_dataset(&w, &data).unwrap();
            data.labels_f64()
                .iter()
                .zip(&probs)
                .map(|(&t, &y)| t - y)
                .collect()
        };
        let aux = hq_update_auxiliaries(&errors, config.sigma);
        let solved = hq_inner_solve(&data, &heavy, &aux, &w, &config).unwrap();
        assert!(solved.bias().abs() < 1e-4);
        for &wi in solved.weights() {
            assert!(wi.abs() < 1e-4);
        }
    }

    #[test]
    fn inner_surrogate_gradient_matches_finite_differences() {
        // all v = −1 and σ = 1: a weighted least-squares-type penalized objective
        let (data, model, state) = random_instance(18, 3, 70);
        let sigma = 1.0;
        let n = data.n_samples() as f64;
        let aux = vec![-1.0; data.n_samples()];
        let targets = data.labels_f64();
        let design = active_design(data.attributes(), &[0, 1, 2, 3]);
        let surrogate = |omega: &Array1<f64>| {
            let y = design.dot(omega).mapv(sigmoid);
            let data_term: f64 = targets
                .iter()
                .zip(&y)
                .zip(&aux)
                .map(|((&t, &yi), &v)| v * (t - yi) * (t - yi) / (2.0 * sigma * sigma))
                .sum();
            data_term / n - penalty(state.alphas(), omega.as_slice().unwrap())
        };
        let omega = Array1::from_vec(gather_active(&model, &[0, 1, 2, 3]));
        // analytic gradient, as used by the inner ascent
        let y = design.dot(&omega).mapv(sigmoid);
        let coeff: Array1<f64> = targets
            .iter()
            .zip(&y)
            .zip(&aux)
            .map(|((&t, &yi), &v)| -v * (t - yi) * yi * (1.0 - yi))
            .collect();
        let mut grad = design.t().dot(&coeff) / (n * sigma * sigma);
        for ((g, &a), &w) in grad.iter_mut().zip(state.alphas()).zip(&omega) {
            *g -= a * w;
        }
        let h = 1e-5;
        for c in 0..4 {
            let mut p = omega.clone();
            p[c] += h;
            let mut m = omega.clone();
            m[c] -= h;
            let fd = (surrogate(&p) - surrogate(&m)) / (2.0 * h);
            let scale = grad[c].abs().max(fd.abs()).max(1e-8);
            assert!(
                (grad[c] - fd).abs() / scale < 1e-5,
                "coord {c}: analytic {} fd {fd}",
                grad[c]
            );
        }
    }

    #[test]
    fn omega_step_energies_are_monotone_and_stationary() {
        let spec = SyntheticSpec::new(60, 10, 4, 2, 31).unwrap();
        let (data, _, _, _) = generate_synthetic(&spec);
        let config = CslrConfig::new(0.8);
        let state = RelevanceState::from_alphas(vec![1.0; 5], 1e8);
        let solver = CslrSolver::from_config(&config);
        let design = active_design(data.attributes(), &[0, 1, 2, 3, 4]);
        let targets = data.labels_f64();
        let step = solver
            .step(&design, &targets, state.alphas(), &[0.0; 5])
            .unwrap();
        for pair in step.hq_energies.windows(2) {
            assert!(
                pair[1] >= pair[0] - 1e-12,
                "energy decreased: {} -> {}",
                pair[0],
                pair[1]
            );
        }
        // stationarity of the returned maximizer
        let model = LinearModel::new(
            step.mean[0],
            Array1::from_iter(step.mean[1..].iter().copied()),
            vec![true; 5],
        )
        .unwrap();
        let grad = cslr_gradient(&data, &model, &state, config.sigma);
        let ginf = grad.iter().fold(0.0f64, |m, &g| m.max(g.abs()));
        assert!(ginf < 1e-3, "gradient norm {ginf}");
    }

    /// Overlapping classes from a noisy linear rule; both unpenalized
    /// losses then have finite, well-conditioned optima.
    fn noisy_linear_dataset(n: usize, d: usize, noise: f64, seed: u64) -> Dataset {
        let mut rng = substream(seed, "noisy-linear", &[]);
        let truth: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal)).collect();
        let mut attrs = Array2::zeros((n, d));
        let mut labels = Vec::with_capacity(n);
        for i in 0..n {
            let mut dot = 0.0;
            for j in 0..d {
                let x: f64 = rng.sample(rand_distr::StandardNormal);
                attrs[[i, j]] = x;
                dot += x * truth[j];
            }
            let eps: f64 = rng.sample(rand_distr::StandardNormal);
            labels.push(u8::from(dot + noise * eps > 0.0));
        }
        Dataset::new(attrs, labels, None).unwrap()
    }

    #[test]
    fn large_bandwidth_step_aligns_with_slr_step() {
        // on clean data with a flat kernel the correntropy step and the
        // likelihood step should point the same way
        let data = noisy_linear_dataset(50, 3, 0.8, 41);
        let state = RelevanceState::from_alphas(vec![ALPHA_MIN; 4], f64::INFINITY);
        let warm = LinearModel::zeros(3);
        let mut config = CslrConfig::new(1e3);
        config.max_hq_iter = 500;
        config.hq_tol = 1e-14;
        config.inner_max_iter = 5000;
        let cslr_post = omega_step_cslr(&data, &state, &warm, &config).unwrap();
        let slr_post = omega_step_slr(&data, &state, &warm, &ArdConfig::default()).unwrap();
        let dot: f64 = cslr_post
            .mean
            .iter()
            .zip(&slr_post.mean)
            .map(|(a, b)| a * b)
            .sum();
        let na: f64 = cslr_post.mean.iter().map(|a| a * a).sum::<f64>().sqrt();
        let nb: f64 = slr_post.mean.iter().map(|b| b * b).sum::<f64>().sqrt();
        let cosine = dot / (na * nb);
        assert!(cosine > 0.99, "cosine {cosine}");
    }

    #[test]
    fn train_cslr_records_bandwidth_and_keeps_pruned_weights_zero() {
        let spec = SyntheticSpec::new(80, 10, 6, 2, 77).unwrap();
        let (data, _, _, _) = generate_synthetic(&spec);
        let config = CslrConfig::new(1.0);
        let (model, report) = train_cslr(&data, &config).unwrap();
        assert_eq!(model.bandwidth(), Some(1.0));
        for (d, &active) in model.active_mask()[1..].iter().enumerate() {
            if !active {
                assert_eq!(model.weights()[d], 0.0);
            }
        }
        let mut prev = usize::MAX;
        for rec in &report.records {
            assert!(rec.n_active <= prev);
            prev = rec.n_active;
            for pair in rec.hq_energies.windows(2) {
                assert!(pair[1] >= pair[0] - 1e-12);
            }
        }
    }

    #[test]
    fn large_bandwidth_selection_overlaps_slr_on_easy_toy() {
        let spec = SyntheticSpec::new(120, 10, 10, 2, 55).unwrap();
        let (data, _, _, _) = generate_synthetic(&spec);
        let (slr_model, _) = train_slr(&data, &ArdConfig::default()).unwrap();
        let (cslr_model, _) = train_cslr(&data, &CslrConfig::new(100.0)).unwrap();
        let a = slr_model.selected_mask();
        let b = cslr_model.selected_mask();
        let inter = a
            .iter()
            .zip(&b)
            .filter(|(&x, &y)| x && y)
            .count() as f64;
        let union = a.iter().zip(&b).filter(|(&x, &y)| x || y).count() as f64;
        assert!(union == 0.0 || inter / union >= 0.5, "jaccard {}", inter / union);
    }
}
