//! Baseline sparse logistic regression: alternating ω-step/α-step with
//! Bernoulli likelihood, Laplace approximation, and relevance-based pruning.
//!
//! The outer alternating loop, the α update rules, and pruning live here and
//! are shared with the correntropy trainer, which swaps in its own ω-step.

use ndarray::{Array1, Array2};

use crate::data::Dataset;
use crate::error::TrainError;
use crate::linalg::{active_design, RepairedCholesky};
use crate::logistic::{bernoulli_log_likelihood, sigmoid, LinearModel};

/// Floor keeping every prior precision strictly positive.
pub const ALPHA_MIN: f64 = 1e-12;
/// Hard numeric cap on precisions, so α stays finite even with pruning
/// disabled (`alpha_max = ∞`).
pub const ALPHA_CAP: f64 = 1e12;
/// Initial precision for every coordinate.
pub const ALPHA_INIT: f64 = 1.0;
/// Precision pinned to the bias when it is protected from pruning.
const PROTECTED_BIAS_ALPHA: f64 = 1e-6;

/// Update rule for the relevance parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlphaRule {
    /// Posterior expectation `α_d ← 1/(ω_d*² + s_d²)`.
    Expectation,
    /// Accelerated rule `α_d ← (1 − α_d s_d²)/ω_d*²` using the pre-update
    /// α_d; falls back to the expectation rule when it overshoots.
    Fast,
}

impl AlphaRule {
    pub fn as_str(self) -> &'static str {
        match self {
            AlphaRule::Expectation => "expectation",
            AlphaRule::Fast => "fast",
        }
    }
}

/// Settings shared by both sparse trainers.
#[derive(Debug, Clone)]
pub struct ArdConfig {
    /// Precisions reaching this threshold prune their coordinate.
    pub alpha_max: f64,
    /// Cap on outer alternating iterations.
    pub max_iter: usize,
    /// Convergence tolerance on max |Δω| and max |Δ log α| over the
    /// active set.
    pub tol: f64,
    pub alpha_rule: AlphaRule,
    /// Keep the bias at a small fixed precision, exempt from pruning.
    pub protect_bias: bool,
    /// Inner Newton iteration cap for the ω-step.
    pub newton_max_iter: usize,
    /// Gradient infinity-norm target for the inner Newton solver.
    pub newton_tol: f64,
}

impl Default for ArdConfig {
    fn default() -> Self {
        Self {
            alpha_max: 1e8,
            max_iter: 300,
            tol: 1e-4,
            alpha_rule: AlphaRule::Fast,
            protect_bias: false,
            newton_max_iter: 100,
            newton_tol: 1e-6,
        }
    }
}

impl ArdConfig {
    pub fn validate(&self) -> Result<(), TrainError> {
        if !(self.alpha_max > 0.0) {
            return Err(TrainError::InvalidConfig("alpha_max must be positive".into()));
        }
        if !(self.tol > 0.0) || self.max_iter == 0 {
            return Err(TrainError::InvalidConfig(
                "tol must be positive and max_iter nonzero".into(),
            ));
        }
        Ok(())
    }
}

/// Per-coordinate prior precisions and prune status. Index 0 is the bias.
#[derive(Debug, Clone)]
pub struct RelevanceState {
    alphas: Vec<f64>,
    pruned: Vec<bool>,
    protected: Vec<bool>,
    alpha_max: f64,
}

impl RelevanceState {
    /// Fresh state with every coordinate active at `α = 1`.
    pub fn init(n_coords: usize, alpha_max: f64, protect_bias: bool) -> Self {
        let mut alphas = vec![ALPHA_INIT; n_coords];
        let mut protected = vec![false; n_coords];
        if protect_bias {
            alphas[0] = PROTECTED_BIAS_ALPHA;
            protected[0] = true;
        }
        Self {
            alphas,
            pruned: vec![false; n_coords],
            protected,
            alpha_max,
        }
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn pruned(&self) -> &[bool] {
        &self.pruned
    }

    pub fn alpha_max(&self) -> f64 {
        self.alpha_max
    }

    pub fn n_coords(&self) -> usize {
        self.alphas.len()
    }

    pub fn n_active(&self) -> usize {
        self.pruned.iter().filter(|&&p| !p).count()
    }

    pub fn active_indices(&self) -> Vec<usize> {
        (0..self.alphas.len()).filter(|&c| !self.pruned[c]).collect()
    }

    /// State with given precisions, all active. For tests and single-step use.
    pub fn from_alphas(alphas: Vec<f64>, alpha_max: f64) -> Self {
        let n = alphas.len();
        Self {
            alphas,
            pruned: vec![false; n],
            protected: vec![false; n],
            alpha_max,
        }
    }
}

/// Gaussian posterior approximation at the MAP estimate: full-length mean
/// and per-coordinate variances, zero at pruned positions.
#[derive(Debug, Clone)]
pub struct PosteriorApprox {
    pub mean: Vec<f64>,
    pub variances: Vec<f64>,
}

/// One relevance update. Active, unprotected coordinates get a new α from
/// the chosen rule, clamped to `[ALPHA_MIN, ALPHA_CAP]`; coordinates whose
/// new α reaches the prune threshold are marked pruned. Pruned coordinates
/// never revert.
pub fn alpha_step(posterior: &PosteriorApprox, state: &RelevanceState, rule: AlphaRule) -> RelevanceState {
    let mut next = state.clone();
    for c in 0..state.n_coords() {
        if state.pruned[c] || state.protected[c] {
            continue;
        }
        let mean = posterior.mean[c];
        let var = posterior.variances[c];
        let m2 = mean * mean;
        let expectation = || 1.0 / (m2 + var).max(1e-24);
        let raw = match rule {
            AlphaRule::Expectation => expectation(),
            AlphaRule::Fast => {
                if m2 < 1e-24 {
                    state.alpha_max
                } else {
                    let gamma = 1.0 - state.alphas[c] * var;
                    if gamma <= 0.0 {
                        expectation()
                    } else {
                        gamma / m2
                    }
                }
            }
        };
        let clamped = raw.clamp(ALPHA_MIN, ALPHA_CAP);
        next.alphas[c] = clamped;
        if clamped >= state.alpha_max {
            next.pruned[c] = true;
        }
    }
    next
}

/// What the ω-step reports back to the outer loop, in active coordinates.
pub(crate) struct ActiveStep {
    pub mean: Vec<f64>,
    pub variances: Vec<f64>,
    pub objective: f64,
    pub pd_repair: f64,
    pub hq_energies: Vec<f64>,
}

/// Any maximizer of a penalized objective over the active coordinates,
/// returning the MAP estimate and Laplace variances.
pub(crate) trait OmegaSolver {
    fn step(
        &self,
        design: &Array2<f64>,
        targets: &Array1<f64>,
        alphas: &[f64],
        warm: &[f64],
    ) -> Result<ActiveStep, TrainError>;
}

fn quadratic_penalty(alphas: &[f64], omega: &[f64]) -> f64 {
    0.5 * alphas
        .iter()
        .zip(omega)
        .map(|(&a, &w)| a * w * w)
        .sum::<f64>()
}

/// Damped-Newton maximizer of the α-penalized Bernoulli log-likelihood.
pub(crate) struct SlrSolver {
    pub newton_max_iter: usize,
    pub newton_tol: f64,
    pub damping: f64,
}

impl SlrSolver {
    pub fn from_config(cfg: &ArdConfig) -> Self {
        Self {
            newton_max_iter: cfg.newton_max_iter,
            newton_tol: cfg.newton_tol,
            damping: 1e-8,
        }
    }
}

impl OmegaSolver for SlrSolver {
    fn step(
        &self,
        design: &Array2<f64>,
        targets: &Array1<f64>,
        alphas: &[f64],
        warm: &[f64],
    ) -> Result<ActiveStep, TrainError> {
        let a = alphas.len();
        let alpha_arr = Array1::from_iter(alphas.iter().copied());
        let mut omega = Array1::from_iter(warm.iter().copied());
        let mut f = design.dot(&omega);
        let mut obj = bernoulli_log_likelihood(&f, targets) - quadratic_penalty(alphas, warm);
        if !obj.is_finite() {
            return Err(TrainError::NumericalFailure(
                "non-finite objective at warm start".into(),
            ));
        }

        for _ in 0..self.newton_max_iter {
            let y = f.mapv(sigmoid);
            let grad = design.t().dot(&(targets - &y)) - &(&alpha_arr * &omega);
            let ginf = grad.iter().fold(0.0f64, |m, &g| m.max(g.abs()));
            if ginf < self.newton_tol {
                break;
            }
            let w = y.mapv(|yi| yi * (1.0 - yi));
            let mut weighted = design.clone();
            for (mut row, &wi) in weighted.rows_mut().into_iter().zip(w.iter()) {
                row.mapv_inplace(|v| v * wi);
            }
            let mut hess = design.t().dot(&weighted);
            for i in 0..a {
                hess[[i, i]] += alphas[i] + self.damping;
            }
            let delta = RepairedCholesky::new(&hess)?.solve(&grad);

            let mut step = 1.0;
            let mut accepted = false;
            for _ in 0..40 {
                let cand = &omega + &(&delta * step);
                let f_new = design.dot(&cand);
                let obj_new = bernoulli_log_likelihood(&f_new, targets)
                    - quadratic_penalty(alphas, cand.as_slice().unwrap());
                if obj_new.is_finite() && obj_new >= obj {
                    omega = cand;
                    f = f_new;
                    obj = obj_new;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if !accepted {
                break;
            }
        }

        // Laplace variances: diagonal of the inverse negative Hessian at ω*.
        let y = f.mapv(sigmoid);
        let w = y.mapv(|yi| yi * (1.0 - yi));
        let mut weighted = design.clone();
        for (mut row, &wi) in weighted.rows_mut().into_iter().zip(w.iter()) {
            row.mapv_inplace(|v| v * wi);
        }
        let mut neg_hess = design.t().dot(&weighted);
        for i in 0..a {
            neg_hess[[i, i]] += alphas[i];
        }
        let chol = RepairedCholesky::new(&neg_hess)?;
        let variances = chol.inverse_diagonal();

        Ok(ActiveStep {
            mean: omega.to_vec(),
            variances: variances.to_vec(),
            objective: obj,
            pd_repair: chol.ridge,
            hq_energies: Vec::new(),
        })
    }
}

/// Single SLR ω-step against the full dataset; posterior entries at pruned
/// coordinates are zero.
pub fn omega_step_slr(
    data: &Dataset,
    state: &RelevanceState,
    warm_start: &LinearModel,
    cfg: &ArdConfig,
) -> Result<PosteriorApprox, TrainError> {
    run_single_omega_step(data, state, warm_start, &SlrSolver::from_config(cfg))
}

pub(crate) fn run_single_omega_step(
    data: &Dataset,
    state: &RelevanceState,
    warm_start: &LinearModel,
    solver: &dyn OmegaSolver,
) -> Result<PosteriorApprox, TrainError> {
    let active = state.active_indices();
    if active.is_empty() {
        return Err(TrainError::Degenerate("no active coordinates".into()));
    }
    let design = active_design(data.attributes(), &active);
    let targets = data.labels_f64();
    let alphas: Vec<f64> = active.iter().map(|&c| state.alphas()[c]).collect();
    let warm: Vec<f64> = active
        .iter()
        .map(|&c| {
            if c == 0 {
                warm_start.bias()
            } else {
                warm_start.weights()[c - 1]
            }
        })
        .collect();
    let step = solver.step(&design, &targets, &alphas, &warm)?;
    let n_coords = state.n_coords();
    let mut posterior = PosteriorApprox {
        mean: vec![0.0; n_coords],
        variances: vec![0.0; n_coords],
    };
    for (j, &c) in active.iter().enumerate() {
        posterior.mean[c] = step.mean[j];
        posterior.variances[c] = step.variances[j];
    }
    Ok(posterior)
}

/// Why a training run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Converged,
    IterationCap,
}

/// One outer-iteration trace record.
#[derive(Debug, Clone)]
pub struct IterationRecord {
    pub iteration: usize,
    /// ω-step objective at its returned maximizer.
    pub objective: f64,
    /// Active coordinates (bias included) after this iteration's pruning.
    pub n_active: usize,
    pub max_weight_change: f64,
    pub max_alpha_change: f64,
    /// Half-quadratic energy sequence of this iteration's ω-step
    /// (correntropy trainer only).
    pub hq_energies: Vec<f64>,
    /// Diagonal ridge the Laplace step needed, 0 when none.
    pub pd_repair: f64,
}

/// Per-iteration diagnostics of a training run.
#[derive(Debug, Clone)]
pub struct TrainReport {
    pub records: Vec<IterationRecord>,
    pub termination: Termination,
}

impl TrainReport {
    pub fn iterations(&self) -> usize {
        self.records.len()
    }

    pub fn final_objective(&self) -> Option<f64> {
        self.records.last().map(|r| r.objective)
    }
}

/// The alternating ω-step / α-step loop with threshold pruning, shared by
/// both sparse trainers.
pub(crate) fn run_ard_loop(
    data: &Dataset,
    alpha_max: f64,
    max_iter: usize,
    tol: f64,
    rule: AlphaRule,
    protect_bias: bool,
    solver: &dyn OmegaSolver,
) -> Result<(LinearModel, TrainReport), TrainError> {
    let (n0, n1) = data.class_counts();
    if n0 == 0 || n1 == 0 {
        return Err(TrainError::Degenerate(
            "training data contains a single class".into(),
        ));
    }
    let d = data.n_features();
    let n_coords = d + 1;
    let targets = data.labels_f64();
    let mut state = RelevanceState::init(n_coords, alpha_max, protect_bias);
    let mut omega = vec![0.0; n_coords];
    let mut records = Vec::new();
    let mut termination = Termination::IterationCap;
    let mut active = state.active_indices();
    let mut design = active_design(data.attributes(), &active);

    for iteration in 1..=max_iter {
        let alphas: Vec<f64> = active.iter().map(|&c| state.alphas[c]).collect();
        let warm: Vec<f64> = active.iter().map(|&c| omega[c]).collect();
        let step = solver.step(&design, &targets, &alphas, &warm)?;

        let mut posterior = PosteriorApprox {
            mean: vec![0.0; n_coords],
            variances: vec![0.0; n_coords],
        };
        for (j, &c) in active.iter().enumerate() {
            posterior.mean[c] = step.mean[j];
            posterior.variances[c] = step.variances[j];
        }

        let next_state = alpha_step(&posterior, &state, rule);

        let mut max_dw: f64 = 0.0;
        let mut max_dla: f64 = 0.0;
        let mut pruned_now = false;
        for &c in &active {
            if next_state.pruned[c] {
                pruned_now = true;
                omega[c] = 0.0;
                continue;
            }
            max_dw = max_dw.max((posterior.mean[c] - omega[c]).abs());
            max_dla = max_dla.max((next_state.alphas[c].ln() - state.alphas[c].ln()).abs());
            omega[c] = posterior.mean[c];
        }
        state = next_state;
        records.push(IterationRecord {
            iteration,
            objective: step.objective,
            n_active: state.n_active(),
            max_weight_change: max_dw,
            max_alpha_change: max_dla,
            hq_energies: step.hq_energies,
            pd_repair: step.pd_repair,
        });

        if pruned_now {
            active = state.active_indices();
            if active.is_empty() {
                termination = Termination::Converged;
                break;
            }
            design = active_design(data.attributes(), &active);
            continue; // a prune event is never convergence
        }
        if max_dw < tol && max_dla < tol {
            termination = Termination::Converged;
            break;
        }
    }

    let mask: Vec<bool> = state.pruned.iter().map(|&p| !p).collect();
    let weights = Array1::from_iter(omega[1..].iter().copied());
    let model = LinearModel::new(omega[0], weights, mask)?;
    Ok((
        model,
        TrainReport {
            records,
            termination,
        },
    ))
}

/// Trains the baseline sparse logistic regression.
pub fn train_slr(data: &Dataset, config: &ArdConfig) -> Result<(LinearModel, TrainReport), TrainError> {
    config.validate()?;
    let solver = SlrSolver::from_config(config);
    run_ard_loop(
        data,
        config.alpha_max,
        config.max_iter,
        config.tol,
        config.alpha_rule,
        config.protect_bias,
        &solver,
    )
}
