//! Robust sparse binary classification.
//!
//! Two sparse logistic-regression trainers built on automatic relevance
//! determination — the Bernoulli-likelihood baseline (`slr`) and its
//! correntropy-based robust variant (`cslr`) — plus a maximum-likelihood
//! baseline, synthetic contamination benchmarks, bandwidth cross-validation,
//! and the metrics to score them. The `cslr` binary exposes the whole
//! pipeline on the command line.

pub mod ard;
pub mod cli;
pub mod cslr;
pub mod data;
pub mod error;
mod linalg;
pub mod logistic;
pub mod manifest;
pub mod metrics;
pub mod model_io;
pub mod rng;
pub mod select;

pub use ard::{
    alpha_step, omega_step_slr, train_slr, AlphaRule, ArdConfig, PosteriorApprox, RelevanceState,
    Termination, TrainReport,
};
pub use cslr::{
    correntropy_estimate, cslr_gradient, cslr_hessian, cslr_objective, hq_inner_solve,
    hq_update_auxiliaries, omega_step_cslr, train_cslr, CslrConfig, HqState,
};
pub use data::{
    apply_standardize, contaminate, fit_standardize, generate_synthetic, invert_standardize,
    load_csv, save_csv, ContaminationMode, ContaminationSpec, Dataset, StandardizationStats,
    SyntheticSpec,
};
pub use error::{DataError, MetricsError, ModelIoError, SelectError, TrainError};
pub use logistic::{
    discriminant, log_likelihood, predict_dataset, predict_label, predict_prob, sigmoid,
    train_mle, LinearModel, OptimizerConfig,
};
pub use metrics::{accuracy, grouped_contribution, mse, pearson, selection_score, SelectionScore};
pub use model_io::{load_model, save_model, TrainMeta};
pub use select::{
    default_bandwidth_grid, run_benchmark, select_bandwidth, split, Algorithm, BenchResult,
    BenchSpec, CvPlan, SigmaPolicy,
};
