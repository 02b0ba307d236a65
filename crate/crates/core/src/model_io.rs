//! Model and training-report persistence.
//!
//! Models are stored as a single JSON document. Floating-point values are
//! written in shortest round-trip form, so save → load reproduces every
//! parameter bit-exactly.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use ndarray::Array1;
use serde::{Deserialize, Serialize};

use crate::ard::TrainReport;
use crate::data::StandardizationStats;
use crate::error::ModelIoError;
use crate::logistic::LinearModel;

pub const FORMAT_VERSION: u32 = 1;

/// Provenance recorded next to the parameters.
#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
pub struct TrainMeta {
    pub seed: Option<u64>,
    pub iterations: usize,
    pub objective_trace_last: Option<f64>,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format_version: u32,
    algorithm: String,
    bias: f64,
    weights: Vec<f64>,
    active_mask: Vec<bool>,
    means: Option<Vec<f64>>,
    stds: Option<Vec<f64>>,
    bandwidth: Option<f64>,
    train_meta: TrainMeta,
}

/// Writes a model with its algorithm tag and training metadata.
pub fn save_model(
    path: &Path,
    model: &LinearModel,
    algorithm: &str,
    meta: &TrainMeta,
) -> Result<(), ModelIoError> {
    let file = ModelFile {
        format_version: FORMAT_VERSION,
        algorithm: algorithm.to_string(),
        bias: model.bias(),
        weights: model.weights().to_vec(),
        active_mask: model.active_mask().to_vec(),
        means: model.standardization().map(|s| s.means.clone()),
        stds: model.standardization().map(|s| s.stds.clone()),
        bandwidth: model.bandwidth(),
        train_meta: meta.clone(),
    };
    let io_err = |source| ModelIoError::Io {
        path: path.to_path_buf(),
        source,
    };
    let out = File::create(path).map_err(io_err)?;
    let mut writer = BufWriter::new(out);
    serde_json::to_writer_pretty(&mut writer, &file).map_err(|e| ModelIoError::Malformed {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    writer.write_all(b"\n").map_err(io_err)?;
    writer.flush().map_err(io_err)
}

/// Reads a model back, returning it with its algorithm tag and metadata.
pub fn load_model(path: &Path) -> Result<(LinearModel, String, TrainMeta), ModelIoError> {
    let file = File::open(path).map_err(|source| ModelIoError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let parsed: ModelFile =
        serde_json::from_reader(BufReader::new(file)).map_err(|e| ModelIoError::Malformed {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
    if parsed.format_version != FORMAT_VERSION {
        return Err(ModelIoError::UnsupportedVersion {
            found: parsed.format_version,
            supported: FORMAT_VERSION,
        });
    }
    let mut model = LinearModel::new(
        parsed.bias,
        Array1::from_vec(parsed.weights),
        parsed.active_mask,
    )
    .map_err(|e| ModelIoError::Malformed {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    match (parsed.means, parsed.stds) {
        (Some(means), Some(stds)) => {
            if means.len() != stds.len() {
                return Err(ModelIoError::Malformed {
                    path: path.to_path_buf(),
                    message: "means and stds lengths differ".into(),
                });
            }
            model = model.with_standardization(StandardizationStats { means, stds });
        }
        (None, None) => {}
        _ => {
            return Err(ModelIoError::Malformed {
                path: path.to_path_buf(),
                message: "means and stds must be present together".into(),
            })
        }
    }
    if let Some(sigma) = parsed.bandwidth {
        model = model.with_bandwidth(sigma);
    }
    Ok((model, parsed.algorithm, parsed.train_meta))
}

/// Writes the per-iteration training trace as CSV. Half-quadratic energies
/// are semicolon-joined inside one column since their count varies per
/// iteration.
pub fn save_report(path: &Path, report: &TrainReport) -> Result<(), ModelIoError> {
    let io_err = |source| ModelIoError::Io {
        path: path.to_path_buf(),
        source,
    };
    let out = File::create(path).map_err(io_err)?;
    let mut w = BufWriter::new(out);
    writeln!(
        w,
        "iteration,objective,n_active,max_weight_change,max_alpha_change,pd_repair,hq_energies"
    )
    .map_err(io_err)?;
    for r in &report.records {
        let energies = r
            .hq_energies
            .iter()
            .map(|e| e.to_string())
            .collect::<Vec<_>>()
            .join(";");
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            r.iteration,
            r.objective,
            r.n_active,
            r.max_weight_change,
            r.max_alpha_change,
            r.pd_repair,
            energies
        )
        .map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{fit_standardize, generate_synthetic, SyntheticSpec};
    use crate::logistic::predict_prob;
    use rand::Rng;

    #[test]
    fn round_trip_reproduces_probabilities_bit_exactly() {
        let mut rng = crate::rng::substream(2, "model-io", &[]);
        let d = 7;
        let weights: Vec<f64> = (0..d).map(|_| rng.random::<f64>() * 4.0 - 2.0).collect();
        let mut mask = vec![true; d + 1];
        mask[3] = false;
        let mut weights = weights;
        weights[2] = 0.0; // coordinate 3 of the mask is weight index 2
        let spec = SyntheticSpec::new(10, 1, d, 2, 1).unwrap();
        let (train, _, _, _) = generate_synthetic(&spec);
        let stats = fit_standardize(&train);
        let model = LinearModel::new(0.123456789123456789, Array1::from_vec(weights), mask)
            .unwrap()
            .with_standardization(stats)
            .with_bandwidth(0.7);

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        let meta = TrainMeta {
            seed: Some(42),
            iterations: 17,
            objective_trace_last: Some(-0.25),
        };
        save_model(&path, &model, "cslr", &meta).unwrap();
        let (loaded, algorithm, loaded_meta) = load_model(&path).unwrap();
        assert_eq!(algorithm, "cslr");
        assert_eq!(loaded_meta, meta);
        assert_eq!(loaded.bias(), model.bias());
        assert_eq!(loaded.weights(), model.weights());
        assert_eq!(loaded.active_mask(), model.active_mask());
        assert_eq!(loaded.bandwidth(), model.bandwidth());
        assert_eq!(loaded.standardization(), model.standardization());

        for _ in 0..1000 {
            let x: Vec<f64> = (0..d).map(|_| rng.random::<f64>() * 10.0 - 5.0).collect();
            let a = predict_prob(&model, &x).unwrap();
            let b = predict_prob(&loaded, &x).unwrap();
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn rejects_future_format_version() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        std::fs::write(
            &path,
            r#"{"format_version":99,"algorithm":"slr","bias":0.0,"weights":[],"active_mask":[true],"means":null,"stds":null,"bandwidth":null,"train_meta":{"seed":null,"iterations":0,"objective_trace_last":null}}"#,
        )
        .unwrap();
        assert!(matches!(
            load_model(&path),
            Err(ModelIoError::UnsupportedVersion { found: 99, .. })
        ));
    }
}
