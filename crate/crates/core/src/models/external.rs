//! Scores exported by models trained outside this crate (fine-tuned
//! transformers, recurrent nets, boosted trees), keyed by pair id.

use std::collections::BTreeMap;
use std::io::BufRead;
use std::path::Path;

use serde::Deserialize;

use super::{Algorithm, ModelError, ModelParams, TrainedModel};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Row {
    id: String,
    score: f64,
}

/// Reads JSONL rows `{"id": ..., "score": ...}`. The resulting model looks up
/// stored scores and predicts useful iff sigmoid(score) >= 0.5.
pub fn load_external_predictions(path: &Path) -> Result<TrainedModel, ModelError> {
    let file = std::fs::File::open(path).map_err(|e| ModelError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    parse(std::io::BufReader::new(file))
}

pub(crate) fn parse<R: BufRead>(reader: R) -> Result<TrainedModel, ModelError> {
    let mut scores = BTreeMap::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| ModelError::Schema {
            line: i + 1,
            message: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let row: Row = serde_json::from_str(&line).map_err(|e| ModelError::Schema {
            line: i + 1,
            message: e.to_string(),
        })?;
        if !row.score.is_finite() {
            return Err(ModelError::Schema {
                line: i + 1,
                message: "score must be finite".into(),
            });
        }
        if scores.insert(row.id.clone(), row.score).is_some() {
            return Err(ModelError::Schema {
                line: i + 1,
                message: format!("duplicate id {}", row.id),
            });
        }
    }
    Ok(TrainedModel {
        algorithm: Algorithm::External,
        vocab_digest: None,
        train_config: None,
        parameters: ModelParams::External { scores },
    })
}
