//! Pipeline configuration, run manifests, model artifacts and label import:
//! the pieces the command line glues together.

use std::collections::HashMap;
use std::io::BufRead;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, DatasetError, Label, DEFAULT_RATIO};
use crate::eval::Fitted;
use crate::extractor::ExtractOptions;
use crate::features::FeatureConfig;
use crate::fsutil::{file_digest, now_utc_seconds, write_atomic};
use crate::ingest::DEFAULT_MAX_FILE_BYTES;
use crate::models::{Algorithm, AlgorithmConfig};
use crate::par::Execution;

pub const DEFAULT_SPLIT_SEED: u64 = 42;

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("config {path}: {message}")]
    Config { path: PathBuf, message: String },
    #[error("{path}:{line}: {message}")]
    Labels {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("pair {id} is already labeled {existing}; pass --force-relabel to change it")]
    Relabel { id: String, existing: Label },
    #[error("model artifact {path}: {message}")]
    Artifact { path: PathBuf, message: String },
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorpusSource {
    #[default]
    Github,
    Fixtures,
    Local,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorpusConfig {
    pub source: CorpusSource,
    pub query: String,
    pub max_repos: usize,
    /// Recorded exchanges to replay when `source = "fixtures"`.
    pub fixtures: Option<PathBuf>,
    /// Leading path components naming the repository (`owner/name` = 2).
    pub repo_depth: usize,
    pub max_file_bytes: u64,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        Self {
            source: CorpusSource::Github,
            query: "language:c".into(),
            max_repos: 10,
            fixtures: None,
            repo_depth: 2,
            max_file_bytes: DEFAULT_MAX_FILE_BYTES,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitConfig {
    pub ratio: f64,
    pub seed: u64,
}

impl Default for SplitConfig {
    fn default() -> Self {
        Self {
            ratio: DEFAULT_RATIO,
            seed: DEFAULT_SPLIT_SEED,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathsConfig {
    pub corpus: PathBuf,
    pub dataset: PathBuf,
    pub generated: Option<PathBuf>,
    pub reports: PathBuf,
}

impl Default for PathsConfig {
    fn default() -> Self {
        Self {
            corpus: "corpus".into(),
            dataset: "pairs.jsonl".into(),
            generated: None,
            reports: "reports".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExecutionConfig {
    pub mode: Execution,
    /// Worker threads; 0 uses every core.
    pub threads: usize,
}

/// Everything a run needs, loadable from one TOML file. Missing sections
/// take their defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub corpus: CorpusConfig,
    pub extract: ExtractOptions,
    pub features: FeatureConfig,
    pub algorithms: Vec<AlgorithmConfig>,
    pub split: SplitConfig,
    pub paths: PathsConfig,
    pub execution: ExecutionConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            corpus: CorpusConfig::default(),
            extract: ExtractOptions::default(),
            features: FeatureConfig::default(),
            algorithms: Algorithm::NATIVE
                .iter()
                .filter_map(|a| AlgorithmConfig::default_for(*a))
                .collect(),
            split: SplitConfig::default(),
            paths: PathsConfig::default(),
            execution: ExecutionConfig::default(),
        }
    }
}

impl PipelineConfig {
    pub fn from_toml(text: &str, path: &Path) -> Result<Self, PipelineError> {
        toml::from_str(text).map_err(|e| PipelineError::Config {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text = std::fs::read_to_string(path).map_err(|source| PipelineError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text, path)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialization")
    }

    /// The configured settings for `algorithm`, or its defaults.
    pub fn algorithm_config(&self, algorithm: Algorithm) -> Option<AlgorithmConfig> {
        self.algorithms
            .iter()
            .find(|c| c.algorithm() == algorithm)
            .cloned()
            .or_else(|| AlgorithmConfig::default_for(algorithm))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileRecord {
    pub path: String,
    pub sha256: String,
}

impl FileRecord {
    pub fn of(path: &Path) -> Result<Self, PipelineError> {
        Ok(Self {
            path: path.display().to_string(),
            sha256: file_digest(path).map_err(|source| PipelineError::Io {
                path: path.to_path_buf(),
                source,
            })?,
        })
    }
}

/// Written next to every output so the run can be repeated exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub tool_version: String,
    pub args: Vec<String>,
    pub config: PipelineConfig,
    pub inputs: Vec<FileRecord>,
    pub outputs: Vec<FileRecord>,
    pub started_at: i64,
    pub finished_at: i64,
    /// Command-specific counts and diagnostics.
    pub details: serde_json::Value,
}

impl RunManifest {
    pub fn start(command: &str, args: Vec<String>, config: &PipelineConfig) -> Self {
        Self {
            command: command.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            args,
            config: config.clone(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            started_at: now_utc_seconds(),
            finished_at: 0,
            details: serde_json::Value::Null,
        }
    }

    pub fn input(&mut self, path: &Path) -> Result<(), PipelineError> {
        self.inputs.push(FileRecord::of(path)?);
        Ok(())
    }

    pub fn output(&mut self, path: &Path) -> Result<(), PipelineError> {
        self.outputs.push(FileRecord::of(path)?);
        Ok(())
    }

    /// Stamps the finish time and writes the manifest to `path`.
    pub fn finish(mut self, path: &Path) -> Result<(), PipelineError> {
        self.finished_at = now_utc_seconds();
        let mut text = serde_json::to_string_pretty(&self).expect("manifest serialization");
        text.push('\n');
        write_file(path, text.as_bytes())
    }
}

/// `<output>.manifest.json`
pub fn manifest_path(output: &Path) -> PathBuf {
    let mut s = output.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

/// Atomic write, creating the parent directory if needed.
pub fn write_file(path: &Path, bytes: &[u8]) -> Result<(), PipelineError> {
    let io = |source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    };
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(io)?;
    }
    write_atomic(path, bytes).map_err(io)
}

/// A trained model together with the vocabulary and split it came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelArtifact {
    pub dataset_digest: String,
    pub split: SplitConfig,
    #[serde(flatten)]
    pub fitted: Fitted,
}

impl ModelArtifact {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("artifact serialization")
    }

    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text = std::fs::read_to_string(path).map_err(|source| PipelineError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|e| PipelineError::Artifact {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LabelLine {
    id: String,
    label: LabelValue,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum LabelValue {
    Num(u8),
    Text(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ImportOutcome {
    pub applied: usize,
    pub unchanged: usize,
    pub relabeled: usize,
}

/// Reads `{"id": ..., "label": 0 | 1 | "useful" | "not_useful"}` lines.
pub fn read_labels<R: BufRead>(
    reader: R,
    path: &Path,
) -> Result<Vec<(String, Label)>, PipelineError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let err = |message: String| PipelineError::Labels {
            path: path.to_path_buf(),
            line: i + 1,
            message,
        };
        let line = line.map_err(|e| err(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let l: LabelLine = serde_json::from_str(&line).map_err(|e| err(e.to_string()))?;
        let label = match l.label {
            LabelValue::Num(n) => {
                Label::from_u8(n).ok_or_else(|| err(format!("label must be 0 or 1, got {n}")))?
            }
            LabelValue::Text(t) => t.parse().map_err(err)?,
        };
        out.push((l.id, label));
    }
    Ok(out)
}

/// Applies imported labels to `dataset`. Every id must exist; changing an
/// existing label requires `force`. Nothing is applied if any line fails.
pub fn import_labels(
    dataset: &Dataset,
    labels: &[(String, Label)],
    force: bool,
) -> Result<(Dataset, ImportOutcome), PipelineError> {
    let index: HashMap<&str, usize> = dataset
        .pairs
        .iter()
        .enumerate()
        .map(|(i, p)| (p.id.as_str(), i))
        .collect();
    let mut out = dataset.clone();
    let mut outcome = ImportOutcome::default();
    for (id, label) in labels {
        let &i = index
            .get(id.as_str())
            .ok_or_else(|| PipelineError::Dataset(DatasetError::UnknownPair(id.clone())))?;
        match out.pairs[i].label {
            Some(existing) if existing == *label => outcome.unchanged += 1,
            Some(existing) if !force => {
                return Err(PipelineError::Relabel {
                    id: id.clone(),
                    existing,
                })
            }
            Some(_) => {
                out.pairs[i].label = Some(*label);
                outcome.relabeled += 1;
            }
            None => {
                out.pairs[i].label = Some(*label);
                outcome.applied += 1;
            }
        }
    }
    Ok((out, outcome))
}
