//! Binary comment-quality classifiers implemented over sparse feature
//! vectors, plus an adapter that scores with predictions exported by models
//! trained elsewhere.
//!
//! Every model exposes a scalar decision score. Linear models and external
//! predictions fire on `score >= 0`; naive Bayes, trees, forests and KNN
//! break exact ties toward [`Label::NotUseful`].

mod external;
mod knn;
mod linear;
mod loss;
mod nb;
mod tree;

use serde::{Deserialize, Serialize};

pub use external::load_external_predictions;
pub use knn::{train_knn, DEFAULT_K};
pub use linear::{
    logreg_gradient, logreg_objective, svm_gradient, svm_objective, train_logreg, train_svm,
};
pub use loss::{cross_entropy_loss, logit, sigmoid, PROB_CLAMP};
pub use nb::{train_nb, DEFAULT_ALPHA};
pub use tree::{
    best_split, gini, train_forest, train_tree, ForestConfig, Split, Tree, TreeConfig, TreeNode,
};

use crate::dataset::Label;
use crate::features::{FeatureVector, VectorizedSet};
use crate::par::{self, Execution};

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("training set needs both classes (useful={useful}, not_useful={not_useful})")]
    SingleClassTrainingSet { useful: usize, not_useful: usize },
    #[error("feature vectors were built with vocabulary {found}, model expects {expected}")]
    VocabularyMismatch { expected: String, found: String },
    #[error("no external prediction for pair {0}")]
    MissingPrediction(String),
    #[error("line {line}: {message}")]
    Schema { line: usize, message: String },
    #[error("{scores} scores but {labels} labels")]
    LengthMismatch { scores: usize, labels: usize },
    #[error("empty batch")]
    EmptyBatch,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "nb")]
    NaiveBayes,
    #[serde(rename = "logreg")]
    LogReg,
    #[serde(rename = "svm")]
    LinearSvm,
    #[serde(rename = "tree")]
    DecisionTree,
    #[serde(rename = "forest")]
    RandomForest,
    #[serde(rename = "knn")]
    Knn,
    #[serde(rename = "external")]
    External,
}

impl Algorithm {
    pub const NATIVE: [Algorithm; 6] = [
        Algorithm::NaiveBayes,
        Algorithm::LogReg,
        Algorithm::LinearSvm,
        Algorithm::DecisionTree,
        Algorithm::RandomForest,
        Algorithm::Knn,
    ];

    pub fn short_name(self) -> &'static str {
        match self {
            Algorithm::NaiveBayes => "nb",
            Algorithm::LogReg => "logreg",
            Algorithm::LinearSvm => "svm",
            Algorithm::DecisionTree => "tree",
            Algorithm::RandomForest => "forest",
            Algorithm::Knn => "knn",
            Algorithm::External => "external",
        }
    }

    /// Row label used in comparison reports.
    pub fn display_name(self) -> &'static str {
        match self {
            Algorithm::NaiveBayes => "Naive Bayes (Multinomial)",
            Algorithm::LogReg => "Logistic Regression",
            Algorithm::LinearSvm => "Support Vector Machine (linear)",
            Algorithm::DecisionTree => "Decision Tree",
            Algorithm::RandomForest => "Random Forest",
            Algorithm::Knn => "k-Nearest Neighbors",
            Algorithm::External => "External",
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.short_name())
    }
}

impl std::str::FromStr for Algorithm {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "nb" | "naive_bayes" => Ok(Algorithm::NaiveBayes),
            "logreg" | "lr" => Ok(Algorithm::LogReg),
            "svm" => Ok(Algorithm::LinearSvm),
            "tree" | "dt" => Ok(Algorithm::DecisionTree),
            "forest" | "rf" => Ok(Algorithm::RandomForest),
            "knn" => Ok(Algorithm::Knn),
            _ => Err(format!(
                "unknown algorithm {s:?} (nb, logreg, svm, tree, forest, knn)"
            )),
        }
    }
}

/// Hyperparameters for the gradient-trained linear models.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub batch_size: usize,
    /// Mini-batches whose gradients are averaged into one weight update.
    pub grad_accum: usize,
    pub epochs: usize,
    pub l2: f64,
    pub seed: u64,
}

impl TrainConfig {
    /// The transformer fine-tuning settings (lr 1e-6, batch 8, 4-batch
    /// accumulation). Very slow to converge for linear models.
    pub fn finetune_schedule() -> Self {
        Self {
            learning_rate: 1e-6,
            batch_size: 8,
            grad_accum: 4,
            epochs: 100,
            l2: 1e-4,
            seed: 0,
        }
    }

    pub fn practical() -> Self {
        Self {
            learning_rate: 0.1,
            batch_size: 8,
            grad_accum: 4,
            epochs: 100,
            l2: 1e-4,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(ModelError::InvalidConfig(
                "learning_rate must be > 0".into(),
            ));
        }
        if self.batch_size == 0 || self.grad_accum == 0 {
            return Err(ModelError::InvalidConfig(
                "batch_size and grad_accum must be >= 1".into(),
            ));
        }
        if self.l2.is_nan() || self.l2 < 0.0 {
            return Err(ModelError::InvalidConfig("l2 must be >= 0".into()));
        }
        Ok(())
    }
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self::practical()
    }
}

/// Per-algorithm training configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "algorithm", rename_all = "snake_case", deny_unknown_fields)]
pub enum AlgorithmConfig {
    #[serde(rename = "nb")]
    NaiveBayes {
        #[serde(default = "default_alpha")]
        alpha: f64,
    },
    #[serde(rename = "logreg")]
    LogReg(TrainConfig),
    #[serde(rename = "svm")]
    LinearSvm(TrainConfig),
    #[serde(rename = "tree")]
    DecisionTree(TreeConfig),
    #[serde(rename = "forest")]
    RandomForest(ForestConfig),
    #[serde(rename = "knn")]
    Knn {
        #[serde(default = "default_k")]
        k: usize,
    },
}

fn default_alpha() -> f64 {
    DEFAULT_ALPHA
}

fn default_k() -> usize {
    DEFAULT_K
}

impl AlgorithmConfig {
    pub fn default_for(algorithm: Algorithm) -> Option<Self> {
        Some(match algorithm {
            Algorithm::NaiveBayes => AlgorithmConfig::NaiveBayes {
                alpha: DEFAULT_ALPHA,
            },
            Algorithm::LogReg => AlgorithmConfig::LogReg(TrainConfig::practical()),
            Algorithm::LinearSvm => AlgorithmConfig::LinearSvm(TrainConfig::practical()),
            Algorithm::DecisionTree => AlgorithmConfig::DecisionTree(TreeConfig::default()),
            Algorithm::RandomForest => AlgorithmConfig::RandomForest(ForestConfig::default()),
            Algorithm::Knn => AlgorithmConfig::Knn { k: DEFAULT_K },
            Algorithm::External => return None,
        })
    }

    pub fn algorithm(&self) -> Algorithm {
        match self {
            AlgorithmConfig::NaiveBayes { .. } => Algorithm::NaiveBayes,
            AlgorithmConfig::LogReg(_) => Algorithm::LogReg,
            AlgorithmConfig::LinearSvm(_) => Algorithm::LinearSvm,
            AlgorithmConfig::DecisionTree(_) => Algorithm::DecisionTree,
            AlgorithmConfig::RandomForest(_) => Algorithm::RandomForest,
            AlgorithmConfig::Knn { .. } => Algorithm::Knn,
        }
    }

    /// Same configuration with its rng seed replaced (no-op for
    /// deterministic algorithms without randomness).
    pub fn with_seed(&self, seed: u64) -> Self {
        let mut c = self.clone();
        match &mut c {
            AlgorithmConfig::LogReg(t) | AlgorithmConfig::LinearSvm(t) => t.seed = seed,
            AlgorithmConfig::RandomForest(f) => f.seed = seed,
            _ => {}
        }
        c
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelParams {
    NaiveBayes {
        /// Indexed by label (0 = not useful, 1 = useful).
        log_prior: [f64; 2],
        log_likelihood: [Vec<f64>; 2],
    },
    Linear {
        weights: Vec<f64>,
        bias: f64,
    },
    Tree(Tree),
    Forest {
        trees: Vec<Tree>,
    },
    Knn {
        k: usize,
        vectors: Vec<FeatureVector>,
        labels: Vec<Label>,
    },
    External {
        scores: std::collections::BTreeMap<String, f64>,
    },
}

/// A fitted classifier; immutable once trained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub algorithm: Algorithm,
    /// `None` for external predictions, which are keyed by pair id.
    pub vocab_digest: Option<String>,
    pub train_config: Option<AlgorithmConfig>,
    pub parameters: ModelParams,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub label: Label,
    pub score: f64,
}

/// Labeled training data as parallel slices.
#[derive(Debug, Clone, Copy)]
pub struct TrainingSet<'a> {
    pub vectors: &'a [FeatureVector],
    pub labels: &'a [Label],
    pub dim: usize,
}

impl<'a> TrainingSet<'a> {
    pub fn new(vectors: &'a [FeatureVector], labels: &'a [Label], dim: usize) -> Self {
        assert_eq!(vectors.len(), labels.len(), "vectors and labels must align");
        Self {
            vectors,
            labels,
            dim,
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn class_counts(&self) -> [usize; 2] {
        let mut c = [0, 0];
        for l in self.labels {
            c[l.as_u8() as usize] += 1;
        }
        c
    }

    pub(crate) fn require_both_classes(&self) -> Result<[usize; 2], ModelError> {
        let c = self.class_counts();
        if c[0] == 0 || c[1] == 0 {
            return Err(ModelError::SingleClassTrainingSet {
                useful: c[1],
                not_useful: c[0],
            });
        }
        Ok(c)
    }
}

/// Fits the configured algorithm.
pub fn train(
    cfg: &AlgorithmConfig,
    data: &TrainingSet<'_>,
    vocab_digest: &str,
    exec: Execution,
) -> Result<TrainedModel, ModelError> {
    let mut model = match cfg {
        AlgorithmConfig::NaiveBayes { alpha } => train_nb(data, *alpha)?,
        AlgorithmConfig::LogReg(t) => train_logreg(data, t)?,
        AlgorithmConfig::LinearSvm(t) => train_svm(data, t)?,
        AlgorithmConfig::DecisionTree(t) => train_tree(data, t)?,
        AlgorithmConfig::RandomForest(f) => train_forest(data, f, exec)?,
        AlgorithmConfig::Knn { k } => train_knn(data, *k)?,
    };
    model.vocab_digest = Some(vocab_digest.to_string());
    model.train_config = Some(cfg.clone());
    Ok(model)
}

impl TrainedModel {
    /// Scores one pair. `id` is only consulted by external predictions.
    pub fn predict(&self, id: &str, x: &FeatureVector) -> Result<Prediction, ModelError> {
        Ok(match &self.parameters {
            ModelParams::NaiveBayes {
                log_prior,
                log_likelihood,
            } => {
                let score = nb::score(log_prior, log_likelihood, x);
                Prediction {
                    label: Label::from_bool(score > 0.0),
                    score,
                }
            }
            ModelParams::Linear { weights, bias } => {
                let score = linear::score(weights, *bias, x);
                Prediction {
                    label: Label::from_bool(score >= 0.0),
                    score,
                }
            }
            ModelParams::Tree(t) => {
                let score = t.score(x);
                Prediction {
                    label: Label::from_bool(score > 0.0),
                    score,
                }
            }
            ModelParams::Forest { trees } => {
                let score = tree::forest_score(trees, x);
                Prediction {
                    label: Label::from_bool(score > 0.0),
                    score,
                }
            }
            ModelParams::Knn { k, vectors, labels } => {
                let score = knn::score(*k, vectors, labels, x);
                Prediction {
                    label: Label::from_bool(score > 0.0),
                    score,
                }
            }
            ModelParams::External { scores } => {
                let score = *scores
                    .get(id)
                    .ok_or_else(|| ModelError::MissingPrediction(id.to_string()))?;
                Prediction {
                    label: Label::from_bool(sigmoid(score) >= 0.5),
                    score,
                }
            }
        })
    }

    /// Scores a vectorized set after checking it was built with this
    /// model's vocabulary.
    pub fn predict_batch(
        &self,
        set: &VectorizedSet,
        exec: Execution,
    ) -> Result<Vec<Prediction>, ModelError> {
        if let Some(expected) = &self.vocab_digest {
            if *expected != set.vocab_digest {
                return Err(ModelError::VocabularyMismatch {
                    expected: expected.clone(),
                    found: set.vocab_digest.clone(),
                });
            }
        }
        let idx: Vec<usize> = (0..set.ids.len()).collect();
        par::map(exec, &idx, |&i| self.predict(&set.ids[i], &set.vectors[i]))
            .into_iter()
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("model serialization")
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        serde_json::from_str(text).map_err(|e| ModelError::Schema {
            line: e.line(),
            message: e.to_string(),
        })
    }
}
