//! Confusion matrices, precision/recall/F1, the seed versus augmented
//! comparison, and discrepancy listings. `Useful` is the positive class.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::dataset::{self, Dataset, DatasetError, Label, SplitAssignment};
use crate::extractor::CodeCommentPair;
use crate::features::{build_vocab, vectorize_batch, FeatureConfig, FeatureError, Vocabulary};
use crate::fsutil::sha256_fields;
use crate::models::{self, AlgorithmConfig, ModelError, Prediction, TrainedModel, TrainingSet};
use crate::par::{self, Execution};

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("{predictions} predictions but {labels} labels")]
    LengthMismatch { predictions: usize, labels: usize },
    #[error("cannot evaluate an empty prediction list")]
    Empty,
    #[error("confusion matrix has no entries")]
    EmptyMatrix,
    #[error("test pair {0} has no label")]
    UnlabeledTestPair(String),
    #[error("split refers to pair {0}, which is not in the dataset")]
    UnknownPair(String),
    #[error("generated pairs leaked into the test set: {0:?}")]
    TestContamination(Vec<String>),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Features(#[from] FeatureError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
}

impl ConfusionMatrix {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }
}

pub fn confusion(predictions: &[Label], labels: &[Label]) -> Result<ConfusionMatrix, EvalError> {
    if predictions.len() != labels.len() {
        return Err(EvalError::LengthMismatch {
            predictions: predictions.len(),
            labels: labels.len(),
        });
    }
    if predictions.is_empty() {
        return Err(EvalError::Empty);
    }
    let mut cm = ConfusionMatrix::default();
    for (p, y) in predictions.iter().zip(labels) {
        match (p, y) {
            (Label::Useful, Label::Useful) => cm.tp += 1,
            (Label::Useful, Label::NotUseful) => cm.fp += 1,
            (Label::NotUseful, Label::Useful) => cm.fn_ += 1,
            (Label::NotUseful, Label::NotUseful) => cm.tn += 1,
        }
    }
    Ok(cm)
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MetricSet {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
}

/// Harmonic mean, 0 when both inputs are 0.
pub fn f1_score(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

/// Accuracy, precision, recall and F1. Precision and recall are 0 when
/// their denominator is 0, and so is F1 when both are 0.
pub fn metrics(cm: &ConfusionMatrix) -> Result<MetricSet, EvalError> {
    let n = cm.total();
    if n == 0 {
        return Err(EvalError::EmptyMatrix);
    }
    let ratio = |a: u64, b: u64| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    let precision = ratio(cm.tp, cm.tp + cm.fp);
    let recall = ratio(cm.tp, cm.tp + cm.fn_);
    Ok(MetricSet {
        accuracy: ratio(cm.tp + cm.tn, n),
        precision,
        recall,
        f1: f1_score(precision, recall),
        support: n,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub confusion: ConfusionMatrix,
    pub metrics: MetricSet,
}

impl Evaluation {
    pub fn from_labels(predictions: &[Label], labels: &[Label]) -> Result<Self, EvalError> {
        let confusion = confusion(predictions, labels)?;
        Ok(Self {
            metrics: metrics(&confusion)?,
            confusion,
        })
    }
}

/// Test pairs of `split`, in split order, all required to be labeled.
pub fn test_pairs<'a>(
    dataset: &'a Dataset,
    split: &SplitAssignment,
) -> Result<Vec<&'a CodeCommentPair>, EvalError> {
    resolve(dataset, &split.test_ids)
}

pub fn train_pairs<'a>(
    dataset: &'a Dataset,
    split: &SplitAssignment,
) -> Result<Vec<&'a CodeCommentPair>, EvalError> {
    resolve(dataset, &split.train_ids)
}

fn resolve<'a>(
    dataset: &'a Dataset,
    ids: &[String],
) -> Result<Vec<&'a CodeCommentPair>, EvalError> {
    ids.iter()
        .map(|id| {
            let p = dataset
                .get(id)
                .ok_or_else(|| EvalError::UnknownPair(id.clone()))?;
            if p.label.is_none() {
                return Err(EvalError::UnlabeledTestPair(id.clone()));
            }
            Ok(p)
        })
        .collect()
}

fn labels_of(pairs: &[&CodeCommentPair]) -> Vec<Label> {
    pairs
        .iter()
        .map(|p| p.label.expect("resolved pairs are labeled"))
        .collect()
}

/// Scores the labeled `pairs` with `model` over `vocab`.
pub fn predict_pairs(
    model: &TrainedModel,
    vocab: &Vocabulary,
    features: &FeatureConfig,
    pairs: &[&CodeCommentPair],
    exec: Execution,
) -> Result<Vec<Prediction>, EvalError> {
    let set = vectorize_batch(pairs, vocab, features.scheme, exec);
    Ok(model.predict_batch(&set, exec)?)
}

/// Metrics of `model` on the test side of `split`.
pub fn evaluate(
    model: &TrainedModel,
    vocab: &Vocabulary,
    features: &FeatureConfig,
    dataset: &Dataset,
    split: &SplitAssignment,
    exec: Execution,
) -> Result<Evaluation, EvalError> {
    let test = test_pairs(dataset, split)?;
    let preds = predict_pairs(model, vocab, features, &test, exec)?;
    let predicted: Vec<Label> = preds.iter().map(|p| p.label).collect();
    Evaluation::from_labels(&predicted, &labels_of(&test))
}

/// A vocabulary and model fitted on the same training pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fitted {
    pub features: FeatureConfig,
    pub vocabulary: Vocabulary,
    pub model: TrainedModel,
}

/// Builds the vocabulary from `train` alone and fits `algorithm` on it.
pub fn fit(
    train: &[&CodeCommentPair],
    features: &FeatureConfig,
    algorithm: &AlgorithmConfig,
    exec: Execution,
) -> Result<Fitted, EvalError> {
    let vocabulary = build_vocab(train, features.min_df, features.max_terms)?;
    let set = vectorize_batch(train, &vocabulary, features.scheme, exec);
    let labels = labels_of(train);
    let data = TrainingSet::new(&set.vectors, &labels, set.dim);
    let model = models::train(algorithm, &data, &set.vocab_digest, exec)?;
    Ok(Fitted {
        features: *features,
        vocabulary,
        model,
    })
}

/// Per-algorithm rng seed derived from the run seed, so rows do not share
/// random streams and adding an algorithm does not perturb the others.
pub fn derive_seed(run_seed: u64, algorithm: &str) -> u64 {
    let digest = sha256_fields([run_seed.to_string().as_bytes(), algorithm.as_bytes()]);
    u64::from_str_radix(&digest[..16], 16).expect("hex digest")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareConfig {
    pub algorithms: Vec<AlgorithmConfig>,
    pub features: FeatureConfig,
    pub split_ratio: f64,
    pub split_seed: u64,
}

/// Precomputed scores for both conditions from a model trained elsewhere.
#[derive(Debug, Clone)]
pub struct ExternalRows {
    pub name: String,
    pub seed: Option<TrainedModel>,
    pub augmented: Option<TrainedModel>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MetricDelta {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl MetricDelta {
    pub fn between(before: &MetricSet, after: &MetricSet) -> Self {
        Self {
            accuracy: after.accuracy - before.accuracy,
            precision: after.precision - before.precision,
            recall: after.recall - before.recall,
            f1: after.f1 - before.f1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub algorithm: String,
    pub name: String,
    pub seed: Option<Evaluation>,
    pub augmented: Option<Evaluation>,
    pub delta: Option<MetricDelta>,
    /// Set when one of the two conditions is missing.
    pub partial: bool,
}

impl ComparisonRow {
    pub fn new(
        algorithm: &str,
        name: &str,
        seed: Option<Evaluation>,
        augmented: Option<Evaluation>,
    ) -> Self {
        let delta = match (&seed, &augmented) {
            (Some(s), Some(a)) => Some(MetricDelta::between(&s.metrics, &a.metrics)),
            _ => None,
        };
        Self {
            algorithm: algorithm.to_string(),
            name: name.to_string(),
            partial: delta.is_none(),
            seed,
            augmented,
            delta,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMetadata {
    pub seed_dataset: String,
    pub seed_digest: String,
    pub generated_dataset: String,
    pub generated_digest: String,
    pub split_seed: u64,
    pub split_ratio: f64,
    pub train_size_seed: usize,
    pub train_size_augmented: usize,
    pub test_size: usize,
    pub dropped_duplicates: usize,
    pub features: FeatureConfig,
    /// Configurations as trained, with derived seeds filled in.
    pub algorithms: Vec<AlgorithmConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub metadata: ReportMetadata,
    pub rows: Vec<ComparisonRow>,
}

impl ComparisonReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialization");
        s.push('\n');
        s
    }
}

/// Content digest of a dataset in canonical JSONL form.
pub fn dataset_digest(ds: &Dataset) -> String {
    crate::fsutil::sha256_hex(ds.to_jsonl().as_bytes())
}

/// Trains every algorithm on the seed split and on the seed split
/// augmented with `generated`, evaluating both on the same seed-only test
/// set. Algorithms run concurrently under `exec`.
pub fn compare(
    seed: &Dataset,
    generated: &Dataset,
    cfg: &CompareConfig,
    external: &[ExternalRows],
    exec: Execution,
) -> Result<ComparisonReport, EvalError> {
    let labeled_seed = seed.labeled_subset();
    let split = dataset::split(&labeled_seed, cfg.split_ratio, cfg.split_seed)?;
    let generated_ids: HashSet<&str> = generated.pairs.iter().map(|p| p.id.as_str()).collect();
    let leaked: Vec<String> = split
        .test_ids
        .iter()
        .filter(|id| generated_ids.contains(id.as_str()))
        .cloned()
        .collect();
    if !leaked.is_empty() {
        return Err(EvalError::TestContamination(leaked));
    }
    let (merged, outcome) = dataset::merge(&labeled_seed, generated)?;

    let test = test_pairs(&labeled_seed, &split)?;
    let test_labels = labels_of(&test);
    let seed_train = train_pairs(&labeled_seed, &split)?;
    let test_set: HashSet<&str> = split.test_set();
    let kept: HashSet<&str> = merged.pairs.iter().map(|p| p.id.as_str()).collect();
    let mut augmented_train = seed_train.clone();
    augmented_train.extend(
        generated
            .pairs
            .iter()
            .filter(|p| kept.contains(p.id.as_str()) && !test_set.contains(p.id.as_str())),
    );

    let configs: Vec<AlgorithmConfig> = cfg
        .algorithms
        .iter()
        .map(|a| a.with_seed(derive_seed(cfg.split_seed, a.algorithm().short_name())))
        .collect();

    let run =
        |alg: &AlgorithmConfig, train: &[&CodeCommentPair]| -> Result<Evaluation, EvalError> {
            let fitted = fit(train, &cfg.features, alg, exec)?;
            let preds = predict_pairs(
                &fitted.model,
                &fitted.vocabulary,
                &cfg.features,
                &test,
                exec,
            )?;
            let predicted: Vec<Label> = preds.iter().map(|p| p.label).collect();
            Evaluation::from_labels(&predicted, &test_labels)
        };
    let jobs: Vec<(usize, bool)> = (0..configs.len())
        .flat_map(|i| [(i, false), (i, true)])
        .collect();
    let results = par::map(exec, &jobs, |&(i, aug)| {
        run(
            &configs[i],
            if aug { &augmented_train } else { &seed_train },
        )
    });
    let mut results = results.into_iter();
    let mut rows = Vec::new();
    for c in &configs {
        let s = results.next().expect("seed result")?;
        let a = results.next().expect("augmented result")?;
        let alg = c.algorithm();
        rows.push(ComparisonRow::new(
            alg.short_name(),
            alg.display_name(),
            Some(s),
            Some(a),
        ));
    }

    let eval_external = |m: &Option<TrainedModel>| -> Result<Option<Evaluation>, EvalError> {
        let Some(model) = m else { return Ok(None) };
        let predicted = test
            .iter()
            .map(|p| model.predict(&p.id, &Default::default()).map(|r| r.label))
            .collect::<Result<Vec<_>, _>>()?;
        Evaluation::from_labels(&predicted, &test_labels).map(Some)
    };
    for ext in external {
        rows.push(ComparisonRow::new(
            "external",
            &ext.name,
            eval_external(&ext.seed)?,
            eval_external(&ext.augmented)?,
        ));
    }

    Ok(ComparisonReport {
        metadata: ReportMetadata {
            seed_dataset: seed.name.clone(),
            seed_digest: dataset_digest(seed),
            generated_dataset: generated.name.clone(),
            generated_digest: dataset_digest(generated),
            split_seed: cfg.split_seed,
            split_ratio: cfg.split_ratio,
            train_size_seed: seed_train.len(),
            train_size_augmented: augmented_train.len(),
            test_size: test.len(),
            dropped_duplicates: outcome.dropped_duplicates.len(),
            features: cfg.features,
            algorithms: configs,
        },
        rows,
    })
}

/// Rounds to three decimals, halves away from zero. Values within 1e-9 of a
/// half (in units of the last digit) count as the half, so that 0.8615
/// stored as 0.86149999... still rounds up.
pub fn round3(x: f64) -> f64 {
    let scaled = x.abs() * 1000.0;
    let r = (scaled + 0.5 + 1e-9).floor() / 1000.0;
    if x < 0.0 {
        -r
    } else {
        r
    }
}

pub fn fmt3(x: f64) -> String {
    format!("{:.3}", round3(x))
}

/// Signed three-decimal delta; zero renders as `+0.000`.
pub fn fmt_delta(x: f64) -> String {
    let r = round3(x);
    if r < 0.0 {
        format!("{r:.3}")
    } else {
        format!("+{:.3}", r.abs())
    }
}

fn table(out: &mut String, header: &[&str], rows: &[Vec<String>]) {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cells: Vec<String>| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
            .collect();
        format!("| {} |\n", padded.join(" | "))
    };
    out.push_str(&line(header.iter().map(|h| h.to_string()).collect()));
    out.push_str(&line(widths.iter().map(|w| "-".repeat(*w)).collect()));
    for r in rows {
        out.push_str(&line(r.clone()));
    }
}

/// Markdown tables: one per condition, then the deltas.
pub fn render_markdown(report: &ComparisonReport) -> String {
    let m = &report.metadata;
    let mut out = String::new();
    out.push_str("# Seed vs Seed + Generated\n\n");
    out.push_str(&format!(
        "split seed {}, test ratio {}, test pairs {}, train pairs {} (seed) / {} (augmented), duplicates dropped {}\n\n",
        m.split_seed, m.split_ratio, m.test_size, m.train_size_seed, m.train_size_augmented, m.dropped_duplicates
    ));
    let header = ["Algorithm", "Precision", "Recall", "F1-score", "Accuracy"];
    let cond = |e: &Option<Evaluation>| -> Vec<String> {
        match e {
            Some(e) => [
                e.metrics.precision,
                e.metrics.recall,
                e.metrics.f1,
                e.metrics.accuracy,
            ]
            .iter()
            .map(|v| fmt3(*v))
            .collect(),
            None => vec!["n/a".to_string(); 4],
        }
    };
    let name = |r: &ComparisonRow| {
        if r.partial {
            format!("{} (partial)", r.name)
        } else {
            r.name.clone()
        }
    };
    for (title, pick) in [
        (
            "Seed",
            (|r: &ComparisonRow| r.seed.clone()) as fn(&ComparisonRow) -> Option<Evaluation>,
        ),
        ("Seed + Generated", |r: &ComparisonRow| r.augmented.clone()),
    ] {
        out.push_str(&format!("## {title}\n\n"));
        let rows: Vec<Vec<String>> = report
            .rows
            .iter()
            .map(|r| {
                let mut v = vec![name(r)];
                v.extend(cond(&pick(r)));
                v
            })
            .collect();
        table(&mut out, &header, &rows);
        out.push('\n');
    }
    out.push_str("## Delta (augmented - seed)\n\n");
    let rows: Vec<Vec<String>> = report
        .rows
        .iter()
        .map(|r| {
            let mut v = vec![name(r)];
            match &r.delta {
                Some(d) => v.extend(
                    [d.precision, d.recall, d.f1, d.accuracy]
                        .iter()
                        .map(|x| fmt_delta(*x)),
                ),
                None => v.extend(vec!["n/a".to_string(); 4]),
            }
            v
        })
        .collect();
    table(&mut out, &header, &rows);
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Discrepancy {
    pub pair_id: String,
    pub manual_label: Label,
    pub predicted_label: Label,
    pub score: f64,
}

/// Mismatches only, most confident first (descending |score|, then id).
pub fn rank_discrepancies(
    rows: impl IntoIterator<Item = (String, Label, Prediction)>,
) -> Vec<Discrepancy> {
    let mut out: Vec<Discrepancy> = rows
        .into_iter()
        .filter(|(_, manual, p)| *manual != p.label)
        .map(|(pair_id, manual_label, p)| Discrepancy {
            pair_id,
            manual_label,
            predicted_label: p.label,
            score: p.score,
        })
        .collect();
    out.sort_by(|a, b| {
        b.score
            .abs()
            .total_cmp(&a.score.abs())
            .then_with(|| a.pair_id.cmp(&b.pair_id))
    });
    out
}

/// Compares manual labels against model predictions. Unlabeled pairs are
/// ignored.
pub fn discrepancies(
    manual: &[CodeCommentPair],
    model: &TrainedModel,
    vocab: &Vocabulary,
    features: &FeatureConfig,
    exec: Execution,
) -> Result<Vec<Discrepancy>, EvalError> {
    let labeled: Vec<&CodeCommentPair> = manual.iter().filter(|p| p.label.is_some()).collect();
    let preds = predict_pairs(model, vocab, features, &labeled, exec)?;
    Ok(rank_discrepancies(labeled.iter().zip(preds).map(
        |(p, pred)| (p.id.clone(), p.label.expect("filtered"), pred),
    )))
}
