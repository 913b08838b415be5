//! Sparse text features: tokenization of comment plus context, a
//! training-only vocabulary, and count or TF-IDF weighting.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::extractor::CodeCommentPair;
use crate::fsutil::sha256_hex;
use crate::par::{self, Execution};

/// Token placed between the comment and its code context.
pub const CONTEXT_SEPARATOR: &str = "§ctx§";
pub const DEFAULT_MIN_DF: usize = 2;
pub const DEFAULT_MAX_TERMS: usize = 20_000;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum FeatureError {
    #[error("no term reaches min_df={min_df} over {n_docs} documents")]
    EmptyVocabulary { min_df: usize, n_docs: usize },
    #[error("vocabulary needs at least one training document")]
    NoDocuments,
    #[error("malformed vocabulary: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Count,
    #[default]
    TfIdf,
}

impl std::str::FromStr for Scheme {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "count" => Ok(Scheme::Count),
            "tfidf" | "tf-idf" => Ok(Scheme::TfIdf),
            _ => Err(format!("unknown scheme {s:?}")),
        }
    }
}

/// Lower-cases and splits on every run of characters that are neither
/// alphanumeric nor `_`; tokens shorter than two characters are dropped.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !(c.is_alphanumeric() || c == '_'))
        .filter(|t| t.chars().count() >= 2)
        .map(str::to_lowercase)
        .collect()
}

/// Comment tokens, the separator token, then context tokens.
pub fn pair_tokens(pair: &CodeCommentPair) -> Vec<String> {
    let mut toks = tokenize(&pair.comment.text);
    toks.push(CONTEXT_SEPARATOR.to_string());
    toks.extend(tokenize(&pair.code_context));
    toks
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "VocabularyFile", into = "VocabularyFile")]
pub struct Vocabulary {
    terms: Vec<String>,
    index: HashMap<String, u32>,
    doc_freq: Vec<usize>,
    n_docs: usize,
    min_df: usize,
    max_terms: usize,
}

/// Serialized form.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VocabularyFile {
    terms: Vec<String>,
    doc_freq: Vec<usize>,
    n_docs: usize,
    min_df: usize,
    max_terms: usize,
}

impl Vocabulary {
    /// Keeps terms with document frequency >= `min_df`, then the top
    /// `max_terms` by (df desc, term asc). Indices follow term order.
    pub fn build<S: AsRef<str>>(
        docs: &[Vec<S>],
        min_df: usize,
        max_terms: usize,
    ) -> Result<Self, FeatureError> {
        if docs.is_empty() {
            return Err(FeatureError::NoDocuments);
        }
        let mut df: HashMap<&str, usize> = HashMap::new();
        for doc in docs {
            let uniq: HashSet<&str> = doc.iter().map(AsRef::as_ref).collect();
            for t in uniq {
                *df.entry(t).or_insert(0) += 1;
            }
        }
        let mut kept: Vec<(&str, usize)> = df.into_iter().filter(|&(_, d)| d >= min_df).collect();
        kept.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
        kept.truncate(max_terms);
        if kept.is_empty() {
            return Err(FeatureError::EmptyVocabulary {
                min_df,
                n_docs: docs.len(),
            });
        }
        kept.sort_by(|a, b| a.0.cmp(b.0));
        Ok(Self::from_parts(
            kept.iter().map(|(t, _)| t.to_string()).collect(),
            kept.iter().map(|&(_, d)| d).collect(),
            docs.len(),
            min_df,
            max_terms,
        ))
    }

    fn from_parts(
        terms: Vec<String>,
        doc_freq: Vec<usize>,
        n_docs: usize,
        min_df: usize,
        max_terms: usize,
    ) -> Self {
        let index = terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as u32))
            .collect();
        Self {
            terms,
            index,
            doc_freq,
            n_docs,
            min_df,
            max_terms,
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn n_docs(&self) -> usize {
        self.n_docs
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn doc_freq(&self, idx: usize) -> usize {
        self.doc_freq[idx]
    }

    pub fn index_of(&self, term: &str) -> Option<u32> {
        self.index.get(term).copied()
    }

    /// Smoothed inverse document frequency, ln((1+N)/(1+df)) + 1.
    pub fn idf(&self, idx: usize) -> f64 {
        ((1.0 + self.n_docs as f64) / (1.0 + self.doc_freq[idx] as f64)).ln() + 1.0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("vocabulary serialization")
    }

    pub fn from_json(text: &str) -> Result<Self, FeatureError> {
        serde_json::from_str(text).map_err(|e| FeatureError::Malformed(e.to_string()))
    }

    /// Digest of the serialized vocabulary; ties models to the features they
    /// were trained on.
    pub fn digest(&self) -> String {
        sha256_hex(self.to_json().as_bytes())
    }
}

impl From<Vocabulary> for VocabularyFile {
    fn from(v: Vocabulary) -> Self {
        Self {
            terms: v.terms,
            doc_freq: v.doc_freq,
            n_docs: v.n_docs,
            min_df: v.min_df,
            max_terms: v.max_terms,
        }
    }
}

impl TryFrom<VocabularyFile> for Vocabulary {
    type Error = FeatureError;
    fn try_from(f: VocabularyFile) -> Result<Self, FeatureError> {
        if f.terms.len() != f.doc_freq.len() {
            return Err(FeatureError::Malformed(
                "terms and doc_freq lengths differ".into(),
            ));
        }
        if f.terms.windows(2).any(|w| w[0] >= w[1]) {
            return Err(FeatureError::Malformed(
                "terms must be strictly ascending".into(),
            ));
        }
        Ok(Self::from_parts(
            f.terms,
            f.doc_freq,
            f.n_docs,
            f.min_df,
            f.max_terms,
        ))
    }
}

/// Sparse vector with strictly increasing indices and positive values.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FeatureVector {
    pub indices: Vec<u32>,
    pub values: Vec<f64>,
    pub norm: f64,
}

impl FeatureVector {
    pub fn from_sorted(indices: Vec<u32>, values: Vec<f64>) -> Self {
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        Self {
            indices,
            values,
            norm,
        }
    }

    /// Builds from a dense slice, keeping entries > 0.
    pub fn from_dense(dense: &[f64]) -> Self {
        let (indices, values) = dense
            .iter()
            .enumerate()
            .filter(|(_, v)| **v > 0.0)
            .map(|(i, v)| (i as u32, *v))
            .unzip();
        Self::from_sorted(indices, values)
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.indices
            .iter()
            .map(|&i| i as usize)
            .zip(self.values.iter().copied())
    }

    pub fn dot_dense(&self, w: &[f64]) -> f64 {
        self.iter().map(|(i, v)| w[i] * v).sum()
    }

    pub fn to_dense(&self, dim: usize) -> Vec<f64> {
        let mut d = vec![0.0; dim];
        for (i, v) in self.iter() {
            d[i] = v;
        }
        d
    }

    /// Squared Euclidean distance, computed by a sparse merge.
    pub fn sq_distance(&self, other: &FeatureVector) -> f64 {
        let (mut a, mut b) = (0, 0);
        let mut acc = 0.0;
        while a < self.indices.len() || b < other.indices.len() {
            let ia = self.indices.get(a).copied().unwrap_or(u32::MAX);
            let ib = other.indices.get(b).copied().unwrap_or(u32::MAX);
            let d = if ia == ib {
                let d = self.values[a] - other.values[b];
                a += 1;
                b += 1;
                d
            } else if ia < ib {
                a += 1;
                self.values[a - 1]
            } else {
                b += 1;
                other.values[b - 1]
            };
            acc += d * d;
        }
        acc
    }
}

/// Weights `tokens` against `vocab`; out-of-vocabulary tokens are ignored.
pub fn vectorize_tokens<S: AsRef<str>>(
    tokens: &[S],
    vocab: &Vocabulary,
    scheme: Scheme,
) -> FeatureVector {
    let mut tf: BTreeMap<u32, f64> = BTreeMap::new();
    for t in tokens {
        if let Some(i) = vocab.index_of(t.as_ref()) {
            *tf.entry(i).or_insert(0.0) += 1.0;
        }
    }
    let (indices, mut values): (Vec<u32>, Vec<f64>) = tf.into_iter().unzip();
    if scheme == Scheme::TfIdf {
        for (v, &i) in values.iter_mut().zip(&indices) {
            *v *= vocab.idf(i as usize);
        }
        let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            for v in &mut values {
                *v /= norm;
            }
        }
    }
    FeatureVector::from_sorted(indices, values)
}

pub fn vectorize(pair: &CodeCommentPair, vocab: &Vocabulary, scheme: Scheme) -> FeatureVector {
    vectorize_tokens(&pair_tokens(pair), vocab, scheme)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeatureConfig {
    pub scheme: Scheme,
    pub min_df: usize,
    pub max_terms: usize,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            scheme: Scheme::TfIdf,
            min_df: DEFAULT_MIN_DF,
            max_terms: DEFAULT_MAX_TERMS,
        }
    }
}

/// Vocabulary over training pairs only.
pub fn build_vocab(
    train: &[&CodeCommentPair],
    min_df: usize,
    max_terms: usize,
) -> Result<Vocabulary, FeatureError> {
    let docs: Vec<Vec<String>> = train.iter().map(|p| pair_tokens(p)).collect();
    Vocabulary::build(&docs, min_df, max_terms)
}

/// Vectors aligned with a label/id list and stamped with the vocabulary
/// digest they were built against.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorizedSet {
    pub vocab_digest: String,
    pub dim: usize,
    pub ids: Vec<String>,
    pub vectors: Vec<FeatureVector>,
}

pub fn vectorize_batch(
    pairs: &[&CodeCommentPair],
    vocab: &Vocabulary,
    scheme: Scheme,
    exec: Execution,
) -> VectorizedSet {
    VectorizedSet {
        vocab_digest: vocab.digest(),
        dim: vocab.len(),
        ids: pairs.iter().map(|p| p.id.clone()).collect(),
        vectors: par::map(exec, pairs, |p| vectorize(p, vocab, scheme)),
    }
}
