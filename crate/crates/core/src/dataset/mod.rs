//! Labeled pair collections: JSONL persistence, CSV export, label counts,
//! stratified train/test splitting and seed/generated merging.

mod split;

use std::collections::HashSet;
use std::fmt;
use std::io::BufRead;
use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{Map, Value};

pub use crate::extractor::CodeCommentPair;
use crate::extractor::{CommentKind, RawComment};
use crate::fsutil::{sha256_fields, write_atomic};
pub use split::{split, stratified_test_counts, SplitAssignment, DEFAULT_RATIO};

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("line {line}: field `{field}`: {message}")]
    Schema {
        line: usize,
        field: String,
        message: String,
    },
    #[error("duplicate pair id {0}")]
    DuplicateId(String),
    #[error("no pair with id {0}")]
    UnknownPair(String),
    #[error("need at least {needed} labeled pairs per class, found {useful} useful / {not_useful} not useful")]
    InsufficientLabels {
        needed: usize,
        useful: usize,
        not_useful: usize,
    },
    #[error("generated pair {0} has no label")]
    UnlabeledGenerated(String),
    #[error("pair {0} in the generated set is not tagged source=generated")]
    NotGenerated(String),
    #[error("split ratio must be in (0, 1), got {0}")]
    BadRatio(f64),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

/// Binary usefulness label; `Useful` is the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    NotUseful = 0,
    Useful = 1,
}

impl Label {
    pub fn as_u8(self) -> u8 {
        self as u8
    }

    pub fn from_u8(v: u8) -> Option<Self> {
        match v {
            0 => Some(Label::NotUseful),
            1 => Some(Label::Useful),
            _ => None,
        }
    }

    pub fn from_bool(useful: bool) -> Self {
        if useful {
            Label::Useful
        } else {
            Label::NotUseful
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Useful => "useful",
            Label::NotUseful => "not_useful",
        })
    }
}

impl std::str::FromStr for Label {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "useful" | "1" | "u" => Ok(Label::Useful),
            "not_useful" | "not-useful" | "notuseful" | "0" | "n" => Ok(Label::NotUseful),
            _ => Err(format!(
                "unknown label {s:?} (expected useful or not_useful)"
            )),
        }
    }
}

impl Serialize for Label {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u8(self.as_u8())
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = u8::deserialize(d)?;
        Label::from_u8(v)
            .ok_or_else(|| serde::de::Error::custom(format!("label must be 0 or 1, got {v}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    #[default]
    Seed,
    Generated,
}

/// On-disk JSONL row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairRecord {
    pub id: String,
    pub repo: String,
    pub path: String,
    pub line_start: usize,
    pub line_end: usize,
    pub kind: CommentKind,
    pub trailing: bool,
    pub comment: String,
    pub code_context: String,
    pub label: Option<Label>,
    pub source: Source,
    #[serde(default)]
    pub generator: Option<String>,
}

const REQUIRED_FIELDS: [&str; 11] = [
    "id",
    "repo",
    "path",
    "line_start",
    "line_end",
    "kind",
    "trailing",
    "comment",
    "code_context",
    "label",
    "source",
];
const OPTIONAL_FIELDS: [&str; 1] = ["generator"];

impl From<&CodeCommentPair> for PairRecord {
    fn from(p: &CodeCommentPair) -> Self {
        Self {
            id: p.id.clone(),
            repo: p.repo_id.clone(),
            path: p.path.clone(),
            line_start: p.comment.line_start,
            line_end: p.comment.line_end,
            kind: p.comment.kind,
            trailing: p.comment.trailing,
            comment: p.comment.text.clone(),
            code_context: p.code_context.clone(),
            label: p.label,
            source: p.source,
            generator: p.generator.clone(),
        }
    }
}

impl From<PairRecord> for CodeCommentPair {
    fn from(r: PairRecord) -> Self {
        Self {
            id: r.id,
            repo_id: r.repo,
            path: r.path,
            comment: RawComment {
                kind: r.kind,
                text: r.comment,
                line_start: r.line_start,
                line_end: r.line_end,
                trailing: r.trailing,
            },
            code_context: r.code_context,
            label: r.label,
            source: r.source,
            generator: r.generator,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LabelStats {
    pub useful: usize,
    pub not_useful: usize,
    pub unlabeled: usize,
}

impl LabelStats {
    pub fn total(&self) -> usize {
        self.useful + self.not_useful + self.unlabeled
    }
}

/// Ordered pair collection with unique ids.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Dataset {
    pub name: String,
    pub pairs: Vec<CodeCommentPair>,
}

impl Dataset {
    pub fn new(name: &str, pairs: Vec<CodeCommentPair>) -> Result<Self, DatasetError> {
        let mut seen = HashSet::with_capacity(pairs.len());
        for p in &pairs {
            if !seen.insert(p.id.as_str()) {
                return Err(DatasetError::DuplicateId(p.id.clone()));
            }
        }
        Ok(Self {
            name: name.to_string(),
            pairs,
        })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&CodeCommentPair> {
        self.pairs.iter().find(|p| p.id == id)
    }

    pub fn labeled(&self) -> impl Iterator<Item = &CodeCommentPair> {
        self.pairs.iter().filter(|p| p.label.is_some())
    }

    /// Pairs carrying a label, as a new dataset.
    pub fn labeled_subset(&self) -> Dataset {
        Dataset {
            name: self.name.clone(),
            pairs: self.labeled().cloned().collect(),
        }
    }

    pub fn label_stats(&self) -> LabelStats {
        label_stats(&self.pairs)
    }

    /// Parses JSONL text. Blank lines are ignored.
    pub fn from_jsonl<R: BufRead>(name: &str, reader: R) -> Result<Self, DatasetError> {
        let mut pairs = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let lineno = i + 1;
            let line = line.map_err(|e| DatasetError::Io {
                path: name.to_string(),
                source: e,
            })?;
            if line.trim().is_empty() {
                continue;
            }
            pairs.push(CodeCommentPair::from(parse_record(&line, lineno)?));
        }
        Dataset::new(name, pairs)
    }

    pub fn load(path: &Path) -> Result<Self, DatasetError> {
        let file = std::fs::File::open(path).map_err(|e| DatasetError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        Dataset::from_jsonl(&name, std::io::BufReader::new(file))
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for p in &self.pairs {
            out.push_str(
                &serde_json::to_string(&PairRecord::from(p)).expect("record serialization"),
            );
            out.push('\n');
        }
        out
    }

    /// Atomic write of the JSONL form.
    pub fn save(&self, path: &Path) -> Result<(), DatasetError> {
        write_atomic(path, self.to_jsonl().as_bytes()).map_err(|e| DatasetError::Io {
            path: path.display().to_string(),
            source: e,
        })
    }

    /// CSV with the JSONL columns, for spreadsheet review.
    pub fn to_csv(&self) -> Result<String, DatasetError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(REQUIRED_FIELDS.iter().chain(OPTIONAL_FIELDS.iter()))?;
        for p in &self.pairs {
            let r = PairRecord::from(p);
            w.write_record([
                r.id,
                r.repo,
                r.path,
                r.line_start.to_string(),
                r.line_end.to_string(),
                match r.kind {
                    CommentKind::SingleLine => "single".into(),
                    CommentKind::MultiLine => "multi".into(),
                },
                r.trailing.to_string(),
                r.comment,
                r.code_context,
                r.label.map(|l| l.as_u8().to_string()).unwrap_or_default(),
                match r.source {
                    Source::Seed => "seed".into(),
                    Source::Generated => "generated".into(),
                },
                r.generator.unwrap_or_default(),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| DatasetError::Io {
            path: "<csv>".into(),
            source: e.into_error(),
        })?;
        Ok(String::from_utf8(bytes).expect("csv of utf-8 fields"))
    }

    /// Dataset with `id`'s label replaced.
    pub fn with_label(&self, id: &str, label: Option<Label>) -> Option<Dataset> {
        let idx = self.pairs.iter().position(|p| p.id == id)?;
        let mut out = self.clone();
        out.pairs[idx].label = label;
        Some(out)
    }
}

fn parse_record(line: &str, lineno: usize) -> Result<PairRecord, DatasetError> {
    let schema = |field: &str, message: String| DatasetError::Schema {
        line: lineno,
        field: field.to_string(),
        message,
    };
    let value: Value = serde_json::from_str(line).map_err(|e| schema("<row>", e.to_string()))?;
    let Value::Object(obj) = &value else {
        return Err(schema("<row>", "expected a JSON object".into()));
    };
    check_keys(obj).map_err(|(f, m)| schema(&f, m))?;
    for field in REQUIRED_FIELDS.iter().chain(OPTIONAL_FIELDS.iter()) {
        if let Some(v) = obj.get(*field) {
            check_field(field, v).map_err(|m| schema(field, m))?;
        }
    }
    serde_json::from_value(value).map_err(|e| schema("<row>", e.to_string()))
}

fn check_keys(obj: &Map<String, Value>) -> Result<(), (String, String)> {
    for k in obj.keys() {
        if !REQUIRED_FIELDS.contains(&k.as_str()) && !OPTIONAL_FIELDS.contains(&k.as_str()) {
            return Err((k.clone(), "unknown key".into()));
        }
    }
    for f in REQUIRED_FIELDS {
        if !obj.contains_key(f) {
            return Err((f.to_string(), "missing".into()));
        }
    }
    Ok(())
}

fn check_field(field: &str, v: &Value) -> Result<(), String> {
    let ok = match field {
        "line_start" | "line_end" => v.as_u64().is_some_and(|n| n >= 1),
        "trailing" => v.is_boolean(),
        "kind" => matches!(v.as_str(), Some("single" | "multi")),
        "label" => v.is_null() || matches!(v.as_u64(), Some(0 | 1)),
        "source" => matches!(v.as_str(), Some("seed" | "generated")),
        "generator" => v.is_null() || v.is_string(),
        _ => v.is_string(),
    };
    if ok {
        Ok(())
    } else {
        Err(format!("invalid value {v}"))
    }
}

pub fn label_stats(pairs: &[CodeCommentPair]) -> LabelStats {
    let mut s = LabelStats::default();
    for p in pairs {
        match p.label {
            Some(Label::Useful) => s.useful += 1,
            Some(Label::NotUseful) => s.not_useful += 1,
            None => s.unlabeled += 1,
        }
    }
    s
}

fn normalize(text: &str) -> String {
    text.split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

/// Duplicate-detection key: digest of lower-cased, whitespace-collapsed
/// comment and context.
pub fn dedup_key(p: &CodeCommentPair) -> String {
    let c = normalize(&p.comment.text);
    let x = normalize(&p.code_context);
    sha256_fields([c.as_bytes(), x.as_bytes()])
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergeOutcome {
    /// Ids of generated pairs dropped as duplicates.
    pub dropped_duplicates: Vec<String>,
}

/// Seed pairs followed by generated pairs, minus generated pairs whose
/// normalized (comment, context) already appeared. Seed pairs are never
/// dropped.
pub fn merge(seed: &Dataset, generated: &Dataset) -> Result<(Dataset, MergeOutcome), DatasetError> {
    for p in &generated.pairs {
        if p.source != Source::Generated {
            return Err(DatasetError::NotGenerated(p.id.clone()));
        }
        if p.label.is_none() {
            return Err(DatasetError::UnlabeledGenerated(p.id.clone()));
        }
    }
    let mut keys: HashSet<String> = seed.pairs.iter().map(dedup_key).collect();
    let mut pairs = seed.pairs.clone();
    let mut outcome = MergeOutcome::default();
    for p in &generated.pairs {
        if keys.insert(dedup_key(p)) {
            pairs.push(p.clone());
        } else {
            outcome.dropped_duplicates.push(p.id.clone());
        }
    }
    let name = if generated.name.is_empty() {
        seed.name.clone()
    } else {
        format!("{}+{}", seed.name, generated.name)
    };
    Ok((Dataset::new(&name, pairs)?, outcome))
}

#[cfg(test)]
pub(crate) mod testutil {
    use super::*;

    pub fn pair(
        id: &str,
        comment: &str,
        ctx: &str,
        label: Option<Label>,
        source: Source,
    ) -> CodeCommentPair {
        CodeCommentPair {
            id: id.to_string(),
            repo_id: String::new(),
            path: "t.c".into(),
            comment: RawComment {
                kind: CommentKind::SingleLine,
                text: comment.to_string(),
                line_start: 1,
                line_end: 1,
                trailing: false,
            },
            code_context: ctx.to_string(),
            label,
            source,
            generator: (source == Source::Generated).then(|| "gen".to_string()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::testutil::pair;
    use super::*;

    fn ds(pairs: Vec<CodeCommentPair>) -> Dataset {
        Dataset::new("t", pairs).unwrap()
    }

    #[test]
    fn jsonl_round_trip() {
        let d = ds(vec![
            pair(
                "a",
                "x \"q\"\n y",
                "int a;",
                Some(Label::Useful),
                Source::Seed,
            ),
            pair("b", "z", "", None, Source::Generated),
        ]);
        let back = Dataset::from_jsonl("t", d.to_jsonl().as_bytes()).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn missing_field_reports_line() {
        let d = ds(vec![pair("a", "x", "", None, Source::Seed)]);
        let good = d.to_jsonl();
        let mut v: Value = serde_json::from_str(good.trim()).unwrap();
        v.as_object_mut().unwrap().remove("comment");
        let text = format!("{good}{v}\n");
        match Dataset::from_jsonl("t", text.as_bytes()).unwrap_err() {
            DatasetError::Schema { line, field, .. } => {
                assert_eq!(line, 2);
                assert_eq!(field, "comment");
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn unknown_key_rejected() {
        let d = ds(vec![pair("a", "x", "", None, Source::Seed)]);
        let mut v: Value = serde_json::from_str(d.to_jsonl().trim()).unwrap();
        v.as_object_mut()
            .unwrap()
            .insert("extra".into(), Value::Bool(true));
        let err = Dataset::from_jsonl("t", v.to_string().as_bytes()).unwrap_err();
        assert!(matches!(err, DatasetError::Schema { line: 1, ref field, .. } if field == "extra"));
    }

    #[test]
    fn bad_label_value_rejected() {
        let d = ds(vec![pair("a", "x", "", None, Source::Seed)]);
        let mut v: Value = serde_json::from_str(d.to_jsonl().trim()).unwrap();
        v["label"] = Value::from(2);
        let err = Dataset::from_jsonl("t", v.to_string().as_bytes()).unwrap_err();
        assert!(matches!(err, DatasetError::Schema { ref field, .. } if field == "label"));
    }

    #[test]
    fn duplicate_ids_rejected() {
        let d = Dataset {
            name: "t".into(),
            pairs: vec![
                pair("a", "x", "", None, Source::Seed),
                pair("a", "y", "", None, Source::Seed),
            ],
        };
        let err = Dataset::from_jsonl("t", d.to_jsonl().as_bytes()).unwrap_err();
        assert!(matches!(err, DatasetError::DuplicateId(id) if id == "a"));
    }

    #[test]
    fn csv_has_jsonl_columns() {
        let d = ds(vec![pair(
            "a",
            "x, y",
            "int a;",
            Some(Label::Useful),
            Source::Seed,
        )]);
        let csv = d.to_csv().unwrap();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "id,repo,path,line_start,line_end,kind,trailing,comment,code_context,label,source,generator"
        );
        assert_eq!(
            lines.next().unwrap(),
            "a,,t.c,1,1,single,false,\"x, y\",int a;,1,seed,"
        );
    }

    #[test]
    fn stats() {
        assert_eq!(label_stats(&[]), LabelStats::default());
        let mut pairs: Vec<_> = (0..9048)
            .map(|i| pair(&i.to_string(), "c", "", None, Source::Seed))
            .collect();
        for p in pairs.iter_mut().take(100) {
            p.label = Some(Label::Useful);
        }
        let s = label_stats(&pairs);
        assert_eq!(s.unlabeled, 8948);
        assert_eq!(s.total(), 9048);
        let all: Vec<_> = (0..5)
            .map(|i| pair(&i.to_string(), "c", "", Some(Label::Useful), Source::Seed))
            .collect();
        assert_eq!(
            label_stats(&all),
            LabelStats {
                useful: 5,
                not_useful: 0,
                unlabeled: 0
            }
        );
    }

    fn many(prefix: &str, n: usize, source: Source) -> Dataset {
        ds((0..n)
            .map(|i| {
                pair(
                    &format!("{prefix}{i}"),
                    &format!("{prefix} comment {i}"),
                    "",
                    Some(Label::Useful),
                    source,
                )
            })
            .collect())
    }

    #[test]
    fn merge_sizes_and_tie_rule() {
        let seed = many("s", 9048, Source::Seed);
        let gen = many("g", 1000, Source::Generated);
        let (m, o) = merge(&seed, &gen).unwrap();
        assert_eq!(m.len(), 10048);
        assert!(o.dropped_duplicates.is_empty());

        let mut gen2 = gen.clone();
        gen2.pairs[0].comment.text = "  S   COMMENT 17 ".into();
        let (m, o) = merge(&seed, &gen2).unwrap();
        assert_eq!(m.len(), 9048 + 1000 - 1);
        assert_eq!(o.dropped_duplicates, vec!["g0".to_string()]);
        assert!(m.get("s17").is_some());
        assert!(m.get("g0").is_none());
    }

    #[test]
    fn merge_rejects_unlabeled_generated() {
        let seed = many("s", 3, Source::Seed);
        let mut gen = many("g", 2, Source::Generated);
        gen.pairs[1].label = None;
        assert!(
            matches!(merge(&seed, &gen), Err(DatasetError::UnlabeledGenerated(id)) if id == "g1")
        );
        let wrong = many("w", 1, Source::Seed);
        assert!(matches!(
            merge(&seed, &wrong),
            Err(DatasetError::NotGenerated(_))
        ));
    }

    #[test]
    fn merge_is_idempotent_with_empty() {
        let seed = many("s", 10, Source::Seed);
        let gen = many("g", 4, Source::Generated);
        let (m, _) = merge(&seed, &gen).unwrap();
        let (mm, _) = merge(&m, &Dataset::default()).unwrap();
        assert_eq!(mm.pairs, m.pairs);
    }
}
