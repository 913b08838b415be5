//! Manual labeling sessions over a JSONL dataset, and the HTTP service that
//! exposes them.
//!
//! A session works on the first `target` rows of the dataset in file order.
//! Every accepted label is written to the dataset file (atomically) before
//! it is acknowledged, so a restarted session picks up where it stopped.

mod http;

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, DatasetError, Label};
use crate::extractor::CodeCommentPair;
use crate::fsutil::now_utc_seconds;

pub use http::{router, serve, SharedSession, GUIDELINES};

pub const DEFAULT_TARGET: usize = 100;

#[derive(Debug, thiserror::Error)]
pub enum AnnotateError {
    #[error("all {target} pairs of this session are labeled")]
    SessionComplete { target: usize },
    #[error("pair {0} is not part of this session")]
    UnknownPair(String),
    #[error("pair {0} is already labeled")]
    AlreadyLabeled(String),
    #[error("could not persist label: {0}")]
    Storage(String),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Progress {
    pub labeled: usize,
    pub target: usize,
}

impl Progress {
    pub fn complete(&self) -> bool {
        self.labeled >= self.target
    }
}

/// One line of the audit log kept next to the dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditEntry {
    pub id: String,
    pub label: Label,
    pub annotator: String,
    pub at: i64,
}

#[derive(Debug)]
pub struct AnnotationSession {
    path: PathBuf,
    dataset: Dataset,
    target: usize,
    started_at: i64,
}

/// `<dataset>.audit.jsonl`
pub fn audit_path(dataset: &Path) -> PathBuf {
    let mut s = dataset.as_os_str().to_owned();
    s.push(".audit.jsonl");
    PathBuf::from(s)
}

impl AnnotationSession {
    /// Opens the dataset at `path`; the target is capped at the dataset size.
    pub fn open(path: &Path, target: usize) -> Result<Self, AnnotateError> {
        let dataset = Dataset::load(path)?;
        Ok(Self::with_dataset(path, dataset, target))
    }

    pub fn with_dataset(path: &Path, dataset: Dataset, target: usize) -> Self {
        Self {
            path: path.to_path_buf(),
            target: target.min(dataset.len()),
            dataset,
            started_at: now_utc_seconds(),
        }
    }

    pub fn dataset_path(&self) -> &Path {
        &self.path
    }

    pub fn started_at(&self) -> i64 {
        self.started_at
    }

    fn window(&self) -> &[CodeCommentPair] {
        &self.dataset.pairs[..self.target]
    }

    pub fn progress(&self) -> Progress {
        Progress {
            labeled: self.window().iter().filter(|p| p.label.is_some()).count(),
            target: self.target,
        }
    }

    /// Up to `limit` unlabeled pairs of the session, in dataset order.
    pub fn next_unlabeled(&self, limit: usize) -> Result<Vec<&CodeCommentPair>, AnnotateError> {
        if self.progress().complete() {
            return Err(AnnotateError::SessionComplete {
                target: self.target,
            });
        }
        Ok(self
            .window()
            .iter()
            .filter(|p| p.label.is_none())
            .take(limit)
            .collect())
    }

    /// Records a label. The audit log and dataset file are written before
    /// this returns `Ok`; on a storage failure the in-memory state is left
    /// unchanged.
    pub fn submit_label(
        &mut self,
        id: &str,
        label: Label,
        annotator: &str,
    ) -> Result<Progress, AnnotateError> {
        let pos = self
            .window()
            .iter()
            .position(|p| p.id == id)
            .ok_or_else(|| AnnotateError::UnknownPair(id.to_string()))?;
        if self.dataset.pairs[pos].label.is_some() {
            return Err(AnnotateError::AlreadyLabeled(id.to_string()));
        }
        let mut updated = self.dataset.clone();
        updated.pairs[pos].label = Some(label);
        let entry = AuditEntry {
            id: id.to_string(),
            label,
            annotator: annotator.to_string(),
            at: now_utc_seconds(),
        };
        append_audit(&audit_path(&self.path), &entry)
            .map_err(|e| AnnotateError::Storage(e.to_string()))?;
        updated
            .save(&self.path)
            .map_err(|e| AnnotateError::Storage(e.to_string()))?;
        self.dataset = updated;
        Ok(self.progress())
    }

    /// The labeled pairs of the whole dataset.
    pub fn export(&self) -> Dataset {
        self.dataset.labeled_subset()
    }

    pub fn dataset(&self) -> &Dataset {
        &self.dataset
    }
}

fn append_audit(path: &Path, entry: &AuditEntry) -> std::io::Result<()> {
    let mut f = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)?;
    let mut line = serde_json::to_string(entry).expect("audit entry serialization");
    line.push('\n');
    f.write_all(line.as_bytes())?;
    f.sync_data()
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::dataset::testutil::pair;
    use crate::dataset::Source;

    pub fn write_dataset(dir: &Path, n: usize) -> PathBuf {
        let pairs = (0..n)
            .map(|i| {
                pair(
                    &format!("p{i:03}"),
                    &format!("comment {i}"),
                    "code",
                    None,
                    Source::Seed,
                )
            })
            .collect();
        let path = dir.join("pairs.jsonl");
        Dataset::new("pairs", pairs).unwrap().save(&path).unwrap();
        path
    }

    #[test]
    fn first_rows_in_order() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_dataset(dir.path(), 120);
        let mut s = AnnotationSession::open(&path, DEFAULT_TARGET).unwrap();
        assert_eq!(
            s.progress(),
            Progress {
                labeled: 0,
                target: 100
            }
        );
        assert_eq!(s.next_unlabeled(1).unwrap()[0].id, "p000");
        for i in 0..99 {
            s.submit_label(&format!("p{i:03}"), Label::Useful, "a")
                .unwrap();
        }
        let next: Vec<_> = s
            .next_unlabeled(5)
            .unwrap()
            .iter()
            .map(|p| p.id.clone())
            .collect();
        assert_eq!(next, ["p099"]);
        s.submit_label("p099", Label::NotUseful, "a").unwrap();
        assert!(matches!(
            s.next_unlabeled(5),
            Err(AnnotateError::SessionComplete { target: 100 })
        ));
        let export = s.export();
        assert_eq!(export.len(), 100);
        assert!(export.pairs.iter().all(|p| p.label.is_some()));
    }

    #[test]
    fn relabel_and_unknown_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_dataset(dir.path(), 5);
        let mut s = AnnotationSession::open(&path, 100).unwrap();
        assert_eq!(s.progress().target, 5);
        s.submit_label("p000", Label::Useful, "a").unwrap();
        assert!(matches!(
            s.submit_label("p000", Label::NotUseful, "a"),
            Err(AnnotateError::AlreadyLabeled(_))
        ));
        assert!(matches!(
            s.submit_label("nope", Label::Useful, "a"),
            Err(AnnotateError::UnknownPair(_))
        ));
        assert_eq!(s.export().pairs[0].label, Some(Label::Useful));
    }

    #[test]
    fn labels_survive_restart() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_dataset(dir.path(), 50);
        {
            let mut s = AnnotationSession::open(&path, 100).unwrap();
            for i in 0..37 {
                s.submit_label(&format!("p{i:03}"), Label::from_bool(i % 3 == 0), "a")
                    .unwrap();
            }
        }
        let s = AnnotationSession::open(&path, 100).unwrap();
        assert_eq!(
            s.progress(),
            Progress {
                labeled: 37,
                target: 50
            }
        );
        let audit = std::fs::read_to_string(audit_path(&path)).unwrap();
        assert_eq!(audit.lines().count(), 37);
    }

    #[test]
    fn storage_failure_withholds_ack() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_dataset(dir.path(), 3);
        let mut s = AnnotationSession::open(&path, 3).unwrap();
        // a directory where the audit log should go makes the append fail
        std::fs::create_dir(audit_path(&path)).unwrap();
        assert!(matches!(
            s.submit_label("p000", Label::Useful, "a"),
            Err(AnnotateError::Storage(_))
        ));
        assert_eq!(s.progress().labeled, 0);
        assert_eq!(Dataset::load(&path).unwrap().label_stats().unlabeled, 3);
    }
}
