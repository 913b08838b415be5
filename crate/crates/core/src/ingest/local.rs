use std::path::Path;

use serde::{Deserialize, Serialize};
use walkdir::WalkDir;

use super::{is_c_path, IngestError, SourceFile, DEFAULT_MAX_FILE_BYTES};
use crate::fsutil::now_utc_seconds;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanOptions {
    pub max_file_bytes: u64,
    /// When > 0, the first `repo_depth` path components name the repository
    /// (`owner/name` for a depth of 2) and are removed from `path`.
    pub repo_depth: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            max_file_bytes: DEFAULT_MAX_FILE_BYTES,
            repo_depth: 0,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct LocalScan {
    pub files: Vec<SourceFile>,
    /// (path, reason) for files that were found but not read.
    pub skipped: Vec<(String, String)>,
}

/// Every `.c` file under `root`, sorted by relative path bytes. Unreadable
/// entries are skipped and recorded rather than aborting the scan.
pub fn scan_local(root: &Path, opts: &ScanOptions) -> Result<LocalScan, IngestError> {
    if !root.is_dir() {
        return Err(IngestError::DirNotFound(root.to_path_buf()));
    }
    let now = now_utc_seconds();
    let mut out = LocalScan::default();
    let mut found: Vec<(String, std::path::PathBuf)> = Vec::new();
    for entry in WalkDir::new(root).follow_links(false) {
        let entry = match entry {
            Ok(e) => e,
            Err(e) => {
                let p = e.path().map(|p| rel_path(root, p)).unwrap_or_default();
                out.skipped.push((p, e.to_string()));
                continue;
            }
        };
        if !entry.file_type().is_file() {
            continue;
        }
        let rel = rel_path(root, entry.path());
        if is_c_path(&rel) {
            found.push((rel, entry.path().to_path_buf()));
        }
    }
    found.sort_by(|a, b| a.0.as_bytes().cmp(b.0.as_bytes()));

    for (rel, full) in found {
        let size = match std::fs::metadata(&full) {
            Ok(m) => m.len(),
            Err(e) => {
                out.skipped.push((rel, e.to_string()));
                continue;
            }
        };
        if size > opts.max_file_bytes {
            out.skipped.push((
                rel,
                format!("size {size} exceeds cap {}", opts.max_file_bytes),
            ));
            continue;
        }
        match std::fs::read(&full) {
            Ok(bytes) => {
                let (repo, path) = split_repo(&rel, opts.repo_depth);
                out.files
                    .push(SourceFile::from_bytes(&repo, &path, &bytes, now));
            }
            Err(e) => out.skipped.push((rel, e.to_string())),
        }
    }
    Ok(out)
}

fn rel_path(root: &Path, p: &Path) -> String {
    let rel = p.strip_prefix(root).unwrap_or(p);
    rel.components()
        .map(|c| c.as_os_str().to_string_lossy().into_owned())
        .collect::<Vec<_>>()
        .join("/")
}

fn split_repo(rel: &str, depth: usize) -> (String, String) {
    if depth == 0 {
        return (String::new(), rel.to_string());
    }
    let parts: Vec<&str> = rel.splitn(depth + 1, '/').collect();
    if parts.len() <= depth {
        return (String::new(), rel.to_string());
    }
    (parts[..depth].join("/"), parts[depth].to_string())
}
