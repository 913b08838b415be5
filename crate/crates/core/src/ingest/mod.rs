//! Acquisition of C source files, either from a local directory tree or from
//! the GitHub REST API (live or replayed from recorded fixtures).

mod github;
mod local;
mod transport;

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

pub use github::{GithubClient, GithubConfig, RemoteFile, RepoFiles};
pub use local::{scan_local, LocalScan, ScanOptions};
#[cfg(feature = "github")]
pub use transport::ReqwestTransport;
pub use transport::{
    FixtureTransport, HttpResponse, NoSleep, RecordingTransport, Sleeper, ThreadSleeper, Transport,
};

/// Environment variable holding the GitHub API token.
pub const TOKEN_ENV: &str = "COMMENTUM_GITHUB_TOKEN";

/// Files larger than this are skipped by default (generated/amalgamated code).
pub const DEFAULT_MAX_FILE_BYTES: u64 = 1024 * 1024;

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("no API token: set {TOKEN_ENV} or use fixture replay")]
    MissingToken,
    #[error("authentication failed (bad or expired token)")]
    AuthFailed,
    #[error("rate limited; retry after {retry_after_secs}s")]
    RateLimited { retry_after_secs: u64 },
    #[error("network error: {0}")]
    Network(String),
    #[error("repository not found: {0}")]
    RepoNotFound(String),
    #[error("repository has no commits: {0}")]
    EmptyRepository(String),
    #[error("directory not found: {}", .0.display())]
    DirNotFound(PathBuf),
    #[error("unexpected API response: {0}")]
    MalformedResponse(String),
    #[error("fixture error: {0}")]
    Fixture(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A C source file ready for extraction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceFile {
    /// `owner/name`, empty for local files.
    pub repo_id: String,
    /// Repo-relative (or scan-root-relative) path with `/` separators.
    pub path: String,
    pub content: String,
    /// UTC seconds.
    pub retrieved_at: i64,
    /// Number of invalid UTF-8 sequences replaced with U+FFFD.
    pub replaced_sequences: usize,
}

impl SourceFile {
    pub fn new(repo_id: &str, path: &str, content: String) -> Self {
        Self {
            repo_id: repo_id.to_string(),
            path: path.to_string(),
            content,
            retrieved_at: 0,
            replaced_sequences: 0,
        }
    }

    /// Lossy UTF-8 decode; never fails.
    pub fn from_bytes(repo_id: &str, path: &str, bytes: &[u8], retrieved_at: i64) -> Self {
        let (content, replaced) = decode_lossy(bytes);
        Self {
            repo_id: repo_id.to_string(),
            path: path.to_string(),
            content,
            retrieved_at,
            replaced_sequences: replaced,
        }
    }
}

/// Case-sensitive `.c` filter: `X.C` and `.cc`/`.h` are rejected.
pub fn is_c_path(path: &str) -> bool {
    path.ends_with(".c") && path.len() > 2 && !path.ends_with("/.c")
}

pub fn decode_lossy(bytes: &[u8]) -> (String, usize) {
    let mut out = String::with_capacity(bytes.len());
    let mut replaced = 0;
    for chunk in bytes.utf8_chunks() {
        out.push_str(chunk.valid());
        if !chunk.invalid().is_empty() {
            out.push(char::REPLACEMENT_CHARACTER);
            replaced += 1;
        }
    }
    (out, replaced)
}
