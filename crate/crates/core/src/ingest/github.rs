//! GitHub REST v3 client: repository search, recursive tree listing and raw
//! file download, with bounded retries on rate limiting.

use std::sync::Arc;

use serde::Deserialize;

use super::transport::{HttpResponse, Sleeper, Transport};
use super::{is_c_path, IngestError, SourceFile, DEFAULT_MAX_FILE_BYTES};
use crate::fsutil::now_utc_seconds;
use crate::par::{self, Execution};

#[derive(Debug, Clone)]
pub struct GithubConfig {
    pub api_base: String,
    pub raw_base: String,
    /// Retries per request after a rate-limit response.
    pub max_retries: u32,
    pub max_file_bytes: u64,
    /// Concurrent downloads; 0 uses the default pool.
    pub parallelism: usize,
}

impl Default for GithubConfig {
    fn default() -> Self {
        Self {
            api_base: "https://api.github.com".into(),
            raw_base: "https://raw.githubusercontent.com".into(),
            max_retries: 3,
            max_file_bytes: DEFAULT_MAX_FILE_BYTES,
            parallelism: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RemoteFile {
    pub path: String,
    pub download_ref: String,
    pub size: Option<u64>,
}

#[derive(Debug, Clone, Default)]
pub struct RepoFiles {
    pub files: Vec<SourceFile>,
    pub skipped: Vec<(String, String)>,
}

pub struct GithubClient {
    transport: Arc<dyn Transport>,
    sleeper: Arc<dyn Sleeper>,
    token: Option<String>,
    cfg: GithubConfig,
}

#[derive(Deserialize)]
struct SearchPage {
    items: Vec<SearchItem>,
}

#[derive(Deserialize)]
struct SearchItem {
    full_name: String,
}

#[derive(Deserialize)]
struct TreeListing {
    tree: Vec<TreeEntry>,
    #[serde(default)]
    truncated: bool,
}

#[derive(Deserialize)]
struct TreeEntry {
    path: String,
    #[serde(rename = "type")]
    kind: String,
    #[serde(default)]
    size: Option<u64>,
}

impl GithubClient {
    /// Live API client; the token must be non-empty.
    pub fn api(
        transport: Arc<dyn Transport>,
        sleeper: Arc<dyn Sleeper>,
        token: &str,
        cfg: GithubConfig,
    ) -> Result<Self, IngestError> {
        if token.trim().is_empty() {
            return Err(IngestError::MissingToken);
        }
        Ok(Self {
            transport,
            sleeper,
            token: Some(token.to_string()),
            cfg,
        })
    }

    /// Client without credentials, for fixture replay.
    pub fn anonymous(
        transport: Arc<dyn Transport>,
        sleeper: Arc<dyn Sleeper>,
        cfg: GithubConfig,
    ) -> Self {
        Self {
            transport,
            sleeper,
            token: None,
            cfg,
        }
    }

    fn request(&self, url: &str) -> Result<HttpResponse, IngestError> {
        let mut attempts = 0;
        loop {
            let resp = self.transport.get(url, self.token.as_deref())?;
            match resp.status {
                200..=299 => return Ok(resp),
                401 => return Err(IngestError::AuthFailed),
                403 | 429 => {
                    let Some(wait) = rate_limit_wait(&resp) else {
                        return Err(IngestError::AuthFailed);
                    };
                    if attempts >= self.cfg.max_retries {
                        return Err(IngestError::RateLimited {
                            retry_after_secs: wait,
                        });
                    }
                    attempts += 1;
                    self.sleeper.sleep(wait);
                }
                404 => return Err(IngestError::RepoNotFound(url.to_string())),
                409 => return Err(IngestError::EmptyRepository(url.to_string())),
                s => return Err(IngestError::Network(format!("HTTP {s} for {url}"))),
            }
        }
    }

    /// Up to `max_repos` repository ids for `query`, in API page order.
    pub fn search_repos(&self, query: &str, max_repos: usize) -> Result<Vec<String>, IngestError> {
        if max_repos == 0 {
            return Err(IngestError::InvalidArgument(
                "max_repos must be >= 1".into(),
            ));
        }
        let per_page = max_repos.min(100);
        let mut out = Vec::new();
        let mut page = 1;
        while out.len() < max_repos {
            let url = format!(
                "{}/search/repositories?q={}&per_page={per_page}&page={page}",
                self.cfg.api_base,
                percent_encode(query)
            );
            let resp = self.request(&url)?;
            let parsed: SearchPage = serde_json::from_slice(&resp.body)
                .map_err(|e| IngestError::MalformedResponse(format!("search: {e}")))?;
            let n = parsed.items.len();
            out.extend(
                parsed
                    .items
                    .into_iter()
                    .map(|i| i.full_name)
                    .take(max_repos - out.len()),
            );
            if n < per_page {
                break;
            }
            page += 1;
        }
        Ok(out)
    }

    /// `.c` blobs of the default branch, from the recursive tree listing.
    pub fn list_c_files(&self, repo_id: &str) -> Result<Vec<RemoteFile>, IngestError> {
        validate_repo_id(repo_id)?;
        let url = format!(
            "{}/repos/{repo_id}/git/trees/HEAD?recursive=1",
            self.cfg.api_base
        );
        let resp = match self.request(&url) {
            Err(IngestError::RepoNotFound(_)) => {
                return Err(IngestError::RepoNotFound(repo_id.into()))
            }
            // the API answers 409 for a repository without commits
            Err(IngestError::EmptyRepository(_)) => return Ok(Vec::new()),
            r => r?,
        };
        let listing: TreeListing = serde_json::from_slice(&resp.body)
            .map_err(|e| IngestError::MalformedResponse(format!("tree: {e}")))?;
        if listing.truncated {
            log_warn(&format!(
                "tree listing for {repo_id} was truncated by the API"
            ));
        }
        Ok(listing
            .tree
            .into_iter()
            .filter(|e| e.kind == "blob" && is_c_path(&e.path))
            .map(|e| RemoteFile {
                download_ref: format!("{}/{repo_id}/HEAD/{}", self.cfg.raw_base, e.path),
                path: e.path,
                size: e.size,
            })
            .collect())
    }

    /// Downloads `files` concurrently; output keeps the input order. Files
    /// above the size cap or failing to download are recorded in `skipped`.
    pub fn fetch_files(&self, repo_id: &str, files: &[RemoteFile]) -> RepoFiles {
        let now = now_utc_seconds();
        let results = par::with_threads(self.cfg.parallelism, || {
            par::map(Execution::Parallel, files, |f| {
                if f.size.is_some_and(|s| s > self.cfg.max_file_bytes) {
                    return Err((f.path.clone(), "exceeds size cap".to_string()));
                }
                let resp = self
                    .request(&f.download_ref)
                    .map_err(|e| (f.path.clone(), e.to_string()))?;
                if resp.body.len() as u64 > self.cfg.max_file_bytes {
                    return Err((f.path.clone(), "exceeds size cap".to_string()));
                }
                Ok(SourceFile::from_bytes(repo_id, &f.path, &resp.body, now))
            })
        });
        let mut out = RepoFiles::default();
        for r in results {
            match r {
                Ok(f) => out.files.push(f),
                Err(s) => out.skipped.push(s),
            }
        }
        out
    }
}

fn log_warn(msg: &str) {
    eprintln!("warning: {msg}");
}

/// Seconds to wait before retrying, or `None` if the response is not a
/// rate-limit signal.
fn rate_limit_wait(resp: &HttpResponse) -> Option<u64> {
    if let Some(v) = resp.header("retry-after") {
        return v.trim().parse::<u64>().ok().map(|s| s.max(1));
    }
    if resp.header("x-ratelimit-remaining") == Some("0") {
        let reset = resp
            .header("x-ratelimit-reset")
            .and_then(|v| v.trim().parse::<i64>().ok())
            .unwrap_or(0);
        return Some((reset - now_utc_seconds()).max(1) as u64);
    }
    if resp.status == 429 {
        return Some(60);
    }
    None
}

fn validate_repo_id(repo_id: &str) -> Result<(), IngestError> {
    let ok_part = |s: &str| {
        !s.is_empty()
            && s.chars()
                .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'))
    };
    match repo_id.split_once('/') {
        Some((owner, name)) if ok_part(owner) && ok_part(name) => Ok(()),
        _ => Err(IngestError::InvalidArgument(format!(
            "malformed repo id {repo_id:?}"
        ))),
    }
}

fn percent_encode(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for b in s.bytes() {
        match b {
            b'A'..=b'Z' | b'a'..=b'z' | b'0'..=b'9' | b'-' | b'_' | b'.' | b'~' => {
                out.push(b as char)
            }
            _ => out.push_str(&format!("%{b:02X}")),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encodes_query() {
        assert_eq!(percent_encode("language:C stars"), "language%3AC%20stars");
    }

    #[test]
    fn repo_id_shape() {
        assert!(validate_repo_id("torvalds/linux").is_ok());
        assert!(validate_repo_id("torvalds").is_err());
        assert!(validate_repo_id("a/b/c").is_err());
        assert!(validate_repo_id("/b").is_err());
    }

    #[test]
    fn retry_after_parsing() {
        let mut r = HttpResponse {
            status: 403,
            ..Default::default()
        };
        assert_eq!(rate_limit_wait(&r), None);
        r.headers.insert("retry-after".into(), "7".into());
        assert_eq!(rate_limit_wait(&r), Some(7));
        r.headers.clear();
        r.headers.insert("x-ratelimit-remaining".into(), "0".into());
        r.headers.insert("x-ratelimit-reset".into(), "0".into());
        assert_eq!(rate_limit_wait(&r), Some(1));
    }
}
