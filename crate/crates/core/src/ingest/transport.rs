//! HTTP transports: live (reqwest), fixture replay, and a recording wrapper
//! that captures live exchanges into a fixture directory.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use super::IngestError;

pub const FIXTURE_FILE: &str = "exchanges.json";

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct HttpResponse {
    pub status: u16,
    /// Lower-cased header names.
    pub headers: BTreeMap<String, String>,
    pub body: Vec<u8>,
}

impl HttpResponse {
    pub fn header(&self, name: &str) -> Option<&str> {
        self.headers
            .get(&name.to_ascii_lowercase())
            .map(String::as_str)
    }
}

pub trait Transport: Send + Sync {
    fn get(&self, url: &str, token: Option<&str>) -> Result<HttpResponse, IngestError>;
}

/// Delay source for retry back-off; swapped out in tests.
pub trait Sleeper: Send + Sync {
    fn sleep(&self, secs: u64);
}

pub struct ThreadSleeper;

impl Sleeper for ThreadSleeper {
    fn sleep(&self, secs: u64) {
        std::thread::sleep(std::time::Duration::from_secs(secs));
    }
}

/// Records requested delays without waiting.
#[derive(Default)]
pub struct NoSleep {
    pub requested: Mutex<Vec<u64>>,
}

impl Sleeper for NoSleep {
    fn sleep(&self, secs: u64) {
        self.requested.lock().unwrap().push(secs);
    }
}

/// One canned HTTP exchange as stored on disk.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Exchange {
    pub url: String,
    pub status: u16,
    #[serde(default)]
    pub headers: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub body: Option<String>,
    /// Used instead of `body` for payloads that are not valid UTF-8.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub body_hex: Option<String>,
}

impl Exchange {
    fn into_response(self) -> Result<HttpResponse, IngestError> {
        let body = match (self.body, self.body_hex) {
            (_, Some(h)) => hex::decode(h).map_err(|e| IngestError::Fixture(e.to_string()))?,
            (Some(b), None) => b.into_bytes(),
            (None, None) => Vec::new(),
        };
        Ok(HttpResponse {
            status: self.status,
            headers: self
                .headers
                .into_iter()
                .map(|(k, v)| (k.to_ascii_lowercase(), v))
                .collect(),
            body,
        })
    }

    fn from_response(url: &str, r: &HttpResponse) -> Self {
        let (body, body_hex) = match std::str::from_utf8(&r.body) {
            Ok(s) => (Some(s.to_string()), None),
            Err(_) => (None, Some(hex::encode(&r.body))),
        };
        Self {
            url: url.to_string(),
            status: r.status,
            headers: r.headers.clone(),
            body,
            body_hex,
        }
    }
}

/// Replays exchanges from `<dir>/exchanges.json`. Several exchanges for the
/// same URL are served in order; the last one repeats once exhausted.
pub struct FixtureTransport {
    responses: Mutex<HashMap<String, (Vec<Exchange>, usize)>>,
}

impl FixtureTransport {
    pub fn load(dir: &Path) -> Result<Self, IngestError> {
        let file = dir.join(FIXTURE_FILE);
        let text = std::fs::read_to_string(&file)
            .map_err(|e| IngestError::Fixture(format!("{}: {e}", file.display())))?;
        let exchanges: Vec<Exchange> = serde_json::from_str(&text)
            .map_err(|e| IngestError::Fixture(format!("{}: {e}", file.display())))?;
        Ok(Self::from_exchanges(exchanges))
    }

    pub fn from_exchanges(exchanges: Vec<Exchange>) -> Self {
        let mut map: HashMap<String, (Vec<Exchange>, usize)> = HashMap::new();
        for ex in exchanges {
            map.entry(ex.url.clone()).or_default().0.push(ex);
        }
        Self {
            responses: Mutex::new(map),
        }
    }
}

impl Transport for FixtureTransport {
    fn get(&self, url: &str, _token: Option<&str>) -> Result<HttpResponse, IngestError> {
        let mut map = self.responses.lock().unwrap();
        let (list, next) = map
            .get_mut(url)
            .ok_or_else(|| IngestError::Network(format!("no fixture for {url}")))?;
        let ex = list[(*next).min(list.len() - 1)].clone();
        *next += 1;
        ex.into_response()
    }
}

/// Wraps a live transport and writes every exchange to a fixture directory
/// on [`RecordingTransport::finish`].
pub struct RecordingTransport<T: Transport> {
    inner: T,
    dir: PathBuf,
    log: Mutex<Vec<Exchange>>,
}

impl<T: Transport> RecordingTransport<T> {
    pub fn new(inner: T, dir: &Path) -> Self {
        Self {
            inner,
            dir: dir.to_path_buf(),
            log: Mutex::new(Vec::new()),
        }
    }

    pub fn finish(&self) -> Result<(), IngestError> {
        let log = self.log.lock().unwrap();
        let text = serde_json::to_string_pretty(&*log).expect("exchange serialization");
        crate::fsutil::write_atomic(&self.dir.join(FIXTURE_FILE), text.as_bytes())?;
        Ok(())
    }
}

impl<T: Transport> Transport for RecordingTransport<T> {
    fn get(&self, url: &str, token: Option<&str>) -> Result<HttpResponse, IngestError> {
        let resp = self.inner.get(url, token)?;
        self.log
            .lock()
            .unwrap()
            .push(Exchange::from_response(url, &resp));
        Ok(resp)
    }
}

impl<T: Transport + ?Sized> Transport for std::sync::Arc<T> {
    fn get(&self, url: &str, token: Option<&str>) -> Result<HttpResponse, IngestError> {
        (**self).get(url, token)
    }
}

#[cfg(feature = "github")]
pub struct ReqwestTransport {
    client: reqwest::blocking::Client,
}

#[cfg(feature = "github")]
impl ReqwestTransport {
    pub fn new() -> Result<Self, IngestError> {
        let client = reqwest::blocking::Client::builder()
            .user_agent(concat!("commentum/", env!("CARGO_PKG_VERSION")))
            .timeout(std::time::Duration::from_secs(60))
            .build()
            .map_err(|e| IngestError::Network(e.to_string()))?;
        Ok(Self { client })
    }
}

#[cfg(feature = "github")]
impl Transport for ReqwestTransport {
    fn get(&self, url: &str, token: Option<&str>) -> Result<HttpResponse, IngestError> {
        let mut req = self
            .client
            .get(url)
            .header("Accept", "application/vnd.github+json")
            .header("X-GitHub-Api-Version", "2022-11-28");
        if let Some(t) = token {
            req = req.bearer_auth(t);
        }
        let resp = req
            .send()
            .map_err(|e| IngestError::Network(e.to_string()))?;
        let status = resp.status().as_u16();
        let headers = resp
            .headers()
            .iter()
            .filter_map(|(k, v)| {
                Some((
                    k.as_str().to_ascii_lowercase(),
                    v.to_str().ok()?.to_string(),
                ))
            })
            .collect();
        let body = resp
            .bytes()
            .map_err(|e| IngestError::Network(e.to_string()))?
            .to_vec();
        Ok(HttpResponse {
            status,
            headers,
            body,
        })
    }
}
