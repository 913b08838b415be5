use std::net::SocketAddr;
use std::sync::{Arc, RwLock};

use axum::extract::{Path, Query, State};
use axum::http::{HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;
use tower_http::cors::{Any, CorsLayer};

use super::{AnnotateError, AnnotationSession, Progress};
use crate::dataset::{Label, PairRecord};

pub type SharedSession = Arc<RwLock<AnnotationSession>>;

/// Labeling criteria shown to annotators.
pub const GUIDELINES: &str = "\
Label a comment Useful when a reader of the surrounding code would understand it better with the comment than without it.

Relevance: the comment talks about the code next to it, not about something elsewhere or nothing at all.
Clarity: the comment can be understood on first reading; it is not garbled, truncated or ambiguous.
Informativeness: the comment adds something the code does not already say plainly, such as intent, constraints, units, or non-obvious behaviour.

Label it Not Useful when it fails any of these: commented-out code, restated code (`i++; // increment i`), stale or misleading text, licence boilerplate, separators and empty markers.";

const MAX_LIMIT: usize = 1000;

#[derive(Debug, Deserialize)]
struct PairsQuery {
    status: Option<String>,
    limit: Option<usize>,
}

#[derive(Debug, Deserialize)]
struct LabelBody {
    label: String,
    annotator: String,
}

#[derive(Debug, Serialize)]
struct LabelAck {
    id: String,
    label: Label,
    progress: ProgressBody,
}

#[derive(Debug, Serialize)]
struct ProgressBody {
    labeled: usize,
    target: usize,
    complete: bool,
}

impl From<Progress> for ProgressBody {
    fn from(p: Progress) -> Self {
        Self {
            labeled: p.labeled,
            target: p.target,
            complete: p.complete(),
        }
    }
}

fn error(status: StatusCode, code: &str, message: String) -> Response {
    (status, Json(json!({ "error": code, "message": message }))).into_response()
}

impl IntoResponse for AnnotateError {
    fn into_response(self) -> Response {
        let (status, code) = match &self {
            AnnotateError::SessionComplete { .. } => (StatusCode::CONFLICT, "session_complete"),
            AnnotateError::UnknownPair(_) => (StatusCode::NOT_FOUND, "unknown_pair"),
            AnnotateError::AlreadyLabeled(_) => (StatusCode::CONFLICT, "already_labeled"),
            AnnotateError::Storage(_) | AnnotateError::Dataset(_) => {
                (StatusCode::INTERNAL_SERVER_ERROR, "storage_error")
            }
        };
        error(status, code, self.to_string())
    }
}

async fn list_pairs(State(s): State<SharedSession>, Query(q): Query<PairsQuery>) -> Response {
    if let Some(status) = q.status.as_deref() {
        if status != "unlabeled" {
            return error(
                StatusCode::BAD_REQUEST,
                "bad_request",
                format!("unsupported status {status:?}; only \"unlabeled\" is served"),
            );
        }
    }
    let limit = q.limit.unwrap_or(10).min(MAX_LIMIT);
    let session = s.read().expect("session lock");
    match session.next_unlabeled(limit) {
        Ok(pairs) => {
            let pairs: Vec<PairRecord> = pairs.into_iter().map(PairRecord::from).collect();
            Json(json!({ "pairs": pairs, "progress": ProgressBody::from(session.progress()) }))
                .into_response()
        }
        Err(e) => e.into_response(),
    }
}

async fn submit(
    State(s): State<SharedSession>,
    Path(id): Path<String>,
    Json(body): Json<LabelBody>,
) -> Response {
    let label: Label = match body.label.parse() {
        Ok(l) if matches!(body.label.as_str(), "useful" | "not_useful") => l,
        _ => {
            return error(
                StatusCode::BAD_REQUEST,
                "bad_request",
                format!(
                    "label must be \"useful\" or \"not_useful\", got {:?}",
                    body.label
                ),
            )
        }
    };
    // one writer at a time; the first submission for an id wins
    let mut session = s.write().expect("session lock");
    match session.submit_label(&id, label, &body.annotator) {
        Ok(progress) => Json(LabelAck {
            id,
            label,
            progress: progress.into(),
        })
        .into_response(),
        Err(e) => e.into_response(),
    }
}

async fn progress(State(s): State<SharedSession>) -> Json<ProgressBody> {
    Json(s.read().expect("session lock").progress().into())
}

async fn export(State(s): State<SharedSession>) -> Response {
    let ds = s.read().expect("session lock").export();
    let pairs: Vec<PairRecord> = ds.pairs.iter().map(PairRecord::from).collect();
    Json(json!({ "name": ds.name, "pairs": pairs })).into_response()
}

async fn guidelines() -> Json<serde_json::Value> {
    Json(json!({
        "text": GUIDELINES,
        "criteria": ["relevance", "clarity", "informativeness"],
        "labels": ["useful", "not_useful"],
    }))
}

/// Routes of the annotation service. `cors_origin` of `None` or `"*"`
/// allows any origin.
pub fn router(session: SharedSession, cors_origin: Option<&str>) -> Router {
    let cors = CorsLayer::new().allow_methods(Any).allow_headers(Any);
    let cors = match cors_origin {
        Some(o) if o != "*" => match HeaderValue::from_str(o) {
            Ok(v) => cors.allow_origin(v),
            Err(_) => cors.allow_origin(Any),
        },
        _ => cors.allow_origin(Any),
    };
    Router::new()
        .route("/pairs", get(list_pairs))
        .route("/pairs/{id}/label", post(submit))
        .route("/progress", get(progress))
        .route("/export", get(export))
        .route("/guidelines", get(guidelines))
        .layer(cors)
        .with_state(session)
}

/// Serves until ctrl-c. `on_ready` receives the bound address.
pub async fn serve(
    session: SharedSession,
    addr: SocketAddr,
    cors_origin: Option<&str>,
    on_ready: impl FnOnce(SocketAddr),
) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    on_ready(listener.local_addr()?);
    axum::serve(listener, router(session, cors_origin))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
