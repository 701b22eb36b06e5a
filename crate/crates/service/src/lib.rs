//! JSON-over-HTTP front end for the clustering pipeline.
//!
//! Every request runs its own pipeline over shared, read-only resources.
//!
//! * `GET /api/search?q=..&provider=..&scheme=..` fetches and clusters.
//! * `POST /api/cluster` clusters the snippets in the body.
//! * `GET /api/health` answers `{"status":"ok"}`.

use std::net::SocketAddr;

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use stcb_core::pipeline::{ClusterResult, Pipeline, PipelineError, Scheme};
use stcb_core::snippet::{ProviderError, Snippet};

/// Error body: `{"error": {"code", "stage", "message"}}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub code: String,
    pub stage: String,
    pub message: String,
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: ErrorBody,
}

impl ApiError {
    fn new(status: StatusCode, code: &str, stage: &str, message: impl Into<String>) -> Self {
        Self {
            status,
            body: ErrorBody {
                code: code.into(),
                stage: stage.into(),
                message: message.into(),
            },
        }
    }

    fn bad_request(code: &str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, code, "request", message)
    }
}

impl From<PipelineError> for ApiError {
    fn from(e: PipelineError) -> Self {
        let status = match &e {
            PipelineError::Fetch(ProviderError::EmptyQuery)
            | PipelineError::Fetch(ProviderError::UnknownProvider(_))
            | PipelineError::Parse { .. }
            | PipelineError::Tree(_) => StatusCode::BAD_REQUEST,
            PipelineError::Fetch(ProviderError::Transport { .. }) => StatusCode::BAD_GATEWAY,
            PipelineError::Fetch(ProviderError::Config { .. }) => StatusCode::SERVICE_UNAVAILABLE,
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        Self::new(status, e.code(), e.stage().as_str(), e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = serde_json::json!({ "error": self.body });
        (self.status, Json(body)).into_response()
    }
}

#[derive(Debug, Default, Deserialize)]
pub struct SearchParams {
    #[serde(default)]
    pub q: String,
    pub provider: Option<String>,
    pub scheme: Option<String>,
}

#[derive(Debug, Deserialize)]
pub struct ClusterRequest {
    #[serde(default)]
    pub query: String,
    pub scheme: Option<String>,
    pub snippets: Vec<Snippet>,
}

fn parse_scheme(raw: Option<&str>) -> Result<Option<Scheme>, ApiError> {
    raw.filter(|s| !s.is_empty())
        .map(|s| {
            s.parse().map_err(|e: stcb_core::InvalidValue| {
                ApiError::bad_request("bad-scheme", e.to_string())
            })
        })
        .transpose()
}

fn with_scheme(pipeline: &Pipeline, scheme: Option<Scheme>) -> Pipeline {
    match scheme {
        Some(s) => pipeline.with_scheme(s),
        None => pipeline.clone(),
    }
}

async fn blocking<T: Send + 'static>(
    f: impl FnOnce() -> Result<T, ApiError> + Send + 'static,
) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f).await.map_err(|e| {
        ApiError::new(
            StatusCode::INTERNAL_SERVER_ERROR,
            "internal",
            "request",
            e.to_string(),
        )
    })?
}

async fn search(
    State(pipeline): State<Pipeline>,
    params: Result<Query<SearchParams>, QueryRejection>,
) -> Result<Json<ClusterResult>, ApiError> {
    let Query(params) = params.map_err(|e| ApiError::bad_request("bad-request", e.body_text()))?;
    let mut pipeline = with_scheme(&pipeline, parse_scheme(params.scheme.as_deref())?);
    if let Some(provider) = params.provider.filter(|p| !p.is_empty()) {
        pipeline = pipeline.with_provider_name(provider);
    }
    let result = blocking(move || Ok(pipeline.run_query(&params.q)?)).await?;
    Ok(Json(result))
}

async fn cluster(
    State(pipeline): State<Pipeline>,
    body: Result<Json<ClusterRequest>, JsonRejection>,
) -> Result<Json<ClusterResult>, ApiError> {
    let Json(request) = body.map_err(|e| {
        ApiError::new(
            StatusCode::BAD_REQUEST,
            "bad-request",
            "parse",
            e.body_text(),
        )
    })?;
    let pipeline = with_scheme(&pipeline, parse_scheme(request.scheme.as_deref())?);
    let result = blocking(move || Ok(pipeline.cluster(&request.query, request.snippets))).await?;
    Ok(Json(result))
}

async fn health() -> Json<serde_json::Value> {
    Json(serde_json::json!({ "status": "ok" }))
}

pub fn router(pipeline: Pipeline) -> Router {
    Router::new()
        .route("/api/search", get(search))
        .route("/api/cluster", post(cluster))
        .route("/api/health", get(health))
        .with_state(pipeline)
}

/// Binds `addr` and serves until `shutdown` resolves. `on_bound` receives the
/// actual address, which matters when port 0 was requested.
pub async fn serve(
    pipeline: Pipeline,
    addr: SocketAddr,
    on_bound: impl FnOnce(SocketAddr),
    shutdown: impl std::future::Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    on_bound(listener.local_addr()?);
    axum::serve(listener, router(pipeline))
        .with_graceful_shutdown(shutdown)
        .await
}

/// Resolves on Ctrl-C or, on Unix, SIGTERM.
pub async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let term = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending::<()>().await,
        }
    };
    #[cfg(not(unix))]
    let term = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {},
        _ = term => {},
    }
}
