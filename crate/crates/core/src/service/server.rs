use std::future::Future;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::State;
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::bundle::{load_bundle, BundleError, ModelBundle};
use super::classify::{classify_batch, ClassifyRequest};

#[derive(Debug, Error)]
pub enum ServeError {
    #[error("cannot load bundle {path}: {source}")]
    BundleLoad { path: PathBuf, source: BundleError },
    #[error("cannot read bundle {path}: {source}")]
    BundleRead { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorDetail {
    pub code: String,
    pub message: String,
    pub line_or_index: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: ErrorDetail,
}

fn error_response(status: StatusCode, code: &str, message: String, index: Option<usize>) -> Response {
    let body = ErrorBody { error: ErrorDetail { code: code.to_string(), message, line_or_index: index } };
    (status, Json(body)).into_response()
}

async fn health(State(bundle): State<Arc<ModelBundle>>) -> Response {
    Json(serde_json::json!({ "status": "ok", "model_version": bundle.model_version() })).into_response()
}

async fn classify(State(bundle): State<Arc<ModelBundle>>, body: Bytes) -> Response {
    let request: ClassifyRequest = match serde_json::from_slice(&body) {
        Ok(r) => r,
        Err(e) => {
            return error_response(StatusCode::BAD_REQUEST, "malformed_json", e.to_string(), Some(e.line()));
        }
    };
    match classify_batch(&bundle, &request.samples) {
        Ok(resp) => {
            let bytes = serde_json::to_vec(&resp).expect("response serializes");
            ([(header::CONTENT_TYPE, "application/json")], bytes).into_response()
        }
        Err(e) => error_response(StatusCode::UNPROCESSABLE_ENTITY, e.code(), e.to_string(), Some(e.index())),
    }
}

/// `GET /v1/health` and `POST /v1/classify` over a shared, read-only bundle.
pub fn router(bundle: Arc<ModelBundle>) -> Router {
    Router::new().route("/v1/health", get(health)).route("/v1/classify", post(classify)).with_state(bundle)
}

/// Serves on an already-bound listener until `shutdown` resolves; in-flight
/// requests are allowed to finish.
pub async fn serve_on(
    listener: tokio::net::TcpListener,
    bundle: Arc<ModelBundle>,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    axum::serve(listener, router(bundle)).with_graceful_shutdown(shutdown).await
}

#[derive(Debug, Clone)]
pub struct ServeConfig {
    pub addr: SocketAddr,
    pub bundle_path: PathBuf,
}

/// Loads the bundle (refusing to start if it is unreadable) and serves until
/// Ctrl-C.
pub fn serve(config: &ServeConfig) -> Result<(), ServeError> {
    let bytes = std::fs::read(&config.bundle_path)
        .map_err(|source| ServeError::BundleRead { path: config.bundle_path.clone(), source })?;
    let bundle =
        load_bundle(&bytes).map_err(|source| ServeError::BundleLoad { path: config.bundle_path.clone(), source })?;
    let runtime = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind(config.addr).await?;
        eprintln!("serving model {} on http://{}", bundle.model_version(), listener.local_addr()?);
        serve_on(listener, Arc::new(bundle), async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
    })?;
    Ok(())
}
