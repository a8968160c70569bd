//! HTTP query service: `POST /ask` and `GET /health`.

use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::json;

use kgnav::pipeline::{AnswerSummary, PipelineDeps};
use kgnav::Error;

#[derive(Deserialize)]
struct AskBody {
    question: String,
}

fn error_response(status: StatusCode, name: &str, message: impl std::fmt::Display) -> Response {
    (status, Json(json!({ "error": name, "message": message.to_string() }))).into_response()
}

/// HTTP status for a pipeline failure.
pub fn status_for(err: &Error) -> StatusCode {
    match err {
        Error::NoEntity | Error::EmptyCandidates(_) => StatusCode::UNPROCESSABLE_ENTITY,
        Error::Transport(_) | Error::Protocol { .. } => StatusCode::BAD_GATEWAY,
        Error::Request(_) => StatusCode::BAD_REQUEST,
        _ => StatusCode::INTERNAL_SERVER_ERROR,
    }
}

async fn ask(State(deps): State<Arc<PipelineDeps>>, body: Bytes) -> Response {
    let body: AskBody = match serde_json::from_slice(&body) {
        Ok(b) => b,
        Err(e) => return error_response(StatusCode::BAD_REQUEST, "BadRequest", e),
    };
    if body.question.trim().is_empty() {
        return error_response(StatusCode::BAD_REQUEST, "BadRequest", "question must not be empty");
    }
    // The pipeline performs blocking I/O in remote mode.
    let result = tokio::task::spawn_blocking(move || deps.answer(&body.question)).await;
    match result {
        Ok(Ok(set)) => Json(AnswerSummary::from(&set)).into_response(),
        Ok(Err(e)) => {
            tracing::debug!(error = %e, "ask failed");
            error_response(status_for(&e), e.name(), &e)
        }
        Err(e) => error_response(StatusCode::INTERNAL_SERVER_ERROR, "InternalError", e),
    }
}

async fn health() -> Json<serde_json::Value> {
    Json(json!({ "status": "ok" }))
}

pub fn router(deps: Arc<PipelineDeps>) -> Router {
    Router::new()
        .route("/ask", post(ask))
        .route("/health", get(health))
        .with_state(deps)
}

/// Serves until the listener fails or `shutdown` resolves.
pub async fn serve(
    listener: tokio::net::TcpListener,
    deps: Arc<PipelineDeps>,
    shutdown: impl std::future::Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    axum::serve(listener, router(deps))
        .with_graceful_shutdown(shutdown)
        .await
}
