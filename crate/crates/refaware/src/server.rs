//! REST API over a [`DocumentStore`].

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use serde::{Deserialize, Serialize};
use serde_json::json;
use tower_http::services::ServeDir;

use crate::error::{Error, Result};
use crate::report::{from_document, parse_report, to_canonical, ReviewEvent};
use crate::store::{DocumentStore, ReportKey, Stored};

type Store = Arc<dyn DocumentStore>;

pub struct ApiError(pub Error);

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        ApiError(e)
    }
}

fn status_of(e: &Error) -> StatusCode {
    match e {
        Error::NotFound(_) | Error::RevisionNotFound(_) | Error::FileNotFound { .. } => {
            StatusCode::NOT_FOUND
        }
        Error::Validation { .. } | Error::Config(_) | Error::EmptyChangeSet => {
            StatusCode::BAD_REQUEST
        }
        _ => StatusCode::INTERNAL_SERVER_ERROR,
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        if status_of(&self.0).is_server_error() {
            log::error!("{}", self.0);
        }
        document(status_of(&self.0), &self.0.document())
    }
}

fn document<T: Serialize>(status: StatusCode, body: &T) -> Response {
    (
        status,
        [(header::CONTENT_TYPE, "application/json")],
        to_canonical(body),
    )
        .into_response()
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> Result<T> + Send + 'static) -> Result<T> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| Error::Io(std::io::Error::other(e)))?
}

async fn put_report(
    State(store): State<Store>,
    Path((repo, change_set)): Path<(String, String)>,
    body: Bytes,
) -> Result<Response, ApiError> {
    let report = parse_report(&body)?;
    if report.repo_id != repo {
        return Err(
            Error::validation("repo_id", format!("does not match `{repo}` in the URL")).into(),
        );
    }
    if report.change_set_id != change_set {
        return Err(Error::validation(
            "change_set_id",
            format!("does not match `{change_set}` in the URL"),
        )
        .into());
    }
    let stored = blocking(move || store.store(&report)).await?;
    let status = match stored {
        Stored::Created => StatusCode::CREATED,
        Stored::Replaced => StatusCode::OK,
    };
    Ok(document(
        status,
        &json!({ "repo_id": repo, "change_set_id": change_set }),
    ))
}

async fn get_report(
    State(store): State<Store>,
    Path((repo, change_set)): Path<(String, String)>,
) -> Result<Response, ApiError> {
    let key = ReportKey::new(repo, change_set);
    let report = blocking(move || store.fetch(&key)).await?;
    Ok(document(StatusCode::OK, &report))
}

#[derive(Deserialize)]
struct PairQuery {
    pair: Option<String>,
}

async fn get_refactorings(
    State(store): State<Store>,
    Path((repo, change_set)): Path<(String, String)>,
    Query(q): Query<PairQuery>,
) -> Result<Response, ApiError> {
    let key = ReportKey::new(repo, change_set);
    let report = blocking(move || store.fetch(&key)).await?;
    let entry = match &q.pair {
        None => report
            .pairs
            .iter()
            .find(|p| p.pair.label == refaware_core::PairLabel::Main),
        Some(spec) => {
            let (before, after) = spec
                .split_once("..")
                .ok_or_else(|| Error::validation("pair", "expected `<before>..<after>`"))?;
            report.pair(before, after)
        }
    };
    let entry = entry
        .ok_or_else(|| Error::NotFound(format!("pair {}", q.pair.as_deref().unwrap_or("MAIN"))))?;
    Ok(document(
        StatusCode::OK,
        &json!({ "pair": entry.pair, "refactorings": entry.refactorings }),
    ))
}

async fn post_event(State(store): State<Store>, body: Bytes) -> Result<Response, ApiError> {
    let event: ReviewEvent = from_document(&body)?;
    let echo = event.clone();
    blocking(move || store.record_event(&event)).await?;
    Ok(document(StatusCode::CREATED, &echo))
}

async fn list_events(
    State(store): State<Store>,
    Path((repo, change_set)): Path<(String, String)>,
) -> Result<Response, ApiError> {
    let key = ReportKey::new(repo, change_set);
    let events = blocking(move || store.list_events(&key)).await?;
    Ok(document(StatusCode::OK, &events))
}

/// API routes, plus static files from `ui_dir` for every other path when given.
pub fn router(store: Store, ui_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route(
            "/api/v1/reports/{repo}/{change_set}",
            get(get_report).put(put_report),
        )
        .route(
            "/api/v1/reports/{repo}/{change_set}/refactorings",
            get(get_refactorings),
        )
        .route("/api/v1/events", post(post_event))
        .route("/api/v1/events/{repo}/{change_set}", get(list_events))
        .with_state(store);
    match ui_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

/// Serves until interrupted.
pub async fn serve(addr: SocketAddr, store: Store, ui_dir: Option<PathBuf>) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(store, ui_dir))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
