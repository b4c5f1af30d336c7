//! HTTP/JSON search service over an [`IndexSnapshot`].
//!
//! Endpoints:
//!
//! * `GET /api/search` - results page, facets and refinement links
//! * `GET /api/doc/{id}` - one document in full
//! * `GET /api/meta` - document count, taxonomy drop-down options, snapshot version
//! * `GET /healthz`
//!
//! With a static directory configured, everything else is served from it.

pub mod api;

use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::{Arc, RwLock};

use axum::extract::{Path as UrlPath, RawQuery, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use gausseer_core::snapshot::SnapshotError;
use gausseer_core::IndexSnapshot;
use tower_http::services::ServeDir;

pub use api::{ApiError, DocDetail, MetaResponse, SearchParams, SearchResponse, PAGE_SIZE};

/// A snapshot together with the version number it was installed under.
pub struct Active {
    pub snapshot: IndexSnapshot,
    pub version: u64,
}

/// Holds the active snapshot. Readers clone the `Arc` and keep working on
/// it even if a new snapshot is swapped in meanwhile.
pub struct AppState {
    active: RwLock<Arc<Active>>,
}

impl AppState {
    pub fn new(snapshot: IndexSnapshot) -> Self {
        AppState {
            active: RwLock::new(Arc::new(Active { snapshot, version: 1 })),
        }
    }

    pub fn current(&self) -> Arc<Active> {
        Arc::clone(&self.active.read().expect("state lock poisoned"))
    }

    /// Installs `snapshot`, returning its version.
    pub fn swap(&self, snapshot: IndexSnapshot) -> u64 {
        let mut guard = self.active.write().expect("state lock poisoned");
        let version = guard.version + 1;
        *guard = Arc::new(Active { snapshot, version });
        version
    }

    pub fn reload_from(&self, path: &Path) -> Result<u64, SnapshotError> {
        let snapshot = IndexSnapshot::load(path)?;
        Ok(self.swap(snapshot))
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.status).unwrap_or(StatusCode::BAD_REQUEST);
        (status, Json(self)).into_response()
    }
}

async fn search(State(state): State<Arc<AppState>>, RawQuery(raw): RawQuery) -> Result<Json<SearchResponse>, ApiError> {
    let params = SearchParams::from_query_string(raw.as_deref().unwrap_or(""));
    let (query, page) = params.to_query()?;
    let active = state.current();
    Ok(Json(api::search_response(&active.snapshot, &query, page)))
}

async fn doc(State(state): State<Arc<AppState>>, UrlPath(id): UrlPath<String>) -> Result<Json<DocDetail>, ApiError> {
    let id: u64 = id
        .parse()
        .map_err(|_| ApiError::bad_request("InvalidId", format!("document id must be an integer, got {id:?}")))?;
    let active = state.current();
    Ok(Json(api::doc_detail(&active.snapshot, id)?))
}

async fn meta(State(state): State<Arc<AppState>>) -> Json<MetaResponse> {
    let active = state.current();
    Json(api::meta_response(&active.snapshot, active.version))
}

async fn healthz() -> &'static str {
    "ok"
}

pub fn router(state: Arc<AppState>, static_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/api/search", get(search))
        .route("/api/doc/{id}", get(doc))
        .route("/api/meta", get(meta))
        .route("/healthz", get(healthz))
        .with_state(state);
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

pub async fn serve(addr: SocketAddr, state: Arc<AppState>, static_dir: Option<PathBuf>) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(state, static_dir)).await
}
