//! HTTP routes over a shared store.
//!
//! Readers take a snapshot `Arc<Store>` and never block each other. Ingests
//! are serialized by `writer`; each builds a staging store from a snapshot
//! and swaps it in only after it has been persisted.

use crate::config::ServiceConfig;
use crate::views::{canonical_json, entity_view, facets};
use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, Path as UrlPath, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use geokg_core::dgg::DggError;
use geokg_core::ingest::{stage, IngestError, Manifest};
use geokg_core::materialize::{MaterializeError, Vocabulary};
use geokg_core::query::{briefing_capped, execute, BriefingRequest, Query, QueryError};
use geokg_core::store::{PrefixTable, Store, StoreError, Term};
use serde_json::{json, Value};
use std::path::{Component, Path};
use std::sync::{Arc, RwLock};

const BODY_LIMIT: usize = 256 * 1024 * 1024;

pub struct AppState {
    pub config: ServiceConfig,
    pub vocab: Vocabulary,
    pub prefixes: PrefixTable,
    store: RwLock<Arc<Store>>,
    writer: tokio::sync::Mutex<()>,
}

impl AppState {
    pub fn new(config: ServiceConfig, store: Store) -> Arc<AppState> {
        Arc::new(AppState {
            config,
            vocab: Vocabulary::default(),
            prefixes: PrefixTable::default(),
            store: RwLock::new(Arc::new(store)),
            writer: tokio::sync::Mutex::new(()),
        })
    }

    /// State backed by the store persisted in the data directory, if any.
    pub fn open(config: ServiceConfig) -> Result<Arc<AppState>, StoreError> {
        let store = load_store(&config.store_path())?;
        Ok(AppState::new(config, store))
    }

    pub fn snapshot(&self) -> Arc<Store> {
        self.store.read().unwrap_or_else(|e| e.into_inner()).clone()
    }
}

pub fn load_store(path: &Path) -> Result<Store, StoreError> {
    let mut store = Store::new();
    if path.exists() {
        store.load_nquads(path)?;
    }
    Ok(store)
}

/// Writes beside the target and renames, so a crash never leaves a torn file.
pub fn persist_store(store: &Store, path: &Path) -> Result<(), StoreError> {
    let tmp = path.with_extension("nq.tmp");
    store.export_nquads(&tmp)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApiError {
    pub status: StatusCode,
    pub body: Value,
}

impl ApiError {
    fn new(status: StatusCode, message: impl ToString) -> ApiError {
        ApiError { status, body: json!({ "error": message.to_string() }) }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        json_response(self.status, canonical_json(&self.body))
    }
}

fn json_response(status: StatusCode, body: String) -> Response {
    (status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
}

impl From<QueryError> for ApiError {
    fn from(e: QueryError) -> ApiError {
        match &e {
            QueryError::Json { line, column, .. } => ApiError {
                status: StatusCode::BAD_REQUEST,
                body: json!({ "error": e.to_string(), "line": line, "column": column }),
            },
            QueryError::Grid(DggError::CoveringTooLarge { .. }) => ApiError::new(StatusCode::PAYLOAD_TOO_LARGE, e),
            QueryError::NoMetadata | QueryError::NoSpatialLinks(_) => ApiError::new(StatusCode::NOT_FOUND, e),
            _ => ApiError::new(StatusCode::BAD_REQUEST, e),
        }
    }
}

impl From<IngestError> for ApiError {
    fn from(e: IngestError) -> ApiError {
        match &e {
            IngestError::DuplicateDataset(_) | IngestError::Materialize(MaterializeError::DuplicateDataset(_)) => {
                ApiError::new(StatusCode::CONFLICT, e)
            }
            IngestError::Validation { report, limit } => ApiError {
                status: StatusCode::UNPROCESSABLE_ENTITY,
                body: json!({ "error": e.to_string(), "limit": limit, "report": report }),
            },
            IngestError::Materialize(MaterializeError::Grid(DggError::CoveringTooLarge { .. })) => {
                ApiError::new(StatusCode::PAYLOAD_TOO_LARGE, e)
            }
            _ => ApiError::new(StatusCode::BAD_REQUEST, e),
        }
    }
}

fn utf8(body: &Bytes) -> Result<&str, ApiError> {
    std::str::from_utf8(body).map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, format!("body is not UTF-8: {e}")))
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> T + Send + 'static) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f).await.map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e))
}

/// In-process equivalent of POST /query.
pub fn query_json(store: &Store, body: &str, prefixes: &PrefixTable) -> Result<String, ApiError> {
    let q = Query::from_json(body, prefixes)?;
    Ok(canonical_json(&execute(store, &q)?))
}

/// In-process equivalent of POST /briefing.
pub fn briefing_json(store: &Store, body: &str, prefixes: &PrefixTable, cap: usize) -> Result<String, ApiError> {
    let req = BriefingRequest::from_json(body, prefixes)?;
    Ok(canonical_json(&briefing_capped(store, &req, cap)?))
}

/// Manifest sources must stay inside the data directory.
fn check_source(m: &Manifest) -> Result<(), ApiError> {
    if let Some(src) = &m.source {
        let ok = Path::new(src).components().all(|c| matches!(c, Component::Normal(_) | Component::CurDir));
        if !ok {
            return Err(ApiError::new(StatusCode::BAD_REQUEST, format!("source {src:?} must be a relative path inside the data directory")));
        }
    }
    Ok(())
}

async fn ingest_handler(State(state): State<Arc<AppState>>, body: Bytes) -> Result<Response, ApiError> {
    let manifest = Manifest::from_json(utf8(&body)?)?;
    check_source(&manifest)?;
    let _writer = state.writer.lock().await;
    let snapshot = state.snapshot();
    let st = state.clone();
    let staged = blocking(move || {
        let staged = stage(&snapshot, &st.vocab, &manifest, &st.config.data_dir, &st.config.ingest_options())?;
        persist_store(&staged.store, &st.config.store_path())
            .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e))?;
        Ok::<_, ApiError>(staged)
    })
    .await??;
    *state.store.write().unwrap_or_else(|e| e.into_inner()) = Arc::new(staged.store);
    log::info!("ingested {} ({} statements)", staged.report.dataset_id, staged.report.triple_count);
    Ok(json_response(StatusCode::OK, canonical_json(&staged.report)))
}

async fn query_handler(State(state): State<Arc<AppState>>, body: Bytes) -> Result<Response, ApiError> {
    let text = utf8(&body)?.to_string();
    let store = state.snapshot();
    let out = blocking(move || query_json(&store, &text, &state.prefixes)).await??;
    Ok(json_response(StatusCode::OK, out))
}

async fn briefing_handler(State(state): State<Arc<AppState>>, body: Bytes) -> Result<Response, ApiError> {
    let text = utf8(&body)?.to_string();
    let store = state.snapshot();
    let out = blocking(move || briefing_json(&store, &text, &state.prefixes, state.config.covering_cap)).await??;
    Ok(json_response(StatusCode::OK, out))
}

async fn entity_handler(State(state): State<Arc<AppState>>, UrlPath(iri): UrlPath<String>) -> Result<Response, ApiError> {
    let resolved = state.prefixes.resolve(&iri).map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, e))?;
    let t = Term::iri(resolved).map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, e))?;
    let store = state.snapshot();
    match entity_view(&store, &t, &state.prefixes) {
        Some(v) => Ok(json_response(StatusCode::OK, canonical_json(&v))),
        None => Err(ApiError::new(StatusCode::NOT_FOUND, format!("unknown IRI {}", t.value()))),
    }
}

async fn facets_handler(State(state): State<Arc<AppState>>) -> Response {
    let store = state.snapshot();
    json_response(StatusCode::OK, canonical_json(&facets(&store, &state.prefixes)))
}

async fn health_handler(State(state): State<Arc<AppState>>) -> Response {
    let store = state.snapshot();
    json_response(StatusCode::OK, canonical_json(&json!({ "status": "ok", "statements": store.len() })))
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/ingest", post(ingest_handler))
        .route("/query", post(query_handler))
        .route("/briefing", post(briefing_handler))
        .route("/entity/{*iri}", get(entity_handler))
        .route("/facets", get(facets_handler))
        .route("/health", get(health_handler))
        .layer(DefaultBodyLimit::max(BODY_LIMIT))
        .with_state(state)
}

/// Serves until `shutdown` resolves, then drains in-flight requests.
pub async fn serve(
    state: Arc<AppState>,
    listener: tokio::net::TcpListener,
    shutdown: impl std::future::Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    axum::serve(listener, router(state)).with_graceful_shutdown(shutdown).await
}
