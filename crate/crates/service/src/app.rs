use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderMap, HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::{Json, Router};
use chrono::Utc;
use guide_core::catalog::simplify;
use guide_core::engine::{self, PipelineConfig, RunFailure};
use guide_core::render::{layout_report, render_svg, RenderOptions};
use guide_core::{Catalog, ChatModel, Frame, SimplifiedCatalogView};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use tower_http::cors::{AllowOrigin, CorsLayer};
use tower_http::services::ServeDir;

use crate::error::ApiError;
use crate::store::{Project, ProjectStore};

#[derive(Debug, Clone, Default)]
pub struct ServiceConfig {
    /// Origins allowed by CORS; empty allows any.
    pub cors_origins: Vec<String>,
    /// Static UI bundle served under /ui when present.
    pub ui_dir: Option<PathBuf>,
    pub pipeline: PipelineConfig,
}

pub struct AppState {
    store: ProjectStore,
    catalog: Catalog,
    view: SimplifiedCatalogView,
    llm: Arc<dyn ChatModel>,
    pipeline: PipelineConfig,
    locks: Mutex<HashMap<String, Arc<tokio::sync::Mutex<()>>>>,
}

impl AppState {
    pub fn new(store: ProjectStore, catalog: Catalog, llm: Arc<dyn ChatModel>, pipeline: PipelineConfig) -> Self {
        let view = simplify(&catalog);
        AppState { store, catalog, view, llm, pipeline, locks: Mutex::new(HashMap::new()) }
    }

    pub fn store(&self) -> &ProjectStore {
        &self.store
    }

    pub fn catalog(&self) -> &Catalog {
        &self.catalog
    }

    fn lock_for(&self, project_id: &str) -> Arc<tokio::sync::Mutex<()>> {
        let mut locks = self.locks.lock().expect("lock table poisoned");
        locks.entry(project_id.to_string()).or_default().clone()
    }
}

type Shared = Arc<AppState>;

pub fn router(state: Shared, cfg: &ServiceConfig) -> Router {
    let origins = if cfg.cors_origins.is_empty() {
        AllowOrigin::any()
    } else {
        AllowOrigin::list(cfg.cors_origins.iter().filter_map(|o| HeaderValue::from_str(o).ok()))
    };
    let cors = CorsLayer::new()
        .allow_origin(origins)
        .allow_methods([Method::GET, Method::POST, Method::PUT, Method::DELETE])
        .allow_headers([header::CONTENT_TYPE, header::IF_MATCH])
        .expose_headers([header::ETAG]);

    let mut app = Router::new()
        .route("/health", get(health))
        .route("/projects", post(create_project).get(list_projects))
        .route("/projects/{id}", get(get_project))
        .route("/projects/{id}/decompose", post(decompose))
        .route("/projects/{id}/features", post(add_feature))
        .route("/projects/{id}/features/{fid}", put(edit_feature).delete(delete_feature))
        .route("/projects/{id}/generate", post(generate))
        .route("/projects/{id}/features/{fid}/regenerate", post(regenerate))
        .route("/projects/{id}/preview.svg", get(preview))
        .route("/projects/{id}/layout-report", get(layout))
        .route("/catalog/simplified", get(catalog_simplified))
        .route("/catalog/components/{type_name}", get(catalog_component))
        .fallback(|| async { ApiError::not_found("no such endpoint") });
    if let Some(dir) = &cfg.ui_dir {
        app = app.nest_service("/ui", ServeDir::new(dir));
    }
    app.layer(cors).with_state(state)
}

fn parse_body<T: DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request(format!("invalid request body: {e}")))
}

fn project_response(status: StatusCode, project: &Project) -> Response {
    let etag = format!("\"{}\"", project.document.revision);
    (status, [(header::ETAG, etag)], Json(project)).into_response()
}

/// Revision named by `If-Match`, if any.
fn expected_revision(headers: &HeaderMap) -> Result<Option<u64>, ApiError> {
    let Some(value) = headers.get(header::IF_MATCH) else {
        return Ok(None);
    };
    let text = value.to_str().map_err(|_| ApiError::bad_request("If-Match is not ASCII"))?;
    let text = text.trim().trim_start_matches("W/").trim_matches('"');
    text.parse()
        .map(Some)
        .map_err(|_| ApiError::bad_request(format!("If-Match `{text}` is not a revision number")))
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> Result<T, ApiError> + Send + 'static) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::internal(format!("worker failed: {e}")))?
}

/// Loads, applies `op` and persists under the project's write lock. A second
/// writer arriving while the lock is held gets 409. Traces recorded by a
/// failing `op` are persisted too.
async fn mutate(
    state: Shared,
    id: String,
    headers: &HeaderMap,
    op: impl FnOnce(&AppState, &mut Project) -> Result<(), ApiError> + Send + 'static,
) -> Result<Project, ApiError> {
    let expected = expected_revision(headers)?;
    let lock = state.lock_for(&id);
    let _guard = lock
        .try_lock_owned()
        .map_err(|_| ApiError::conflict(format!("project {id} is being modified by another request")))?;
    blocking(move || {
        let mut project = state.store.load(&id, &state.catalog)?;
        if let Some(rev) = expected {
            if rev != project.document.revision {
                return Err(ApiError::conflict(format!(
                    "revision {rev} is stale; the project is at revision {}",
                    project.document.revision
                )));
            }
        }
        let before = project.clone();
        let result = op(&state, &mut project);
        if project != before {
            project.updated_at = Utc::now();
            state.store.persist(&project, &state.catalog)?;
        }
        result.map(|()| project)
    })
    .await
}

fn absorb(project: &mut Project, failure: RunFailure) -> ApiError {
    project.traces.extend(failure.traces);
    ApiError::from(failure.error)
}

async fn health() -> Json<serde_json::Value> {
    Json(serde_json::json!({"status": "ok"}))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CreateProject {
    description: String,
    #[serde(default)]
    frame: Option<Frame>,
}

async fn create_project(State(state): State<Shared>, body: Bytes) -> Result<Response, ApiError> {
    let req: CreateProject = parse_body(&body)?;
    let project = blocking(move || {
        let doc = engine::new_document(&req.description, req.frame.unwrap_or_default())?;
        let now = Utc::now();
        let project = Project {
            project_id: format!("p-{}", uuid::Uuid::new_v4().simple()),
            document: doc,
            traces: Vec::new(),
            created_at: now,
            updated_at: now,
        };
        state.store.persist(&project, &state.catalog)?;
        Ok(project)
    })
    .await?;
    Ok(project_response(StatusCode::CREATED, &project))
}

#[derive(Serialize)]
struct ProjectList {
    projects: Vec<String>,
}

async fn list_projects(State(state): State<Shared>) -> Result<Json<ProjectList>, ApiError> {
    let projects = blocking(move || Ok(state.store.list_ids()?)).await?;
    Ok(Json(ProjectList { projects }))
}

async fn get_project(State(state): State<Shared>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let project = blocking(move || Ok(state.store.load(&id, &state.catalog)?)).await?;
    Ok(project_response(StatusCode::OK, &project))
}

async fn decompose(State(state): State<Shared>, Path(id): Path<String>, headers: HeaderMap) -> Result<Response, ApiError> {
    let project = mutate(state, id, &headers, |st, p| {
        match engine::decompose_into(&p.document, &st.pipeline, st.llm.as_ref()) {
            Ok((doc, traces)) => {
                p.document = doc;
                p.traces.extend(traces);
                Ok(())
            }
            Err(failure) => Err(absorb(p, failure)),
        }
    })
    .await?;
    Ok(project_response(StatusCode::OK, &project))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct NewFeature {
    name: String,
    description: String,
}

async fn add_feature(
    State(state): State<Shared>,
    Path(id): Path<String>,
    headers: HeaderMap,
    body: Bytes,
) -> Result<Response, ApiError> {
    let req: NewFeature = parse_body(&body)?;
    let project = mutate(state, id, &headers, move |_, p| {
        let (doc, _) = engine::add_feature(&p.document, &req.name, &req.description)?;
        p.document = doc;
        Ok(())
    })
    .await?;
    Ok(project_response(StatusCode::CREATED, &project))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FeatureEdit {
    #[serde(default)]
    name: Option<String>,
    #[serde(default)]
    description: Option<String>,
}

async fn edit_feature(
    State(state): State<Shared>,
    Path((id, fid)): Path<(String, String)>,
    headers: HeaderMap,
    body: Bytes,
) -> Result<Response, ApiError> {
    let req: FeatureEdit = parse_body(&body)?;
    if req.name.is_none() && req.description.is_none() {
        return Err(ApiError::bad_request("nothing to change: give a name and/or a description"));
    }
    let project = mutate(state, id, &headers, move |_, p| {
        p.document = engine::edit_feature(&p.document, &fid, req.name.as_deref(), req.description.as_deref())?;
        Ok(())
    })
    .await?;
    Ok(project_response(StatusCode::OK, &project))
}

async fn delete_feature(
    State(state): State<Shared>,
    Path((id, fid)): Path<(String, String)>,
    headers: HeaderMap,
) -> Result<Response, ApiError> {
    let project = mutate(state, id, &headers, move |_, p| {
        p.document = engine::delete_feature(&p.document, &fid)?;
        Ok(())
    })
    .await?;
    Ok(project_response(StatusCode::OK, &project))
}

async fn generate(State(state): State<Shared>, Path(id): Path<String>, headers: HeaderMap) -> Result<Response, ApiError> {
    let project = mutate(state, id, &headers, |st, p| {
        match engine::generate_pending(&p.document, &st.catalog, &st.pipeline, st.llm.as_ref()) {
            Ok((doc, traces)) => {
                p.document = doc;
                p.traces.extend(traces);
                Ok(())
            }
            Err(failure) => Err(absorb(p, failure)),
        }
    })
    .await?;
    Ok(project_response(StatusCode::OK, &project))
}

async fn regenerate(
    State(state): State<Shared>,
    Path((id, fid)): Path<(String, String)>,
    headers: HeaderMap,
) -> Result<Response, ApiError> {
    let project = mutate(state, id, &headers, move |st, p| {
        match engine::regenerate_feature(&p.document, &fid, &st.catalog, &st.pipeline, st.llm.as_ref()) {
            Ok((doc, traces)) => {
                p.document = doc;
                p.traces.extend(traces);
                Ok(())
            }
            Err(failure) => Err(absorb(p, failure)),
        }
    })
    .await?;
    Ok(project_response(StatusCode::OK, &project))
}

#[derive(Debug, Deserialize)]
struct PreviewQuery {
    #[serde(default)]
    scale: Option<f64>,
    #[serde(default)]
    outlines: Option<bool>,
}

async fn preview(
    State(state): State<Shared>,
    Path(id): Path<String>,
    Query(q): Query<PreviewQuery>,
) -> Result<Response, ApiError> {
    let svg = blocking(move || {
        let project = state.store.load(&id, &state.catalog)?;
        let defaults = RenderOptions::default();
        let opts = RenderOptions {
            scale: q.scale.unwrap_or(defaults.scale),
            show_feature_outlines: q.outlines.unwrap_or(defaults.show_feature_outlines),
            ..defaults
        };
        Ok(render_svg(&project.document, &state.catalog, &opts)?)
    })
    .await?;
    Ok(([(header::CONTENT_TYPE, "image/svg+xml")], svg).into_response())
}

async fn layout(State(state): State<Shared>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let report = blocking(move || Ok(layout_report(&state.store.load(&id, &state.catalog)?.document))).await?;
    Ok(Json(report).into_response())
}

async fn catalog_simplified(State(state): State<Shared>) -> Json<SimplifiedCatalogView> {
    Json(state.view.clone())
}

async fn catalog_component(State(state): State<Shared>, Path(type_name): Path<String>) -> Result<Response, ApiError> {
    let spec = state
        .catalog
        .get(&type_name)
        .ok_or_else(|| ApiError::not_found(format!("unknown component type `{type_name}`")))?;
    Ok(Json(spec).into_response())
}
