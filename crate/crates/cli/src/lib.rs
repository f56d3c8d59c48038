//! HTTP front end for a single matchwork project directory.
//!
//! Request and response bodies are JSON; LF specs travel as TOML text inside
//! them, exactly as stored on disk. Mutations are serialized through one
//! write lock per project and reads share it.

use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, RwLock};

use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use matchwork_core::lf::{Diagnostic, LabelFunctionSpec};
use matchwork_core::workbench::{DrillKind, LabelAction, Project, ProjectConfig, SampleKind};
use matchwork_core::Error;
use serde::{Deserialize, Serialize};

#[derive(Clone)]
pub struct AppState {
    inner: Arc<Shared>,
}

struct Shared {
    root: PathBuf,
    project: RwLock<Option<Project>>,
    applying: AtomicBool,
}

impl AppState {
    /// Serves the project at `root`, opening it if it already exists.
    pub fn new(root: impl Into<PathBuf>) -> Result<Self, Error> {
        let root = root.into();
        let project = match Project::open(&root) {
            Ok(p) => Some(p),
            Err(Error::NoProject(_)) => None,
            Err(e) => return Err(e),
        };
        Ok(Self {
            inner: Arc::new(Shared {
                root,
                project: RwLock::new(project),
                applying: AtomicBool::new(false),
            }),
        })
    }

    /// Runs `f` on a blocking thread with shared access to the project.
    async fn read<T, F>(&self, f: F) -> Result<T, ApiError>
    where
        T: Send + 'static,
        F: FnOnce(&Project) -> Result<T, Error> + Send + 'static,
    {
        let inner = self.inner.clone();
        tokio::task::spawn_blocking(move || {
            let guard = inner.project.read().expect("project lock");
            let project = guard.as_ref().ok_or_else(|| Error::NoProject(inner.root.clone()))?;
            f(project).map_err(ApiError::from)
        })
        .await
        .map_err(ApiError::internal)?
    }

    async fn write<T, F>(&self, f: F) -> Result<T, ApiError>
    where
        T: Send + 'static,
        F: FnOnce(&mut Project) -> Result<T, Error> + Send + 'static,
    {
        let inner = self.inner.clone();
        tokio::task::spawn_blocking(move || {
            let mut guard = inner.project.write().expect("project lock");
            let project = guard.as_mut().ok_or_else(|| Error::NoProject(inner.root.clone()))?;
            f(project).map_err(ApiError::from)
        })
        .await
        .map_err(ApiError::internal)?
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/status", get(status))
        .route("/api/project", post(create_project))
        .route("/api/stats", get(stats))
        .route("/api/lfs", get(list_lfs).post(upsert_lf))
        .route("/api/lfs/{name}", get(get_lf).put(put_lf).delete(delete_lf))
        .route("/api/lf-stats", get(lf_stats))
        .route("/api/apply", post(apply))
        .route("/api/sample", get(sample))
        .route("/api/labels", post(label))
        .route("/api/drilldown/{name}", get(drilldown))
        .route("/api/trace", post(trace))
        .route("/api/pairs", get(pairs))
        .route("/api/export", get(export))
        .with_state(state)
}

#[derive(Debug, Serialize)]
struct ErrorBody {
    error: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    diagnostics: Vec<Diagnostic>,
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: ErrorBody,
}

impl ApiError {
    fn internal(e: impl std::fmt::Display) -> Self {
        Self {
            status: StatusCode::INTERNAL_SERVER_ERROR,
            body: ErrorBody { error: e.to_string(), diagnostics: Vec::new() },
        }
    }

    fn bad_request(message: impl Into<String>) -> Self {
        Self {
            status: StatusCode::BAD_REQUEST,
            body: ErrorBody { error: message.into(), diagnostics: Vec::new() },
        }
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::NoProject(_) | Error::UnknownLf(_) | Error::UnknownPair(..) | Error::FileNotFound(_) => {
                StatusCode::NOT_FOUND
            }
            Error::ProjectExists(_) | Error::NoLfs | Error::NoUsableLfs | Error::NoPosterior | Error::NoPredictedMatches => {
                StatusCode::CONFLICT
            }
            Error::InvalidSpec(_) => StatusCode::UNPROCESSABLE_ENTITY,
            Error::Parse { .. }
            | Error::InvalidParameter(_)
            | Error::DuplicateId { .. }
            | Error::MissingIdColumn { .. }
            | Error::EmptyTable(_)
            | Error::DanglingId { .. }
            | Error::Embedding(_) => StatusCode::BAD_REQUEST,
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        let diagnostics = match &e {
            Error::InvalidSpec(d) => d.clone(),
            _ => Vec::new(),
        };
        Self {
            status,
            body: ErrorBody { error: e.to_string(), diagnostics },
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

#[derive(Serialize)]
struct Status {
    project: bool,
    applying: bool,
}

async fn status(State(state): State<AppState>) -> Json<Status> {
    let inner = state.inner.clone();
    // try_read: a running apply holds the lock, and status must not wait on it
    let project = match inner.project.try_read() {
        Ok(guard) => guard.is_some(),
        Err(_) => true,
    };
    Json(Status { project, applying: inner.applying.load(Ordering::SeqCst) })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateRequest {
    pub left_path: PathBuf,
    pub right_path: PathBuf,
    #[serde(default = "default_id_column")]
    pub id_column: String,
    /// `config.toml` contents; defaults apply when absent.
    #[serde(default)]
    pub config: Option<String>,
    #[serde(default)]
    pub matches_path: Option<PathBuf>,
}

fn default_id_column() -> String {
    "id".into()
}

async fn create_project(
    State(state): State<AppState>,
    Json(req): Json<CreateRequest>,
) -> Result<Response, ApiError> {
    let inner = state.inner.clone();
    tokio::task::spawn_blocking(move || {
        let mut guard = inner.project.write().expect("project lock");
        if guard.is_some() {
            return Err(Error::ProjectExists(inner.root.clone()).into());
        }
        let config = match &req.config {
            Some(text) => ProjectConfig::from_toml(text)?,
            None => ProjectConfig::default(),
        };
        let (project, report) = Project::create(
            &inner.root,
            &req.left_path,
            &req.right_path,
            &req.id_column,
            config,
            req.matches_path.as_deref(),
        )?;
        *guard = Some(project);
        Ok((StatusCode::CREATED, Json(report)).into_response())
    })
    .await
    .map_err(ApiError::internal)?
}

async fn stats(State(state): State<AppState>) -> ApiResult<matchwork_core::workbench::EmStats> {
    state.read(|p| Ok(p.stats())).await.map(Json)
}

async fn list_lfs(State(state): State<AppState>) -> ApiResult<Vec<matchwork_core::workbench::LfEntry>> {
    state.read(|p| Ok(p.list_lfs())).await.map(Json)
}

async fn get_lf(State(state): State<AppState>, Path(name): Path<String>) -> ApiResult<matchwork_core::workbench::LfEntry> {
    state
        .read(move |p| {
            p.get_lf(&name)?;
            Ok(p.list_lfs().into_iter().find(|e| e.name == name).expect("listed"))
        })
        .await
        .map(Json)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecBody {
    /// LF spec as TOML text.
    pub spec: String,
}

async fn upsert_lf(State(state): State<AppState>, Json(body): Json<SpecBody>) -> ApiResult<matchwork_core::workbench::LfEntry> {
    state.write(move |p| p.upsert_lf_toml(&body.spec)).await.map(Json)
}

async fn put_lf(
    State(state): State<AppState>,
    Path(name): Path<String>,
    Json(body): Json<SpecBody>,
) -> ApiResult<matchwork_core::workbench::LfEntry> {
    let spec = LabelFunctionSpec::from_toml(&body.spec).map_err(ApiError::from)?;
    if spec.name != name {
        return Err(ApiError::bad_request(format!("spec is named {:?}, not {name:?}", spec.name)));
    }
    state.write(move |p| p.upsert_lf(spec)).await.map(Json)
}

async fn delete_lf(State(state): State<AppState>, Path(name): Path<String>) -> Result<StatusCode, ApiError> {
    state.write(move |p| p.delete_lf(&name)).await?;
    Ok(StatusCode::NO_CONTENT)
}

async fn lf_stats(State(state): State<AppState>) -> ApiResult<Vec<matchwork_core::workbench::LfStats>> {
    state.read(|p| Ok(p.lf_stats())).await.map(Json)
}

async fn apply(State(state): State<AppState>) -> ApiResult<matchwork_core::workbench::ApplyOutcome> {
    let flag = state.inner.clone();
    flag.applying.store(true, Ordering::SeqCst);
    let result = state.write(|p| p.apply_and_fit()).await;
    flag.applying.store(false, Ordering::SeqCst);
    result.map(Json)
}

#[derive(Debug, Deserialize)]
struct SampleQuery {
    kind: SampleKind,
    n: Option<usize>,
}

async fn sample(
    State(state): State<AppState>,
    Query(q): Query<SampleQuery>,
) -> ApiResult<Vec<matchwork_core::workbench::PairRecord>> {
    state
        .write(move |p| {
            let n = q.n.unwrap_or(p.config().model.precision_sample_size);
            p.get_sample(q.kind, n)
        })
        .await
        .map(Json)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabelBody {
    pub left_id: String,
    pub right_id: String,
    pub value: LabelAction,
}

async fn label(State(state): State<AppState>, Json(body): Json<LabelBody>) -> ApiResult<matchwork_core::workbench::EmStats> {
    state
        .write(move |p| p.label_pair(&body.left_id, &body.right_id, body.value))
        .await
        .map(Json)
}

#[derive(Debug, Deserialize)]
struct DrillQuery {
    kind: DrillKind,
}

async fn drilldown(
    State(state): State<AppState>,
    Path(name): Path<String>,
    Query(q): Query<DrillQuery>,
) -> ApiResult<Vec<matchwork_core::workbench::PairRecord>> {
    state.read(move |p| p.drilldown(&name, q.kind)).await.map(Json)
}

/// Dry run of a stored LF (`lf`) or of an unsaved spec (`spec`) on one pair.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceBody {
    #[serde(default)]
    pub lf: Option<String>,
    #[serde(default)]
    pub spec: Option<String>,
    pub left_id: String,
    pub right_id: String,
}

async fn trace(State(state): State<AppState>, Json(body): Json<TraceBody>) -> ApiResult<matchwork_core::lf::LfTrace> {
    let spec = match (&body.lf, &body.spec) {
        (Some(_), None) => None,
        (None, Some(text)) => Some(LabelFunctionSpec::from_toml(text).map_err(ApiError::from)?),
        _ => return Err(ApiError::bad_request("give exactly one of `lf` and `spec`")),
    };
    state
        .read(move |p| match spec {
            Some(spec) => {
                let diagnostics = matchwork_core::lf::validate(&spec, p.tables().schema());
                if !diagnostics.is_empty() {
                    return Err(Error::InvalidSpec(diagnostics));
                }
                p.trace_spec(&spec, &body.left_id, &body.right_id)
            }
            None => p.trace(body.lf.as_deref().expect("checked"), &body.left_id, &body.right_id),
        })
        .await
        .map(Json)
}

#[derive(Debug, Deserialize)]
struct PageQuery {
    #[serde(default)]
    offset: usize,
    #[serde(default = "default_limit")]
    limit: usize,
}

fn default_limit() -> usize {
    50
}

/// One page of candidate pairs, for the data viewer.
#[derive(Debug, Serialize)]
struct PairPage {
    total: usize,
    pairs: Vec<matchwork_core::PairView>,
}

async fn pairs(State(state): State<AppState>, Query(q): Query<PageQuery>) -> ApiResult<PairPage> {
    state
        .read(move |p| {
            let pairs = p
                .candidates()
                .iter()
                .skip(q.offset)
                .take(q.limit.min(1000))
                .map(|pair| matchwork_core::pair_view(pair, p.tables()))
                .collect::<Result<_, _>>()?;
            Ok(PairPage { total: p.candidates().len(), pairs })
        })
        .await
        .map(Json)
}

async fn export(State(state): State<AppState>) -> Result<Response, ApiError> {
    let body = state
        .read(|p| {
            let mut out = Vec::new();
            p.export_matches(&mut out)?;
            Ok(out)
        })
        .await?;
    Ok(([(header::CONTENT_TYPE, "text/csv; charset=utf-8")], body).into_response())
}
