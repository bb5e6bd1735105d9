//! HTTP/JSON facade over resolution sessions.
//!
//! Every successful response carries the full recomputed state. Errors
//! are `{"error": code, "detail": message}` with 400 for bad input, 404
//! for unknown sessions, 409 for choices the current state rejects and
//! 422 for programs that cannot be worked on.

mod error;
mod store;

use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use elp_resolve_core::conflict::Conflict;
use elp_resolve_core::graph::{Edge, Node};
use elp_resolve_core::session::{
    AppliedChoice, Selection, Session, SessionConfig, SessionFile, SessionState, Status, Step,
};
use elp_resolve_core::{parse_program, print_program, RuleId};
use serde::{Deserialize, Serialize};
use tower_http::services::ServeDir;

pub use error::{ApiError, ErrorBody};
pub use store::{SessionStore, Slot};

type ApiResult<T> = Result<T, ApiError>;

#[derive(Default)]
pub struct AppState {
    pub sessions: SessionStore,
}

/// The API routes, with `static_dir` (if any) served for every other path.
pub fn app(state: Arc<AppState>, static_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/health", get(|| async { "ok" }))
        .route("/sessions", post(create_session))
        .route("/sessions/import", post(import_session))
        .route("/sessions/{id}", get(get_session).delete(delete_session))
        .route("/sessions/{id}/graph", get(get_graph))
        .route("/sessions/{id}/choices", post(post_choice))
        .route("/sessions/{id}/selection", post(post_selection))
        .route("/sessions/{id}/undo", post(post_undo))
        .route("/sessions/{id}/program", get(get_program))
        .route("/sessions/{id}/export", get(get_export))
        .route("/sessions/{id}/uniform", get(get_uniform))
        .with_state(state);
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

#[derive(Serialize)]
pub struct GraphView<'a> {
    pub nodes: &'a [Node],
    pub edges: &'a [Edge],
}

/// The state payload: the session state plus the derived views a client
/// needs to render it without recomputing anything.
#[derive(Serialize)]
pub struct StateView<'a> {
    #[serde(flatten)]
    pub state: &'a SessionState,
    pub program: String,
    pub group_order: Vec<RuleId>,
    pub graph: GraphView<'a>,
    pub history: &'a [AppliedChoice],
    pub steps: &'a [Step],
}

impl<'a> StateView<'a> {
    pub fn of(s: &'a Session) -> Self {
        let state = s.state();
        Self {
            state,
            program: print_program(&state.current),
            group_order: state.group_order(),
            graph: GraphView {
                nodes: &state.graph.nodes,
                edges: &state.graph.edges,
            },
            history: s.history(),
            steps: s.steps(),
        }
    }
}

#[derive(Serialize)]
struct SessionResponse<'a> {
    id: String,
    state: StateView<'a>,
}

#[derive(Serialize)]
struct ChoiceResponse<'a> {
    state: StateView<'a>,
    resolved_now: &'a [Conflict],
}

#[derive(Deserialize)]
struct CreateRequest {
    program: String,
    #[serde(default)]
    cover: Option<usize>,
    #[serde(default)]
    clique_cover: Option<usize>,
}

#[derive(Deserialize)]
struct ChoiceRequest {
    extension: String,
    targets: Vec<RuleId>,
}

#[derive(Deserialize)]
struct SelectionRequest {
    #[serde(default)]
    cover: Option<usize>,
    #[serde(default)]
    clique_cover: Option<usize>,
}

#[derive(Deserialize)]
struct GraphQuery {
    #[serde(default = "default_format")]
    format: String,
}

fn default_format() -> String {
    "json".to_owned()
}

#[derive(Deserialize)]
struct UniformQuery {
    #[serde(default = "default_samples")]
    samples: usize,
    #[serde(default)]
    seed: u64,
}

fn default_samples() -> usize {
    1_000
}

fn slot(state: &AppState, id: &str) -> ApiResult<Arc<Slot>> {
    state
        .sessions
        .get(id)
        .ok_or_else(|| ApiError::not_found(id))
}

/// 201 for a workable session, 422 (with the state) for a blocked one.
fn created(state: &AppState, session: Session) -> Response {
    let status = if session.state().status == Status::Blocked {
        StatusCode::UNPROCESSABLE_ENTITY
    } else {
        StatusCode::CREATED
    };
    let id = state.sessions.insert(session);
    let snapshot = state
        .sessions
        .get(&id.to_string())
        .expect("just inserted")
        .snapshot();
    let body = SessionResponse {
        id: id.to_string(),
        state: StateView::of(&snapshot),
    };
    (status, Json(body)).into_response()
}

async fn create_session(
    State(state): State<Arc<AppState>>,
    body: Result<Json<CreateRequest>, JsonRejection>,
) -> ApiResult<Response> {
    let Json(req) = body?;
    let program = parse_program(&req.program)?;
    let config = SessionConfig {
        cover: req.cover.map_or(Selection::Auto, Selection::Index),
        clique_cover: req.clique_cover.map_or(Selection::Auto, Selection::Index),
        ..SessionConfig::default()
    };
    let session = Session::start(program, config)?;
    Ok(created(&state, session))
}

async fn import_session(
    State(state): State<Arc<AppState>>,
    body: Result<Json<SessionFile>, JsonRejection>,
) -> ApiResult<Response> {
    let Json(file) = body?;
    let session = Session::from_file(&file)?;
    Ok(created(&state, session))
}

async fn get_session(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> ApiResult<Response> {
    let snapshot = slot(&state, &id)?.snapshot();
    Ok(Json(SessionResponse {
        id,
        state: StateView::of(&snapshot),
    })
    .into_response())
}

async fn delete_session(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> ApiResult<StatusCode> {
    if state.sessions.remove(&id) {
        Ok(StatusCode::NO_CONTENT)
    } else {
        Err(ApiError::not_found(&id))
    }
}

async fn get_graph(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    query: Result<Query<GraphQuery>, QueryRejection>,
) -> ApiResult<Response> {
    let Query(q) = query?;
    let snapshot = slot(&state, &id)?.snapshot();
    let text = snapshot.state().graph.export(&q.format)?;
    let content_type = if q.format == "dot" {
        "text/vnd.graphviz; charset=utf-8"
    } else {
        "application/json"
    };
    Ok(([(header::CONTENT_TYPE, content_type)], text).into_response())
}

async fn post_choice(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Result<Json<ChoiceRequest>, JsonRejection>,
) -> ApiResult<Response> {
    let Json(req) = body?;
    let slot = slot(&state, &id)?;
    let (resolved_now, snapshot) = slot
        .mutate(|s| {
            s.choose(&req.extension, &req.targets)
                .map(|c| c.resolved_now.clone())
        })
        .await?;
    Ok(Json(ChoiceResponse {
        state: StateView::of(&snapshot),
        resolved_now: &resolved_now,
    })
    .into_response())
}

async fn post_selection(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Result<Json<SelectionRequest>, JsonRejection>,
) -> ApiResult<Response> {
    let Json(req) = body?;
    let slot = slot(&state, &id)?;
    let ((), snapshot) = slot
        .mutate(|s| {
            if let Some(i) = req.cover {
                s.select_cover(i)?;
            }
            if let Some(i) = req.clique_cover {
                s.select_clique_cover(i)?;
            }
            Ok(())
        })
        .await?;
    Ok(state_only(&snapshot))
}

async fn post_undo(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> ApiResult<Response> {
    let slot = slot(&state, &id)?;
    let ((), snapshot) = slot.mutate(Session::undo).await?;
    Ok(state_only(&snapshot))
}

fn state_only(s: &Session) -> Response {
    #[derive(Serialize)]
    struct Body<'a> {
        state: StateView<'a>,
    }
    Json(Body {
        state: StateView::of(s),
    })
    .into_response()
}

async fn get_program(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> ApiResult<Response> {
    let snapshot = slot(&state, &id)?.snapshot();
    let text = print_program(&snapshot.state().current);
    Ok(([(header::CONTENT_TYPE, "text/plain; charset=utf-8")], text).into_response())
}

async fn get_export(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> ApiResult<Json<SessionFile>> {
    let snapshot = slot(&state, &id)?.snapshot();
    Ok(Json(snapshot.to_file()))
}

async fn get_uniform(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    query: Result<Query<UniformQuery>, QueryRejection>,
) -> ApiResult<Response> {
    let Query(q) = query?;
    let snapshot = slot(&state, &id)?.snapshot();
    let report = snapshot.check_uniform(q.samples, q.seed)?;
    Ok(Json(report).into_response())
}
