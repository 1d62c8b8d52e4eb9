//! The session protocol over HTTP. Sessions live in memory; requests on
//! one session are serialised by its lock, and model work runs on the
//! blocking pool so slow steps do not stall other sessions.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use itree_dsl::builtin::BUILTINS;
use serde::Deserialize;
use serde_json::json;

use crate::animation::{Animation, ApiError, PromptView, StartRequest};

type Shared = Arc<Mutex<Animation>>;

#[derive(Default)]
pub struct AppState {
    sessions: Mutex<BTreeMap<u64, Shared>>,
    next_id: AtomicU64,
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = match self.code {
            "unknown_session" | "unknown_model" => StatusCode::NOT_FOUND,
            "rejected" | "finished" | "not_running" => StatusCode::CONFLICT,
            "parse_error" | "elab_error" => StatusCode::UNPROCESSABLE_ENTITY,
            "internal" => StatusCode::INTERNAL_SERVER_ERROR,
            _ => StatusCode::BAD_REQUEST,
        };
        (status, Json(self.body())).into_response()
    }
}

fn lookup(state: &AppState, id: u64) -> Result<Shared, ApiError> {
    state
        .sessions
        .lock()
        .unwrap()
        .get(&id)
        .cloned()
        .ok_or_else(|| ApiError::new("unknown_session", format!("no session {id}")))
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> Result<T, ApiError> + Send + 'static) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::new("internal", e.to_string()))?
}

async fn on_session(
    state: &AppState,
    id: u64,
    f: impl FnOnce(&mut Animation) -> Result<PromptView, ApiError> + Send + 'static,
) -> Result<Json<PromptView>, ApiError> {
    let s = lookup(state, id)?;
    blocking(move || f(&mut s.lock().unwrap())).await.map(Json)
}

async fn create(State(state): State<Arc<AppState>>, body: Result<Json<StartRequest>, axum::extract::rejection::JsonRejection>) -> Result<Response, ApiError> {
    let Json(req) = body.map_err(|e| ApiError::new("bad_request", e.body_text()))?;
    // Over HTTP only built-in models and inline source are accepted.
    let (anim, prompt) = blocking(move || {
        let mut a = Animation::start(&req, false)?;
        let p = a.prompt();
        Ok((a, p))
    })
    .await?;
    let id = state.next_id.fetch_add(1, Ordering::Relaxed) + 1;
    state.sessions.lock().unwrap().insert(id, Arc::new(Mutex::new(anim)));
    Ok((StatusCode::CREATED, Json(json!({ "id": id, "prompt": prompt }))).into_response())
}

async fn show(State(state): State<Arc<AppState>>, Path(id): Path<u64>) -> Result<Json<PromptView>, ApiError> {
    on_session(&state, id, |a| Ok(a.prompt())).await
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct Choice {
    event_id: usize,
}

async fn choose(
    State(state): State<Arc<AppState>>,
    Path(id): Path<u64>,
    body: Result<Json<Choice>, axum::extract::rejection::JsonRejection>,
) -> Result<Json<PromptView>, ApiError> {
    let Json(c) = body.map_err(|e| ApiError::new("bad_request", e.body_text()))?;
    on_session(&state, id, move |a| a.choose(c.event_id)).await
}

async fn resume(State(state): State<Arc<AppState>>, Path(id): Path<u64>) -> Result<Json<PromptView>, ApiError> {
    on_session(&state, id, |a| a.resume()).await
}

async fn remove(State(state): State<Arc<AppState>>, Path(id): Path<u64>) -> Result<StatusCode, ApiError> {
    match state.sessions.lock().unwrap().remove(&id) {
        Some(_) => Ok(StatusCode::NO_CONTENT),
        None => Err(ApiError::new("unknown_session", format!("no session {id}"))),
    }
}

async fn models() -> Json<serde_json::Value> {
    let list: Vec<_> = BUILTINS.iter().map(|b| json!({ "name": b.name, "summary": b.summary })).collect();
    Json(json!(list))
}

pub fn router() -> Router {
    Router::new()
        .route("/models", get(models))
        .route("/sessions", post(create))
        .route("/sessions/{id}", get(show).delete(remove))
        .route("/sessions/{id}/choose", post(choose))
        .route("/sessions/{id}/continue", post(resume))
        .with_state(Arc::new(AppState::default()))
}

pub async fn serve(addr: std::net::SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router()).await
}
