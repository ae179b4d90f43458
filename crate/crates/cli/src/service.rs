//! Local HTTP session API.
//!
//! A session is just the list of values chosen so far; its state is rebuilt
//! by replaying them through the interpreter on every request, so the same
//! sequence of choices always yields the same state.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use trickcheck::ctl::{build_tree, explain, CtlFormula};
use trickcheck::dsl::{parse, pretty_print};
use trickcheck::trick::{
    Action, Answer, CheckpointState, ChoiceBinding, ChoiceKind, ExecError, Execution,
};
use trickcheck::{CardSymbol, Deck, ExecConfig, SlotMode, TrickProgram};
use uuid::Uuid;

struct AppState {
    program: TrickProgram,
    config: ExecConfig,
    sessions: Mutex<HashMap<String, Vec<u32>>>,
}

type Shared = Arc<AppState>;

pub fn router(program: TrickProgram, config: ExecConfig) -> Router {
    let state = Arc::new(AppState { program, config, sessions: Mutex::new(HashMap::new()) });
    Router::new()
        .route("/api/session", post(create_session))
        .route("/api/session/{id}", get(get_session))
        .route("/api/session/{id}/choose", post(choose))
        .route("/api/check", post(check))
        .route("/api/trick", get(trick))
        .with_state(state)
}

struct ApiError(StatusCode, String);

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(json!({ "error": self.1 }))).into_response()
    }
}

fn unprocessable(msg: impl ToString) -> ApiError {
    ApiError(StatusCode::UNPROCESSABLE_ENTITY, msg.to_string())
}

#[derive(Debug, Serialize)]
pub struct PendingView {
    pub name: String,
    pub kind: ChoiceKind,
    pub prompt: &'static str,
    pub domain: Vec<u32>,
    /// Spectator-facing names for the domain values, where they exist.
    pub labels: Vec<Option<&'static str>>,
}

#[derive(Debug, Serialize)]
pub struct SessionView {
    pub session_id: String,
    pub deck: Deck,
    /// Revealed only once the walkthrough is complete.
    pub hidden: Option<CardSymbol>,
    pub binding: ChoiceBinding,
    pub pending: Option<PendingView>,
    pub checkpoints: Vec<CheckpointState>,
    pub actions: Vec<Action>,
    pub done: bool,
    #[serde(rename = "final")]
    pub final_answer: Option<Answer>,
}

/// Replays `choices` and renders the resulting state.
fn replay<'a>(state: &'a AppState, choices: &[u32]) -> Result<Execution<'a>, ExecError> {
    let mut exec = Execution::new(&state.program, state.config);
    for &value in choices {
        exec.resume()?;
        exec.choose(value)?;
    }
    exec.resume()?;
    Ok(exec)
}

fn view(id: &str, exec: &Execution<'_>) -> SessionView {
    let record = exec.record();
    let pending = exec.pending().map(|req| PendingView {
        name: req.name.clone(),
        kind: req.kind,
        prompt: req.kind.prompt(),
        domain: req.domain.clone(),
        labels: req.domain.iter().map(|&v| req.kind.value_label(v)).collect(),
    });
    SessionView {
        session_id: id.to_string(),
        deck: exec.deck().clone(),
        hidden: record.map(|r| r.hidden),
        binding: exec.binding(),
        pending,
        checkpoints: exec.checkpoints().to_vec(),
        actions: exec.actions().to_vec(),
        done: record.is_some(),
        final_answer: record.map(|r| r.final_answer),
    }
}

fn internal(e: ExecError) -> ApiError {
    ApiError(StatusCode::INTERNAL_SERVER_ERROR, e.to_string())
}

async fn create_session(State(state): State<Shared>) -> Result<(StatusCode, Json<SessionView>), ApiError> {
    let id = Uuid::new_v4().to_string();
    let exec = replay(&state, &[]).map_err(internal)?;
    let body = view(&id, &exec);
    state.sessions.lock().expect("session lock").insert(id, Vec::new());
    Ok((StatusCode::CREATED, Json(body)))
}

async fn get_session(State(state): State<Shared>, Path(id): Path<String>) -> Result<Json<SessionView>, ApiError> {
    let choices = state.sessions.lock().expect("session lock").get(&id).cloned();
    let choices = choices.ok_or_else(|| ApiError(StatusCode::NOT_FOUND, format!("no session `{id}`")))?;
    let exec = replay(&state, &choices).map_err(internal)?;
    Ok(Json(view(&id, &exec)))
}

#[derive(Debug, Deserialize)]
struct ChooseRequest {
    /// A number, or a label such as "southerner" or "male".
    value: Value,
}

async fn choose(
    State(state): State<Shared>,
    Path(id): Path<String>,
    Json(req): Json<ChooseRequest>,
) -> Result<Json<SessionView>, ApiError> {
    // hold the lock for the whole step so choices on one session serialize
    let mut sessions = state.sessions.lock().expect("session lock");
    let choices = sessions.get_mut(&id).ok_or_else(|| ApiError(StatusCode::NOT_FOUND, format!("no session `{id}`")))?;
    let mut exec = replay(&state, choices).map_err(internal)?;
    let Some(pending) = exec.pending().cloned() else {
        return Err(ApiError(StatusCode::CONFLICT, "session is complete".into()));
    };
    let value = match &req.value {
        Value::Number(n) => n.as_u64().and_then(|n| u32::try_from(n).ok()),
        Value::String(s) => pending.kind.parse_value(s),
        _ => None,
    };
    let value = value.ok_or_else(|| unprocessable(format!("`{}` is not a value for `{}`", req.value, pending.name)))?;
    exec.choose(value).map_err(unprocessable)?;
    exec.resume().map_err(internal)?;
    choices.push(value);
    Ok(Json(view(&id, &exec)))
}

#[derive(Debug, Deserialize)]
struct CheckRequest {
    /// Script text; the served trick when absent.
    trick: Option<String>,
    formula: String,
    #[serde(default)]
    slot_mode: Option<SlotMode>,
}

async fn check(State(state): State<Shared>, Json(req): Json<CheckRequest>) -> Result<Json<Value>, ApiError> {
    let formula: CtlFormula = req.formula.parse().map_err(unprocessable)?;
    let program = match &req.trick {
        Some(text) => parse(text).map_err(unprocessable)?,
        None => state.program.clone(),
    };
    let config = req.slot_mode.map_or(state.config, |slot_mode| ExecConfig { slot_mode });
    let tree = build_tree(&program, config).map_err(unprocessable)?;
    let verdict = tree.eval(&formula);
    let mut body = serde_json::to_value(&verdict).expect("verdicts serialize");
    if let Ok(explanation) = explain(&verdict) {
        body["explanation"] = Value::String(explanation.text);
    }
    Ok(Json(body))
}

async fn trick(State(state): State<Shared>) -> Json<Value> {
    Json(json!({ "script": pretty_print(&state.program) }))
}
