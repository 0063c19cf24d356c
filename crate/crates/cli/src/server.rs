//! The session HTTP/JSON API.
//!
//! | method | path                        | reply                      |
//! |--------|-----------------------------|----------------------------|
//! | POST   | `/api/sessions`             | 201 `{id, steps, outcome}` |
//! | GET    | `/api/sessions/{id}`        | current step view          |
//! | POST   | `/api/sessions/{id}/step`   | step view after moving     |
//! | DELETE | `/api/sessions/{id}`        | 204                        |
//! | GET    | `/api/machines/examples`    | bundled machines           |
//!
//! Unknown sessions give 404; bad machines or inputs give 422 with a
//! `diagnostics` array. Sessions live in memory and expire after a period
//! without requests.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use fsmlab_core::{
    fixtures, machine_from_value, Diagnostic, Direction, ExternalOracle, InvariantOracle,
    LoadError, Session, Symbol,
};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

#[derive(Clone, Debug)]
pub struct Config {
    /// Answers `"invariant": "external"` requests; without one they degrade
    /// to `unavailable`.
    pub oracle: Option<ExternalOracle>,
    /// Used when a request gives no threshold.
    pub threshold: usize,
    /// Sessions untouched for this long are dropped.
    pub idle: Duration,
}

struct Entry {
    session: Session,
    touched: Instant,
}

struct AppState {
    config: Config,
    sessions: Mutex<HashMap<String, Entry>>,
}

impl AppState {
    /// Runs `f` on a live session, refreshing its idle clock. Expired
    /// sessions are purged first.
    fn with_session<R>(&self, id: &str, f: impl FnOnce(&mut Session) -> R) -> Option<R> {
        let mut sessions = self.sessions.lock().unwrap();
        let now = Instant::now();
        let idle = self.config.idle;
        sessions.retain(|_, e| now.duration_since(e.touched) < idle);
        let entry = sessions.get_mut(id)?;
        entry.touched = now;
        Some(f(&mut entry.session))
    }
}

pub fn router(config: Config) -> Router {
    let state = Arc::new(AppState {
        config,
        sessions: Mutex::new(HashMap::new()),
    });
    Router::new()
        .route("/api/sessions", post(create))
        .route("/api/sessions/{id}", get(view).delete(remove))
        .route("/api/sessions/{id}/step", post(step))
        .route("/api/machines/examples", get(examples))
        .with_state(state)
}

enum ApiError {
    NotFound,
    Unprocessable(Vec<Value>),
}

impl ApiError {
    fn single(code: &str, locus: &str, message: impl Into<String>) -> Self {
        ApiError::Unprocessable(vec![json!({
            "code": code,
            "locus": locus,
            "message": message.into(),
        })])
    }

    fn diagnostics(diags: &[Diagnostic]) -> Self {
        ApiError::Unprocessable(
            diags
                .iter()
                .map(|d| serde_json::to_value(d).expect("diagnostics serialize"))
                .collect(),
        )
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        match self {
            ApiError::NotFound => (
                StatusCode::NOT_FOUND,
                Json(json!({ "error": "no such session" })),
            )
                .into_response(),
            ApiError::Unprocessable(diagnostics) => (
                StatusCode::UNPROCESSABLE_ENTITY,
                Json(json!({ "diagnostics": diagnostics })),
            )
                .into_response(),
        }
    }
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct CreateRequest {
    machine: Value,
    tape0: Vec<String>,
    head0: usize,
    #[serde(default)]
    threshold: Option<usize>,
    #[serde(default)]
    invariant: Option<String>,
}

#[derive(Serialize)]
struct Created {
    id: String,
    steps: usize,
    outcome: fsmlab_core::OutcomeKind,
    message: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StepRequest {
    direction: Direction,
}

fn decode<T: serde::de::DeserializeOwned>(body: &[u8]) -> Result<T, ApiError> {
    serde_json::from_slice(body)
        .map_err(|e| ApiError::single("MalformedRequest", "body", e.to_string()))
}

async fn create(State(state): State<Arc<AppState>>, body: Bytes) -> Result<Response, ApiError> {
    let req: CreateRequest = decode(&body)?;
    let machine = machine_from_value(req.machine).map_err(|e| match e {
        LoadError::Malformed(err) => {
            ApiError::single("MalformedMachine", "machine", err.to_string())
        }
        LoadError::Invalid(diags) => ApiError::diagnostics(&diags),
    })?;
    let oracle = match req.invariant.as_deref() {
        None => None,
        Some("external") => state.config.oracle.clone(),
        Some(other) => {
            return Err(ApiError::single(
                "BadInvariant",
                "invariant",
                format!("unknown invariant source {other:?}; expected \"external\" or null"),
            ))
        }
    };
    let threshold = req.threshold.unwrap_or(state.config.threshold);
    let tape0: Vec<Symbol> = req.tape0.iter().map(|s| Symbol::new(s)).collect();
    let head0 = req.head0;

    // exploration and the oracle subprocess may both take a while
    let session = tokio::task::spawn_blocking(move || {
        let oracle = oracle.as_ref().map(|o| o as &dyn InvariantOracle);
        Session::create(Arc::new(machine), &tape0, head0, threshold, oracle)
    })
    .await
    .expect("session creation does not panic")
    .map_err(|e| ApiError::single("BadInput", "tape0", e.to_string()))?;

    let id = uuid::Uuid::new_v4().to_string();
    let created = Created {
        id: id.clone(),
        steps: session.trace().len(),
        outcome: session.outcome_kind(),
        message: session.message(),
    };
    let mut sessions = state.sessions.lock().unwrap();
    sessions.insert(
        id,
        Entry {
            session,
            touched: Instant::now(),
        },
    );
    Ok((StatusCode::CREATED, Json(created)).into_response())
}

async fn view(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> Result<Response, ApiError> {
    let v = state
        .with_session(&id, |s| s.view())
        .ok_or(ApiError::NotFound)?;
    Ok(Json(v).into_response())
}

async fn step(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Response, ApiError> {
    // an unknown session wins over a bad body
    state.with_session(&id, |_| ()).ok_or(ApiError::NotFound)?;
    let req: StepRequest = decode(&body)?;
    let v = state
        .with_session(&id, |s| s.step(req.direction))
        .ok_or(ApiError::NotFound)?;
    Ok(Json(v).into_response())
}

async fn remove(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> Result<StatusCode, ApiError> {
    state.with_session(&id, |_| ()).ok_or(ApiError::NotFound)?;
    state.sessions.lock().unwrap().remove(&id);
    Ok(StatusCode::NO_CONTENT)
}

async fn examples() -> Json<Value> {
    let list: Vec<Value> = fixtures::examples()
        .iter()
        .map(|(name, text)| {
            json!({
                "name": name,
                "machine": serde_json::from_str::<Value>(text).expect("bundled machines are JSON"),
            })
        })
        .collect();
    Json(Value::Array(list))
}
