//! JSON-over-HTTP facade over the evaluation-game engine.
//!
//! | method | path | result |
//! |---|---|---|
//! | POST | `/sessions` | `{id, version, createdAt, view}` |
//! | GET | `/sessions/{id}` | same shape |
//! | POST | `/sessions/{id}/moves?autoReply=true` | same shape |
//! | POST | `/sessions/{id}/machine` | same shape, after machine replies |
//! | GET | `/sessions/{id}/transcript` | transcript |
//! | GET | `/sessions/{id}/labels` | label overlay, or `null` outside embedded games |
//!
//! Errors are `{"error": message, ...}` with 400 (bad setup), 404 (unknown
//! session), 409 (illegal move, wrong actor, stale version) or 422 (labels on
//! a lazy model).

mod store;

use std::net::SocketAddr;
use std::sync::Arc;

use atlgts::engine::{EngineError, Menu, Move, Role, SessionView};
use atlgts::Player;
use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, Query, State};
use axum::http::{HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tower_http::cors::{Any, CorsLayer};

pub use store::{CreateSession, Op, RoleMap, SessionRecord, SetupError, Shared, Store};

/// Moves a machine may make per request before the play counts as infinite.
pub const DEFAULT_BUDGET: u64 = 10_000;

#[derive(Debug, Clone)]
pub struct Config {
    pub budget: u64,
    /// Origin allowed by CORS; any origin when `None`.
    pub cors_origin: Option<String>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            budget: DEFAULT_BUDGET,
            cors_origin: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct AppState {
    pub store: Arc<Store>,
    pub config: Arc<Config>,
}

impl AppState {
    pub fn new(store: Store, config: Config) -> Self {
        AppState {
            store: Arc::new(store),
            config: Arc::new(config),
        }
    }
}

impl Default for AppState {
    fn default() -> Self {
        AppState::new(Store::new(), Config::default())
    }
}

#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub body: Value,
}

impl ApiError {
    fn new(status: StatusCode, message: impl ToString) -> Self {
        ApiError {
            status,
            body: json!({ "error": message.to_string() }),
        }
    }

    fn with(mut self, key: &str, value: impl Serialize) -> Self {
        self.body[key] = serde_json::to_value(value).expect("serializable");
        self
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

impl From<SetupError> for ApiError {
    fn from(e: SetupError) -> Self {
        match e {
            SetupError::Formula { message, offset } => ApiError::new(StatusCode::BAD_REQUEST, message).with("offset", offset),
            other => ApiError::new(StatusCode::BAD_REQUEST, other),
        }
    }
}

fn engine_error(e: EngineError, menu: Option<Menu>) -> ApiError {
    match e {
        EngineError::IllegalMove { reason, menu } => ApiError::new(StatusCode::CONFLICT, reason).with("menu", menu),
        e @ (EngineError::WrongActor { .. } | EngineError::Ended) => {
            ApiError::new(StatusCode::CONFLICT, e).with("menu", menu)
        }
        other => ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, other),
    }
}

fn bad_json(e: JsonRejection) -> ApiError {
    ApiError::new(StatusCode::BAD_REQUEST, e.body_text())
}

type ApiResult<T> = Result<Json<T>, ApiError>;

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SessionResponse {
    pub id: String,
    pub version: u64,
    pub created_at: u64,
    pub view: SessionView,
}

fn respond(rec: &SessionRecord) -> SessionResponse {
    SessionResponse {
        id: rec.id.clone(),
        version: rec.version,
        created_at: rec.created_at,
        view: rec.session.view(),
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AutoReply {
    #[serde(default)]
    pub auto_reply: bool,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct MoveRequest {
    pub actor: Player,
    #[serde(rename = "move")]
    pub mv: Move,
    /// Expected current version; a mismatch is rejected.
    #[serde(default)]
    pub version: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct MachineRequest {
    #[serde(default)]
    pub budget: Option<u64>,
    #[serde(default)]
    pub version: Option<u64>,
}

fn lookup(state: &AppState, id: &str) -> Result<Shared, ApiError> {
    state
        .store
        .get(id)
        .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, format!("no session '{id}'")))
}

fn check_version(rec: &SessionRecord, expected: Option<u64>) -> Result<(), ApiError> {
    match expected {
        Some(v) if v != rec.version => Err(ApiError::new(
            StatusCode::CONFLICT,
            format!("stale version {v}, session is at {}", rec.version),
        )
        .with("version", rec.version)),
        _ => Ok(()),
    }
}

fn machine_replies(rec: &mut SessionRecord, budget: u64) -> Result<(), ApiError> {
    if rec.session.machine_pending() {
        rec.apply(Op::Machines { budget }).map_err(|e| engine_error(e, None))?;
    }
    Ok(())
}

async fn create(
    State(state): State<AppState>,
    Query(q): Query<AutoReply>,
    body: Result<Json<CreateSession>, JsonRejection>,
) -> ApiResult<SessionResponse> {
    let Json(req) = body.map_err(bad_json)?;
    let session = req.build()?;
    let shared = state.store.insert(req, session);
    let mut rec = shared.lock().unwrap();
    log::info!("created session {}", rec.id);
    if q.auto_reply {
        machine_replies(&mut rec, state.config.budget)?;
        state.store.persist(&rec);
    }
    Ok(Json(respond(&rec)))
}

async fn show(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<SessionResponse> {
    let shared = lookup(&state, &id)?;
    let rec = shared.lock().unwrap();
    Ok(Json(respond(&rec)))
}

async fn play(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Query(q): Query<AutoReply>,
    body: Result<Json<MoveRequest>, JsonRejection>,
) -> ApiResult<SessionResponse> {
    let shared = lookup(&state, &id)?;
    let Json(req) = body.map_err(bad_json)?;
    let mut rec = shared.lock().unwrap();
    check_version(&rec, req.version)?;
    if !matches!(rec.session.roles().get(req.actor), Role::Human) {
        return Err(ApiError::new(
            StatusCode::CONFLICT,
            format!("{} is played by a machine", req.actor),
        ));
    }
    let menu = rec.session.legal_moves();
    rec.apply(Op::Move { actor: req.actor, mv: req.mv })
        .map_err(|e| engine_error(e, menu))?;
    if q.auto_reply {
        machine_replies(&mut rec, state.config.budget)?;
    }
    state.store.persist(&rec);
    Ok(Json(respond(&rec)))
}

async fn machine(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Option<Json<MachineRequest>>,
) -> ApiResult<SessionResponse> {
    let shared = lookup(&state, &id)?;
    let req = body.map(|Json(b)| b).unwrap_or_default();
    let mut rec = shared.lock().unwrap();
    check_version(&rec, req.version)?;
    let budget = req.budget.unwrap_or(state.config.budget);
    if budget == 0 {
        return Err(ApiError::new(StatusCode::BAD_REQUEST, EngineError::ZeroBudget));
    }
    if !rec.session.machine_pending() {
        let why = match rec.session.pending() {
            Some(p) => format!("{p} is human and must move"),
            None => "the game has ended".into(),
        };
        return Err(ApiError::new(StatusCode::CONFLICT, why));
    }
    machine_replies(&mut rec, budget)?;
    state.store.persist(&rec);
    Ok(Json(respond(&rec)))
}

async fn transcript(State(state): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let shared = lookup(&state, &id)?;
    let rec = shared.lock().unwrap();
    Ok(Json(rec.session.transcript()).into_response())
}

async fn labels(State(state): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let shared = lookup(&state, &id)?;
    let mut rec = shared.lock().unwrap();
    if rec.session.model().is_lazy() {
        return Err(ApiError::new(
            StatusCode::UNPROCESSABLE_ENTITY,
            "labels need a finite model",
        ));
    }
    // the overlay only reads solver output; it does not count as a mutation
    let overlay = rec.session.label_overlay().map_err(|e| engine_error(e, None))?;
    Ok(Json(overlay).into_response())
}

fn cors(config: &Config) -> CorsLayer {
    let layer = CorsLayer::new().allow_methods(Any).allow_headers(Any);
    match config.cors_origin.as_deref().map(HeaderValue::from_str) {
        Some(Ok(origin)) => layer.allow_origin(origin),
        Some(Err(_)) => {
            log::warn!("ignoring malformed CORS origin");
            layer.allow_origin(Any)
        }
        None => layer.allow_origin(Any),
    }
}

pub fn router(state: AppState) -> Router {
    let layer = cors(&state.config);
    Router::new()
        .route("/sessions", post(create))
        .route("/sessions/{id}", get(show))
        .route("/sessions/{id}/moves", post(play))
        .route("/sessions/{id}/machine", post(machine))
        .route("/sessions/{id}/transcript", get(transcript))
        .route("/sessions/{id}/labels", get(labels))
        .layer(layer)
        .with_state(state)
}

/// Binds `addr` and serves until the process is stopped.
pub async fn serve(addr: SocketAddr, state: AppState) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(state)).await
}
