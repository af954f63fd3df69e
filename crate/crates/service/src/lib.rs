//! JSON-over-HTTP game service.
//!
//! Endpoints:
//!
//! * `POST /games` creates a session and returns its id and state.
//! * `GET /games/{id}` returns the state, with probabilities rounded to four
//!   decimals (`?exact=true` for full precision).
//! * `GET /games/{id}/moves` lists the legal moves with ids of the form
//!   `{version}-{index}`.
//! * `POST /games/{id}/moves/{moveId}` plays a listed move, then lets an agent
//!   opponent reply.
//! * `GET /health`.
//!
//! Errors are `{code, message}` objects.

mod error;

use std::collections::HashMap;
use std::fmt;
use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::routing::{get, post};
use axum::{Json, Router};
use cheqqers_core::agents::{Agent, AgentSpec};
use cheqqers_core::game::{GameState, GameView, TurnRecord};
use cheqqers_core::{BoardGeometry, Color, Move, QuantumnessLevel};
use rand::Rng;
use serde::Deserialize;
use serde_json::{json, Value};
use tokio::sync::{Mutex, Semaphore};

pub use error::ApiError;

pub const DEFAULT_IDLE_TTL: Duration = Duration::from_secs(24 * 60 * 60);

#[derive(Clone, Debug)]
pub struct ServiceConfig {
    pub idle_ttl: Duration,
    /// Append-only JSON-lines log of created games and played moves.
    pub session_log: Option<PathBuf>,
    /// Agent searches allowed to run at once.
    pub agent_workers: usize,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            idle_ttl: DEFAULT_IDLE_TTL,
            session_log: None,
            agent_workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }
}

/// Who makes the moves for one color.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Controller {
    Human,
    Agent(AgentSpec),
}

impl FromStr for Controller {
    type Err = cheqqers_core::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "human" => Ok(Controller::Human),
            other => other.parse().map(Controller::Agent),
        }
    }
}

impl fmt::Display for Controller {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Controller::Human => f.write_str("human"),
            Controller::Agent(spec) => spec.fmt(f),
        }
    }
}

struct Session {
    id: String,
    state: GameState,
    seed: u64,
    controllers: [Controller; 2],
    agents: [Option<Box<dyn Agent>>; 2],
    version: u64,
    moves: Vec<Move>,
    created: u64,
    last_active: Instant,
}

fn unix_time() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs())
}

fn slot(color: Color) -> usize {
    match color {
        Color::White => 0,
        Color::Black => 1,
    }
}

impl Session {
    fn refresh_moves(&mut self) {
        self.moves = self.state.legal_moves();
    }

    fn summary(&self, exact: bool) -> Value {
        json!({
            "id": self.id,
            "version": self.version,
            "seed": self.seed,
            "white": self.controllers[0].to_string(),
            "black": self.controllers[1].to_string(),
            "drawRule": self.state.draw_rule(),
            "createdAt": self.created,
            "state": GameView::new(&self.state, exact),
        })
    }
}

struct Inner {
    sessions: std::sync::Mutex<HashMap<String, Arc<Mutex<Session>>>>,
    config: ServiceConfig,
    workers: Semaphore,
    log: Option<std::sync::Mutex<File>>,
}

#[derive(Clone)]
pub struct AppState {
    inner: Arc<Inner>,
}

impl AppState {
    pub fn new(config: ServiceConfig) -> std::io::Result<Self> {
        let log = match &config.session_log {
            Some(path) => Some(std::sync::Mutex::new(
                OpenOptions::new().create(true).append(true).open(path)?,
            )),
            None => None,
        };
        Ok(AppState {
            inner: Arc::new(Inner {
                sessions: std::sync::Mutex::new(HashMap::new()),
                workers: Semaphore::new(config.agent_workers.max(1)),
                config,
                log,
            }),
        })
    }

    pub fn session_count(&self) -> usize {
        self.inner.sessions.lock().unwrap().len()
    }

    /// Drops sessions idle for longer than the configured time to live.
    pub async fn purge_idle(&self) -> usize {
        let entries: Vec<(String, Arc<Mutex<Session>>)> = self
            .inner
            .sessions
            .lock()
            .unwrap()
            .iter()
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        let mut expired = Vec::new();
        for (id, s) in entries {
            // sessions busy with a request are active by definition
            if let Ok(s) = s.try_lock() {
                if s.last_active.elapsed() > self.inner.config.idle_ttl {
                    expired.push(id);
                }
            }
        }
        let mut sessions = self.inner.sessions.lock().unwrap();
        for id in &expired {
            sessions.remove(id);
        }
        expired.len()
    }

    fn session(&self, id: &str) -> Result<Arc<Mutex<Session>>, ApiError> {
        self.inner
            .sessions
            .lock()
            .unwrap()
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::not_found(format!("no game with id {id}")))
    }

    fn log(&self, entry: Value) {
        if let Some(log) = &self.inner.log {
            let mut entry = entry;
            entry["time"] = json!(unix_time());
            let mut f = log.lock().unwrap();
            if let Err(e) = writeln!(f, "{entry}") {
                tracing::warn!("session log write failed: {e}");
            }
        }
    }

    /// Lets agents move until a human is to move or the game ends.
    async fn run_agents(&self, session: &mut Session) -> Result<Vec<TurnRecord>, ApiError> {
        let mut records = Vec::new();
        while !session.state.is_over() {
            let color = session.state.to_move();
            if session.controllers[slot(color)] == Controller::Human {
                break;
            }
            let mut agent = session.agents[slot(color)]
                .take()
                .ok_or_else(|| ApiError::internal("agent missing"))?;
            let snapshot = session.state.clone();
            let permit = self
                .inner
                .workers
                .acquire()
                .await
                .map_err(|_| ApiError::internal("worker pool closed"))?;
            let (agent, choice) = tokio::task::spawn_blocking(move || {
                let mv = agent.select(&snapshot);
                (agent, mv)
            })
            .await
            .map_err(|e| ApiError::internal(format!("agent task failed: {e}")))?;
            drop(permit);
            session.agents[slot(color)] = Some(agent);
            let mv = choice.map_err(|e| ApiError::internal(e.to_string()))?;
            let record = session
                .state
                .step(&mv)
                .map_err(|e| ApiError::internal(e.to_string()))?;
            session.version += 1;
            self.log(json!({"event": "move", "id": session.id, "version": session.version, "record": record}));
            records.push(record);
        }
        session.refresh_moves();
        Ok(records)
    }
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct CreateGame {
    pub level: u8,
    pub size: usize,
    pub setup_rows: Option<usize>,
    #[serde(default = "human")]
    pub white: String,
    #[serde(default = "human")]
    pub black: String,
    pub seed: Option<u64>,
    #[serde(default = "yes")]
    pub draw_rule: bool,
}

fn human() -> String {
    "human".into()
}

fn yes() -> bool {
    true
}

/// Standard setup: all rows but the middle two, split between the players.
pub fn default_setup_rows(size: usize) -> usize {
    (size.saturating_sub(2) / 2).max(1)
}

async fn create_game(
    State(app): State<AppState>,
    body: Result<Json<CreateGame>, JsonRejection>,
) -> Result<(StatusCode, Json<Value>), ApiError> {
    let Json(req) = body.map_err(|e| ApiError::bad_request(e.body_text()))?;
    let level = QuantumnessLevel::new(req.level).map_err(ApiError::from_core)?;
    let rows = req
        .setup_rows
        .unwrap_or_else(|| default_setup_rows(req.size));
    let geometry = BoardGeometry::new(req.size, rows).map_err(ApiError::from_core)?;
    let white: Controller = req.white.parse().map_err(ApiError::from_core)?;
    let black: Controller = req.black.parse().map_err(ApiError::from_core)?;
    let seed = req.seed.unwrap_or_else(|| rand::thread_rng().gen());
    let state = GameState::new(geometry, level, seed)
        .map_err(ApiError::from_core)?
        .with_draw_rule(req.draw_rule);

    let id = format!("{:032x}", rand::thread_rng().gen::<u128>());
    let build = |c: Controller, salt: u64| match c {
        Controller::Human => None,
        Controller::Agent(spec) => Some(spec.build(seed.rotate_left(17) ^ salt)),
    };
    let mut session = Session {
        id: id.clone(),
        state,
        seed,
        controllers: [white, black],
        agents: [build(white, 1), build(black, 2)],
        version: 0,
        moves: Vec::new(),
        created: unix_time(),
        last_active: Instant::now(),
    };
    app.log(json!({
        "event": "create", "id": id, "level": req.level, "size": req.size, "setupRows": rows,
        "seed": seed, "white": white.to_string(), "black": black.to_string(), "drawRule": req.draw_rule,
    }));
    let records = app.run_agents(&mut session).await?;
    let mut body = session.summary(false);
    body["records"] = json!(records);
    app.inner
        .sessions
        .lock()
        .unwrap()
        .insert(id, Arc::new(Mutex::new(session)));
    Ok((StatusCode::CREATED, Json(body)))
}

#[derive(Debug, Deserialize)]
struct StateQuery {
    #[serde(default)]
    exact: bool,
}

async fn get_game(
    State(app): State<AppState>,
    Path(id): Path<String>,
    query: Query<StateQuery>,
) -> Result<Json<Value>, ApiError> {
    let session = app.session(&id)?;
    let mut s = session.lock().await;
    s.last_active = Instant::now();
    Ok(Json(s.summary(query.exact)))
}

/// Arrow endpoints for drawing a move.
fn arrows(mv: &Move) -> Vec<[usize; 2]> {
    match *mv {
        Move::Step { from, to, .. } => vec![[from, to]],
        Move::Capture { from, landing, .. } => vec![[from, landing]],
        Move::Split { from, to1, to2, .. } => vec![[from, to1], [from, to2]],
        Move::Merge {
            from1, from2, to, ..
        } => vec![[from1, to], [from2, to]],
        Move::Pass { .. } => Vec::new(),
    }
}

async fn list_moves(
    State(app): State<AppState>,
    Path(id): Path<String>,
) -> Result<Json<Value>, ApiError> {
    let session = app.session(&id)?;
    let mut s = session.lock().await;
    s.last_active = Instant::now();
    if s.state.is_over() {
        return Err(ApiError::game_finished());
    }
    let moves: Vec<Value> = s
        .moves
        .iter()
        .enumerate()
        .map(|(i, mv)| {
            let mut v = serde_json::to_value(mv).unwrap_or(Value::Null);
            v["id"] = json!(format!("{}-{i}", s.version));
            v["arrows"] = json!(arrows(mv));
            v
        })
        .collect();
    Ok(Json(json!({
        "version": s.version,
        "toMove": s.state.to_move(),
        "controller": s.controllers[slot(s.state.to_move())].to_string(),
        "moves": moves,
    })))
}

fn parse_move_id(id: &str) -> Result<(u64, usize), ApiError> {
    let bad = || ApiError::bad_request(format!("malformed move id {id}"));
    let (version, index) = id.split_once('-').ok_or_else(bad)?;
    Ok((
        version.parse().map_err(|_| bad())?,
        index.parse().map_err(|_| bad())?,
    ))
}

async fn play_move(
    State(app): State<AppState>,
    Path((id, move_id)): Path<(String, String)>,
) -> Result<Json<Value>, ApiError> {
    let (version, index) = parse_move_id(&move_id)?;
    let session = app.session(&id)?;
    let mut s = session.lock().await;
    s.last_active = Instant::now();
    if s.state.is_over() {
        return Err(ApiError::game_finished());
    }
    if version != s.version {
        return Err(ApiError::conflict(
            "stale_move",
            format!(
                "move {move_id} is from version {version}, the game is at {}",
                s.version
            ),
        ));
    }
    if s.controllers[slot(s.state.to_move())] != Controller::Human {
        return Err(ApiError::conflict("not_your_turn", "an agent is to move"));
    }
    let mv = *s
        .moves
        .get(index)
        .ok_or_else(|| ApiError::bad_request(format!("no move {move_id}")))?;
    let record = s
        .state
        .step(&mv)
        .map_err(|e| ApiError::internal(e.to_string()))?;
    s.version += 1;
    app.log(json!({"event": "move", "id": s.id, "version": s.version, "record": record}));
    let mut records = vec![record];
    records.extend(app.run_agents(&mut s).await?);
    let mut body = s.summary(false);
    body["records"] = json!(records);
    Ok(Json(body))
}

async fn health(State(app): State<AppState>) -> Json<Value> {
    Json(json!({"status": "ok", "sessions": app.session_count()}))
}

pub fn router(app: AppState) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/games", post(create_game))
        .route("/games/{id}", get(get_game))
        .route("/games/{id}/moves", get(list_moves))
        .route("/games/{id}/moves/{move_id}", post(play_move))
        .with_state(app)
}

/// Serves on `0.0.0.0:port` until the process is stopped.
pub async fn serve(port: u16, config: ServiceConfig) -> std::io::Result<()> {
    let app = AppState::new(config)?;
    let sweeper = app.clone();
    tokio::spawn(async move {
        let mut tick = tokio::time::interval(Duration::from_secs(600));
        loop {
            tick.tick().await;
            let n = sweeper.purge_idle().await;
            if n > 0 {
                tracing::info!(expired = n, "purged idle sessions");
            }
        }
    });
    let listener = tokio::net::TcpListener::bind(("0.0.0.0", port)).await?;
    tracing::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(app)).await
}
