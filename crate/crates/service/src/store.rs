//! Session records and the in-memory store, with optional JSON snapshots.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};
use std::time::{SystemTime, UNIX_EPOCH};

use atlgts::cgm::{lazy_model, ModelFile};
use atlgts::engine::{EngineError, GameModel, ModeSpec, Move, Role, Roles, Session};
use atlgts::formula::parse_formula;
use atlgts::Player;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Body of `POST /sessions`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct CreateSession {
    /// Inline finite model.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelFile>,
    /// Name of a built-in lazy model, e.g. `fig2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lazy_model: Option<String>,
    /// Initial state; defaults to the first state of a finite model or the
    /// lazy model's initial state.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<String>,
    pub formula: String,
    /// `unbounded`, `bounded`, `bounded:<ordinal>` or `finitely-bounded`.
    #[serde(default = "default_mode")]
    pub mode: String,
    /// Overrides the bound of `bounded` mode (`auto` or ordinal text).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_bound: Option<String>,
    #[serde(default)]
    pub roles: RoleMap,
}

fn default_mode() -> String {
    "bounded".into()
}

/// Role text per player, e.g. `{"E": "human", "A": "canonical"}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoleMap {
    #[serde(rename = "E", default = "human")]
    pub eloise: String,
    #[serde(rename = "A", default = "canonical")]
    pub abelard: String,
}

fn human() -> String {
    "human".into()
}

fn canonical() -> String {
    "canonical".into()
}

impl Default for RoleMap {
    fn default() -> Self {
        RoleMap {
            eloise: human(),
            abelard: canonical(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SetupError {
    #[error("give exactly one of 'model' and 'lazyModel'")]
    ModelChoice,
    #[error("{0}")]
    Model(String),
    #[error("unknown lazy model '{0}'")]
    UnknownLazy(String),
    #[error("{message}")]
    Formula { message: String, offset: usize },
    #[error("{0}")]
    Mode(String),
    #[error("role of {player}: {message}")]
    Role { player: Player, message: String },
    #[error(transparent)]
    Engine(#[from] EngineError),
}

impl CreateSession {
    /// Builds a fresh engine session from the request.
    pub fn build(&self) -> Result<Session, SetupError> {
        let model = match (&self.model, &self.lazy_model) {
            (Some(file), None) => GameModel::Finite(Arc::new(file.validate().map_err(|e| SetupError::Model(e.to_string()))?)),
            (None, Some(name)) => GameModel::Lazy(lazy_model(name).ok_or_else(|| SetupError::UnknownLazy(name.clone()))?),
            _ => return Err(SetupError::ModelChoice),
        };
        let formula = parse_formula(&self.formula).map_err(|e| SetupError::Formula {
            message: e.to_string(),
            offset: e.offset,
        })?;
        let mode_text = match (&self.gamma_bound, self.mode.as_str()) {
            (Some(g), "bounded") => format!("bounded:{g}"),
            (Some(_), m) if m.starts_with("bounded:") => {
                return Err(SetupError::Mode("give the bound either in 'mode' or in 'gammaBound'".into()))
            }
            (Some(_), _) => return Err(SetupError::Mode("'gammaBound' needs bounded mode".into())),
            (None, m) => m.to_string(),
        };
        let mode: ModeSpec = mode_text.parse().map_err(SetupError::Mode)?;
        let role = |player: Player, text: &str| -> Result<Role, SetupError> {
            text.parse().map_err(|message| SetupError::Role { player, message })
        };
        let roles = Roles::new(role(Player::E, &self.roles.eloise)?, role(Player::A, &self.roles.abelard)?);
        let state = match (&self.state, &model) {
            (Some(s), _) => s.clone(),
            (None, GameModel::Finite(m)) => m.state_name(0).to_string(),
            (None, GameModel::Lazy(l)) => l.render(&l.initial()),
        };
        Ok(Session::new(model, &state, formula, mode, roles)?)
    }
}

/// One mutation accepted by the store; replaying them rebuilds the session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "camelCase")]
pub enum Op {
    Move {
        actor: Player,
        #[serde(rename = "move")]
        mv: Move,
    },
    Machines { budget: u64 },
}

#[derive(Debug, Clone)]
pub struct SessionRecord {
    pub id: String,
    /// Milliseconds since the Unix epoch.
    pub created_at: u64,
    pub request: CreateSession,
    pub session: Session,
    /// Bumped on every accepted mutation.
    pub version: u64,
    pub ops: Vec<Op>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct Snapshot {
    id: String,
    created_at: u64,
    version: u64,
    request: CreateSession,
    ops: Vec<Op>,
}

impl SessionRecord {
    pub fn apply(&mut self, op: Op) -> Result<(), EngineError> {
        match &op {
            Op::Move { actor, mv } => self.session.apply_move(*actor, mv.clone())?,
            Op::Machines { budget } => {
                self.session.advance_machines(*budget)?;
            }
        }
        self.ops.push(op);
        self.version += 1;
        Ok(())
    }

    /// A fresh session with every accepted operation applied again.
    pub fn replay(&self) -> Result<Session, SetupError> {
        let mut s = self.request.build()?;
        for op in &self.ops {
            match op {
                Op::Move { actor, mv } => s.apply_move(*actor, mv.clone())?,
                Op::Machines { budget } => {
                    s.advance_machines(*budget)?;
                }
            }
        }
        Ok(s)
    }

    fn snapshot(&self) -> Snapshot {
        Snapshot {
            id: self.id.clone(),
            created_at: self.created_at,
            version: self.version,
            request: self.request.clone(),
            ops: self.ops.clone(),
        }
    }
}

pub type Shared = Arc<Mutex<SessionRecord>>;

/// Sessions by id. Each record has its own lock, so requests to one session
/// are serialized while distinct sessions proceed independently.
#[derive(Debug, Default)]
pub struct Store {
    sessions: RwLock<HashMap<String, Shared>>,
    snapshot_dir: Option<PathBuf>,
}

impl Store {
    pub fn new() -> Self {
        Store::default()
    }

    /// A store that writes `<id>.json` into `dir` after every mutation and
    /// restores any snapshots already there.
    pub fn with_snapshots(dir: impl Into<PathBuf>) -> std::io::Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        let store = Store {
            sessions: RwLock::default(),
            snapshot_dir: Some(dir.clone()),
        };
        for entry in fs::read_dir(&dir)? {
            let path = entry?.path();
            if path.extension().is_some_and(|e| e == "json") {
                match restore(&path) {
                    Ok(rec) => {
                        store.sessions.write().unwrap().insert(rec.id.clone(), Arc::new(Mutex::new(rec)));
                    }
                    Err(e) => log::warn!("skipping snapshot {}: {e}", path.display()),
                }
            }
        }
        Ok(store)
    }

    pub fn insert(&self, request: CreateSession, session: Session) -> Shared {
        let id = uuid::Uuid::new_v4().simple().to_string();
        let created_at = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_millis() as u64)
            .unwrap_or(0);
        let rec = SessionRecord {
            id: id.clone(),
            created_at,
            request,
            session,
            version: 0,
            ops: Vec::new(),
        };
        self.persist(&rec);
        let shared = Arc::new(Mutex::new(rec));
        self.sessions.write().unwrap().insert(id, shared.clone());
        shared
    }

    pub fn get(&self, id: &str) -> Option<Shared> {
        self.sessions.read().unwrap().get(id).cloned()
    }

    pub fn len(&self) -> usize {
        self.sessions.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Writes the record's snapshot if persistence is on; failures are logged.
    pub fn persist(&self, rec: &SessionRecord) {
        let Some(dir) = &self.snapshot_dir else { return };
        let path = dir.join(format!("{}.json", rec.id));
        let bytes = serde_json::to_vec_pretty(&rec.snapshot()).expect("snapshot serializes");
        if let Err(e) = fs::write(&path, bytes) {
            log::error!("writing {}: {e}", path.display());
        }
    }
}

fn restore(path: &Path) -> Result<SessionRecord, String> {
    let bytes = fs::read(path).map_err(|e| e.to_string())?;
    let snap: Snapshot = serde_json::from_slice(&bytes).map_err(|e| e.to_string())?;
    let mut rec = SessionRecord {
        id: snap.id,
        created_at: snap.created_at,
        session: snap.request.build().map_err(|e| e.to_string())?,
        request: snap.request,
        version: snap.version,
        ops: snap.ops,
    };
    rec.session = rec.replay().map_err(|e| e.to_string())?;
    Ok(rec)
}
