use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::GameModel;
use crate::cgm::{ActionDomain, LazyState};
use crate::formula::{AgentSet, Formula};
use crate::ordinal::Ordinal;
use crate::semantics::{EvalError, GammaBound};
use crate::solver::{NonControllerVariant, SolverError};
use crate::Player;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StateKey {
    Finite(usize),
    Lazy(LazyState),
}

/// Requested game mode; `Bounded(Auto)` resolves to the stable bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModeSpec {
    Unbounded,
    Bounded(GammaBound),
    FinitelyBounded,
}

impl FromStr for ModeSpec {
    type Err = String;

    /// `unbounded`, `bounded`, `bounded:<ordinal>`, `finitely-bounded`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "unbounded" => Ok(ModeSpec::Unbounded),
            "bounded" => Ok(ModeSpec::Bounded(GammaBound::Auto)),
            "finitely-bounded" => Ok(ModeSpec::FinitelyBounded),
            _ => match s.strip_prefix("bounded:") {
                Some(g) => g
                    .parse()
                    .map(ModeSpec::Bounded)
                    .map_err(|e| format!("bad time limit bound: {e}")),
                None => Err(format!(
                    "unknown mode '{s}' (expected unbounded, bounded[:gamma], finitely-bounded)"
                )),
            },
        }
    }
}

/// Resolved game mode.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Mode {
    Unbounded,
    /// Announcements must lie strictly below the bound.
    Bounded(Ordinal),
    /// Only natural-number announcements.
    FinitelyBounded,
}

/// Who makes a player's moves.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Role {
    Human,
    /// Label-derived strategies; the non-controller variant follows the mode.
    Canonical,
    /// Canonical, with a fixed non-controller variant.
    CanonicalWith(NonControllerVariant),
    /// Uniformly random legal moves from a seeded generator.
    Random(u64),
    /// A named script for a specific lazy model.
    Script(String),
}

impl Role {
    pub(crate) fn check(&self, model: &GameModel) -> Result<(), EngineError> {
        match (self, model) {
            (Role::Human, _) => Ok(()),
            (Role::Script(name), _) => super::scripts::check(name, model),
            (_, GameModel::Lazy(_)) => Err(EngineError::LazyNeedsScript),
            _ => Ok(()),
        }
    }

    pub fn is_canonical(&self) -> bool {
        matches!(self, Role::Canonical | Role::CanonicalWith(_))
    }
}

impl FromStr for Role {
    type Err = String;

    /// `human`, `canonical`, `canonical-full`, `canonical-n:<n>`,
    /// `canonical-infinity`, `random:<seed>`, `script:<name>` or a bare script name.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "human" => return Ok(Role::Human),
            "canonical" | "machine" => return Ok(Role::Canonical),
            "canonical-full" => return Ok(Role::CanonicalWith(NonControllerVariant::Full)),
            "canonical-infinity" => return Ok(Role::CanonicalWith(NonControllerVariant::Infinity)),
            _ => {}
        }
        if let Some(n) = s.strip_prefix("canonical-n:") {
            return n
                .parse()
                .map(|n| Role::CanonicalWith(NonControllerVariant::N(n)))
                .map_err(|_| format!("bad n in '{s}'"));
        }
        if let Some(seed) = s.strip_prefix("random:") {
            return seed.parse().map(Role::Random).map_err(|_| format!("bad seed in '{s}'"));
        }
        if s == "random" {
            return Ok(Role::Random(0));
        }
        let name = s.strip_prefix("script:").unwrap_or(s);
        if super::scripts::known(name) {
            return Ok(Role::Script(name.to_string()));
        }
        Err(format!("unknown role '{s}'"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Roles {
    #[serde(rename = "E")]
    pub eloise: Role,
    #[serde(rename = "A")]
    pub abelard: Role,
}

impl Roles {
    pub fn new(eloise: Role, abelard: Role) -> Self {
        Roles { eloise, abelard }
    }

    pub fn machines() -> Self {
        Roles::new(Role::Canonical, Role::Canonical)
    }

    pub fn get(&self, p: Player) -> &Role {
        match p {
            Player::E => &self.eloise,
            Player::A => &self.abelard,
        }
    }

    pub fn any_canonical(&self) -> bool {
        self.eloise.is_canonical() || self.abelard.is_canonical()
    }
}

/// Evaluation-game position `(P, q, phi)`: `P` is the verifier of `phi` at `q`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Position {
    pub verifier: Player,
    pub state: StateKey,
    pub formula: Formula,
}

/// An embedded game `g(V, C, A, q, psi_C, psi_notC)` opened at `position`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EmbeddedCtx {
    pub position: Position,
    pub verifier: Player,
    pub controller: Player,
    pub coalition: AgentSet,
    /// The U or R formula being played.
    pub source: Formula,
    /// Exit formula when the controller ends (or time runs out).
    pub controller_goal: Formula,
    /// Exit formula when the non-controller ends.
    pub opponent_goal: Formula,
    pub initial_limit: Option<Ordinal>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum StepStage {
    Verifier,
    /// The verifier has committed these coalition action indices.
    Falsifier { alpha: Vec<u64> },
}

/// Stages of one embedded round, in rule order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Stage {
    ControllerEnd,
    OpponentEnd,
    VerifierMove,
    FalsifierMove { alpha: Vec<u64> },
    /// A step was taken at a limit ordinal; the controller picks a smaller one.
    LowerLimit,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Phase {
    /// Disjunction: the verifier picks a side.
    Choose(Position),
    XStep { position: Position, stage: StepStage },
    /// The controller announces the initial time limit.
    Announce(EmbeddedCtx),
    Embedded {
        ctx: EmbeddedCtx,
        limit: Option<Ordinal>,
        state: StateKey,
        stage: Stage,
    },
    Ended { winner: Player, reason: EndReason },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EndReason {
    EndingPositionProp,
    TrueFalseAtom,
    TimeExhaustedExit,
    VoluntaryExit,
    StepBudgetExceeded,
}

impl fmt::Display for EndReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("serializes");
        f.write_str(s.as_str().unwrap_or_default())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AutoRule {
    Negation,
    ForcedExit,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", content = "value", rename_all = "camelCase")]
pub enum Move {
    Left,
    Right,
    Announce(Ordinal),
    EndNow,
    Continue,
    /// Action names, one per agent of the moving side, in agent order.
    Actions(Vec<String>),
    Lower(Ordinal),
    /// Recorded rule application; never legal as input.
    Auto(AutoRule),
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Move::Left => f.write_str("left"),
            Move::Right => f.write_str("right"),
            Move::Announce(g) => write!(f, "announce {g}"),
            Move::EndNow => f.write_str("end"),
            Move::Continue => f.write_str("continue"),
            Move::Actions(a) => write!(f, "actions [{}]", a.join(", ")),
            Move::Lower(g) => write!(f, "lower {g}"),
            Move::Auto(r) => write!(f, "auto {r:?}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "camelCase")]
pub enum DomainView {
    Finite { actions: Vec<String> },
    /// Any natural number, written in decimal.
    Naturals,
}

impl From<&ActionDomain> for DomainView {
    fn from(d: &ActionDomain) -> Self {
        match d {
            ActionDomain::Finite(a) => DomainView::Finite { actions: a.clone() },
            ActionDomain::AllNaturals => DomainView::Naturals,
        }
    }
}

/// Everything the pending player may do.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum Menu {
    Choice {
        actor: Player,
        options: Vec<Move>,
    },
    Actions {
        actor: Player,
        agents: Vec<usize>,
        domains: Vec<DomainView>,
    },
    /// Any ordinal below `below`; any natural when `below` is absent.
    Announce {
        actor: Player,
        below: Option<Ordinal>,
        #[serde(rename = "finiteOnly")]
        finite_only: bool,
    },
    Lower {
        actor: Player,
        below: Ordinal,
    },
}

impl Menu {
    pub fn actor(&self) -> Player {
        match self {
            Menu::Choice { actor, .. }
            | Menu::Actions { actor, .. }
            | Menu::Announce { actor, .. }
            | Menu::Lower { actor, .. } => *actor,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entry {
    pub phase: String,
    /// `None` for automatic rule applications.
    pub actor: Option<Player>,
    #[serde(rename = "move")]
    pub mv: Move,
    pub state: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub limit: Option<Ordinal>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub moves: Vec<Entry>,
    pub winner: Option<Player>,
    pub reason: Option<EndReason>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PositionView {
    pub verifier: Player,
    pub state: String,
    pub formula: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct EmbeddedView {
    pub verifier: Player,
    pub controller: Player,
    pub coalition: AgentSet,
    pub source: String,
    pub controller_goal: String,
    pub opponent_goal: String,
    pub state: String,
    pub limit: Option<Ordinal>,
    pub initial_limit: Option<Ordinal>,
}

impl EmbeddedView {
    pub(crate) fn new(ctx: &EmbeddedCtx, limit: Option<Ordinal>, state: String) -> Self {
        EmbeddedView {
            verifier: ctx.verifier,
            controller: ctx.controller,
            coalition: ctx.coalition.clone(),
            source: ctx.source.to_string(),
            controller_goal: ctx.controller_goal.to_string(),
            opponent_goal: ctx.opponent_goal.to_string(),
            state,
            limit,
            initial_limit: ctx.initial_limit.clone(),
        }
    }
}

/// Read-only projection of a session for clients.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SessionView {
    pub phase: String,
    pub position: PositionView,
    pub embedded: Option<EmbeddedView>,
    pub pending: Option<Player>,
    pub menu: Option<Menu>,
    pub machine_pending: bool,
    pub winner: Option<Player>,
    pub reason: Option<EndReason>,
    pub mode: Mode,
    pub model: String,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("unknown state '{0}'")]
    UnknownState(String),
    #[error("time limit bound must be at least 1")]
    ZeroBound,
    #[error("bounded play on a lazy model needs an explicit time limit bound")]
    LazyNeedsBound,
    #[error("formula mentions agent {agent}, but the model has agents 1..={agents}")]
    UnknownAgent { agent: usize, agents: usize },
    #[error("lazy model requires scripted machine")]
    LazyNeedsScript,
    #[error("unknown script '{0}'")]
    UnknownScript(String),
    #[error("script '{script}' needs the lazy model '{model}'")]
    ScriptNeedsModel { script: String, model: String },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("the game has ended")]
    Ended,
    #[error("it is {expected}'s move, not {got}'s")]
    WrongActor { expected: Player, got: Player },
    #[error("illegal move: {reason}")]
    IllegalMove { reason: String, menu: Menu },
    #[error("player {0} is human and must move")]
    HumanPending(Player),
    #[error("step budget must be at least 1")]
    ZeroBudget,
}
