//! Winning time labels for embedded until/release games on finite models and
//! the canonical strategies derived from them.

mod strategy;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cgm::Model;
use crate::formula::AgentSet;
use crate::ordinal::Ordinal;
use crate::Player;

pub use strategy::{
    any_decision, canonical_controller, canonical_noncontroller, Choice, ControllerStrategy,
    NonControllerStrategy, NonControllerVariant,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("time limit bound must be at least 1")]
    ZeroBound,
    #[error("the infinity variant needs a successor time limit bound, got {0}")]
    LimitBound(Ordinal),
    #[error("coalition {coalition} mentions an agent outside 1..={agents}")]
    UnknownAgent { coalition: AgentSet, agents: usize },
    #[error("labels must be in controller perspective")]
    WrongPerspective,
}

/// One player's move in the one-step game.
///
/// The verifier commits a coalition profile; the falsifier answers with a
/// complement profile for every coalition profile (indexed in lexicographic
/// order of coalition profiles).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Decision {
    Profile(Vec<usize>),
    Response(Vec<Vec<usize>>),
}

/// Finds a decision of the mover that guarantees a successor in `target`.
///
/// Ties go to the lexicographically least profile / response table.
pub fn force(
    model: &Model,
    coalition: &AgentSet,
    q: usize,
    target: &[bool],
    mover_is_verifier: bool,
) -> Option<Decision> {
    let complement = coalition.complement(model.agent_count());
    let alphas = model.partial_profiles(q, coalition);
    let betas = model.partial_profiles(q, &complement);
    let lands = |a: &[usize], b: &[usize]| target[model.successor(q, &model.combine(coalition, a, &complement, b))];
    if mover_is_verifier {
        alphas
            .into_iter()
            .find(|a| betas.iter().all(|b| lands(a, b)))
            .map(Decision::Profile)
    } else {
        alphas
            .iter()
            .map(|a| betas.iter().find(|b| lands(a, b)).cloned())
            .collect::<Option<Vec<_>>>()
            .map(Decision::Response)
    }
}

/// States the mover's decision can lead to, over all replies of the other side.
pub fn forced_set(model: &Model, coalition: &AgentSet, q: usize, decision: &Decision) -> Vec<usize> {
    let complement = coalition.complement(model.agent_count());
    let mut out: Vec<usize> = match decision {
        Decision::Profile(a) => model
            .partial_profiles(q, &complement)
            .iter()
            .map(|b| model.successor(q, &model.combine(coalition, a, &complement, b)))
            .collect(),
        Decision::Response(table) => model
            .partial_profiles(q, coalition)
            .iter()
            .zip(table)
            .map(|(a, b)| model.successor(q, &model.combine(coalition, a, &complement, b)))
            .collect(),
    };
    out.sort_unstable();
    out.dedup();
    out
}

/// An embedded game `g(V, C, A, q, psi_C, psi_notC)` with its exits already
/// evaluated: `goal[q]` says whether the controller wins the exit on its own
/// formula at `q`, `safe[q]` whether it wins the exit on the opponent's.
#[derive(Debug, Clone)]
pub struct EmbeddedGameSpec<'m> {
    pub model: &'m Model,
    pub verifier: Player,
    pub controller: Player,
    pub coalition: AgentSet,
    pub goal: Vec<bool>,
    pub safe: Vec<bool>,
}

impl EmbeddedGameSpec<'_> {
    /// Whether the controller picks the coalition's actions.
    pub fn controller_is_verifier(&self) -> bool {
        self.controller == self.verifier
    }

    fn check(&self) -> Result<(), SolverError> {
        if self.coalition.agents().iter().any(|&a| a == 0 || a > self.model.agent_count()) {
            return Err(SolverError::UnknownAgent {
                coalition: self.coalition.clone(),
                agents: self.model.agent_count(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Ord(Ordinal),
    Win,
    Lose,
}

impl Label {
    pub fn ordinal(&self) -> Option<&Ordinal> {
        match self {
            Label::Ord(o) => Some(o),
            _ => None,
        }
    }

    pub fn natural(&self) -> Option<u64> {
        self.ordinal().and_then(Ordinal::as_natural)
    }

    /// The controller wins the game from `(gamma, q)` iff its label is at most gamma.
    pub fn controller_wins_at(&self, gamma: &Ordinal) -> bool {
        matches!(self, Label::Ord(o) if o <= gamma)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Ord(o) => write!(f, "{o}"),
            Label::Win => f.write_str("win"),
            Label::Lose => f.write_str("lose"),
        }
    }
}

impl FromStr for Label {
    type Err = crate::ordinal::OrdinalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "win" => Ok(Label::Win),
            "lose" => Ok(Label::Lose),
            _ => s.parse().map(Label::Ord),
        }
    }
}

impl Serialize for Label {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        String::deserialize(deserializer)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Perspective {
    Controller,
    NonController,
}

/// Per-state labels of one player, computed under time limit bound `gamma`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelMap {
    pub player: Player,
    pub perspective: Perspective,
    pub gamma: Ordinal,
    pub labels: Vec<Label>,
}

impl LabelMap {
    pub fn get(&self, q: usize) -> &Label {
        &self.labels[q]
    }

    /// `state<TAB>label` lines in state order.
    pub fn dump(&self, model: &Model) -> String {
        let mut out = String::new();
        for (q, l) in self.labels.iter().enumerate() {
            out.push_str(model.state_name(q));
            out.push('\t');
            out.push_str(&l.to_string());
            out.push('\n');
        }
        out
    }
}

/// Controller labels: 0 on goal states, then `k` for safe states from which the
/// controller can force a step into labels below `k`, for every `k < gamma`.
pub fn compute_labels(spec: &EmbeddedGameSpec, gamma: &Ordinal) -> Result<LabelMap, SolverError> {
    if gamma.is_zero() {
        return Err(SolverError::ZeroBound);
    }
    spec.check()?;
    let n = spec.model.state_count();
    let mut labels: Vec<Label> = spec
        .goal
        .iter()
        .map(|&g| if g { Label::Ord(Ordinal::zero()) } else { Label::Lose })
        .collect();
    let mover = spec.controller_is_verifier();
    let mut k: u64 = 1;
    while Ordinal::from(k) < *gamma {
        let target: Vec<bool> = labels.iter().map(|l| matches!(l, Label::Ord(_))).collect();
        let fresh: Vec<usize> = (0..n)
            .filter(|&q| {
                !target[q] && spec.safe[q] && force(spec.model, &spec.coalition, q, &target, mover).is_some()
            })
            .collect();
        if fresh.is_empty() {
            break;
        }
        for q in fresh {
            labels[q] = Label::Ord(Ordinal::from(k));
        }
        k += 1;
    }
    log::debug!("labels at bound {gamma}: {} rounds", k - 1);
    Ok(LabelMap {
        player: spec.controller,
        perspective: Perspective::Controller,
        gamma: gamma.clone(),
        labels,
    })
}

/// The non-controller's labels: ordinals carry over, `lose` becomes `win`.
pub fn opponent_labels(controller: &LabelMap) -> LabelMap {
    let flip = |p: Perspective| match p {
        Perspective::Controller => Perspective::NonController,
        Perspective::NonController => Perspective::Controller,
    };
    LabelMap {
        player: controller.player.opponent(),
        perspective: flip(controller.perspective),
        gamma: controller.gamma.clone(),
        labels: controller
            .labels
            .iter()
            .map(|l| match l {
                Label::Lose => Label::Win,
                Label::Win => Label::Lose,
                o => o.clone(),
            })
            .collect(),
    }
}

/// Winner of the unbounded embedded game started at `q`.
pub fn unbounded_winner(spec: &EmbeddedGameSpec, q: usize) -> Result<Player, SolverError> {
    let labels = compute_labels(spec, &spec.model.stable_bound())?;
    Ok(match labels.get(q) {
        Label::Ord(_) => spec.controller,
        _ => spec.controller.opponent(),
    })
}
