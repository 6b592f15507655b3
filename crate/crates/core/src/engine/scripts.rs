//! Named machine scripts for the `fig2` lazy model.
//!
//! Eloise scripts aim at the diagonal: from `(i,j)` with `j <= i` the diagonal
//! is `i - j` steps away, so that is the limit they announce or lower to.
//! Abelard scripts pick the column at the root.

use super::{EmbeddedCtx, EngineError, GameModel, Menu, Mode, Move, Phase, Session, Stage, StateKey};
use crate::ordinal::Ordinal;
use crate::Player;

pub const SCRIPT_NAMES: &[&str] = &[
    "fig2-abelard",
    "fig2-abelard-fixed:<n>",
    "fig2-eloise-omega",
    "fig2-eloise-diagonal",
    "fig2-eloise-fixed:<n>",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Script {
    /// Picks the column equal to the announced limit (0 without one).
    Abelard,
    AbelardFixed(u64),
    /// Announces w at the root when the bound allows it, then lowers by distance.
    EloiseOmega,
    /// Announces the distance to the diagonal, 0 at the root.
    EloiseDiagonal,
    /// Announces `n` at the root, the distance elsewhere.
    EloiseFixed(u64),
}

fn parse(name: &str) -> Option<Script> {
    match name {
        "fig2-abelard" => Some(Script::Abelard),
        "fig2-eloise-omega" => Some(Script::EloiseOmega),
        "fig2-eloise-diagonal" => Some(Script::EloiseDiagonal),
        _ => {
            if let Some(n) = name.strip_prefix("fig2-abelard-fixed:") {
                n.parse().ok().map(Script::AbelardFixed)
            } else if let Some(n) = name.strip_prefix("fig2-eloise-fixed:") {
                n.parse().ok().map(Script::EloiseFixed)
            } else {
                None
            }
        }
    }
}

pub(crate) fn known(name: &str) -> bool {
    parse(name).is_some()
}

pub(crate) fn check(name: &str, model: &GameModel) -> Result<(), EngineError> {
    if !known(name) {
        return Err(EngineError::UnknownScript(name.to_string()));
    }
    match model {
        GameModel::Lazy(m) if m.name() == "fig2" => Ok(()),
        _ => Err(EngineError::ScriptNeedsModel {
            script: name.to_string(),
            model: "fig2".into(),
        }),
    }
}

// steps from (i,j) to the diagonal; None at the root or past it
fn distance(q: &StateKey) -> Option<u64> {
    match q {
        StateKey::Lazy(s) => match s.0.as_slice() {
            [i, j] if j <= i => Some(i - j),
            _ => None,
        },
        StateKey::Finite(_) => None,
    }
}

fn is_root(q: &StateKey) -> bool {
    matches!(q, StateKey::Lazy(s) if s.0.is_empty())
}

fn announcement(script: Script, mode: &Mode, q: &StateKey) -> Ordinal {
    if is_root(q) {
        return match (script, mode) {
            (Script::EloiseOmega, Mode::Bounded(g)) if Ordinal::omega() < *g => Ordinal::omega(),
            (Script::EloiseFixed(n), _) => Ordinal::from(n),
            _ => Ordinal::zero(),
        };
    }
    Ordinal::from(distance(q).unwrap_or(0))
}

fn holds_p(session: &Session, q: &StateKey) -> bool {
    session.model().holds(q, "p")
}

pub(crate) fn script_move(session: &Session, name: &str, actor: Player) -> Move {
    let script = parse(name).expect("checked at session start");
    let eloise_script = !matches!(script, Script::Abelard | Script::AbelardFixed(_));
    let menu = session.legal_moves().expect("pending move");
    match (session.phase(), &menu) {
        (Phase::Announce(ctx), _) => Move::Announce(announcement(script, session.mode(), &ctx.position.state)),
        (Phase::Embedded { ctx, state, stage, .. }, _) => match stage {
            Stage::ControllerEnd | Stage::OpponentEnd => {
                if eloise_script && controls(ctx, actor) && holds_p(session, state) {
                    Move::EndNow
                } else {
                    Move::Continue
                }
            }
            Stage::LowerLimit => Move::Lower(announcement(script, session.mode(), state)),
            _ => first_or_column(script, ctx, &menu),
        },
        (Phase::Choose(_), _) => Move::Left,
        (_, menu) => default_actions(script, None, menu),
    }
}

fn controls(ctx: &EmbeddedCtx, actor: Player) -> bool {
    ctx.controller == actor
}

fn first_or_column(script: Script, ctx: &EmbeddedCtx, menu: &Menu) -> Move {
    default_actions(script, ctx.initial_limit.as_ref(), menu)
}

fn default_actions(script: Script, announced: Option<&Ordinal>, menu: &Menu) -> Move {
    let Menu::Actions { domains, .. } = menu else {
        return Move::Continue;
    };
    let column = match script {
        Script::Abelard => announced.and_then(Ordinal::as_natural).unwrap_or(0),
        Script::AbelardFixed(n) => n,
        _ => 0,
    };
    Move::Actions(
        domains
            .iter()
            .map(|d| match d {
                super::DomainView::Naturals => column.to_string(),
                super::DomainView::Finite { actions } => actions[0].clone(),
            })
            .collect(),
    )
}
