//! Truth evaluation under the standard compositional semantics and the
//! game-theoretic ones, plus a brute-force oracle and cross-checks.

mod compare;
mod oracle;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cgm::Model;
use crate::formula::{subformulas, AgentSet, Formula};
use crate::ordinal::Ordinal;
use crate::solver::{compute_labels, force, EmbeddedGameSpec, Label, LabelMap, Perspective, SolverError};
use crate::Player;

pub use compare::{
    check_fb_unfolding, compare_semantics, CompareReport, Disagreement, UnfoldingReport,
};
pub use oracle::{oracle_evaluate, oracle_evaluate_with, oracle_witness, CollectiveStrategy, OracleGuard};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("coalition in '{formula}' mentions agent {agent}, but the model has agents 1..={agents}")]
    UnknownAgent {
        formula: String,
        agent: usize,
        agents: usize,
    },
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("model too large for the oracle: {0}")]
    OracleGuard(String),
    #[error("expected a <<A>> G or <<A>> U formula, got '{0}'")]
    Shape(String),
}

/// Time limit bound for bounded game semantics.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum GammaBound {
    /// The model's stable bound (its state count).
    Auto,
    Bound(Ordinal),
}

impl GammaBound {
    pub fn resolve(&self, model: &Model) -> Ordinal {
        match self {
            GammaBound::Auto => model.stable_bound(),
            GammaBound::Bound(g) => g.clone(),
        }
    }
}

impl FromStr for GammaBound {
    type Err = crate::ordinal::OrdinalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "auto" {
            Ok(GammaBound::Auto)
        } else {
            s.parse().map(GammaBound::Bound)
        }
    }
}

impl fmt::Display for GammaBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GammaBound::Auto => f.write_str("auto"),
            GammaBound::Bound(g) => write!(f, "{g}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum SemanticsKind {
    Standard,
    GtsUnbounded,
    GtsBounded(GammaBound),
    FinitelyBounded,
}

impl SemanticsKind {
    /// All four kinds, bounded at the stable bound.
    pub fn all() -> [SemanticsKind; 4] {
        [
            SemanticsKind::Standard,
            SemanticsKind::GtsUnbounded,
            SemanticsKind::GtsBounded(GammaBound::Auto),
            SemanticsKind::FinitelyBounded,
        ]
    }

    /// Short name as used on the command line and in reports.
    pub fn name(&self) -> &'static str {
        match self {
            SemanticsKind::Standard => "standard",
            SemanticsKind::GtsUnbounded => "gts-unbounded",
            SemanticsKind::GtsBounded(_) => "gts-bounded",
            SemanticsKind::FinitelyBounded => "gts-finitely-bounded",
        }
    }

    /// Parses a kind name; `gamma` only applies to `gts-bounded`.
    pub fn from_name(name: &str, gamma: GammaBound) -> Option<SemanticsKind> {
        Some(match name {
            "standard" => SemanticsKind::Standard,
            "gts-unbounded" => SemanticsKind::GtsUnbounded,
            "gts-bounded" => SemanticsKind::GtsBounded(gamma),
            "gts-finitely-bounded" | "finitely-bounded" => SemanticsKind::FinitelyBounded,
            _ => return None,
        })
    }
}

/// Truth sets of every subformula, children first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TruthMap {
    pub subformulas: Vec<Formula>,
    /// `truth[i][q]`: subformula `i` holds at state `q`.
    pub truth: Vec<Vec<bool>>,
    /// Labels of the embedded game behind each U/R subformula, when the
    /// semantics computes them.
    pub labels: Vec<Option<LabelMap>>,
}

impl TruthMap {
    /// Truth set of the evaluated formula.
    pub fn root(&self) -> &[bool] {
        self.truth.last().expect("at least one subformula")
    }

    pub fn get(&self, f: &Formula) -> Option<&[bool]> {
        self.subformulas
            .iter()
            .position(|g| g == f)
            .map(|i| self.truth[i].as_slice())
    }

    pub fn root_labels(&self) -> Option<&LabelMap> {
        self.labels.last().and_then(Option::as_ref)
    }
}

pub(crate) fn check_agents(model: &Model, f: &Formula) -> Result<(), EvalError> {
    for g in subformulas(f) {
        if let Some(a) = g.coalition() {
            if let Some(&bad) = a.agents().iter().find(|&&a| a == 0 || a > model.agent_count()) {
                return Err(EvalError::UnknownAgent {
                    formula: g.to_string(),
                    agent: bad,
                    agents: model.agent_count(),
                });
            }
        }
    }
    Ok(())
}

/// States from which the coalition, moving first, can force the next state into `target`.
pub fn cpre(model: &Model, coalition: &AgentSet, target: &[bool]) -> Vec<bool> {
    (0..model.state_count())
        .map(|q| force(model, coalition, q, target, true).is_some())
        .collect()
}

fn not(v: &[bool]) -> Vec<bool> {
    v.iter().map(|b| !b).collect()
}

/// Embedded game of a U/R subformula with Eloise as verifier.
pub(crate) fn embedded_spec<'m>(
    model: &'m Model,
    coalition: &AgentSet,
    is_until: bool,
    lhs: &[bool],
    rhs: &[bool],
) -> EmbeddedGameSpec<'m> {
    // until: Eloise controls and aims at rhs while lhs keeps her safe;
    // release: Abelard controls and aims at ~rhs while ~lhs keeps him safe
    if is_until {
        EmbeddedGameSpec {
            model,
            verifier: Player::E,
            controller: Player::E,
            coalition: coalition.clone(),
            goal: rhs.to_vec(),
            safe: lhs.to_vec(),
        }
    } else {
        EmbeddedGameSpec {
            model,
            verifier: Player::E,
            controller: Player::A,
            coalition: coalition.clone(),
            goal: not(rhs),
            safe: not(lhs),
        }
    }
}

/// Evaluates `f` at every state of `model`.
pub fn evaluate(model: &Model, f: &Formula, kind: &SemanticsKind) -> Result<TruthMap, EvalError> {
    check_agents(model, f)?;
    let subs = subformulas(f);
    let index: HashMap<&Formula, usize> = subs.iter().enumerate().map(|(i, g)| (g, i)).collect();
    let n = model.state_count();
    let mut truth: Vec<Vec<bool>> = Vec::with_capacity(subs.len());
    let mut labels = Vec::with_capacity(subs.len());
    for g in &subs {
        let at = |h: &Formula| truth[index[h]].clone();
        let mut label = None;
        let set = match g {
            Formula::True => vec![true; n],
            Formula::False => vec![false; n],
            Formula::Prop(p) => (0..n).map(|q| model.holds(q, p)).collect(),
            Formula::Not(h) => not(&at(h)),
            Formula::Or(l, r) => at(l).iter().zip(at(r)).map(|(a, b)| *a || b).collect(),
            Formula::CoopX(a, h) => cpre(model, a, &at(h)),
            Formula::CoopU(a, l, r) | Formula::CoopR(a, l, r) => {
                let is_until = matches!(g, Formula::CoopU(..));
                let (lhs, rhs) = (at(l), at(r));
                match kind {
                    SemanticsKind::Standard => standard_temporal(model, a, is_until, &lhs, &rhs),
                    SemanticsKind::GtsUnbounded | SemanticsKind::GtsBounded(_) => {
                        let gamma = match kind {
                            SemanticsKind::GtsBounded(b) => b.resolve(model),
                            _ => model.stable_bound(),
                        };
                        let spec = embedded_spec(model, a, is_until, &lhs, &rhs);
                        let l = compute_labels(&spec, &gamma)?;
                        // Eloise wins an until game with an ordinal label; a
                        // release game when Abelard, controlling, cannot win
                        let set = l
                            .labels
                            .iter()
                            .map(|x| matches!(x, Label::Ord(_)) == is_until)
                            .collect();
                        label = Some(l);
                        set
                    }
                    SemanticsKind::FinitelyBounded => {
                        let (set, l) = finitely_bounded_temporal(model, a, is_until, &lhs, &rhs);
                        label = Some(l);
                        set
                    }
                }
            }
        };
        truth.push(set);
        labels.push(label);
    }
    Ok(TruthMap {
        subformulas: subs,
        truth,
        labels,
    })
}

fn standard_temporal(model: &Model, a: &AgentSet, is_until: bool, lhs: &[bool], rhs: &[bool]) -> Vec<bool> {
    let n = model.state_count();
    // least fixpoint for U from the empty set, greatest for R from everything
    let mut z = vec![!is_until; n];
    loop {
        let pre = cpre(model, a, &z);
        let next: Vec<bool> = (0..n)
            .map(|q| {
                if is_until {
                    rhs[q] || (lhs[q] && pre[q])
                } else {
                    rhs[q] && (lhs[q] || pre[q])
                }
            })
            .collect();
        if next == z {
            return z;
        }
        z = next;
    }
}

// Step-indexed approximants: W_k is "within k steps" for U and "for k steps"
// for R. The per-state witness (least k entering W_k for U, least k leaving it
// for R) is reported as the controller's label under the bound omega.
fn finitely_bounded_temporal(
    model: &Model,
    a: &AgentSet,
    is_until: bool,
    lhs: &[bool],
    rhs: &[bool],
) -> (Vec<bool>, LabelMap) {
    let n = model.state_count();
    let mut w = rhs.to_vec();
    let mut witness: Vec<Option<u64>> = vec![None; n];
    let mark = |w: &[bool], k: u64, witness: &mut Vec<Option<u64>>| {
        for q in 0..n {
            if witness[q].is_none() && (w[q] == is_until) {
                witness[q] = Some(k);
            }
        }
    };
    mark(&w, 0, &mut witness);
    let mut k = 0;
    loop {
        k += 1;
        let pre = cpre(model, a, &w);
        let next: Vec<bool> = (0..n)
            .map(|q| {
                if is_until {
                    rhs[q] || (lhs[q] && pre[q])
                } else {
                    rhs[q] && (lhs[q] || pre[q])
                }
            })
            .collect();
        mark(&next, k, &mut witness);
        if next == w {
            break;
        }
        w = next;
    }
    let labels = witness
        .iter()
        .map(|x| x.map_or(Label::Lose, |k| Label::Ord(Ordinal::from(k))))
        .collect();
    let truth = if is_until {
        witness.iter().map(Option::is_some).collect()
    } else {
        witness.iter().map(Option::is_none).collect()
    };
    (
        truth,
        LabelMap {
            player: if is_until { Player::E } else { Player::A },
            perspective: Perspective::Controller,
            gamma: Ordinal::omega(),
            labels,
        },
    )
}
