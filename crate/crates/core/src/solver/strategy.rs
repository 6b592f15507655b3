use serde::{Deserialize, Serialize};

use super::{force, opponent_labels, Decision, EmbeddedGameSpec, Label, LabelMap, Perspective, SolverError};
use crate::cgm::Model;
use crate::formula::AgentSet;
use crate::ordinal::Ordinal;

/// What a strategy does at a state: end the embedded game at its own exit,
/// play a decision, or make the fixed arbitrary choice ("any").
///
/// "Any" is the lexicographically least legal option, and ending comes first:
/// at an end-offer it ends, in the one-step game it plays [`any_decision`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Choice {
    End,
    Move(Decision),
    Any,
}

impl Choice {
    pub fn ends(&self) -> bool {
        matches!(self, Choice::End | Choice::Any)
    }
}

/// Least decision: all first actions, or a response table of first actions.
pub fn any_decision(model: &Model, coalition: &AgentSet, q: usize, mover_is_verifier: bool) -> Decision {
    let complement = coalition.complement(model.agent_count());
    if mover_is_verifier {
        Decision::Profile(vec![0; coalition.len()])
    } else {
        let rows = model.partial_profiles(q, coalition).len();
        Decision::Response(vec![vec![0; complement.len()]; rows])
    }
}

fn resolve(choice: &Choice, spec: &EmbeddedGameSpec, q: usize, mover_is_verifier: bool) -> Decision {
    match choice {
        Choice::Move(d) => d.clone(),
        _ => any_decision(spec.model, &spec.coalition, q, mover_is_verifier),
    }
}

/// State-only canonical strategy of the controller, with its timer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ControllerStrategy {
    pub choices: Vec<Choice>,
    pub labels: Vec<Label>,
}

impl ControllerStrategy {
    pub fn choice(&self, q: usize) -> &Choice {
        &self.choices[q]
    }

    pub fn decision(&self, spec: &EmbeddedGameSpec, q: usize) -> Decision {
        resolve(&self.choices[q], spec, q, spec.controller_is_verifier())
    }

    /// Canonical timer: the label of the new state when it is below the current
    /// limit, otherwise the fixed choice 0.
    pub fn timer(&self, gamma: &Ordinal, q: usize) -> Ordinal {
        match &self.labels[q] {
            Label::Ord(l) if l < gamma => l.clone(),
            _ => Ordinal::zero(),
        }
    }
}

pub fn canonical_controller(
    spec: &EmbeddedGameSpec,
    labels: &LabelMap,
) -> Result<ControllerStrategy, SolverError> {
    if labels.perspective != Perspective::Controller {
        return Err(SolverError::WrongPerspective);
    }
    let mover = spec.controller_is_verifier();
    let choices = (0..spec.model.state_count())
        .map(|q| match &labels.labels[q] {
            Label::Ord(k) if k.is_zero() => Choice::End,
            Label::Ord(k) => {
                let target: Vec<bool> = labels
                    .labels
                    .iter()
                    .map(|l| matches!(l, Label::Ord(o) if o < k))
                    .collect();
                force(spec.model, &spec.coalition, q, &target, mover)
                    .map_or(Choice::Any, Choice::Move)
            }
            _ => Choice::Any,
        })
        .collect();
    Ok(ControllerStrategy {
        choices,
        labels: labels.labels.clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum NonControllerVariant {
    /// Indexed by configuration `(gamma, q)`.
    Full,
    /// State-only, tuned to a known finite limit.
    N(u64),
    /// State-only, tuned to the largest limit below a successor bound.
    Infinity,
}

/// Canonical strategy of the non-controller in one of its three variants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonControllerStrategy {
    pub variant: NonControllerVariant,
    gamma_bound: Ordinal,
    // controller-perspective labels
    controller: Vec<Label>,
}

pub fn canonical_noncontroller(
    labels: &LabelMap,
    variant: NonControllerVariant,
) -> Result<NonControllerStrategy, SolverError> {
    if labels.perspective != Perspective::NonController {
        return Err(SolverError::WrongPerspective);
    }
    if variant == NonControllerVariant::Infinity && !labels.gamma.is_successor() {
        return Err(SolverError::LimitBound(labels.gamma.clone()));
    }
    Ok(NonControllerStrategy {
        variant,
        gamma_bound: labels.gamma.clone(),
        controller: opponent_labels(labels).labels,
    })
}

impl NonControllerStrategy {
    /// The choice at configuration `(gamma, q)`; state-only variants ignore gamma.
    pub fn choice(&self, spec: &EmbeddedGameSpec, gamma: &Ordinal, q: usize) -> Choice {
        match self.variant {
            NonControllerVariant::Full => self.full(spec, gamma, q),
            NonControllerVariant::N(n) => match &self.controller[q] {
                Label::Lose | Label::Win => self.full(spec, &Ordinal::from(n), q),
                Label::Ord(o) if !o.is_finite() => self.full(spec, &Ordinal::from(n), q),
                Label::Ord(o) => match o.as_natural() {
                    Some(m) if m > 0 => self.full(spec, &Ordinal::from(m - 1), q),
                    _ => Choice::Any,
                },
            },
            NonControllerVariant::Infinity => match &self.controller[q] {
                Label::Lose => {
                    let top = self.gamma_bound.predecessor().expect("checked successor bound");
                    self.full(spec, &top, q)
                }
                _ => Choice::Any,
            },
        }
    }

    pub fn decision(&self, spec: &EmbeddedGameSpec, gamma: &Ordinal, q: usize) -> Decision {
        resolve(&self.choice(spec, gamma, q), spec, q, !spec.controller_is_verifier())
    }

    // Winning at (gamma, q) means the controller's label exceeds gamma. Then end
    // at the own exit if that wins, else keep play among states still above gamma.
    fn full(&self, spec: &EmbeddedGameSpec, gamma: &Ordinal, q: usize) -> Choice {
        let above = |l: &Label| match l {
            Label::Ord(o) => o >= gamma,
            _ => true,
        };
        let winning = match &self.controller[q] {
            Label::Ord(o) => o > gamma,
            _ => true,
        };
        // at limit 0 the game exits before anyone moves
        if !winning || gamma.is_zero() {
            return Choice::Any;
        }
        if !spec.safe[q] {
            return Choice::End;
        }
        let target: Vec<bool> = self.controller.iter().map(above).collect();
        force(spec.model, &spec.coalition, q, &target, !spec.controller_is_verifier())
            .map_or(Choice::Any, Choice::Move)
    }
}
