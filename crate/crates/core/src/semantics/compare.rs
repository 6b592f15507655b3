use std::collections::BTreeMap;

use serde::Serialize;

use super::{evaluate, EvalError, SemanticsKind};
use crate::cgm::Model;
use crate::formula::{unfold_always, unfold_until, Formula};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Disagreement {
    pub subformula: String,
    pub state: String,
    pub values: BTreeMap<String, bool>,
}

/// Truth of a formula under all four semantics, and every point where they differ.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CompareReport {
    pub formula: String,
    pub per_kind: BTreeMap<String, BTreeMap<String, bool>>,
    pub disagreements: Vec<Disagreement>,
}

/// Evaluates under every semantics (bounded at the stable bound) and lists
/// disagreements on any subformula. On finite models the list must be empty.
pub fn compare_semantics(model: &Model, f: &Formula) -> Result<CompareReport, EvalError> {
    let kinds = SemanticsKind::all();
    let maps = kinds
        .iter()
        .map(|k| evaluate(model, f, k))
        .collect::<Result<Vec<_>, _>>()?;
    let mut per_kind = BTreeMap::new();
    for (k, t) in kinds.iter().zip(&maps) {
        per_kind.insert(
            k.name().to_string(),
            t.root()
                .iter()
                .enumerate()
                .map(|(q, &b)| (model.state_name(q).to_string(), b))
                .collect(),
        );
    }
    let mut disagreements = Vec::new();
    for (i, g) in maps[0].subformulas.iter().enumerate() {
        for q in 0..model.state_count() {
            let first = maps[0].truth[i][q];
            if maps.iter().any(|t| t.truth[i][q] != first) {
                disagreements.push(Disagreement {
                    subformula: g.to_string(),
                    state: model.state_name(q).to_string(),
                    values: kinds
                        .iter()
                        .zip(&maps)
                        .map(|(k, t)| (k.name().to_string(), t.truth[i][q]))
                        .collect(),
                });
            }
        }
    }
    Ok(CompareReport {
        formula: f.to_string(),
        per_kind,
        disagreements,
    })
}

/// Finitely bounded truth of a `<<A>> G` or `<<A>> U` formula checked against
/// its finite unfoldings, plus the one-directional fixpoint axioms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct UnfoldingReport {
    pub formula: String,
    pub max_n: usize,
    /// `unfolded[n][q]`: the n-th unfolding holds at q.
    pub unfolded: Vec<Vec<bool>>,
    pub truth: Vec<bool>,
    /// For U: least n whose unfolding holds; for G: least n whose unfolding fails.
    pub least_n: Vec<Option<usize>>,
    /// Truth equals "some n" (U) or "every n" (G) at every state.
    pub unfolding_agrees: bool,
    /// PreFP for G, PostFP for U, valid at every state.
    pub half_fixpoint_valid: bool,
    /// The full fixpoint biconditional, valid at every state.
    pub fixpoint_valid: bool,
}

pub fn check_fb_unfolding(model: &Model, f: &Formula) -> Result<UnfoldingReport, EvalError> {
    let fb = SemanticsKind::FinitelyBounded;
    let holds = |g: &Formula| evaluate(model, g, &fb).map(|t| t.root().to_vec());
    let max_n = model.state_count() + 2;
    let (is_until, a, unfold): (bool, _, Box<dyn Fn(usize) -> Formula>) = match f {
        Formula::CoopU(a, psi, theta) => (true, a, Box::new(move |n| unfold_until(a, psi, theta, n))),
        Formula::CoopR(a, lhs, theta) if **lhs == Formula::False => {
            (false, a, Box::new(move |n| unfold_always(a, theta, n)))
        }
        _ => return Err(EvalError::Shape(f.to_string())),
    };
    let truth = holds(f)?;
    let unfolded = (0..=max_n).map(|n| holds(&unfold(n))).collect::<Result<Vec<_>, _>>()?;
    let n_states = model.state_count();
    let least_n: Vec<Option<usize>> = (0..n_states)
        .map(|q| (0..=max_n).find(|&n| unfolded[n][q] == is_until))
        .collect();
    let unfolding_agrees = (0..n_states).all(|q| truth[q] == (least_n[q].is_some() == is_until));

    let next_f = Formula::next(a.clone(), f.clone());
    let (unfolded_once, half) = match f {
        Formula::CoopU(_, psi, theta) => {
            let body = Formula::or((**theta).clone(), Formula::and((**psi).clone(), next_f));
            // f -> body
            (body.clone(), Formula::or(Formula::not(f.clone()), body))
        }
        Formula::CoopR(_, _, theta) => {
            let body = Formula::and((**theta).clone(), next_f);
            // body -> f
            (body.clone(), Formula::or(Formula::not(body), f.clone()))
        }
        _ => unreachable!(),
    };
    let half_fixpoint_valid = holds(&half)?.iter().all(|&b| b);
    let fixpoint_valid = holds(&unfolded_once)? == truth;
    Ok(UnfoldingReport {
        formula: f.to_string(),
        max_n,
        unfolded,
        truth,
        least_n,
        unfolding_agrees,
        half_fixpoint_valid,
        fixpoint_valid,
    })
}
