use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use super::{check_agents, EvalError, TruthMap};
use crate::cgm::Model;
use crate::formula::{subformulas, AgentSet, Formula};

/// Size limits under which [`oracle_evaluate`] agrees to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleGuard {
    pub max_states: usize,
    pub max_profiles: usize,
    pub max_strategies: u64,
}

impl Default for OracleGuard {
    fn default() -> Self {
        OracleGuard {
            max_states: 6,
            max_profiles: 16,
            max_strategies: 1 << 20,
        }
    }
}

/// Positional, deterministic strategy of a coalition: one coalition profile
/// (action index per member, in coalition order) per state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CollectiveStrategy {
    pub coalition: AgentSet,
    pub profiles: BTreeMap<usize, Vec<usize>>,
}

fn strategies(model: &Model, a: &AgentSet) -> impl Iterator<Item = Vec<Vec<usize>>> {
    let options: Vec<Vec<Vec<usize>>> = (0..model.state_count())
        .map(|q| model.partial_profiles(q, a))
        .collect();
    let total: usize = options.iter().map(Vec::len).product();
    (0..total).map(move |mut idx| {
        options
            .iter()
            .map(|opts| {
                let pick = opts[idx % opts.len()].clone();
                idx /= opts.len();
                pick
            })
            .collect()
    })
}

// successors of every state once the coalition is fixed to `s`
fn pruned_graph(model: &Model, a: &AgentSet, s: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let comp = a.complement(model.agent_count());
    (0..model.state_count())
        .map(|q| {
            let mut next: Vec<usize> = model
                .partial_profiles(q, &comp)
                .iter()
                .map(|b| model.successor(q, &model.combine(a, &s[q], &comp, b)))
                .collect();
            next.sort_unstable();
            next.dedup();
            next
        })
        .collect()
}

// every path from q reaches rhs, with lhs holding at all earlier positions
fn until_holds(graph: &[Vec<usize>], q: usize, lhs: &[bool], rhs: &[bool]) -> bool {
    if rhs[q] {
        return true;
    }
    // states reachable through ~rhs states only
    let n = graph.len();
    let mut region = vec![false; n];
    let mut stack = vec![q];
    region[q] = true;
    while let Some(x) = stack.pop() {
        if !lhs[x] {
            return false;
        }
        for &y in &graph[x] {
            if !rhs[y] && !region[y] {
                region[y] = true;
                stack.push(y);
            }
        }
    }
    // any cycle inside the region is an infinite path that never reaches rhs
    let mut color = vec![0u8; n];
    fn has_cycle(x: usize, g: &[Vec<usize>], region: &[bool], color: &mut [u8]) -> bool {
        color[x] = 1;
        for &y in &g[x] {
            if !region[y] {
                continue;
            }
            if color[y] == 1 || (color[y] == 0 && has_cycle(y, g, region, color)) {
                return true;
            }
        }
        color[x] = 2;
        false
    }
    !has_cycle(q, graph, &region, &mut color)
}

// no path reaches a ~rhs state before some lhs state has occurred
fn release_holds(graph: &[Vec<usize>], q: usize, lhs: &[bool], rhs: &[bool]) -> bool {
    let mut seen = vec![false; graph.len()];
    let mut stack = vec![q];
    seen[q] = true;
    while let Some(x) = stack.pop() {
        if !rhs[x] {
            return false;
        }
        if lhs[x] {
            continue;
        }
        for &y in &graph[x] {
            if !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    true
}

/// Standard semantics by enumerating every positional collective strategy.
/// Refuses models beyond the default [`OracleGuard`].
pub fn oracle_evaluate(model: &Model, f: &Formula) -> Result<TruthMap, EvalError> {
    oracle_evaluate_with(model, f, OracleGuard::default())
}

pub fn oracle_evaluate_with(model: &Model, f: &Formula, guard: OracleGuard) -> Result<TruthMap, EvalError> {
    check_agents(model, f)?;
    let n = model.state_count();
    if n > guard.max_states {
        return Err(EvalError::OracleGuard(format!(
            "{n} states, at most {} allowed",
            guard.max_states
        )));
    }
    if let Some(q) = (0..n).find(|&q| model.profile_count(q) > guard.max_profiles) {
        return Err(EvalError::OracleGuard(format!(
            "state '{}' has {} profiles, at most {} allowed",
            model.state_name(q),
            model.profile_count(q),
            guard.max_profiles
        )));
    }
    let subs = subformulas(f);
    for g in &subs {
        if let Some(a) = g.coalition() {
            let count = (0..n).fold(1u64, |acc, q| {
                acc.saturating_mul(model.partial_profiles(q, a).len() as u64)
            });
            if count > guard.max_strategies {
                return Err(EvalError::OracleGuard(format!(
                    "{count} strategies for {a}, at most {} allowed",
                    guard.max_strategies
                )));
            }
        }
    }
    let index: HashMap<&Formula, usize> = subs.iter().enumerate().map(|(i, g)| (g, i)).collect();
    let mut truth: Vec<Vec<bool>> = Vec::with_capacity(subs.len());
    for g in &subs {
        let at = |h: &Formula| truth[index[h]].clone();
        let set: Vec<bool> = match g {
            Formula::True => vec![true; n],
            Formula::False => vec![false; n],
            Formula::Prop(p) => (0..n).map(|q| model.holds(q, p)).collect(),
            Formula::Not(h) => at(h).iter().map(|b| !b).collect(),
            Formula::Or(l, r) => at(l).iter().zip(at(r)).map(|(a, b)| *a || b).collect(),
            Formula::CoopX(a, h) => {
                let target = at(h);
                let mut set = vec![false; n];
                for s in strategies(model, a) {
                    let graph = pruned_graph(model, a, &s);
                    for q in 0..n {
                        set[q] |= graph[q].iter().all(|&y| target[y]);
                    }
                }
                set
            }
            Formula::CoopU(a, l, r) | Formula::CoopR(a, l, r) => {
                let (lhs, rhs) = (at(l), at(r));
                let until = matches!(g, Formula::CoopU(..));
                let mut set = vec![false; n];
                for s in strategies(model, a) {
                    let graph = pruned_graph(model, a, &s);
                    for q in 0..n {
                        if !set[q] {
                            set[q] = if until {
                                until_holds(&graph, q, &lhs, &rhs)
                            } else {
                                release_holds(&graph, q, &lhs, &rhs)
                            };
                        }
                    }
                }
                set
            }
        };
        truth.push(set);
    }
    Ok(TruthMap {
        labels: vec![None; subs.len()],
        subformulas: subs,
        truth,
    })
}

/// A positional strategy witnessing the strategic formula `f` at state `q`,
/// found by the same enumeration as [`oracle_evaluate`].
pub fn oracle_witness(model: &Model, f: &Formula, q: usize) -> Result<Option<CollectiveStrategy>, EvalError> {
    let Some(a) = f.coalition() else {
        return Err(EvalError::Shape(f.to_string()));
    };
    // children evaluated by the oracle itself; also applies the size guard
    let sub = |g: &Formula| oracle_evaluate(model, g).map(|t| t.root().to_vec());
    let children = f.children();
    let first = sub(children[0])?;
    let second = match children.get(1) {
        Some(g) => sub(g)?,
        None => Vec::new(),
    };
    for s in strategies(model, a) {
        let graph = pruned_graph(model, a, &s);
        let ok = match f {
            Formula::CoopX(..) => graph[q].iter().all(|&y| first[y]),
            Formula::CoopU(..) => until_holds(&graph, q, &first, &second),
            _ => release_holds(&graph, q, &first, &second),
        };
        if ok {
            return Ok(Some(CollectiveStrategy {
                coalition: a.clone(),
                profiles: s.into_iter().enumerate().collect(),
            }));
        }
    }
    Ok(None)
}
