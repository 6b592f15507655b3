//! Reference computations written directly from the definitions, kept apart
//! from the library so that tests compare against something independent.
#![allow(dead_code)]

use atlgts::cgm::Model;
use atlgts::formula::{AgentSet, Formula};

/// All full profiles at `q` as (coalition part, complement part, successor).
fn moves(model: &Model, a: &AgentSet, q: usize) -> Vec<(Vec<usize>, Vec<usize>, usize)> {
    let k = model.agent_count();
    let sizes: Vec<usize> = (1..=k).map(|ag| model.actions(ag, q).len()).collect();
    let mut out = Vec::new();
    let mut prof = vec![0usize; k];
    loop {
        let mine: Vec<usize> = (1..=k).filter(|ag| a.contains(*ag)).map(|ag| prof[ag - 1]).collect();
        let theirs: Vec<usize> = (1..=k).filter(|ag| !a.contains(*ag)).map(|ag| prof[ag - 1]).collect();
        out.push((mine, theirs, model.successor(q, &prof)));
        // odometer, last agent fastest
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            prof[i] += 1;
            if prof[i] < sizes[i] {
                break;
            }
            prof[i] = 0;
        }
    }
}

/// Can the coalition (moving first, committing) force a successor in `target`?
pub fn coalition_forces(model: &Model, a: &AgentSet, q: usize, target: &[bool]) -> bool {
    let ms = moves(model, a, q);
    ms.iter()
        .any(|(al, _, _)| ms.iter().filter(|(x, _, _)| x == al).all(|(_, _, s)| target[*s]))
}

/// Can the complement, answering every coalition choice, force a successor in `target`?
pub fn complement_forces(model: &Model, a: &AgentSet, q: usize, target: &[bool]) -> bool {
    let ms = moves(model, a, q);
    ms.iter()
        .all(|(al, _, _)| ms.iter().filter(|(x, _, _)| x == al).any(|(_, _, s)| target[*s]))
}

/// Fixpoint semantics, evaluated naively.
pub fn naive_truth(model: &Model, f: &Formula) -> Vec<bool> {
    let n = model.state_count();
    let pre = |a: &AgentSet, t: &[bool]| -> Vec<bool> { (0..n).map(|q| coalition_forces(model, a, q, t)).collect() };
    match f {
        Formula::True => vec![true; n],
        Formula::False => vec![false; n],
        Formula::Prop(p) => (0..n).map(|q| model.holds(q, p)).collect(),
        Formula::Not(g) => naive_truth(model, g).into_iter().map(|b| !b).collect(),
        Formula::Or(l, r) => {
            let (l, r) = (naive_truth(model, l), naive_truth(model, r));
            l.iter().zip(r).map(|(a, b)| *a || b).collect()
        }
        Formula::CoopX(a, g) => pre(a, &naive_truth(model, g)),
        Formula::CoopU(a, l, r) => {
            let (l, r) = (naive_truth(model, l), naive_truth(model, r));
            let mut z = vec![false; n];
            loop {
                let p = pre(a, &z);
                let next: Vec<bool> = (0..n).map(|q| r[q] || (l[q] && p[q])).collect();
                if next == z {
                    return z;
                }
                z = next;
            }
        }
        Formula::CoopR(a, l, r) => {
            let (l, r) = (naive_truth(model, l), naive_truth(model, r));
            let mut z = vec![true; n];
            loop {
                let p = pre(a, &z);
                let next: Vec<bool> = (0..n).map(|q| r[q] && (l[q] || p[q])).collect();
                if next == z {
                    return z;
                }
                z = next;
            }
        }
    }
}

/// Backward induction over configurations `(gamma, q)`, `gamma <= max_gamma`:
/// `w[gamma][q]` says whether the controller wins the bounded embedded game.
///
/// At limit 0 the play exits on the controller's formula. Otherwise the
/// controller may end (winning iff `goal`), then the opponent may end (the
/// controller winning iff `safe`), then one step is played at `gamma - 1`.
pub fn backward_induction(
    model: &Model,
    a: &AgentSet,
    controller_is_verifier: bool,
    goal: &[bool],
    safe: &[bool],
    max_gamma: usize,
) -> Vec<Vec<bool>> {
    let n = model.state_count();
    let mut w = vec![goal.to_vec()];
    for g in 1..=max_gamma {
        let prev = &w[g - 1];
        let row = (0..n)
            .map(|q| {
                if goal[q] {
                    return true;
                }
                if !safe[q] {
                    return false;
                }
                if controller_is_verifier {
                    coalition_forces(model, a, q, prev)
                } else {
                    complement_forces(model, a, q, prev)
                }
            })
            .collect();
        w.push(row);
    }
    w
}

/// Least `gamma <= max_gamma` at which the controller wins, per state.
pub fn least_winning_limit(w: &[Vec<bool>], q: usize) -> Option<usize> {
    w.iter().position(|row| row[q])
}

/// Best worst-case rank the mover can guarantee for the next state
/// (`None` = infinite rank).
pub fn best_forced_rank(
    model: &Model,
    a: &AgentSet,
    q: usize,
    rank: &[Option<u64>],
    mover_is_verifier: bool,
) -> Option<u64> {
    let key = |s: usize| rank[s].unwrap_or(u64::MAX);
    let ms = moves(model, a, q);
    let mut alphas: Vec<&Vec<usize>> = ms.iter().map(|(x, _, _)| x).collect();
    alphas.sort();
    alphas.dedup();
    let per_alpha = alphas.iter().map(|al| ms.iter().filter(|(x, _, _)| x == *al).map(|(_, _, s)| key(*s)));
    let v = if mover_is_verifier {
        per_alpha.map(|it| it.max().unwrap()).min().unwrap()
    } else {
        per_alpha.map(|it| it.min().unwrap()).max().unwrap()
    };
    (v != u64::MAX).then_some(v)
}
