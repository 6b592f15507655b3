//! Exhaustive game-tree search over the session state machine.
//!
//! The reachable phase graph is built explicitly, then solved one strongly
//! connected component at a time in reverse topological order. Cycles only
//! arise inside a single unbounded embedded game, where staying forever is a
//! loss for that game's controller.

use std::collections::HashMap;

use thiserror::Error;

use super::{DomainView, Menu, Move, Phase, Position, Session};
use crate::ordinal::Ordinal;
use crate::Player;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchLimits {
    pub max_nodes: usize,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits { max_nodes: 200_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("search exceeded {0} positions")]
    TooLarge(usize),
    #[error("search needs a finite model")]
    Lazy,
}

fn phase_position(phase: &Phase) -> Option<&Position> {
    match phase {
        Phase::Choose(p) => Some(p),
        Phase::XStep { position, .. } => Some(position),
        Phase::Announce(ctx) | Phase::Embedded { ctx, .. } => Some(&ctx.position),
        Phase::Ended { .. } => None,
    }
}

// limit choices: naturals up to |S| suffice, since labels never exceed the state count
fn ordinals_below(below: Option<&Ordinal>, cap: u64) -> Vec<Ordinal> {
    (0..=cap)
        .map(Ordinal::from)
        .filter(|o| below.is_none_or(|b| o < b))
        .collect()
}

fn moves(menu: &Menu, cap: u64) -> Vec<Move> {
    match menu {
        Menu::Choice { options, .. } => options.clone(),
        Menu::Actions { domains, .. } => {
            let mut out: Vec<Vec<String>> = vec![Vec::new()];
            for d in domains {
                let DomainView::Finite { actions } = d else {
                    unreachable!("finite models only")
                };
                out = out
                    .into_iter()
                    .flat_map(|p| {
                        actions.iter().map(move |a| {
                            let mut p = p.clone();
                            p.push(a.clone());
                            p
                        })
                    })
                    .collect();
            }
            out.into_iter().map(Move::Actions).collect()
        }
        Menu::Announce { below, .. } => ordinals_below(below.as_ref(), cap).into_iter().map(Move::Announce).collect(),
        Menu::Lower { below, .. } => ordinals_below(Some(below), cap).into_iter().map(Move::Lower).collect(),
    }
}

struct Node {
    phase: Phase,
    owner: Option<Player>,
    // controller of the embedded game this node belongs to
    controller: Option<Player>,
    children: Vec<usize>,
}

/// Winner of the game from the session's current phase under optimal play.
pub fn search_winner(session: &Session, limits: SearchLimits) -> Result<Player, SearchError> {
    let Some(m) = session.model().finite() else {
        return Err(SearchError::Lazy);
    };
    let cap = m.state_count() as u64;
    let mut base = session.clone();
    base.set_recording(false);

    let mut index: HashMap<Phase, usize> = HashMap::new();
    let mut nodes: Vec<Node> = Vec::new();
    let mut stack = vec![session.phase().clone()];
    index.insert(session.phase().clone(), 0);
    nodes.push(Node {
        phase: session.phase().clone(),
        owner: None,
        controller: None,
        children: Vec::new(),
    });
    while let Some(phase) = stack.pop() {
        let id = index[&phase];
        let mut s = base.clone();
        if let Some(p) = phase_position(&phase) {
            s.position = p.clone();
        }
        s.phase = phase.clone();
        let controller = match &phase {
            Phase::Announce(ctx) | Phase::Embedded { ctx, .. } => Some(ctx.controller),
            _ => None,
        };
        nodes[id].controller = controller;
        let Some(menu) = s.legal_moves() else { continue };
        let owner = menu.actor();
        nodes[id].owner = Some(owner);
        let mut children = Vec::new();
        for mv in moves(&menu, cap) {
            let mut c = s.clone();
            c.apply_move(owner, mv).expect("enumerated moves are legal");
            let next = c.phase;
            let cid = match index.get(&next) {
                Some(&i) => i,
                None => {
                    let i = nodes.len();
                    if i >= limits.max_nodes {
                        return Err(SearchError::TooLarge(limits.max_nodes));
                    }
                    index.insert(next.clone(), i);
                    nodes.push(Node {
                        phase: next.clone(),
                        owner: None,
                        controller: None,
                        children: Vec::new(),
                    });
                    stack.push(next);
                    i
                }
            };
            children.push(cid);
        }
        nodes[id].children = children;
    }
    let winners = solve(&nodes);
    Ok(winners[0])
}

fn solve(nodes: &[Node]) -> Vec<Player> {
    let mut win: Vec<Option<Player>> = nodes
        .iter()
        .map(|n| match n.phase {
            Phase::Ended { winner, .. } => Some(winner),
            _ => None,
        })
        .collect();
    for scc in tarjan(nodes) {
        if scc.len() == 1 && !nodes[scc[0]].children.contains(&scc[0]) {
            let n = &nodes[scc[0]];
            if let Some(owner) = n.owner {
                let good = n.children.iter().any(|&c| win[c] == Some(owner));
                win[scc[0]] = Some(if good { owner } else { owner.opponent() });
            }
            continue;
        }
        // a cycle: the controller must force its way out to a winning node
        let c = nodes[scc[0]].controller.expect("cycles stay inside an embedded game");
        let mut reach: HashMap<usize, bool> = scc.iter().map(|&i| (i, false)).collect();
        loop {
            let mut changed = false;
            for &i in &scc {
                if reach[&i] {
                    continue;
                }
                let n = &nodes[i];
                let ok = |k: &usize| reach.get(k).copied().unwrap_or(win[*k] == Some(c));
                let v = if n.owner == Some(c) {
                    n.children.iter().any(ok)
                } else {
                    n.children.iter().all(ok)
                };
                if v {
                    reach.insert(i, true);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        for &i in &scc {
            win[i] = Some(if reach[&i] { c } else { c.opponent() });
        }
    }
    win.into_iter().map(|w| w.expect("every node solved")).collect()
}

// iterative Tarjan; components come out in reverse topological order
fn tarjan(nodes: &[Node]) -> Vec<Vec<usize>> {
    let n = nodes.len();
    let mut idx = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on = vec![false; n];
    let mut st = Vec::new();
    let mut out = Vec::new();
    let mut counter = 0;
    for root in 0..n {
        if idx[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        idx[root] = counter;
        low[root] = counter;
        counter += 1;
        st.push(root);
        on[root] = true;
        while let Some(&mut (v, ref mut ci)) = call.last_mut() {
            if *ci < nodes[v].children.len() {
                let w = nodes[v].children[*ci];
                *ci += 1;
                if idx[w] == usize::MAX {
                    idx[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    st.push(w);
                    on[w] = true;
                    call.push((w, 0));
                } else if on[w] {
                    low[v] = low[v].min(idx[w]);
                }
            } else {
                call.pop();
                if let Some(&(u, _)) = call.last() {
                    low[u] = low[u].min(low[v]);
                }
                if low[v] == idx[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = st.pop().expect("on stack");
                        on[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    out.push(comp);
                }
            }
        }
    }
    out
}
