use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

/// Actions available to one agent at one lazy state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ActionDomain {
    Finite(Vec<String>),
    /// One action per natural number, named by its decimal text.
    AllNaturals,
}

impl ActionDomain {
    /// Index of a named action, if legal.
    pub fn lookup(&self, name: &str) -> Option<u64> {
        match self {
            ActionDomain::Finite(names) => names.iter().position(|n| n == name).map(|i| i as u64),
            ActionDomain::AllNaturals => {
                let ok = !name.is_empty()
                    && name.bytes().all(|b| b.is_ascii_digit())
                    && (name == "0" || !name.starts_with('0'));
                ok.then(|| name.parse().ok()).flatten()
            }
        }
    }

    pub fn name(&self, idx: u64) -> String {
        match self {
            ActionDomain::Finite(names) => names[idx as usize].clone(),
            ActionDomain::AllNaturals => idx.to_string(),
        }
    }
}

/// State of a lazy model, encoded as a vector of naturals.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LazyState(pub Vec<u64>);

/// A model generated on demand. All methods must be pure.
pub trait LazyModel: Send + Sync + fmt::Debug {
    fn name(&self) -> &str;
    fn agents(&self) -> usize;
    fn initial(&self) -> LazyState;
    fn props(&self, q: &LazyState) -> BTreeSet<String>;
    /// Never empty.
    fn actions(&self, agent: usize, q: &LazyState) -> ActionDomain;
    /// `profile[i]` is the action index of agent `i + 1`.
    fn step(&self, q: &LazyState, profile: &[u64]) -> LazyState;
    fn render(&self, q: &LazyState) -> String;
    fn parse_state(&self, text: &str) -> Option<LazyState>;
    fn image_finite(&self) -> bool;
}

/// Single-agent model with root `q0`, one successor `(i,0)` per natural `i`,
/// and deterministic columns `(i,j) -> (i,j+1)`; `p` holds on the diagonal.
#[derive(Debug, Clone, Copy, Default)]
pub struct Fig2Model;

impl LazyModel for Fig2Model {
    fn name(&self) -> &str {
        "fig2"
    }

    fn agents(&self) -> usize {
        1
    }

    fn initial(&self) -> LazyState {
        LazyState(vec![])
    }

    fn props(&self, q: &LazyState) -> BTreeSet<String> {
        match q.0.as_slice() {
            [i, j] if i == j => BTreeSet::from(["p".to_string()]),
            _ => BTreeSet::new(),
        }
    }

    fn actions(&self, _agent: usize, q: &LazyState) -> ActionDomain {
        if q.0.is_empty() {
            ActionDomain::AllNaturals
        } else {
            ActionDomain::Finite(vec!["0".into()])
        }
    }

    fn step(&self, q: &LazyState, profile: &[u64]) -> LazyState {
        match q.0.as_slice() {
            [] => LazyState(vec![profile[0], 0]),
            [i, j] => LazyState(vec![*i, j + 1]),
            _ => q.clone(),
        }
    }

    fn render(&self, q: &LazyState) -> String {
        match q.0.as_slice() {
            [] => "q0".into(),
            [i, j] => format!("({i},{j})"),
            other => format!("{other:?}"),
        }
    }

    fn parse_state(&self, text: &str) -> Option<LazyState> {
        let t = text.trim();
        if t == "q0" {
            return Some(LazyState(vec![]));
        }
        let inner = t.strip_prefix('(')?.strip_suffix(')')?;
        let (i, j) = inner.split_once(',')?;
        Some(LazyState(vec![i.trim().parse().ok()?, j.trim().parse().ok()?]))
    }

    fn image_finite(&self) -> bool {
        false
    }
}

pub fn fig2_lazy_model() -> Arc<dyn LazyModel> {
    Arc::new(Fig2Model)
}

/// Built-in lazy models by name.
pub fn lazy_model(name: &str) -> Option<Arc<dyn LazyModel>> {
    match name {
        "fig2" => Some(fig2_lazy_model()),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fig2_behaviour() {
        let m = Fig2Model;
        let q0 = m.initial();
        assert_eq!(m.step(&q0, &[2]), LazyState(vec![2, 0]));
        assert_eq!(m.step(&LazyState(vec![2, 0]), &[0]), LazyState(vec![2, 1]));
        assert_eq!(m.props(&LazyState(vec![3, 3])), BTreeSet::from(["p".to_string()]));
        assert!(m.props(&LazyState(vec![3, 4])).is_empty());
        assert!(m.props(&q0).is_empty());
        assert_eq!(m.actions(1, &q0), ActionDomain::AllNaturals);
        assert_eq!(m.render(&LazyState(vec![4, 1])), "(4,1)");
        assert_eq!(m.parse_state("(4, 1)"), Some(LazyState(vec![4, 1])));
        assert_eq!(m.parse_state("q0"), Some(q0));
        assert!(lazy_model("fig2").is_some() && lazy_model("nope").is_none());
    }

    #[test]
    fn natural_action_names() {
        let d = ActionDomain::AllNaturals;
        assert_eq!(d.lookup("17"), Some(17));
        assert_eq!(d.lookup("017"), None);
        assert_eq!(d.lookup("x"), None);
        assert_eq!(d.name(5), "5");
    }
}
