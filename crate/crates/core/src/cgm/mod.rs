//! Concurrent game models.
//!
//! A [`Model`] is a finite, validated model with states and actions interned to
//! dense indices. Files use the JSON layout of [`ModelFile`]; profile keys are
//! the `|`-joined action names of agents `1..=k` in order.

mod builtin;
mod lazy;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::AgentSet;
use crate::ordinal::Ordinal;

pub use builtin::{fig3_model, line_model};
pub use lazy::{fig2_lazy_model, lazy_model, ActionDomain, Fig2Model, LazyModel, LazyState};

/// One violated model invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValidationIssue {
    NoAgents,
    NoStates,
    DuplicateState(String),
    UnknownState { section: &'static str, state: String },
    MissingProps(String),
    MissingActions(String),
    MissingAgentActions { state: String, agent: usize },
    UnknownAgent { state: String, agent: String },
    EmptyActionSet { state: String, agent: usize },
    DuplicateAction { state: String, agent: usize, action: String },
    BadActionName { state: String, agent: usize, action: String },
    MissingTransitions(String),
    MissingProfile { state: String, profile: String },
    UnexpectedProfile { state: String, profile: String },
    UnknownTarget { state: String, profile: String, target: String },
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ValidationIssue::*;
        match self {
            NoAgents => f.write_str("model needs at least one agent"),
            NoStates => f.write_str("model needs at least one state"),
            DuplicateState(s) => write!(f, "duplicate state id '{s}'"),
            UnknownState { section, state } => write!(f, "{section} mentions unknown state '{state}'"),
            MissingProps(s) => write!(f, "no props entry for state '{s}'"),
            MissingActions(s) => write!(f, "no actions entry for state '{s}'"),
            MissingAgentActions { state, agent } => {
                write!(f, "no actions for agent {agent} at state '{state}'")
            }
            UnknownAgent { state, agent } => write!(f, "unknown agent '{agent}' at state '{state}'"),
            EmptyActionSet { state, agent } => {
                write!(f, "empty action set for agent {agent} at state '{state}'")
            }
            DuplicateAction { state, agent, action } => {
                write!(f, "duplicate action '{action}' for agent {agent} at state '{state}'")
            }
            BadActionName { state, agent, action } => write!(
                f,
                "action name '{action}' for agent {agent} at state '{state}' must be non-empty and not contain '|'"
            ),
            MissingTransitions(s) => write!(f, "no transitions entry for state '{s}'"),
            MissingProfile { state, profile } => {
                write!(f, "missing transition for profile '{profile}' at state '{state}'")
            }
            UnexpectedProfile { state, profile } => {
                write!(f, "profile '{profile}' at state '{state}' is not an action profile")
            }
            UnknownTarget { state, profile, target } => write!(
                f,
                "transition '{profile}' at state '{state}' targets unknown state '{target}'"
            ),
        }
    }
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("model JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid model: {}", .0.iter().map(|i| i.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<ValidationIssue>),
    #[error("unknown state '{0}'")]
    UnknownState(String),
}

/// On-disk layout of a model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub agents: usize,
    pub states: Vec<String>,
    pub props: BTreeMap<String, Vec<String>>,
    pub actions: BTreeMap<String, BTreeMap<String, Vec<String>>>,
    pub transitions: BTreeMap<String, BTreeMap<String, String>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    agents: usize,
    states: Vec<String>,
    index: HashMap<String, usize>,
    props: Vec<BTreeSet<String>>,
    // actions[state][agent - 1]
    actions: Vec<Vec<Vec<String>>>,
    // transitions[state][profile index], agent 1 most significant
    transitions: Vec<Vec<usize>>,
}

/// Full-profile key as used in model files.
pub fn profile_key(names: &[&str]) -> String {
    names.join("|")
}

impl ModelFile {
    pub fn validate(&self) -> Result<Model, ModelError> {
        let mut issues = Vec::new();
        if self.agents == 0 {
            issues.push(ValidationIssue::NoAgents);
        }
        if self.states.is_empty() {
            issues.push(ValidationIssue::NoStates);
        }
        let mut index = HashMap::new();
        for (i, s) in self.states.iter().enumerate() {
            if index.insert(s.clone(), i).is_some() {
                issues.push(ValidationIssue::DuplicateState(s.clone()));
            }
        }
        for (section, keys) in [
            ("props", self.props.keys().collect::<Vec<_>>()),
            ("actions", self.actions.keys().collect()),
            ("transitions", self.transitions.keys().collect()),
        ] {
            for k in keys {
                if !index.contains_key(k) {
                    issues.push(ValidationIssue::UnknownState {
                        section,
                        state: k.clone(),
                    });
                }
            }
        }

        let mut props = Vec::with_capacity(self.states.len());
        let mut actions = Vec::with_capacity(self.states.len());
        for s in &self.states {
            match self.props.get(s) {
                Some(ps) => props.push(ps.iter().cloned().collect::<BTreeSet<_>>()),
                None => {
                    issues.push(ValidationIssue::MissingProps(s.clone()));
                    props.push(BTreeSet::new());
                }
            }
            let mut per_agent = vec![Vec::new(); self.agents];
            match self.actions.get(s) {
                None => issues.push(ValidationIssue::MissingActions(s.clone())),
                Some(by_agent) => {
                    for key in by_agent.keys() {
                        let known = key
                            .parse::<usize>()
                            .is_ok_and(|a| a >= 1 && a <= self.agents && key == &a.to_string());
                        if !known {
                            issues.push(ValidationIssue::UnknownAgent {
                                state: s.clone(),
                                agent: key.clone(),
                            });
                        }
                    }
                    for agent in 1..=self.agents {
                        match by_agent.get(&agent.to_string()) {
                            None => issues.push(ValidationIssue::MissingAgentActions {
                                state: s.clone(),
                                agent,
                            }),
                            Some(list) if list.is_empty() => {
                                issues.push(ValidationIssue::EmptyActionSet {
                                    state: s.clone(),
                                    agent,
                                })
                            }
                            Some(list) => {
                                let mut seen = BTreeSet::new();
                                for a in list {
                                    if a.is_empty() || a.contains('|') {
                                        issues.push(ValidationIssue::BadActionName {
                                            state: s.clone(),
                                            agent,
                                            action: a.clone(),
                                        });
                                    }
                                    if !seen.insert(a) {
                                        issues.push(ValidationIssue::DuplicateAction {
                                            state: s.clone(),
                                            agent,
                                            action: a.clone(),
                                        });
                                    }
                                }
                                per_agent[agent - 1] = list.clone();
                            }
                        }
                    }
                }
            }
            actions.push(per_agent);
        }

        // transitions can only be checked once action sets are sane
        let mut transitions = Vec::with_capacity(self.states.len());
        let actions_ok = issues.is_empty();
        for (si, s) in self.states.iter().enumerate() {
            let Some(table) = self.transitions.get(s) else {
                issues.push(ValidationIssue::MissingTransitions(s.clone()));
                transitions.push(Vec::new());
                continue;
            };
            if !actions_ok {
                transitions.push(Vec::new());
                continue;
            }
            let per_agent = &actions[si];
            let count: usize = per_agent.iter().map(Vec::len).product();
            let mut row = Vec::with_capacity(count);
            let mut expected = BTreeSet::new();
            for idx in 0..count {
                let profile = decode(per_agent, idx);
                let names: Vec<&str> = profile
                    .iter()
                    .enumerate()
                    .map(|(a, &i)| per_agent[a][i].as_str())
                    .collect();
                let key = profile_key(&names);
                match table.get(&key) {
                    None => {
                        issues.push(ValidationIssue::MissingProfile {
                            state: s.clone(),
                            profile: key.clone(),
                        });
                        row.push(0);
                    }
                    Some(target) => match index.get(target) {
                        Some(&t) => row.push(t),
                        None => {
                            issues.push(ValidationIssue::UnknownTarget {
                                state: s.clone(),
                                profile: key.clone(),
                                target: target.clone(),
                            });
                            row.push(0);
                        }
                    },
                }
                expected.insert(key);
            }
            for key in table.keys() {
                if !expected.contains(key) {
                    issues.push(ValidationIssue::UnexpectedProfile {
                        state: s.clone(),
                        profile: key.clone(),
                    });
                }
            }
            transitions.push(row);
        }

        if !issues.is_empty() {
            return Err(ModelError::Invalid(issues));
        }
        Ok(Model {
            agents: self.agents,
            states: self.states.clone(),
            index,
            props,
            actions,
            transitions,
        })
    }
}

// mixed-radix decoding, first agent most significant
fn decode(per_agent: &[Vec<String>], mut idx: usize) -> Vec<usize> {
    let mut out = vec![0; per_agent.len()];
    for a in (0..per_agent.len()).rev() {
        let n = per_agent[a].len();
        out[a] = idx % n;
        idx /= n;
    }
    out
}

/// Parses and validates a model file.
pub fn load_model(bytes: &[u8]) -> Result<Model, ModelError> {
    let file: ModelFile = serde_json::from_slice(bytes)?;
    file.validate()
}

/// Canonical pretty-printed JSON (map keys sorted).
pub fn save_model(model: &Model) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(&model.to_file()).expect("model serializes");
    out.push(b'\n');
    out
}

impl Model {
    pub fn agent_count(&self) -> usize {
        self.agents
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn state_name(&self, q: usize) -> &str {
        &self.states[q]
    }

    pub fn state_index(&self, name: &str) -> Result<usize, ModelError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| ModelError::UnknownState(name.to_string()))
    }

    pub fn props(&self, q: usize) -> &BTreeSet<String> {
        &self.props[q]
    }

    pub fn holds(&self, q: usize, prop: &str) -> bool {
        self.props[q].contains(prop)
    }

    /// `d(agent, q)`; agents are numbered from 1.
    pub fn actions(&self, agent: usize, q: usize) -> &[String] {
        &self.actions[q][agent - 1]
    }

    pub fn all_agents(&self) -> AgentSet {
        AgentSet::new(1..=self.agents)
    }

    pub fn profile_count(&self, q: usize) -> usize {
        self.transitions[q].len()
    }

    /// Full profile (action index per agent) for a profile number at `q`.
    pub fn profile(&self, q: usize, idx: usize) -> Vec<usize> {
        decode(&self.actions[q], idx)
    }

    fn profile_index(&self, q: usize, profile: &[usize]) -> usize {
        profile
            .iter()
            .enumerate()
            .fold(0, |acc, (a, &i)| acc * self.actions[q][a].len() + i)
    }

    /// `o(q, profile)` for a full profile of action indices.
    pub fn successor(&self, q: usize, profile: &[usize]) -> usize {
        self.transitions[q][self.profile_index(q, profile)]
    }

    /// All profiles for `agents` at `q`, in lexicographic order of action indices.
    pub fn partial_profiles(&self, q: usize, agents: &AgentSet) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new()];
        for &a in agents.agents() {
            let n = self.actions(a, q).len();
            out = out
                .into_iter()
                .flat_map(|p| {
                    (0..n).map(move |i| {
                        let mut p = p.clone();
                        p.push(i);
                        p
                    })
                })
                .collect();
        }
        out
    }

    /// Merges a coalition profile and a complement profile into a full one.
    pub fn combine(
        &self,
        coalition: &AgentSet,
        alpha: &[usize],
        complement: &AgentSet,
        beta: &[usize],
    ) -> Vec<usize> {
        let mut full = vec![0; self.agents];
        for (&a, &i) in coalition.agents().iter().zip(alpha) {
            full[a - 1] = i;
        }
        for (&a, &i) in complement.agents().iter().zip(beta) {
            full[a - 1] = i;
        }
        full
    }

    pub fn action_names(&self, q: usize, agents: &AgentSet, profile: &[usize]) -> Vec<String> {
        agents
            .agents()
            .iter()
            .zip(profile)
            .map(|(&a, &i)| self.actions(a, q)[i].clone())
            .collect()
    }

    pub fn action_indices(
        &self,
        q: usize,
        agents: &AgentSet,
        names: &[String],
    ) -> Option<Vec<usize>> {
        if names.len() != agents.len() {
            return None;
        }
        agents
            .agents()
            .iter()
            .zip(names)
            .map(|(&a, n)| self.actions(a, q).iter().position(|x| x == n))
            .collect()
    }

    pub fn successors(&self, q: usize) -> BTreeSet<usize> {
        self.transitions[q].iter().copied().collect()
    }

    /// `BD(q)`: number of distinct one-step successors.
    pub fn branching_degree(&self, q: &str) -> Result<usize, ModelError> {
        let q = self.state_index(q)?;
        Ok(self.successors(q).len())
    }

    pub fn branching_report(&self) -> BranchingReport {
        BranchingReport {
            degrees: (0..self.state_count())
                .map(|q| (self.states[q].clone(), self.successors(q).len()))
                .collect(),
            image_finite: true,
            stable_bound: self.stable_bound(),
        }
    }

    /// Globally stable time limit bound of a finite model: its state count.
    pub fn stable_bound(&self) -> Ordinal {
        Ordinal::from(self.state_count() as u64)
    }

    pub fn to_file(&self) -> ModelFile {
        let mut props = BTreeMap::new();
        let mut actions = BTreeMap::new();
        let mut transitions = BTreeMap::new();
        for (q, name) in self.states.iter().enumerate() {
            props.insert(name.clone(), self.props[q].iter().cloned().collect());
            actions.insert(
                name.clone(),
                (1..=self.agents)
                    .map(|a| (a.to_string(), self.actions[q][a - 1].clone()))
                    .collect(),
            );
            let row = (0..self.profile_count(q))
                .map(|idx| {
                    let profile = self.profile(q, idx);
                    let names: Vec<&str> = profile
                        .iter()
                        .enumerate()
                        .map(|(a, &i)| self.actions[q][a][i].as_str())
                        .collect();
                    (
                        profile_key(&names),
                        self.states[self.transitions[q][idx]].clone(),
                    )
                })
                .collect();
            transitions.insert(name.clone(), row);
        }
        ModelFile {
            agents: self.agents,
            states: self.states.clone(),
            props,
            actions,
            transitions,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BranchingReport {
    pub degrees: Vec<(String, usize)>,
    pub image_finite: bool,
    pub stable_bound: Ordinal,
}
