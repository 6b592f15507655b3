//! Seeded random models and formulas for differential testing.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cgm::{profile_key, Model, ModelFile};
use crate::formula::{AgentSet, Formula};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GenConfig {
    pub max_states: usize,
    pub max_agents: usize,
    pub max_actions: usize,
    pub props: usize,
    pub max_depth: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            max_states: 6,
            max_agents: 2,
            max_actions: 3,
            props: 3,
            max_depth: 3,
        }
    }
}

const PROP_NAMES: [&str; 6] = ["p", "q", "r", "s", "t", "u"];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_model<R: Rng>(rng: &mut R, cfg: &GenConfig) -> Model {
    let n = rng.gen_range(1..=cfg.max_states);
    let agents = rng.gen_range(1..=cfg.max_agents);
    let props = &PROP_NAMES[..cfg.props.min(PROP_NAMES.len())];
    let states: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
    let mut file = ModelFile {
        agents,
        states: states.clone(),
        props: BTreeMap::new(),
        actions: BTreeMap::new(),
        transitions: BTreeMap::new(),
    };
    for s in &states {
        let ps = props.iter().filter(|_| rng.gen_bool(0.5)).map(|p| p.to_string()).collect();
        file.props.insert(s.clone(), ps);
        let per_agent: Vec<Vec<String>> = (0..agents)
            .map(|_| (0..rng.gen_range(1..=cfg.max_actions)).map(|i| format!("a{i}")).collect())
            .collect();
        let mut row = BTreeMap::new();
        let count: usize = per_agent.iter().map(Vec::len).product();
        for mut idx in 0..count {
            let mut names = vec![""; agents];
            for a in (0..agents).rev() {
                names[a] = &per_agent[a][idx % per_agent[a].len()];
                idx /= per_agent[a].len();
            }
            row.insert(profile_key(&names), states.choose(rng).unwrap().clone());
        }
        file.transitions.insert(s.clone(), row);
        file.actions.insert(
            s.clone(),
            per_agent
                .into_iter()
                .enumerate()
                .map(|(a, acts)| ((a + 1).to_string(), acts))
                .collect(),
        );
    }
    file.validate().expect("generated models are valid")
}

fn random_coalition<R: Rng>(rng: &mut R, agents: usize) -> AgentSet {
    AgentSet::new((1..=agents).filter(|_| rng.gen_bool(0.5)))
}

/// Random formula with operator nesting at most `cfg.max_depth`.
pub fn random_formula<R: Rng>(rng: &mut R, cfg: &GenConfig, agents: usize) -> Formula {
    gen_formula(rng, cfg, agents, cfg.max_depth.max(1))
}

fn gen_formula<R: Rng>(rng: &mut R, cfg: &GenConfig, agents: usize, depth: usize) -> Formula {
    if depth <= 1 || rng.gen_bool(0.2) {
        return match rng.gen_range(0..10) {
            0 => Formula::True,
            1 => Formula::False,
            _ => Formula::prop(PROP_NAMES[rng.gen_range(0..cfg.props.clamp(1, PROP_NAMES.len()))]),
        };
    }
    let sub = |rng: &mut R| gen_formula(rng, cfg, agents, depth - 1);
    match rng.gen_range(0..7) {
        0 => Formula::not(sub(rng)),
        1 => Formula::or(sub(rng), sub(rng)),
        2 => Formula::next(random_coalition(rng, agents), sub(rng)),
        3 => Formula::until(random_coalition(rng, agents), sub(rng), sub(rng)),
        4 => Formula::release(random_coalition(rng, agents), sub(rng), sub(rng)),
        5 => Formula::eventually(random_coalition(rng, agents), sub(rng)),
        _ => Formula::always(random_coalition(rng, agents), sub(rng)),
    }
}

/// `count` models from one seed, reproducibly.
pub fn model_corpus(seed: u64, count: usize, cfg: &GenConfig) -> Vec<Model> {
    let mut r = rng(seed);
    (0..count).map(|_| random_model(&mut r, cfg)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn respects_bounds() {
        let cfg = GenConfig::default();
        let mut r = rng(7);
        for _ in 0..100 {
            let m = random_model(&mut r, &cfg);
            assert!(m.state_count() <= 6 && m.agent_count() <= 2);
            for q in 0..m.state_count() {
                for a in 1..=m.agent_count() {
                    assert!((1..=3).contains(&m.actions(a, q).len()));
                }
            }
            let f = random_formula(&mut r, &cfg, m.agent_count());
            assert!(f.max_agent() <= m.agent_count());
        }
    }

    #[test]
    fn reproducible() {
        let cfg = GenConfig::default();
        assert_eq!(model_corpus(3, 5, &cfg), model_corpus(3, 5, &cfg));
    }
}
