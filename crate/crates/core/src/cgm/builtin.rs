use std::collections::BTreeMap;

use super::{Model, ModelFile};

/// Single-agent chain `q0 -> ... -> qn` with `p` at `qn` and a self-loop there.
pub fn line_model(n: usize) -> Model {
    chain(n + 1, n)
}

/// Six-state truncation of the infinite line: `p` holds at `q3`, `q5` loops.
pub fn fig3_model() -> Model {
    chain(6, 3)
}

fn chain(len: usize, p_at: usize) -> Model {
    let states: Vec<String> = (0..len).map(|i| format!("q{i}")).collect();
    let mut props = BTreeMap::new();
    let mut actions = BTreeMap::new();
    let mut transitions = BTreeMap::new();
    for (i, s) in states.iter().enumerate() {
        let ps = if i == p_at { vec!["p".to_string()] } else { vec![] };
        props.insert(s.clone(), ps);
        actions.insert(
            s.clone(),
            BTreeMap::from([("1".to_string(), vec!["0".to_string()])]),
        );
        let next = states[(i + 1).min(len - 1)].clone();
        transitions.insert(s.clone(), BTreeMap::from([("0".to_string(), next)]));
    }
    ModelFile {
        agents: 1,
        states,
        props,
        actions,
        transitions,
    }
    .validate()
    .expect("chain model is well formed")
}
