//! Exhaustive game search versus truth maps: the evaluation game is won by
//! Eloise exactly where the formula holds.
//!
//!     cargo run --example search

use std::sync::Arc;

use atlgts::cgm::line_model;
use atlgts::engine::{search_winner, GameModel, ModeSpec, Role, Roles, SearchLimits, Session};
use atlgts::formula::parse_formula;
use atlgts::semantics::{evaluate, SemanticsKind};
use atlgts::Player;

fn main() {
    let model = Arc::new(line_model(4));
    for text in ["<<>> F p", "<<1>> G ~p", "~<<1>> X p | <<>> (~p U p)"] {
        let f = parse_formula(text).unwrap();
        let truth = evaluate(&model, &f, &SemanticsKind::Standard).unwrap();
        for q in 0..model.state_count() {
            let s = Session::new(
                GameModel::Finite(model.clone()),
                model.state_name(q),
                f.clone(),
                ModeSpec::Unbounded,
                Roles::new(Role::Human, Role::Human),
            )
            .unwrap();
            let w = search_winner(&s, SearchLimits::default()).unwrap();
            println!("{text:<28} {}: holds {:<5} search winner {w}", model.state_name(q), truth.root()[q]);
            assert_eq!(w == Player::E, truth.root()[q]);
        }
    }
}
