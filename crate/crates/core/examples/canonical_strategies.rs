//! Canonical controller and non-controller strategies for an embedded game,
//! then a machine-vs-machine play that follows them.
//!
//!     cargo run --example canonical_strategies

use std::sync::Arc;

use atlgts::cgm::fig3_model;
use atlgts::engine::{GameModel, ModeSpec, Roles, Session};
use atlgts::formula::parse_formula;
use atlgts::ordinal::Ordinal;
use atlgts::semantics::GammaBound;
use atlgts::solver::{
    canonical_controller, canonical_noncontroller, compute_labels, opponent_labels, EmbeddedGameSpec,
    NonControllerVariant,
};
use atlgts::Player;

fn main() {
    let model = fig3_model();
    let n = model.state_count();
    // <<>> (true U p): Eloise controls, p is the goal, every state is safe
    let spec = EmbeddedGameSpec {
        model: &model,
        verifier: Player::E,
        controller: Player::E,
        coalition: Default::default(),
        goal: (0..n).map(|q| model.holds(q, "p")).collect(),
        safe: vec![true; n],
    };
    let gamma = Ordinal::from(4);
    let labels = compute_labels(&spec, &gamma).unwrap();
    let controller = canonical_controller(&spec, &labels).unwrap();
    let opponent = canonical_noncontroller(&opponent_labels(&labels), NonControllerVariant::Full).unwrap();
    for q in 0..n {
        println!(
            "{}: label {:<4} controller {:?}, timer at w {}, non-controller at 2 {:?}",
            model.state_name(q),
            labels.get(q).to_string(),
            controller.choice(q),
            controller.timer(&Ordinal::omega(), q),
            opponent.choice(&spec, &Ordinal::from(2), q),
        );
    }

    for start in ["q0", "q1", "q4"] {
        let mut s = Session::new(
            GameModel::Finite(Arc::new(model.clone())),
            start,
            parse_formula("<<>> F p").unwrap(),
            ModeSpec::Bounded(GammaBound::Bound(gamma.clone())),
            Roles::machines(),
        )
        .unwrap();
        let t = s.run_machine(1000).unwrap();
        println!("\nfrom {start}: {:?} wins ({:?})", t.winner.unwrap(), t.reason.unwrap());
        for e in &t.moves {
            let who = e.actor.map_or("-".to_string(), |p| p.to_string());
            println!("  {:<15} {who} {:<14} at {}", e.phase, e.mv.to_string(), e.state);
        }
    }
}
