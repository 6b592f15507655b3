//! Scripted plays on the infinitely branching lazy model: finite limits are
//! never enough, but w is.
//!
//!     cargo run --example fig2_play

use atlgts::cgm::fig2_lazy_model;
use atlgts::engine::{GameModel, ModeSpec, Role, Roles, Session};
use atlgts::formula::parse_formula;
use atlgts::semantics::GammaBound;

fn play(formula: &str, mode: ModeSpec, eloise: &str, abelard: &str) {
    let mut s = Session::new(
        GameModel::Lazy(fig2_lazy_model()),
        "q0",
        parse_formula(formula).unwrap(),
        mode,
        Roles::new(Role::Script(eloise.into()), Role::Script(abelard.into())),
    )
    .unwrap();
    let t = s.run_machine(10_000).unwrap();
    let rounds = t.moves.iter().filter(|e| e.phase == "controller-end").count();
    println!(
        "{formula:<18} {eloise:<22} vs {abelard:<22} -> {} wins after {rounds} rounds ({:?})",
        t.winner.unwrap(),
        t.reason.unwrap()
    );
}

fn main() {
    for n in [0, 3, 7] {
        play("<<>> F p", ModeSpec::FinitelyBounded, &format!("fig2-eloise-fixed:{n}"), "fig2-abelard");
    }
    let omega = ModeSpec::Bounded(GammaBound::Bound("w+1".parse().unwrap()));
    for n in [0, 3, 7] {
        play("<<>> F p", omega.clone(), "fig2-eloise-omega", &format!("fig2-abelard-fixed:{n}"));
    }
    for n in [0, 3, 7] {
        play("<<>> X <<>> F p", ModeSpec::FinitelyBounded, "fig2-eloise-diagonal", &format!("fig2-abelard-fixed:{n}"));
    }
}
