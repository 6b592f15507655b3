//! Winning time labels on the six-state chain, at two time limit bounds.
//!
//!     cargo run --example fig3_labels

use atlgts::cgm::fig3_model;
use atlgts::formula::parse_formula;
use atlgts::ordinal::Ordinal;
use atlgts::semantics::{evaluate, GammaBound, SemanticsKind};

fn main() {
    let model = fig3_model();
    for text in ["<<>> F p", "<<>> F <<>> F p"] {
        let f = parse_formula(text).unwrap();
        for gamma in [3u64, 4] {
            let kind = SemanticsKind::GtsBounded(GammaBound::Bound(Ordinal::from(gamma)));
            let truth = evaluate(&model, &f, &kind).unwrap();
            println!("{text} at bound {gamma}:");
            print!("{}", truth.root_labels().unwrap().dump(&model));
        }
    }
}
