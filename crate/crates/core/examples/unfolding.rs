//! Finite unfoldings of G and U under the finitely bounded semantics.
//!
//!     cargo run --example unfolding

use atlgts::cgm::fig3_model;
use atlgts::formula::parse_formula;
use atlgts::semantics::check_fb_unfolding;

fn main() {
    let model = fig3_model();
    for text in ["<<>> F p", "<<1>> G ~p", "<<>> (~p U p)"] {
        let report = check_fb_unfolding(&model, &parse_formula(text).unwrap()).unwrap();
        println!(
            "{text}: unfolding agrees {}, half fixpoint {}, full fixpoint {}",
            report.unfolding_agrees, report.half_fixpoint_valid, report.fixpoint_valid
        );
        for (q, n) in report.least_n.iter().enumerate() {
            println!("  {}: truth {}, least n {n:?}", model.state_name(q), report.truth[q]);
        }
    }
}
