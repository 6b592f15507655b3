//! Evaluate one formula under all four semantics and report disagreements.
//!
//!     cargo run --example compare_semantics -- path/to/model.json "<<1>> G p"

use atlgts::cgm::{fig3_model, load_model};
use atlgts::formula::parse_formula;
use atlgts::semantics::compare_semantics;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let (model, text) = match args.as_slice() {
        [path, f] => (load_model(&std::fs::read(path).expect("readable model")).expect("valid model"), f.clone()),
        _ => (fig3_model(), "<<>> F p | <<1>> G ~p".to_string()),
    };
    let f = parse_formula(&text).expect("formula");
    let report = compare_semantics(&model, &f).expect("agents in range");
    println!("{}", serde_json::to_string_pretty(&report).unwrap());
}
