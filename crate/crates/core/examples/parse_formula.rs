//! Parse formulas, print them canonically, and list their subformulas.
//!
//!     cargo run --example parse_formula -- "<<1>> (p U q) & ~<<>> X r"

use atlgts::formula::{parse_formula, print_formula, subformulas};

fn main() {
    let inputs: Vec<String> = std::env::args().skip(1).collect();
    let inputs = if inputs.is_empty() {
        vec!["<<1,2>> G (p | <<1>> X q)".to_string(), "p & q".into(), "<<1>> (p q)".into()]
    } else {
        inputs
    };
    for text in inputs {
        match parse_formula(&text) {
            Ok(f) => {
                println!("{text}\n  canonical: {}", print_formula(&f));
                println!("  size {}, depth {}", f.size(), f.depth());
                for g in subformulas(&f) {
                    println!("    {g}");
                }
            }
            Err(e) => println!("{text}\n  {e}"),
        }
    }
}
