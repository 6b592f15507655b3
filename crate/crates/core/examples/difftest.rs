//! Differential test of the four semantics (and the brute-force oracle on
//! small models) over seeded random models.
//!
//!     cargo run --release --example difftest -- 42 100

use atlgts::difftest::{difftest, DifftestConfig};

fn main() {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<u64>().expect("number"));
    let seed = args.next().unwrap_or(42);
    let models = args.next().unwrap_or(20) as usize;
    let report = difftest(&DifftestConfig::new(seed, models));
    println!(
        "seed {seed}: {} models, {} formulas, {} oracle checks, {} failures",
        report.models,
        report.formulas,
        report.oracle_checked,
        report.failures.len()
    );
    for c in &report.failures {
        println!("{}", serde_json::to_string_pretty(c).unwrap());
    }
    if !report.passed() {
        std::process::exit(1);
    }
}
