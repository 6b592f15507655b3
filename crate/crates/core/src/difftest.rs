//! Differential testing: every semantics against every other, and the
//! standard semantics against the brute-force oracle.

use serde::Serialize;

use crate::cgm::{Model, ModelFile};
use crate::formula::{subformulas, Formula};
use crate::gen::{random_formula, random_model, rng, GenConfig};
use crate::semantics::{compare_semantics, evaluate, oracle_evaluate, EvalError, SemanticsKind};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DifftestConfig {
    pub seed: u64,
    pub models: usize,
    pub formulas_per_model: usize,
    pub gen: GenConfig,
    pub oracle: bool,
}

impl DifftestConfig {
    pub fn new(seed: u64, models: usize) -> Self {
        DifftestConfig {
            seed,
            models,
            formulas_per_model: 50,
            gen: GenConfig::default(),
            oracle: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub model: ModelFile,
    pub formula: String,
    pub problem: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DifftestReport {
    pub seed: u64,
    pub models: usize,
    pub formulas: usize,
    pub oracle_checked: usize,
    pub failures: Vec<Counterexample>,
}

impl DifftestReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Problem description if the semantics disagree on `f`, `None` if consistent.
pub fn check_case(model: &Model, f: &Formula, with_oracle: bool) -> Result<Option<String>, EvalError> {
    let report = compare_semantics(model, f)?;
    if let Some(d) = report.disagreements.first() {
        return Ok(Some(format!(
            "semantics disagree on '{}' at {}: {:?}",
            d.subformula, d.state, d.values
        )));
    }
    if with_oracle {
        match oracle_evaluate(model, f) {
            Ok(oracle) => {
                let std = evaluate(model, f, &SemanticsKind::Standard)?;
                if oracle.truth != std.truth {
                    return Ok(Some("standard semantics disagrees with the oracle".into()));
                }
            }
            Err(EvalError::OracleGuard(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(None)
}

// replace the formula by its smallest still-failing subformula
fn minimize(model: &Model, f: &Formula, with_oracle: bool) -> (Formula, String) {
    let mut best = f.clone();
    let mut problem = check_case(model, f, with_oracle).ok().flatten().unwrap_or_default();
    for g in subformulas(f) {
        if g.size() < best.size() {
            if let Ok(Some(p)) = check_case(model, &g, with_oracle) {
                best = g;
                problem = p;
            }
        }
    }
    (best, problem)
}

pub fn difftest(cfg: &DifftestConfig) -> DifftestReport {
    let mut r = rng(cfg.seed);
    let mut report = DifftestReport {
        seed: cfg.seed,
        models: cfg.models,
        formulas: 0,
        oracle_checked: 0,
        failures: Vec::new(),
    };
    for i in 0..cfg.models {
        let model = random_model(&mut r, &cfg.gen);
        let fits = cfg.oracle && oracle_evaluate(&model, &Formula::True).is_ok();
        for _ in 0..cfg.formulas_per_model {
            let f = random_formula(&mut r, &cfg.gen, model.agent_count());
            report.formulas += 1;
            if fits {
                report.oracle_checked += 1;
            }
            match check_case(&model, &f, fits) {
                Ok(None) => {}
                Ok(Some(_)) => {
                    let (small, problem) = minimize(&model, &f, fits);
                    log::warn!("model {i}: {problem}");
                    report.failures.push(Counterexample {
                        model: model.to_file(),
                        formula: small.to_string(),
                        problem,
                    });
                }
                Err(e) => report.failures.push(Counterexample {
                    model: model.to_file(),
                    formula: f.to_string(),
                    problem: e.to_string(),
                }),
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_passes() {
        let mut cfg = DifftestConfig::new(1, 10);
        cfg.formulas_per_model = 5;
        let r = difftest(&cfg);
        assert!(r.passed(), "{:?}", r.failures);
        assert_eq!(r.formulas, 50);
        assert_eq!(r, difftest(&cfg));
    }
}
