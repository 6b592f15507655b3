//! Structural checks on transcripts: round order, forced exits, and limit descent.

use serde::Serialize;

use super::{Move, Transcript};
use crate::ordinal::Ordinal;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LintViolation {
    /// Index into the transcript's moves.
    pub index: usize,
    pub rule: &'static str,
    pub message: String,
}

const ROUND_PHASES: [&str; 4] = ["controller-end", "opponent-end", "verifier-move", "falsifier-move"];

/// Checks a transcript against the embedded-round rules.
///
/// `max_finite_choice` caps the finite part of lowered limits when computing
/// how many rounds an announced limit can last; pass `None` to skip that check.
pub fn lint_transcript(t: &Transcript, max_finite_choice: Option<u64>) -> Vec<LintViolation> {
    let mut out = Vec::new();
    let mut bad = |index, rule, message: String| out.push(LintViolation { index, rule, message });
    let moves = &t.moves;
    let prev = |i: usize| if i == 0 { None } else { moves.get(i - 1) };

    // announced limit, rounds so far, limit of the last round
    let mut game: Option<(Ordinal, u64, Option<Ordinal>)> = None;
    for (i, e) in moves.iter().enumerate() {
        let p = prev(i);
        match e.phase.as_str() {
            "opponent-end" => {
                if !p.is_some_and(|p| p.phase == "controller-end" && p.mv == Move::Continue) {
                    bad(i, "end-offer-order", "opponent end-offer not preceded by the controller's".into());
                }
            }
            "verifier-move" => {
                if !p.is_some_and(|p| p.phase == "opponent-end" && p.mv == Move::Continue) {
                    bad(i, "end-offer-order", "embedded step before both end-offers were declined".into());
                }
            }
            "falsifier-move" => {
                if !p.is_some_and(|p| p.phase == "verifier-move") {
                    bad(i, "step-order", "falsifier moved before the verifier".into());
                }
            }
            "forced-exit" => {
                if e.limit.as_ref().is_some_and(|l| !l.is_zero()) {
                    bad(i, "forced-exit", format!("forced exit at limit {}", e.limit.as_ref().unwrap()));
                }
            }
            "announce" => {
                if let Move::Announce(g) = &e.mv {
                    game = Some((g.clone(), 0, None));
                }
            }
            "lower-limit" => {
                if let (Move::Lower(g), Some(l)) = (&e.mv, &e.limit) {
                    if g >= l {
                        bad(i, "limit-descent", format!("lowered {l} to {g}"));
                    }
                }
            }
            _ => {}
        }
        if ROUND_PHASES.contains(&e.phase.as_str()) && e.limit.as_ref().is_some_and(Ordinal::is_zero) {
            bad(i, "forced-exit", "voluntary move offered at limit 0".into());
        }
        // a round starts with the controller's offer or a forced exit
        let starts_round = e.phase == "controller-end" || e.phase == "forced-exit";
        if let (true, Some(limit), Some((announced, rounds, last))) = (starts_round, &e.limit, game.as_mut()) {
            match last {
                None if limit != announced => {
                    bad(i, "limit-descent", format!("first round at {limit}, announced {announced}"));
                }
                Some(l) if limit >= l => bad(i, "limit-descent", format!("round limit {limit} after {l}")),
                _ => {}
            }
            *rounds += 1;
            *last = Some(limit.clone());
            if let Some(cap) = max_finite_choice {
                let budget = announced.descent_budget(cap).saturating_add(1);
                if *rounds > budget {
                    bad(i, "rank-budget", format!("round {rounds} exceeds the budget {budget} of {announced}"));
                }
            }
        }
    }
    out
}
