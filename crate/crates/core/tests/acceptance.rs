//! Acceptance suite. Runs without the test harness so every criterion prints
//! one PASS/FAIL line; exits non-zero if any criterion fails.

mod common;

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::{Duration, Instant};

use atlgts::cgm::{fig2_lazy_model, fig3_model, Model};
use atlgts::engine::{
    lint_transcript, EndReason, GameModel, Menu, ModeSpec, Move, Phase, Role, Roles, Session, StateKey,
};
use atlgts::formula::{parse_formula, subformulas, unfold_always, unfold_until, AgentSet, Formula};
use atlgts::gen::{model_corpus, random_formula, rng, GenConfig};
use atlgts::ordinal::Ordinal;
use atlgts::semantics::{
    check_fb_unfolding, compare_semantics, evaluate, oracle_evaluate, GammaBound, SemanticsKind,
};
use atlgts::solver::{
    canonical_controller, compute_labels, forced_set, opponent_labels, EmbeddedGameSpec, Label,
    NonControllerVariant,
};
use atlgts::Player;
use rand::Rng;

use common::{backward_induction, best_forced_rank, least_winning_limit, naive_truth};

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

const CORPUS_SEED: u64 = 0x5eed_2024;

fn corpus() -> Vec<Model> {
    model_corpus(CORPUS_SEED, 200, &GenConfig::default())
}

fn f(s: &str) -> Formula {
    parse_formula(s).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("took {t:.2?}, limit {limit:?}"))
}

fn coalitions(agents: usize) -> Vec<AgentSet> {
    let mut v = vec![AgentSet::empty(), AgentSet::new([1]), AgentSet::new(1..=agents)];
    v.dedup();
    v
}

fn fig3_labels() -> Verdict {
    let start = Instant::now();
    let m = fig3_model();
    let labels = |formula: &str, gamma: u64| -> BTreeMap<String, String> {
        let kind = SemanticsKind::GtsBounded(GammaBound::Bound(Ordinal::from(gamma)));
        let t = evaluate(&m, &f(formula), &kind).unwrap();
        let l = t.root_labels().unwrap();
        (0..m.state_count())
            .map(|q| (m.state_name(q).to_string(), l.get(q).to_string()))
            .collect()
    };
    let expect = |pairs: &[(&str, &str)]| -> BTreeMap<String, String> {
        pairs.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
    };
    let g3 = expect(&[("q0", "lose"), ("q1", "2"), ("q2", "1"), ("q3", "0"), ("q4", "lose"), ("q5", "lose")]);
    let mut g4 = g3.clone();
    g4.insert("q0".into(), "3".into());
    ensure(labels("<<>> F p", 3) == g3, || format!("gamma 3: {:?}", labels("<<>> F p", 3)))?;
    ensure(labels("<<>> F p", 4) == g4, || format!("gamma 4: {:?}", labels("<<>> F p", 4)))?;
    let nested3 = labels("<<>> F <<>> F p", 3);
    let ok3 = nested3["q0"] == "1" && ["q1", "q2", "q3"].iter().all(|q| nested3[*q] == "0");
    ensure(ok3, || format!("nested gamma 3: {nested3:?}"))?;
    let nested4 = labels("<<>> F <<>> F p", 4);
    ensure(nested4["q0"] == "0", || format!("nested gamma 4: {nested4:?}"))?;
    within(start, Duration::from_secs(1))?;
    Ok("exact label match at gamma 3 and 4, plain and nested".into())
}

fn four_way() -> Verdict {
    let start = Instant::now();
    let models = corpus();
    let cfg = GenConfig::default();
    let mut cases = 0;
    for (i, m) in models.iter().enumerate() {
        let mut r = rng(CORPUS_SEED ^ (i as u64 + 1));
        for _ in 0..50 {
            let phi = random_formula(&mut r, &cfg, m.agent_count());
            let report = compare_semantics(m, &phi).map_err(|e| e.to_string())?;
            ensure(report.disagreements.is_empty(), || {
                format!("model {i}, {phi}: {:?}", report.disagreements[0])
            })?;
            let reference = naive_truth(m, &phi);
            let got = evaluate(m, &phi, &SemanticsKind::Standard).unwrap();
            ensure(got.root() == reference.as_slice(), || format!("model {i}, {phi}: differs from reference"))?;
            cases += 1;
        }
    }
    within(start, Duration::from_secs(60))?;
    Ok(format!("{cases} formula/model pairs, zero disagreements"))
}

fn oracle_equivalence() -> Verdict {
    let cfg = GenConfig {
        max_states: 4,
        max_agents: 2,
        max_actions: 2,
        props: 3,
        max_depth: 3,
    };
    let models = model_corpus(CORPUS_SEED + 1, 50, &cfg);
    let mut r = rng(CORPUS_SEED + 2);
    for (i, m) in models.iter().enumerate() {
        let phi = random_formula(&mut r, &cfg, m.agent_count());
        let o = oracle_evaluate(m, &phi).map_err(|e| format!("instance {i}: {e}"))?;
        let s = evaluate(m, &phi, &SemanticsKind::Standard).unwrap();
        for g in subformulas(&phi) {
            ensure(o.get(&g) == s.get(&g), || format!("instance {i}, {g} in {phi}"))?;
        }
    }
    Ok("50 instances, every subformula equal".into())
}

struct RandomSpec {
    coalition: AgentSet,
    controller_is_verifier: bool,
    goal: Vec<bool>,
    safe: Vec<bool>,
}

fn random_specs(m: &Model, seed: u64) -> Vec<RandomSpec> {
    let mut r = rng(seed);
    let n = m.state_count();
    let mut out = Vec::new();
    for _ in 0..3 {
        let goal: Vec<bool> = (0..n).map(|_| r.gen_bool(0.3)).collect();
        let safe: Vec<bool> = (0..n).map(|_| r.gen_bool(0.7)).collect();
        for a in coalitions(m.agent_count()) {
            for civ in [true, false] {
                out.push(RandomSpec {
                    coalition: a.clone(),
                    controller_is_verifier: civ,
                    goal: goal.clone(),
                    safe: safe.clone(),
                });
            }
        }
    }
    out
}

fn spec_of<'m>(m: &'m Model, s: &RandomSpec) -> EmbeddedGameSpec<'m> {
    EmbeddedGameSpec {
        model: m,
        verifier: Player::E,
        controller: if s.controller_is_verifier { Player::E } else { Player::A },
        coalition: s.coalition.clone(),
        goal: s.goal.clone(),
        safe: s.safe.clone(),
    }
}

fn label_theory() -> Verdict {
    let mut checked = 0;
    for (i, m) in corpus().iter().enumerate() {
        let n = m.state_count();
        for rs in random_specs(m, i as u64) {
            let spec = spec_of(m, &rs);
            let bound = Ordinal::from(n as u64);
            let l = compute_labels(&spec, &bound).map_err(|e| e.to_string())?;
            let ctx = || format!("model {i}, coalition {}, controller is verifier {}", rs.coalition, rs.controller_is_verifier);

            ensure(opponent_labels(&opponent_labels(&l)) == l, || format!("{}: mirror is not an involution", ctx()))?;

            let rank: Vec<Option<u64>> = l.labels.iter().map(Label::natural).collect();
            let strat = canonical_controller(&spec, &l).unwrap();
            for q in 0..n {
                let Some(k) = rank[q].filter(|&k| k > 0) else { continue };
                let best = best_forced_rank(m, &rs.coalition, q, &rank, rs.controller_is_verifier);
                ensure(best == Some(k - 1), || format!("{}: state {q} label {k}, best forced rank {best:?}", ctx()))?;
                let reached = forced_set(m, &rs.coalition, q, &strat.decision(&spec, q));
                let top = reached.iter().map(|&s| rank[s].unwrap_or(u64::MAX)).max();
                ensure(top == Some(k - 1), || format!("{}: canonical step at {q} reaches rank {top:?}", ctx()))?;
            }

            let max = rank.iter().flatten().max().copied().unwrap_or(0);
            ensure(max < n as u64, || format!("{}: label {max} with {n} states", ctx()))?;

            let wider = compute_labels(&spec, &Ordinal::from(n as u64 + 5)).unwrap();
            ensure(wider.labels == l.labels, || format!("{}: labels change between |S| and |S|+5", ctx()))?;

            let w = backward_induction(m, &rs.coalition, rs.controller_is_verifier, &rs.goal, &rs.safe, n);
            let opp = opponent_labels(&l);
            for (g, row) in w.iter().enumerate() {
                let gamma = Ordinal::from(g as u64);
                for q in 0..n {
                    let c = l.get(q).controller_wins_at(&gamma);
                    let nc = match opp.get(q) {
                        Label::Win => true,
                        Label::Ord(o) => *o > gamma,
                        Label::Lose => false,
                    };
                    ensure(c == row[q] && nc != c, || {
                        format!("{}: at ({g}, {q}) labels say {c}/{nc}, induction says {}", ctx(), row[q])
                    })?;
                }
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} embedded games: mirror, forced-set, bound, stability, determinacy"))
}

fn enumerate(menu: &Menu, s: &Session) -> Vec<Move> {
    match menu {
        Menu::Choice { options, .. } => options.clone(),
        Menu::Actions { agents, .. } => {
            let m = s.model().finite().unwrap();
            let StateKey::Finite(q) = s.current_state() else { unreachable!() };
            let mut out: Vec<Vec<String>> = vec![vec![]];
            for &a in agents {
                out = out
                    .into_iter()
                    .flat_map(|p| {
                        m.actions(a, *q).iter().map(move |x| {
                            let mut p = p.clone();
                            p.push(x.clone());
                            p
                        })
                    })
                    .collect();
            }
            out.into_iter().map(Move::Actions).collect()
        }
        other => panic!("opponent never owns {other:?}"),
    }
}

/// Whether `fixed`, playing `role`, wins against every behaviour of the other player.
fn fixed_side_wins(s: &Session, fixed: Player, role: &Role) -> bool {
    if let Some(w) = s.winner() {
        return w == fixed;
    }
    let p = s.pending().unwrap();
    if p == fixed {
        let mut c = s.clone();
        let mv = c.suggest_move(role).unwrap();
        c.apply_move(p, mv).unwrap();
        fixed_side_wins(&c, fixed, role)
    } else {
        let menu = s.legal_moves().unwrap();
        enumerate(&menu, s).into_iter().all(|mv| {
            let mut c = s.clone();
            c.apply_move(p, mv).unwrap();
            fixed_side_wins(&c, fixed, role)
        })
    }
}

fn strategy_simulation() -> Verdict {
    let cfg = GenConfig {
        max_states: 4,
        max_agents: 2,
        max_actions: 2,
        props: 2,
        max_depth: 1,
    };
    let bound = "w+1".parse::<Ordinal>().unwrap();
    let mut games = 0;
    for (i, m) in model_corpus(CORPUS_SEED + 3, 40, &cfg).into_iter().enumerate() {
        let n = m.state_count();
        let arc = Arc::new(m);
        let p: Vec<bool> = (0..n).map(|q| arc.holds(q, "p")).collect();
        let qq: Vec<bool> = (0..n).map(|q| arc.holds(q, "q")).collect();
        let not = |v: &[bool]| v.iter().map(|b| !b).collect::<Vec<_>>();
        for a in coalitions(arc.agent_count()) {
            for (op, negated) in [("U", false), ("R", false), ("U", true), ("R", true)] {
                let body = format!("{a} (p {op} q)");
                let text = if negated { format!("~{body}") } else { body };
                let until = op == "U";
                let (goal, safe) = if until { (qq.clone(), p.clone()) } else { (not(&qq), not(&p)) };
                let w = backward_induction(&arc, &a, until, &goal, &safe, n);
                for q0 in 0..n {
                    let least = least_winning_limit(&w, q0);
                    let mut limits: Vec<Ordinal> = (0..n as u64).map(Ordinal::from).collect();
                    limits.push(Ordinal::omega());
                    let fresh = || {
                        Session::new(
                            GameModel::Finite(arc.clone()),
                            arc.state_name(q0),
                            f(&text),
                            ModeSpec::Bounded(GammaBound::Bound(bound.clone())),
                            Roles::new(Role::Human, Role::Human),
                        )
                        .unwrap()
                    };
                    let controller = match fresh().phase() {
                        Phase::Announce(ctx) => ctx.controller,
                        other => return Err(format!("expected an announcement, got {other:?}")),
                    };
                    for gamma in &limits {
                        let mut s = fresh();
                        s.apply_move(controller, Move::Announce(gamma.clone())).unwrap();
                        let expect = least.is_some_and(|l| !gamma.is_finite() || Ordinal::from(l as u64) <= *gamma);
                        let won = fixed_side_wins(&s, controller, &Role::Canonical);
                        ensure(won == expect, || {
                            format!("model {i}, {text} at {}, limit {gamma}: canonical controller won {won}, expected {expect}", arc.state_name(q0))
                        })?;
                        games += 1;
                    }
                    for nn in 0..n as u64 {
                        for mm in 0..=nn {
                            if w[mm as usize][q0] {
                                continue;
                            }
                            let mut s = fresh();
                            s.apply_move(controller, Move::Announce(Ordinal::from(mm))).unwrap();
                            let role = Role::CanonicalWith(NonControllerVariant::N(nn));
                            ensure(fixed_side_wins(&s, controller.opponent(), &role), || {
                                format!("model {i}, {text} at {}: {nn}-canonical non-controller loses at limit {mm}", arc.state_name(q0))
                            })?;
                            games += 1;
                        }
                    }
                }
            }
        }
    }
    Ok(format!("{games} embedded games against exhaustive opponents"))
}

fn fig2_suite() -> Verdict {
    let start = Instant::now();
    let script = |s: String| Role::Script(s);
    let run = |formula: &str, mode: ModeSpec, e: Role, a: Role| -> (Option<Player>, Option<EndReason>) {
        let mut s = Session::new(GameModel::Lazy(fig2_lazy_model()), "q0", f(formula), mode, Roles::new(e, a)).unwrap();
        let t = s.run_machine(10_000).unwrap();
        (t.winner, t.reason)
    };
    for n in 0..=20u64 {
        let (w, r) = run(
            "<<>> F p",
            ModeSpec::FinitelyBounded,
            script(format!("fig2-eloise-fixed:{n}")),
            script("fig2-abelard".into()),
        );
        ensure(w == Some(Player::A), || format!("(a) announcement {n}: winner {w:?} ({r:?})"))?;
    }
    let omega_plus_one = ModeSpec::Bounded(GammaBound::Bound("w+1".parse().unwrap()));
    for n in 0..=20u64 {
        let (w, r) = run(
            "<<>> F p",
            omega_plus_one.clone(),
            script("fig2-eloise-omega".into()),
            script(format!("fig2-abelard-fixed:{n}")),
        );
        ensure(w == Some(Player::E), || format!("(b) Abelard action {n}: winner {w:?} ({r:?})"))?;
    }
    for n in 0..=20u64 {
        let (w, r) = run(
            "<<>> X <<>> F p",
            ModeSpec::FinitelyBounded,
            script("fig2-eloise-diagonal".into()),
            script(format!("fig2-abelard-fixed:{n}")),
        );
        ensure(w == Some(Player::E), || format!("(c) Abelard move {n}: winner {w:?} ({r:?})"))?;
    }
    within(start, Duration::from_secs(5))?;
    Ok("(a) Abelard wins all 21, (b) Eloise wins all 21, (c) Eloise wins all 21".into())
}

fn unfolding() -> Verdict {
    let cfg = GenConfig {
        max_depth: 2,
        ..GenConfig::default()
    };
    let mut checked = 0;
    for (i, m) in corpus().iter().enumerate() {
        let mut r = rng(CORPUS_SEED ^ (0xf00 + i as u64));
        let n = m.state_count();
        for a in coalitions(m.agent_count()) {
            let theta = random_formula(&mut r, &cfg, m.agent_count());
            let psi = random_formula(&mut r, &cfg, m.agent_count());
            for phi in [Formula::always(a.clone(), theta.clone()), Formula::until(a.clone(), psi.clone(), theta.clone())] {
                let report = check_fb_unfolding(m, &phi).map_err(|e| e.to_string())?;
                ensure(report.unfolding_agrees && report.half_fixpoint_valid, || {
                    format!("model {i}, {phi}: agrees {} half-fixpoint {}", report.unfolding_agrees, report.half_fixpoint_valid)
                })?;
                let truth = evaluate(m, &phi, &SemanticsKind::FinitelyBounded).unwrap().root().to_vec();
                let until = matches!(phi, Formula::CoopU(..));
                let unfolded: Vec<Vec<bool>> = (0..=n + 2)
                    .map(|k| {
                        let g = if until { unfold_until(&a, &psi, &theta, k) } else { unfold_always(&a, &theta, k) };
                        naive_truth(m, &g)
                    })
                    .collect();
                for q in 0..n {
                    let expect = if until {
                        unfolded.iter().any(|u| u[q])
                    } else {
                        unfolded.iter().all(|u| u[q])
                    };
                    ensure(truth[q] == expect, || format!("model {i}, {phi} at state {q}: reference unfolding says {expect}"))?;
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} G/U formulas: unfoldings and half-fixpoints agree"))
}

fn lint_plays() -> Verdict {
    let models: Vec<Arc<Model>> = corpus().into_iter().map(Arc::new).collect();
    let cfg = GenConfig::default();
    let bounds = ["auto", "3", "w+1", "w*2"];
    let mut r = rng(CORPUS_SEED + 4);
    let (mut rounds, mut lowerings) = (0, 0);
    for k in 0..1000u64 {
        let m = &models[k as usize % models.len()];
        let phi = random_formula(&mut r, &cfg, m.agent_count());
        let gamma: GammaBound = bounds[r.gen_range(0..bounds.len())].parse().unwrap();
        let q0 = m.state_name(r.gen_range(0..m.state_count()));
        let roles = Roles::new(Role::Random(k), Role::Random(k + 10_000));
        let mut s = Session::new(GameModel::Finite(m.clone()), q0, phi.clone(), ModeSpec::Bounded(gamma.clone()), roles)
            .map_err(|e| e.to_string())?;
        let t = s.run_machine(1_000_000).map_err(|e| e.to_string())?;
        ensure(t.reason != Some(EndReason::StepBudgetExceeded), || format!("play {k}: did not terminate"))?;
        let v = lint_transcript(&t, Some(m.state_count() as u64));
        ensure(v.is_empty(), || format!("play {k}, {phi}, bound {gamma}: {:?}", v[0]))?;
        rounds += t.moves.iter().filter(|e| e.phase == "controller-end" || e.phase == "forced-exit").count();
        lowerings += t.moves.iter().filter(|e| e.phase == "lower-limit").count();
    }
    ensure(lowerings > 0, || "no play lowered a limit ordinal".into())?;
    Ok(format!("1000 plays, {rounds} embedded rounds, {lowerings} limit lowerings, zero violations"))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("fig3-label-regression", fig3_labels),
        ("four-way-semantic-agreement", four_way),
        ("oracle-equivalence", oracle_equivalence),
        ("label-theory-invariants", label_theory),
        ("strategy-by-simulation", strategy_simulation),
        ("fig2-play-suite", fig2_suite),
        ("unfolding-suite", unfolding),
        ("engine-rule-fidelity", lint_plays),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let verdict = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let t = start.elapsed();
        match verdict {
            Ok(detail) => println!("PASS {name} ({t:.2?}): {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name} ({t:.2?}): {why}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
