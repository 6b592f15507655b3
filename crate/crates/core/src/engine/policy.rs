//! Machine players: canonical strategies from solver labels, seeded random
//! play, and named scripts for lazy models.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{scripts, EngineError, GameModel, Menu, Mode, Move, Phase, Role, Roles, Session, Stage, StateKey, StepStage};
use crate::cgm::Model;
use crate::formula::{AgentSet, Formula};
use crate::ordinal::Ordinal;
use crate::semantics::{embedded_spec, evaluate, GammaBound, SemanticsKind, TruthMap};
use crate::solver::{
    canonical_controller, canonical_noncontroller, compute_labels, opponent_labels,
    ControllerStrategy, Decision, EmbeddedGameSpec, Label, LabelMap, NonControllerVariant,
};
use crate::Player;

/// Semantics whose truth sets drive machine choices in a given mode.
pub fn mode_semantics(mode: &Mode) -> SemanticsKind {
    match mode {
        Mode::Unbounded => SemanticsKind::GtsUnbounded,
        Mode::Bounded(g) => SemanticsKind::GtsBounded(GammaBound::Bound(g.clone())),
        Mode::FinitelyBounded => SemanticsKind::FinitelyBounded,
    }
}

/// Solver output for one until/release subformula.
#[derive(Debug, Clone)]
pub struct EmbeddedSolution {
    pub coalition: AgentSet,
    pub is_until: bool,
    pub goal: Vec<bool>,
    pub safe: Vec<bool>,
    /// Labels of the controller.
    pub controller: LabelMap,
    /// Labels of the non-controller (the mirror).
    pub opponent: LabelMap,
    pub strategy: ControllerStrategy,
}

/// Truth sets and embedded-game solutions for every subformula of a root
/// formula under one mode. Depends only on model, formula and mode, so it can
/// be shared between sessions.
#[derive(Debug, Clone)]
pub struct SolverCache {
    model: Arc<Model>,
    mode: Mode,
    truth: TruthMap,
    // bound the labels were computed at
    gamma: Ordinal,
    embedded: HashMap<Formula, EmbeddedSolution>,
}

impl SolverCache {
    pub fn build(model: &Arc<Model>, formula: &Formula, mode: &Mode) -> Result<SolverCache, EngineError> {
        let truth = evaluate(model, formula, &mode_semantics(mode))?;
        let gamma = match mode {
            Mode::Unbounded => model.stable_bound(),
            Mode::Bounded(g) => g.clone(),
            Mode::FinitelyBounded => Ordinal::omega(),
        };
        let mut embedded = HashMap::new();
        for (i, g) in truth.subformulas.iter().enumerate() {
            let (Formula::CoopU(a, l, r) | Formula::CoopR(a, l, r)) = g else { continue };
            let is_until = matches!(g, Formula::CoopU(..));
            let lhs = truth.get(l).expect("child evaluated").to_vec();
            let rhs = truth.get(r).expect("child evaluated").to_vec();
            let spec = embedded_spec(model, a, is_until, &lhs, &rhs);
            let controller = compute_labels(&spec, &gamma)?;
            let strategy = canonical_controller(&spec, &controller)?;
            log::debug!("solved embedded game #{i} {g}");
            embedded.insert(
                g.clone(),
                EmbeddedSolution {
                    coalition: a.clone(),
                    is_until,
                    opponent: opponent_labels(&controller),
                    goal: spec.goal,
                    safe: spec.safe,
                    controller,
                    strategy,
                },
            );
        }
        Ok(SolverCache {
            model: Arc::clone(model),
            mode: mode.clone(),
            truth,
            gamma,
            embedded,
        })
    }

    pub fn mode(&self) -> &Mode {
        &self.mode
    }

    pub fn truth(&self) -> &TruthMap {
        &self.truth
    }

    /// Bound the labels were computed at: `|S|` when unbounded, `w` when finitely bounded.
    pub fn gamma(&self) -> &Ordinal {
        &self.gamma
    }

    pub fn holds(&self, f: &Formula, q: usize) -> bool {
        self.truth.get(f).is_some_and(|t| t[q])
    }

    pub fn embedded(&self, f: &Formula) -> Option<&EmbeddedSolution> {
        self.embedded.get(f)
    }

    fn spec(&self, sol: &EmbeddedSolution) -> EmbeddedGameSpec<'_> {
        embedded_spec_from(&self.model, sol)
    }
}

fn embedded_spec_from<'m>(model: &'m Model, sol: &EmbeddedSolution) -> EmbeddedGameSpec<'m> {
    EmbeddedGameSpec {
        model,
        verifier: Player::E,
        controller: if sol.is_until { Player::E } else { Player::A },
        coalition: sol.coalition.clone(),
        goal: sol.goal.clone(),
        safe: sol.safe.clone(),
    }
}

/// Per-state labels of both players for the active embedded game.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LabelOverlay {
    pub formula: String,
    pub controller: Player,
    pub gamma: Ordinal,
    /// player -> state -> label
    pub labels: BTreeMap<Player, BTreeMap<String, Label>>,
}

#[derive(Debug, Clone)]
pub(crate) struct Policies {
    rngs: [Option<ChaCha8Rng>; 2],
}

fn slot(p: Player) -> usize {
    match p {
        Player::E => 0,
        Player::A => 1,
    }
}

impl Policies {
    pub(crate) fn new(roles: &Roles) -> Self {
        let rng = |r: &Role| match r {
            Role::Random(seed) => Some(ChaCha8Rng::seed_from_u64(*seed)),
            _ => None,
        };
        Policies {
            rngs: [rng(&roles.eloise), rng(&roles.abelard)],
        }
    }
}

fn names(model: &Model, agents: &AgentSet, q: usize, idx: &[usize]) -> Vec<String> {
    agents
        .agents()
        .iter()
        .zip(idx)
        .map(|(&a, &i)| model.actions(a, q)[i].clone())
        .collect()
}

impl Session {
    /// Builds the solver cache if the session does not have one yet (finite models only).
    pub fn ensure_solver(&mut self) -> Result<Option<&SolverCache>, EngineError> {
        if self.solver.is_none() {
            if let GameModel::Finite(m) = &self.setup.model {
                self.solver = Some(Arc::new(SolverCache::build(m, &self.setup.formula, &self.setup.mode)?));
            }
        }
        Ok(self.solver.as_deref())
    }

    /// Labels of both players in the active embedded game, if any.
    pub fn label_overlay(&mut self) -> Result<Option<LabelOverlay>, EngineError> {
        let ctx = match &self.phase {
            Phase::Announce(ctx) | Phase::Embedded { ctx, .. } => ctx.clone(),
            _ => return Ok(None),
        };
        let Some(cache) = self.ensure_solver()? else {
            return Ok(None);
        };
        let Some(sol) = cache.embedded(&ctx.source) else {
            return Ok(None);
        };
        let model = &cache.model;
        let dump = |l: &LabelMap| -> BTreeMap<String, Label> {
            (0..model.state_count())
                .map(|q| (model.state_name(q).to_string(), l.get(q).clone()))
                .collect()
        };
        let labels = BTreeMap::from([
            (ctx.controller, dump(&sol.controller)),
            (ctx.controller.opponent(), dump(&sol.opponent)),
        ]);
        Ok(Some(LabelOverlay {
            formula: ctx.source.to_string(),
            controller: ctx.controller,
            gamma: cache.gamma.clone(),
            labels,
        }))
    }

    /// The move the pending machine role makes now.
    pub(crate) fn machine_move(&mut self) -> Result<Move, EngineError> {
        let actor = self.pending().ok_or(EngineError::Ended)?;
        let role = self.setup.roles.get(actor).clone();
        self.suggest_move(&role)
    }

    /// The move `role` would make for the pending player, whoever actually
    /// owns the move. Random roles draw from the pending player's generator,
    /// seeding it on first use.
    pub fn suggest_move(&mut self, role: &Role) -> Result<Move, EngineError> {
        let actor = self.pending().ok_or(EngineError::Ended)?;
        role.check(&self.setup.model)?;
        match role {
            Role::Human => Err(EngineError::HumanPending(actor)),
            Role::Script(name) => Ok(scripts::script_move(self, name, actor)),
            Role::Random(seed) => {
                self.policies.rngs[slot(actor)].get_or_insert_with(|| ChaCha8Rng::seed_from_u64(*seed));
                Ok(self.random_move(actor))
            }
            Role::Canonical => {
                self.ensure_solver()?;
                Ok(self.canonical_move(actor, None))
            }
            Role::CanonicalWith(v) => {
                self.ensure_solver()?;
                Ok(self.canonical_move(actor, Some(*v)))
            }
        }
    }

    fn random_move(&mut self, actor: Player) -> Move {
        let menu = self.legal_moves().expect("pending move");
        let cap = self.setup.model.finite().map_or(8, |m| m.state_count() as u64);
        let q = self.current_state().clone();
        let model = self.setup.model.clone();
        let rng = self.policies.rngs[slot(actor)].as_mut().expect("random role has a generator");
        match menu {
            Menu::Choice { options, .. } => options[rng.gen_range(0..options.len())].clone(),
            Menu::Actions { agents, .. } => {
                let picks = agents
                    .iter()
                    .map(|&a| match model.domain(a, &q) {
                        crate::cgm::ActionDomain::Finite(names) => names[rng.gen_range(0..names.len())].clone(),
                        crate::cgm::ActionDomain::AllNaturals => rng.gen_range(0..=cap).to_string(),
                    })
                    .collect();
                Move::Actions(picks)
            }
            Menu::Announce { below, .. } => Move::Announce(random_below(rng, below.as_ref(), cap)),
            Menu::Lower { below, .. } => Move::Lower(random_below(rng, Some(&below), cap)),
        }
    }

    fn canonical_move(&self, actor: Player, variant: Option<NonControllerVariant>) -> Move {
        let cache = self.solver.as_deref().expect("canonical roles have solver data");
        let model = &cache.model;
        let agents = model.agent_count();
        let fin = |q: &StateKey| match q {
            StateKey::Finite(i) => *i,
            StateKey::Lazy(_) => unreachable!("canonical play is finite only"),
        };
        match &self.phase {
            Phase::Choose(pos) => {
                let Formula::Or(l, _) = &pos.formula else { unreachable!() };
                if cache.holds(l, fin(&pos.state)) {
                    Move::Left
                } else if cache.holds(&pos.formula, fin(&pos.state)) {
                    Move::Right
                } else {
                    Move::Left
                }
            }
            Phase::XStep { position, stage } => {
                let Formula::CoopX(a, h) = &position.formula else { unreachable!() };
                let q = fin(&position.state);
                let target = cache.truth.get(h).expect("evaluated");
                match stage {
                    StepStage::Verifier => {
                        let alpha = model
                            .partial_profiles(q, a)
                            .into_iter()
                            .find(|al| {
                                model
                                    .partial_profiles(q, &a.complement(agents))
                                    .iter()
                                    .all(|b| target[model.successor(q, &model.combine(a, al, &a.complement(agents), b))])
                            })
                            .unwrap_or_else(|| vec![0; a.len()]);
                        Move::Actions(names(model, a, q, &alpha))
                    }
                    StepStage::Falsifier { alpha } => {
                        let comp = a.complement(agents);
                        let al: Vec<usize> = alpha.iter().map(|&x| x as usize).collect();
                        let beta = model
                            .partial_profiles(q, &comp)
                            .into_iter()
                            .find(|b| !target[model.successor(q, &model.combine(a, &al, &comp, b))])
                            .unwrap_or_else(|| vec![0; comp.len()]);
                        Move::Actions(names(model, &comp, q, &beta))
                    }
                }
            }
            Phase::Announce(ctx) => {
                let sol = cache.embedded(&ctx.source).expect("solved");
                match sol.controller.get(fin(&ctx.position.state)) {
                    Label::Ord(o) => Move::Announce(o.clone()),
                    _ => Move::Announce(Ordinal::zero()),
                }
            }
            Phase::Embedded { ctx, limit, state, stage } => {
                let sol = cache.embedded(&ctx.source).expect("solved");
                let spec = cache.spec(sol);
                let q = fin(state);
                let is_controller = actor == ctx.controller;
                let nc_variant = variant.unwrap_or(match &self.setup.mode {
                    Mode::Bounded(_) => NonControllerVariant::Full,
                    Mode::FinitelyBounded => NonControllerVariant::N(
                        ctx.initial_limit.as_ref().and_then(Ordinal::as_natural).unwrap_or(0),
                    ),
                    Mode::Unbounded => NonControllerVariant::Infinity,
                });
                // unbounded play has no limit; the state-only variants ignore it
                // and the full variant reads the largest limit below the bound
                let gamma = limit.clone().unwrap_or_else(|| cache.gamma.predecessor().unwrap_or_default());
                let nc = || {
                    let v = match (nc_variant, cache.gamma.is_successor()) {
                        (NonControllerVariant::Infinity, false) => NonControllerVariant::Full,
                        (v, _) => v,
                    };
                    canonical_noncontroller(&sol.opponent, v).expect("non-controller perspective")
                };
                let choice = || {
                    if is_controller {
                        sol.strategy.choice(q).clone()
                    } else {
                        nc().choice(&spec, &gamma, q)
                    }
                };
                let decision = || {
                    if is_controller {
                        sol.strategy.decision(&spec, q)
                    } else {
                        nc().decision(&spec, &gamma, q)
                    }
                };
                match stage {
                    Stage::ControllerEnd | Stage::OpponentEnd => {
                        if choice().ends() {
                            Move::EndNow
                        } else {
                            Move::Continue
                        }
                    }
                    Stage::VerifierMove => match decision() {
                        Decision::Profile(p) => Move::Actions(names(model, &ctx.coalition, q, &p)),
                        Decision::Response(_) => unreachable!("verifier commits a profile"),
                    },
                    Stage::FalsifierMove { alpha } => {
                        let comp = ctx.coalition.complement(agents);
                        let al: Vec<usize> = alpha.iter().map(|&x| x as usize).collect();
                        let row = model
                            .partial_profiles(q, &ctx.coalition)
                            .iter()
                            .position(|p| *p == al)
                            .expect("legal profile");
                        match decision() {
                            Decision::Response(t) => Move::Actions(names(model, &comp, q, &t[row])),
                            Decision::Profile(_) => unreachable!("falsifier answers with a table"),
                        }
                    }
                    Stage::LowerLimit => Move::Lower(sol.strategy.timer(&gamma, q)),
                }
            }
            Phase::Ended { .. } => unreachable!("no move after the end"),
        }
    }
}

// naturals up to `cap`, plus w when the bound allows it
fn random_below(rng: &mut ChaCha8Rng, below: Option<&Ordinal>, cap: u64) -> Ordinal {
    let mut options: Vec<Ordinal> = (0..=cap).map(Ordinal::from).filter(|o| below.is_none_or(|b| o < b)).collect();
    if below.is_some_and(|b| Ordinal::omega() < *b) {
        options.push(Ordinal::omega());
    }
    options[rng.gen_range(0..options.len())].clone()
}
