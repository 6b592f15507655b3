//! Evaluation games as an explicit state machine.
//!
//! A [`Session`] walks positions `(P, q, phi)`, runs one-step games for `X`,
//! and merges the embedded games of `U`/`R` into the same move stream. Rule
//! applications that involve no choice happen automatically and are recorded
//! with no actor.

mod lint;
mod policy;
mod scripts;
mod search;
mod types;

use std::sync::Arc;

use crate::cgm::{ActionDomain, LazyModel, Model};
use crate::formula::{subformulas, AgentSet, Formula};
use crate::ordinal::Ordinal;
use crate::semantics::GammaBound;
use crate::Player;

pub use lint::{lint_transcript, LintViolation};
pub use policy::SolverCache;
pub use scripts::SCRIPT_NAMES;
pub use policy::{mode_semantics, EmbeddedSolution, LabelOverlay};
pub use search::{search_winner, SearchError, SearchLimits};
pub use types::*;

/// A model to play on: explicit and finite, or generated on demand.
#[derive(Debug, Clone)]
pub enum GameModel {
    Finite(Arc<Model>),
    Lazy(Arc<dyn LazyModel>),
}

impl GameModel {
    pub fn agent_count(&self) -> usize {
        match self {
            GameModel::Finite(m) => m.agent_count(),
            GameModel::Lazy(m) => m.agents(),
        }
    }

    pub fn is_lazy(&self) -> bool {
        matches!(self, GameModel::Lazy(_))
    }

    pub fn finite(&self) -> Option<&Arc<Model>> {
        match self {
            GameModel::Finite(m) => Some(m),
            GameModel::Lazy(_) => None,
        }
    }

    pub fn parse_state(&self, text: &str) -> Option<StateKey> {
        match self {
            GameModel::Finite(m) => m.state_index(text).ok().map(StateKey::Finite),
            GameModel::Lazy(m) => m.parse_state(text).map(StateKey::Lazy),
        }
    }

    pub fn render(&self, q: &StateKey) -> String {
        match (self, q) {
            (GameModel::Finite(m), StateKey::Finite(i)) => m.state_name(*i).to_string(),
            (GameModel::Lazy(m), StateKey::Lazy(s)) => m.render(s),
            _ => format!("{q:?}"),
        }
    }

    pub fn holds(&self, q: &StateKey, prop: &str) -> bool {
        match (self, q) {
            (GameModel::Finite(m), StateKey::Finite(i)) => m.holds(*i, prop),
            (GameModel::Lazy(m), StateKey::Lazy(s)) => m.props(s).contains(prop),
            _ => false,
        }
    }

    pub fn domain(&self, agent: usize, q: &StateKey) -> ActionDomain {
        match (self, q) {
            (GameModel::Finite(m), StateKey::Finite(i)) => ActionDomain::Finite(m.actions(agent, *i).to_vec()),
            (GameModel::Lazy(m), StateKey::Lazy(s)) => m.actions(agent, s),
            _ => ActionDomain::Finite(Vec::new()),
        }
    }

    /// Successor for a full profile of action indices (agent order).
    pub fn step(&self, q: &StateKey, profile: &[u64]) -> StateKey {
        match (self, q) {
            (GameModel::Finite(m), StateKey::Finite(i)) => {
                let p: Vec<usize> = profile.iter().map(|&x| x as usize).collect();
                StateKey::Finite(m.successor(*i, &p))
            }
            (GameModel::Lazy(m), StateKey::Lazy(s)) => StateKey::Lazy(m.step(s, profile)),
            _ => q.clone(),
        }
    }
}

/// Parameters a session was created from; enough to replay it.
#[derive(Debug, Clone)]
pub struct SessionSetup {
    pub model: GameModel,
    pub state: StateKey,
    pub formula: Formula,
    pub mode: Mode,
    pub roles: Roles,
}

#[derive(Debug, Clone)]
pub struct Session {
    setup: SessionSetup,
    position: Position,
    phase: Phase,
    transcript: Vec<Entry>,
    recording: bool,
    last_exit: Option<EndReason>,
    solver: Option<Arc<SolverCache>>,
    policies: policy::Policies,
}

impl Session {
    /// Starts a game at `(E, state, formula)` and applies automatic rules.
    pub fn new(
        model: GameModel,
        state: &str,
        formula: Formula,
        mode: ModeSpec,
        roles: Roles,
    ) -> Result<Session, EngineError> {
        let q = model
            .parse_state(state)
            .ok_or_else(|| EngineError::UnknownState(state.to_string()))?;
        let mode = match (mode, &model) {
            (ModeSpec::Unbounded, _) => Mode::Unbounded,
            (ModeSpec::FinitelyBounded, _) => Mode::FinitelyBounded,
            (ModeSpec::Bounded(GammaBound::Bound(g)), _) => {
                if g.is_zero() {
                    return Err(EngineError::ZeroBound);
                }
                Mode::Bounded(g)
            }
            (ModeSpec::Bounded(GammaBound::Auto), GameModel::Finite(m)) => Mode::Bounded(m.stable_bound()),
            (ModeSpec::Bounded(GammaBound::Auto), GameModel::Lazy(_)) => return Err(EngineError::LazyNeedsBound),
        };
        Session::from_setup(SessionSetup {
            model,
            state: q,
            formula,
            mode,
            roles,
        })
    }

    pub fn from_setup(setup: SessionSetup) -> Result<Session, EngineError> {
        let agents = setup.model.agent_count();
        for g in subformulas(&setup.formula) {
            if let Some(&a) = g.coalition().and_then(|c| c.agents().iter().find(|&&a| a == 0 || a > agents)) {
                return Err(EngineError::UnknownAgent { agent: a, agents });
            }
        }
        for p in [Player::E, Player::A] {
            let role = setup.roles.get(p);
            role.check(&setup.model)?;
        }
        let solver = match &setup.model {
            GameModel::Finite(m) if setup.roles.any_canonical() => {
                Some(Arc::new(SolverCache::build(m, &setup.formula, &setup.mode)?))
            }
            _ => None,
        };
        let position = Position {
            verifier: Player::E,
            state: setup.state.clone(),
            formula: setup.formula.clone(),
        };
        let policies = policy::Policies::new(&setup.roles);
        let mut s = Session {
            position: position.clone(),
            phase: Phase::Ended {
                winner: Player::E,
                reason: EndReason::TrueFalseAtom,
            },
            setup,
            transcript: Vec::new(),
            recording: true,
            last_exit: None,
            solver,
            policies,
        };
        s.enter_position(position);
        Ok(s)
    }

    pub fn setup(&self) -> &SessionSetup {
        &self.setup
    }

    pub fn model(&self) -> &GameModel {
        &self.setup.model
    }

    pub fn mode(&self) -> &Mode {
        &self.setup.mode
    }

    pub fn roles(&self) -> &Roles {
        &self.setup.roles
    }

    pub fn phase(&self) -> &Phase {
        &self.phase
    }

    /// Current evaluation-game position (the one an active embedded game belongs to).
    pub fn position(&self) -> &Position {
        &self.position
    }

    pub fn entries(&self) -> &[Entry] {
        &self.transcript
    }

    pub fn solver(&self) -> Option<&SolverCache> {
        self.solver.as_deref()
    }

    pub(crate) fn set_recording(&mut self, on: bool) {
        self.recording = on;
        if !on {
            self.transcript.clear();
        }
    }

    pub fn is_ended(&self) -> bool {
        matches!(self.phase, Phase::Ended { .. })
    }

    pub fn winner(&self) -> Option<Player> {
        match &self.phase {
            Phase::Ended { winner, .. } => Some(*winner),
            _ => None,
        }
    }

    pub fn transcript(&self) -> Transcript {
        let (winner, reason) = match &self.phase {
            Phase::Ended { winner, reason } => (Some(*winner), Some(*reason)),
            _ => (None, None),
        };
        Transcript {
            moves: self.transcript.clone(),
            winner,
            reason,
        }
    }

    /// The player who must move next.
    pub fn pending(&self) -> Option<Player> {
        match &self.phase {
            Phase::Ended { .. } => None,
            Phase::Choose(p) => Some(p.verifier),
            Phase::XStep { position, stage } => Some(match stage {
                StepStage::Verifier => position.verifier,
                StepStage::Falsifier { .. } => position.verifier.opponent(),
            }),
            Phase::Announce(ctx) => Some(ctx.controller),
            Phase::Embedded { ctx, stage, .. } => Some(match stage {
                Stage::ControllerEnd | Stage::LowerLimit => ctx.controller,
                Stage::OpponentEnd => ctx.controller.opponent(),
                Stage::VerifierMove => ctx.verifier,
                Stage::FalsifierMove { .. } => ctx.verifier.opponent(),
            }),
        }
    }

    /// State the pending decision is taken at.
    pub fn current_state(&self) -> &StateKey {
        match &self.phase {
            Phase::Embedded { state, .. } => state,
            Phase::Announce(ctx) => &ctx.position.state,
            _ => &self.position.state,
        }
    }

    fn actions_menu(&self, actor: Player, agents: &AgentSet) -> Menu {
        let q = self.current_state();
        Menu::Actions {
            actor,
            agents: agents.agents().to_vec(),
            domains: agents
                .agents()
                .iter()
                .map(|&a| DomainView::from(&self.setup.model.domain(a, q)))
                .collect(),
        }
    }

    /// The exact set of legal moves, or `None` once the game has ended.
    pub fn legal_moves(&self) -> Option<Menu> {
        let actor = self.pending()?;
        let agents = self.setup.model.agent_count();
        Some(match &self.phase {
            Phase::Ended { .. } => return None,
            Phase::Choose(_) => Menu::Choice {
                actor,
                options: vec![Move::Left, Move::Right],
            },
            Phase::XStep { position, stage } => {
                let a = position.formula.coalition().expect("X position");
                match stage {
                    StepStage::Verifier => self.actions_menu(actor, a),
                    StepStage::Falsifier { .. } => self.actions_menu(actor, &a.complement(agents)),
                }
            }
            Phase::Announce(_) => match &self.setup.mode {
                Mode::Bounded(g) => Menu::Announce {
                    actor,
                    below: Some(g.clone()),
                    finite_only: false,
                },
                _ => Menu::Announce {
                    actor,
                    below: None,
                    finite_only: true,
                },
            },
            Phase::Embedded { ctx, limit, stage, .. } => match stage {
                Stage::ControllerEnd | Stage::OpponentEnd => Menu::Choice {
                    actor,
                    options: vec![Move::EndNow, Move::Continue],
                },
                Stage::VerifierMove => self.actions_menu(actor, &ctx.coalition),
                Stage::FalsifierMove { .. } => self.actions_menu(actor, &ctx.coalition.complement(agents)),
                Stage::LowerLimit => Menu::Lower {
                    actor,
                    below: limit.clone().expect("lowering needs a limit"),
                },
            },
        })
    }

    fn record(&mut self, phase: &str, actor: Option<Player>, mv: Move) {
        let limit = match &self.phase {
            Phase::Embedded { limit, .. } => limit.clone(),
            _ => None,
        };
        let state = self.current_state().clone();
        self.push_entry(phase, actor, mv, &state, limit);
    }

    fn push_entry(&mut self, phase: &str, actor: Option<Player>, mv: Move, state: &StateKey, limit: Option<Ordinal>) {
        if !self.recording {
            return;
        }
        self.transcript.push(Entry {
            phase: phase.to_string(),
            actor,
            mv,
            state: self.setup.model.render(state),
            limit,
        });
    }

    fn end(&mut self, winner: Player, reason: EndReason) {
        let reason = match (reason, self.last_exit) {
            (EndReason::EndingPositionProp | EndReason::TrueFalseAtom, Some(exit)) => exit,
            (r, _) => r,
        };
        self.phase = Phase::Ended { winner, reason };
    }

    // Rules that need no choice: atoms end the game, negation swaps roles,
    // strategic formulas open a one-step or embedded game.
    fn enter_position(&mut self, mut pos: Position) {
        loop {
            self.position = pos.clone();
            match &pos.formula {
                Formula::True => return self.end(pos.verifier, EndReason::TrueFalseAtom),
                Formula::False => return self.end(pos.verifier.opponent(), EndReason::TrueFalseAtom),
                Formula::Prop(p) => {
                    let w = if self.setup.model.holds(&pos.state, p) {
                        pos.verifier
                    } else {
                        pos.verifier.opponent()
                    };
                    return self.end(w, EndReason::EndingPositionProp);
                }
                Formula::Not(h) => {
                    self.push_entry("negation", None, Move::Auto(AutoRule::Negation), &pos.state, None);
                    pos = Position {
                        verifier: pos.verifier.opponent(),
                        state: pos.state.clone(),
                        formula: (**h).clone(),
                    };
                }
                Formula::Or(..) => {
                    self.phase = Phase::Choose(pos);
                    return;
                }
                Formula::CoopX(..) => {
                    self.phase = Phase::XStep {
                        position: pos,
                        stage: StepStage::Verifier,
                    };
                    return self.auto_single_action();
                }
                Formula::CoopU(a, l, r) | Formula::CoopR(a, l, r) => {
                    let until = matches!(pos.formula, Formula::CoopU(..));
                    let ctx = EmbeddedCtx {
                        verifier: pos.verifier,
                        controller: if until { pos.verifier } else { pos.verifier.opponent() },
                        coalition: a.clone(),
                        source: pos.formula.clone(),
                        controller_goal: (**r).clone(),
                        opponent_goal: (**l).clone(),
                        initial_limit: None,
                        position: pos.clone(),
                    };
                    match self.setup.mode {
                        Mode::Unbounded => self.enter_round(ctx, None, pos.state.clone()),
                        _ => self.phase = Phase::Announce(ctx),
                    }
                    return;
                }
            }
        }
    }

    fn enter_round(&mut self, ctx: EmbeddedCtx, limit: Option<Ordinal>, state: StateKey) {
        let exhausted = limit.as_ref().is_some_and(Ordinal::is_zero);
        self.phase = Phase::Embedded {
            ctx: ctx.clone(),
            limit,
            state: state.clone(),
            stage: Stage::ControllerEnd,
        };
        if exhausted {
            self.record("forced-exit", None, Move::Auto(AutoRule::ForcedExit));
            self.exit(&ctx, state, true, EndReason::TimeExhaustedExit);
        }
    }

    fn exit(&mut self, ctx: &EmbeddedCtx, state: StateKey, controller_side: bool, why: EndReason) {
        self.last_exit = Some(why);
        let formula = if controller_side {
            ctx.controller_goal.clone()
        } else {
            ctx.opponent_goal.clone()
        };
        self.enter_position(Position {
            verifier: ctx.verifier,
            state,
            formula,
        });
    }

    // single-profile action menus (e.g. an empty coalition) are played automatically
    fn auto_single_action(&mut self) {
        loop {
            let Some(Menu::Actions { domains, .. }) = self.legal_moves() else {
                return;
            };
            let only: Option<Vec<String>> = domains
                .iter()
                .map(|d| match d {
                    DomainView::Finite { actions } if actions.len() == 1 => Some(actions[0].clone()),
                    _ => None,
                })
                .collect();
            match only {
                Some(names) => {
                    let phase = self.phase_name();
                    self.record(phase, None, Move::Actions(names.clone()));
                    self.advance(Move::Actions(names));
                }
                None => return,
            }
        }
    }

    /// Short name of the current decision point, as used in transcripts.
    pub fn phase_name(&self) -> &'static str {
        match &self.phase {
            Phase::Ended { .. } => "ended",
            Phase::Choose(_) => "choose",
            Phase::XStep { stage: StepStage::Verifier, .. } => "x-verifier",
            Phase::XStep { .. } => "x-falsifier",
            Phase::Announce(_) => "announce",
            Phase::Embedded { stage, .. } => match stage {
                Stage::ControllerEnd => "controller-end",
                Stage::OpponentEnd => "opponent-end",
                Stage::VerifierMove => "verifier-move",
                Stage::FalsifierMove { .. } => "falsifier-move",
                Stage::LowerLimit => "lower-limit",
            },
        }
    }

    fn check_actions(&self, menu: &Menu, names: &[String]) -> Result<Vec<u64>, String> {
        let Menu::Actions { agents, domains, .. } = menu else {
            return Err("no actions expected here".into());
        };
        if names.len() != agents.len() {
            return Err(format!(
                "expected {} action(s), one per agent {:?}",
                agents.len(),
                agents
            ));
        }
        let q = self.current_state();
        let mut out = Vec::with_capacity(names.len());
        for ((a, name), _) in agents.iter().zip(names).zip(domains) {
            match self.setup.model.domain(*a, q).lookup(name) {
                Some(i) => out.push(i),
                None => return Err(format!("'{name}' is not an action of agent {a}")),
            }
        }
        Ok(out)
    }

    fn validate(&self, menu: &Menu, mv: &Move) -> Result<(), String> {
        match (menu, mv) {
            (Menu::Choice { options, .. }, m) if options.contains(m) => Ok(()),
            (Menu::Actions { .. }, Move::Actions(names)) => self.check_actions(menu, names).map(|_| ()),
            (Menu::Announce { finite_only: true, .. }, Move::Announce(g)) => {
                if g.is_finite() {
                    Ok(())
                } else {
                    Err("finite limits only".into())
                }
            }
            (Menu::Announce { below: Some(b), .. }, Move::Announce(g)) => {
                if g < b {
                    Ok(())
                } else {
                    Err(format!("announced limit must be below {b}"))
                }
            }
            (Menu::Lower { below, .. }, Move::Lower(g)) => {
                if g < below {
                    Ok(())
                } else {
                    Err(format!("new limit must be below {below}"))
                }
            }
            _ => Err(format!("move {mv} is not offered here")),
        }
    }

    /// Applies one move for `actor` after checking ownership and legality.
    pub fn apply_move(&mut self, actor: Player, mv: Move) -> Result<(), EngineError> {
        let menu = self.legal_moves().ok_or(EngineError::Ended)?;
        if menu.actor() != actor {
            return Err(EngineError::WrongActor {
                expected: menu.actor(),
                got: actor,
            });
        }
        if let Err(reason) = self.validate(&menu, &mv) {
            return Err(EngineError::IllegalMove { reason, menu });
        }
        let phase = self.phase_name();
        self.record(phase, Some(actor), mv.clone());
        self.last_exit = None;
        self.advance(mv);
        Ok(())
    }

    // applies an already validated move
    fn advance(&mut self, mv: Move) {
        let agents = self.setup.model.agent_count();
        let phase = std::mem::replace(
            &mut self.phase,
            Phase::Ended {
                winner: Player::E,
                reason: EndReason::TrueFalseAtom,
            },
        );
        match (phase, mv) {
            (Phase::Choose(pos), m @ (Move::Left | Move::Right)) => {
                let Formula::Or(l, r) = &pos.formula else { unreachable!() };
                let next = if m == Move::Left { l } else { r };
                self.enter_position(Position {
                    verifier: pos.verifier,
                    state: pos.state.clone(),
                    formula: (**next).clone(),
                });
            }
            (Phase::XStep { position, stage: StepStage::Verifier }, Move::Actions(names)) => {
                let alpha = self.indices(&position.state, position.formula.coalition().unwrap(), &names);
                self.phase = Phase::XStep {
                    position,
                    stage: StepStage::Falsifier { alpha },
                };
                self.auto_single_action();
            }
            (Phase::XStep { position, stage: StepStage::Falsifier { alpha } }, Move::Actions(names)) => {
                let Formula::CoopX(a, h) = &position.formula else { unreachable!() };
                let comp = a.complement(agents);
                let beta = self.indices(&position.state, &comp, &names);
                let next = self.successor(&position.state, a, &alpha, &comp, &beta);
                self.enter_position(Position {
                    verifier: position.verifier,
                    state: next,
                    formula: (**h).clone(),
                });
            }
            (Phase::Announce(mut ctx), Move::Announce(g)) => {
                ctx.initial_limit = Some(g.clone());
                let q = ctx.position.state.clone();
                self.enter_round(ctx, Some(g), q);
            }
            (Phase::Embedded { ctx, limit, state, stage }, mv) => match (stage, mv) {
                (Stage::ControllerEnd, Move::EndNow) => self.exit(&ctx, state, true, EndReason::VoluntaryExit),
                (Stage::OpponentEnd, Move::EndNow) => self.exit(&ctx, state, false, EndReason::VoluntaryExit),
                (Stage::ControllerEnd, Move::Continue) => {
                    self.phase = Phase::Embedded {
                        ctx,
                        limit,
                        state,
                        stage: Stage::OpponentEnd,
                    }
                }
                (Stage::OpponentEnd, Move::Continue) => {
                    self.phase = Phase::Embedded {
                        ctx,
                        limit,
                        state,
                        stage: Stage::VerifierMove,
                    };
                    self.auto_single_action();
                }
                (Stage::VerifierMove, Move::Actions(names)) => {
                    let alpha = self.indices(&state, &ctx.coalition, &names);
                    self.phase = Phase::Embedded {
                        ctx,
                        limit,
                        state,
                        stage: Stage::FalsifierMove { alpha },
                    };
                    self.auto_single_action();
                }
                (Stage::FalsifierMove { alpha }, Move::Actions(names)) => {
                    let comp = ctx.coalition.complement(agents);
                    let beta = self.indices(&state, &comp, &names);
                    let next = self.successor(&state, &ctx.coalition, &alpha, &comp, &beta);
                    match limit {
                        None => self.enter_round(ctx, None, next),
                        Some(g) if g.is_limit() => {
                            self.phase = Phase::Embedded {
                                ctx,
                                limit: Some(g),
                                state: next,
                                stage: Stage::LowerLimit,
                            }
                        }
                        Some(g) => {
                            let g = g.predecessor().expect("positive successor limit");
                            self.enter_round(ctx, Some(g), next);
                        }
                    }
                }
                (Stage::LowerLimit, Move::Lower(g)) => self.enter_round(ctx, Some(g), state),
                (stage, mv) => unreachable!("validated move {mv:?} at {stage:?}"),
            },
            (phase, mv) => unreachable!("validated move {mv:?} at {phase:?}"),
        }
    }

    fn indices(&self, q: &StateKey, agents: &AgentSet, names: &[String]) -> Vec<u64> {
        agents
            .agents()
            .iter()
            .zip(names)
            .map(|(&a, n)| self.setup.model.domain(a, q).lookup(n).expect("validated action"))
            .collect()
    }

    fn successor(&self, q: &StateKey, a: &AgentSet, alpha: &[u64], comp: &AgentSet, beta: &[u64]) -> StateKey {
        let mut full = vec![0u64; self.setup.model.agent_count()];
        for (&ag, &i) in a.agents().iter().zip(alpha) {
            full[ag - 1] = i;
        }
        for (&ag, &i) in comp.agents().iter().zip(beta) {
            full[ag - 1] = i;
        }
        self.setup.model.step(q, &full)
    }

    /// Whether the pending move belongs to a machine role.
    pub fn machine_pending(&self) -> bool {
        self.pending()
            .is_some_and(|p| !matches!(self.setup.roles.get(p), Role::Human))
    }

    /// Plays machine moves until a human must move or the game ends.
    /// Returns the number of moves applied.
    pub fn advance_machines(&mut self, budget: u64) -> Result<u64, EngineError> {
        let mut used = 0;
        while self.machine_pending() {
            if used == budget {
                self.exhaust_budget();
                break;
            }
            let actor = self.pending().expect("pending");
            let mv = self.machine_move()?;
            self.apply_move(actor, mv)?;
            used += 1;
        }
        Ok(used)
    }

    /// Plays both sides by machine until the game ends or `budget` moves have
    /// been made. On exhaustion inside an embedded game, the controller loses,
    /// as it would in a genuinely infinite play.
    pub fn run_machine(&mut self, budget: u64) -> Result<Transcript, EngineError> {
        if budget == 0 {
            return Err(EngineError::ZeroBudget);
        }
        self.advance_machines(budget)?;
        if let Some(p) = self.pending() {
            return Err(EngineError::HumanPending(p));
        }
        Ok(self.transcript())
    }

    fn exhaust_budget(&mut self) {
        let winner = match &self.phase {
            Phase::Embedded { ctx, .. } | Phase::Announce(ctx) => ctx.controller.opponent(),
            _ => self.position.verifier.opponent(),
        };
        log::info!("step budget exhausted; {winner} wins");
        self.last_exit = None;
        self.end(winner, EndReason::StepBudgetExceeded);
    }

    /// Rebuilds the session from its setup by re-applying every recorded move.
    pub fn replay(&self) -> Result<Session, EngineError> {
        let mut s = Session::from_setup(self.setup.clone())?;
        for e in &self.transcript {
            if let Some(actor) = e.actor {
                s.apply_move(actor, e.mv.clone())?;
            }
        }
        if self.transcript.is_empty() && self.is_ended() {
            return Ok(s);
        }
        if let Phase::Ended { reason: EndReason::StepBudgetExceeded, .. } = self.phase {
            s.exhaust_budget();
        }
        Ok(s)
    }

    pub fn view(&self) -> SessionView {
        let render = |q: &StateKey| self.setup.model.render(q);
        let position = PositionView {
            verifier: self.position.verifier,
            state: render(&self.position.state),
            formula: self.position.formula.to_string(),
        };
        let embedded = match &self.phase {
            Phase::Announce(ctx) => Some(EmbeddedView::new(ctx, None, render(&ctx.position.state))),
            Phase::Embedded { ctx, limit, state, .. } => Some(EmbeddedView::new(ctx, limit.clone(), render(state))),
            _ => None,
        };
        let (winner, reason) = match &self.phase {
            Phase::Ended { winner, reason } => (Some(*winner), Some(*reason)),
            _ => (None, None),
        };
        SessionView {
            phase: self.phase_name().to_string(),
            position,
            embedded,
            pending: self.pending(),
            menu: self.legal_moves(),
            machine_pending: self.machine_pending(),
            winner,
            reason,
            mode: self.setup.mode.clone(),
            model: if self.setup.model.is_lazy() { "lazy" } else { "finite" }.to_string(),
        }
    }
}
