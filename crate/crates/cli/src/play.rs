//! Terminal play: the same menus the HTTP service hands to clients, read
//! from stdin one line per decision.

use std::io::{self, BufRead, Write};
use std::process::ExitCode;

use atlgts::engine::{DomainView, Entry, Menu, Move, Role, Roles, Session};
use atlgts::ordinal::Ordinal;
use atlgts::Player;

use crate::{formula, game_model, mode_spec, parse_role, Fallible, PlayArgs};

fn humans(role: &str) -> Fallible<(bool, bool)> {
    Ok(match role.to_ascii_lowercase().as_str() {
        "eloise" | "e" => (true, false),
        "abelard" | "a" => (false, true),
        "both" => (true, true),
        "none" => (false, false),
        other => return Err(format!("unknown --role '{other}' (eloise, abelard, both, none)")),
    })
}

// on lazy models only scripts can play; pick the matching one
fn default_opponent(lazy: bool, player: Player) -> &'static str {
    match (lazy, player) {
        (false, _) => "canonical",
        (true, Player::E) => "fig2-eloise-diagonal",
        (true, Player::A) => "fig2-abelard",
    }
}

pub fn run(args: PlayArgs) -> Fallible<ExitCode> {
    let model = game_model(&args.model)?;
    let f = formula(&args.formula)?;
    let mode = mode_spec(&args.mode, args.gamma_bound.as_deref())?;
    let (e_human, a_human) = humans(&args.role)?;
    let role = |human: bool, p: Player| -> Fallible<Role> {
        if human {
            return Ok(Role::Human);
        }
        let text = args.opponent.as_deref().unwrap_or(default_opponent(model.is_lazy(), p));
        parse_role(text, args.seed)
    };
    let roles = Roles::new(role(e_human, Player::E)?, role(a_human, Player::A)?);
    let state = match (&args.state, model.finite()) {
        (Some(s), _) => s.clone(),
        (None, Some(m)) => m.state_name(0).to_string(),
        (None, None) => "q0".to_string(),
    };
    let mut session = Session::new(model, &state, f, mode, roles).map_err(|e| e.to_string())?;
    let stdin = io::stdin();
    let stdout = io::stdout();
    play(&mut session, args.budget, &mut stdin.lock(), &mut stdout.lock()).map_err(|e| e.to_string())?;
    Ok(ExitCode::SUCCESS)
}

fn describe(e: &Entry) -> String {
    let who = e.actor.map_or("rule".to_string(), |p| p.to_string());
    let limit = e.limit.as_ref().map(|l| format!(", limit {l}")).unwrap_or_default();
    format!("  {who}: {} ({} at {}{limit})", e.mv, e.phase, e.state)
}

fn prompt_text(menu: &Menu) -> String {
    match menu {
        Menu::Choice { options, .. } => {
            let list: Vec<String> = options.iter().enumerate().map(|(i, o)| format!("{}) {o}", i + 1)).collect();
            format!("choose {}", list.join("  "))
        }
        Menu::Actions { agents, domains, .. } => {
            let each: Vec<String> = agents
                .iter()
                .zip(domains)
                .map(|(a, d)| match d {
                    DomainView::Finite { actions } => format!("agent {a}: {}", actions.join("/")),
                    DomainView::Naturals => format!("agent {a}: any natural number"),
                })
                .collect();
            format!("actions, one per agent ({})", each.join("; "))
        }
        Menu::Announce { finite_only: true, .. } => "announce a time limit (natural number)".into(),
        Menu::Announce { below: Some(b), .. } => format!("announce a time limit below {b}"),
        Menu::Announce { below: None, .. } => "announce a time limit (ordinal)".into(),
        Menu::Lower { below, .. } => format!("lower the limit below {below}"),
    }
}

fn read_move(menu: &Menu, line: &str) -> Result<Move, String> {
    let line = line.trim();
    match menu {
        Menu::Choice { options, .. } => {
            if let Ok(i) = line.parse::<usize>() {
                return options.get(i.wrapping_sub(1)).cloned().ok_or_else(|| format!("no option {i}"));
            }
            options
                .iter()
                .find(|o| o.to_string() == line || (line == "endNow" && **o == Move::EndNow))
                .cloned()
                .ok_or_else(|| format!("'{line}' is not offered"))
        }
        Menu::Actions { .. } => Ok(Move::Actions(
            line.split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(String::from)
                .collect(),
        )),
        Menu::Announce { .. } => line.parse::<Ordinal>().map(Move::Announce).map_err(|e| e.to_string()),
        Menu::Lower { .. } => line.parse::<Ordinal>().map(Move::Lower).map_err(|e| e.to_string()),
    }
}

/// Runs the game to the end, asking `input` for every human decision.
pub fn play(session: &mut Session, budget: u64, input: &mut impl BufRead, out: &mut impl Write) -> io::Result<()> {
    let err = |e: atlgts::engine::EngineError| io::Error::other(e.to_string());
    let view = session.view();
    let mode = serde_json::to_string(&view.mode).expect("serializable");
    writeln!(out, "{} at {}, mode {mode}", view.position.formula, view.position.state)?;
    let mut shown = 0;
    loop {
        session.advance_machines(budget).map_err(err)?;
        for e in &session.entries()[shown..] {
            writeln!(out, "{}", describe(e))?;
        }
        shown = session.entries().len();
        if let Some(w) = session.winner() {
            let reason = session.view().reason.map(|r| r.to_string()).unwrap_or_default();
            writeln!(out, "winner: {w} ({reason})")?;
            return Ok(());
        }
        let view = session.view();
        let menu = view.menu.expect("a pending human has a menu");
        let actor = menu.actor();
        if let Some(emb) = &view.embedded {
            let limit = emb.limit.as_ref().map(|l| l.to_string()).unwrap_or_else(|| "-".into());
            writeln!(out, "[{}] {} at {}, limit {limit}", view.phase, emb.source, emb.state)?;
        } else {
            writeln!(out, "[{}] {} at {}", view.phase, view.position.formula, view.position.state)?;
        }
        loop {
            write!(out, "{actor}> {}: ", prompt_text(&menu))?;
            out.flush()?;
            let mut line = String::new();
            if input.read_line(&mut line)? == 0 {
                return Err(io::Error::new(io::ErrorKind::UnexpectedEof, "input ended before the game did"));
            }
            match read_move(&menu, &line).and_then(|mv| session.apply_move(actor, mv).map_err(|e| e.to_string())) {
                Ok(()) => break,
                Err(e) => writeln!(out, "  {e}")?,
            }
        }
    }
}
