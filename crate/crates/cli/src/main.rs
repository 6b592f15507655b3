//! `atlgts`: check, labels, play, compare, difftest, serve.
//!
//! Exit codes: 0 true / passed, 1 false / failed, 2 on errors.

mod play;

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use atlgts::cgm::{lazy_model, load_model, Model};
use atlgts::difftest::{difftest, DifftestConfig};
use atlgts::engine::{GameModel, ModeSpec, Role};
use atlgts::formula::{parse_formula, Formula};
use atlgts::semantics::{compare_semantics, evaluate, GammaBound, SemanticsKind};
use atlgts::solver::opponent_labels;
use atlgts::Player;
use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "atlgts", version, about = "ATL model checking with evaluation games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Truth of a formula per state.
    Check(CheckArgs),
    /// Winning time labels of a U/R formula's embedded game.
    Labels(LabelsArgs),
    /// Play an evaluation game in the terminal.
    Play(PlayArgs),
    /// Truth under all four semantics, with any disagreements.
    Compare(CompareArgs),
    /// Seeded differential test over random models and formulas.
    Difftest(DifftestArgs),
    /// Start the HTTP session service.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// Model file (JSON).
    #[arg(short = 'm', long = "model")]
    model: Option<PathBuf>,
    /// Built-in lazy model, e.g. fig2.
    #[arg(long = "lazy", conflicts_with = "model")]
    lazy: Option<String>,
}

#[derive(Debug, Args)]
struct SemanticsArgs {
    /// standard, gts-unbounded, gts-bounded or gts-finitely-bounded.
    #[arg(long)]
    semantics: Option<String>,
    /// Time limit bound for gts-bounded: "auto" or ordinal text such as 3, w, w*2+1.
    #[arg(long = "gamma-bound")]
    gamma_bound: Option<String>,
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(short = 'f', long)]
    formula: String,
    /// Report only this state; defaults to every state, deciding on the first.
    #[arg(long)]
    state: Option<String>,
    #[command(flatten)]
    semantics: SemanticsArgs,
}

#[derive(Debug, Args)]
struct LabelsArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(short = 'f', long)]
    formula: String,
    #[command(flatten)]
    semantics: SemanticsArgs,
    /// Whose labels to print.
    #[arg(long, default_value = "E")]
    player: Player,
}

#[derive(Debug, Args)]
pub struct PlayArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(short = 'f', long)]
    formula: String,
    /// Initial state; defaults to the first (or the lazy model's initial) state.
    #[arg(long)]
    state: Option<String>,
    /// unbounded, bounded, bounded:<ordinal> or finitely-bounded.
    #[arg(long, default_value = "bounded")]
    mode: String,
    /// Bound for bounded mode, instead of bounded:<ordinal>.
    #[arg(long = "gamma-bound")]
    gamma_bound: Option<String>,
    /// Side you play: eloise, abelard, both or none.
    #[arg(long, default_value = "eloise")]
    role: String,
    /// Machine role for the other side: canonical, random[:seed], a script name, ...
    #[arg(long)]
    opponent: Option<String>,
    /// Seed for random machine roles.
    #[arg(long)]
    seed: Option<u64>,
    /// Machine moves allowed before the play counts as infinite.
    #[arg(long, default_value_t = 10_000)]
    budget: u64,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(short = 'f', long)]
    formula: String,
}

#[derive(Debug, Args)]
struct DifftestArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of random models.
    #[arg(long, default_value_t = 100)]
    count: usize,
    /// Formulas per model.
    #[arg(long = "per-model", default_value_t = 10)]
    per_model: usize,
}

#[derive(Debug, Args)]
struct ServeArgs {
    #[arg(long, default_value_t = 8080)]
    port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    bind: String,
    /// Directory for JSON session snapshots; in-memory only when absent.
    #[arg(long)]
    snapshots: Option<PathBuf>,
    /// Origin allowed by CORS; any origin when absent.
    #[arg(long = "cors-origin")]
    cors_origin: Option<String>,
    /// Machine moves per request before the play counts as infinite.
    #[arg(long, default_value_t = atlgts_service::DEFAULT_BUDGET)]
    budget: u64,
}

type Fallible<T> = Result<T, String>;

fn formula(text: &str) -> Fallible<Formula> {
    parse_formula(text).map_err(|e| format!("formula: {e}"))
}

fn finite_model(args: &ModelArgs) -> Fallible<Model> {
    match (&args.model, &args.lazy) {
        (Some(path), _) => {
            let bytes = std::fs::read(path).map_err(|e| format!("{}: {e}", path.display()))?;
            load_model(&bytes).map_err(|e| format!("{}: {e}", path.display()))
        }
        (None, Some(_)) => Err("this command needs a finite model (-m)".into()),
        (None, None) => Err("give a model with -m".into()),
    }
}

fn game_model(args: &ModelArgs) -> Fallible<GameModel> {
    match &args.lazy {
        Some(name) => lazy_model(name)
            .map(GameModel::Lazy)
            .ok_or_else(|| format!("unknown lazy model '{name}'")),
        None => finite_model(args).map(|m| GameModel::Finite(Arc::new(m))),
    }
}

fn semantics(args: &SemanticsArgs, default: &str) -> Fallible<SemanticsKind> {
    let name = args.semantics.as_deref().unwrap_or(default);
    let gamma: GammaBound = match &args.gamma_bound {
        Some(g) => g.parse().map_err(|e| format!("--gamma-bound: {e}"))?,
        None => GammaBound::Auto,
    };
    let kind = SemanticsKind::from_name(name, gamma).ok_or_else(|| format!("unknown semantics '{name}'"))?;
    if args.gamma_bound.is_some() && !matches!(kind, SemanticsKind::GtsBounded(_)) {
        return Err(format!("--gamma-bound only applies to gts-bounded, not {name}"));
    }
    Ok(kind)
}

fn check(args: CheckArgs) -> Fallible<ExitCode> {
    let m = finite_model(&args.model)?;
    let f = formula(&args.formula)?;
    let kind = semantics(&args.semantics, "standard")?;
    let truth = evaluate(&m, &f, &kind).map_err(|e| e.to_string())?;
    let root = truth.root();
    let queried = match &args.state {
        Some(s) => {
            let q = m.state_index(s).map_err(|e| e.to_string())?;
            println!("{s}\t{}", root[q]);
            q
        }
        None => {
            for (q, b) in root.iter().enumerate() {
                println!("{}\t{b}", m.state_name(q));
            }
            0
        }
    };
    Ok(if root[queried] { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn labels(args: LabelsArgs) -> Fallible<ExitCode> {
    let m = finite_model(&args.model)?;
    let f = formula(&args.formula)?;
    if !matches!(f, Formula::CoopU(..) | Formula::CoopR(..)) {
        return Err(format!("labels need a U or R formula (F and G count), got {f}"));
    }
    let kind = semantics(&args.semantics, "gts-bounded")?;
    if kind == SemanticsKind::Standard {
        return Err("the standard semantics has no labels".into());
    }
    let truth = evaluate(&m, &f, &kind).map_err(|e| e.to_string())?;
    let l = truth.root_labels().ok_or("no labels computed")?;
    let dump = if l.player == args.player { l.dump(&m) } else { opponent_labels(l).dump(&m) };
    print!("{dump}");
    Ok(ExitCode::SUCCESS)
}

fn compare(args: CompareArgs) -> Fallible<ExitCode> {
    let m = finite_model(&args.model)?;
    let f = formula(&args.formula)?;
    let report = compare_semantics(&m, &f).map_err(|e| e.to_string())?;
    let kinds: Vec<&String> = report.per_kind.keys().collect();
    let mut out = String::new();
    writeln!(out, "formula\t{}", report.formula).unwrap();
    writeln!(out, "state\t{}", kinds.iter().map(|k| k.as_str()).collect::<Vec<_>>().join("\t")).unwrap();
    for q in 0..m.state_count() {
        let name = m.state_name(q);
        let row: Vec<String> = kinds.iter().map(|k| report.per_kind[*k][name].to_string()).collect();
        writeln!(out, "{name}\t{}", row.join("\t")).unwrap();
    }
    if report.disagreements.is_empty() {
        writeln!(out, "all semantics agree on every subformula").unwrap();
    }
    for d in &report.disagreements {
        writeln!(out, "disagreement on {} at {}: {:?}", d.subformula, d.state, d.values).unwrap();
    }
    print!("{out}");
    Ok(if report.disagreements.is_empty() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn run_difftest(args: DifftestArgs) -> Fallible<ExitCode> {
    let cfg = DifftestConfig {
        formulas_per_model: args.per_model,
        ..DifftestConfig::new(args.seed, args.count)
    };
    let report = difftest(&cfg);
    println!(
        "seed {}: {} models, {} formulas, {} oracle checks, {} failures",
        report.seed,
        report.models,
        report.formulas,
        report.oracle_checked,
        report.failures.len()
    );
    for c in &report.failures {
        println!("{}", serde_json::to_string_pretty(c).expect("serializable"));
    }
    Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn serve(args: ServeArgs) -> Fallible<ExitCode> {
    use atlgts_service::{AppState, Config, Store};
    let addr = format!("{}:{}", args.bind, args.port)
        .parse()
        .map_err(|e| format!("bad address: {e}"))?;
    let store = match &args.snapshots {
        Some(dir) => Store::with_snapshots(dir).map_err(|e| format!("{}: {e}", dir.display()))?,
        None => Store::new(),
    };
    let config = Config {
        budget: args.budget,
        cors_origin: args.cors_origin,
    };
    let rt = tokio::runtime::Runtime::new().map_err(|e| e.to_string())?;
    rt.block_on(atlgts_service::serve(addr, AppState::new(store, config)))
        .map_err(|e| e.to_string())?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("ATLGTS_LOG")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Check(a) => check(a),
        Command::Labels(a) => labels(a),
        Command::Play(a) => play::run(a),
        Command::Compare(a) => compare(a),
        Command::Difftest(a) => run_difftest(a),
        Command::Serve(a) => serve(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

/// Mode text with an optional separate bound folded in.
fn mode_spec(mode: &str, gamma_bound: Option<&str>) -> Fallible<ModeSpec> {
    let text = match (gamma_bound, mode) {
        (Some(g), "bounded") => format!("bounded:{g}"),
        (Some(_), _) => return Err("--gamma-bound only applies to --mode bounded".into()),
        (None, m) => m.to_string(),
    };
    text.parse()
}

fn parse_role(text: &str, seed: Option<u64>) -> Fallible<Role> {
    let role: Role = text.parse()?;
    Ok(match (role, seed) {
        (Role::Random(_), Some(s)) if text == "random" => Role::Random(s),
        (r, _) => r,
    })
}
