//! Command-line front end: argument parsing, input resolution and reports.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use randstrat::conditions::{muller_complement, validate_family};
use randstrat::document::{arena_to_json, parse_arena, parse_strategy, strategy_to_json};
use randstrat::evaluate::{
    best_response_product, chain_probability, mdp_optimal, monte_carlo_with_workers, product_chain, Optimise,
};
use randstrat::muller::{memory_bounds, solve_simple_muller, zielonka_tree};
use randstrat::rational::format_rational;
use randstrat::safety::{adam_almost_sure_reach_region, safety_preorder, sound_chance_strategy, verify_positive};
use randstrat::{gallery, Arena, Condition, Error, Side, Strategy};

/// Directory holding gallery files that replace the built-in ones.
pub const GALLERY_ENV: &str = "RANDSTRAT_GALLERY";

#[derive(Parser, Debug)]
#[command(name = "randstrat", version, about = "Randomised strategies in stochastic games with partial observation")]
pub struct Cli {
    /// Print the structured report instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Include wall-clock timing in the report.
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Probability that Eve wins with fixed strategies.
    Eval(EvalArgs),
    /// Qualitative solvers for safety and Muller games.
    #[command(subcommand)]
    Solve(SolveCommand),
    /// Zielonka tree and memory bounds of a Muller condition.
    Bounds(BoundsArgs),
    /// Structural classes of an arena.
    Classify {
        #[arg(long)]
        arena: String,
    },
    /// Built-in example arenas.
    #[command(subcommand)]
    Gallery(GalleryCommand),
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    /// Arena file or gallery name.
    #[arg(long)]
    pub arena: String,
    /// Strategy file or built-in name.
    #[arg(long)]
    pub eve: String,
    /// Strategy file, built-in name, or `best-response` for a
    /// full-information adversary (exact mode only).
    #[arg(long, default_value = "uniform-behavioural")]
    pub adam: String,
    /// Start vertex.
    #[arg(long)]
    pub from: String,
    /// `reach:c`, `safety:c`, `buchi:c`, `cobuchi:c`, `parity:c=0,d=1` or `muller:{a};{a,b}`.
    #[arg(long)]
    pub condition: String,
    /// Colours Eve must avoid, for the `sound-chance` built-in.
    #[arg(long)]
    pub bad: Option<String>,
    /// Exact rational value (the default).
    #[arg(long, conflicts_with = "mc")]
    pub exact: bool,
    /// Monte Carlo estimate with a 99% Wilson interval; reach and safety only.
    #[arg(long)]
    pub mc: bool,
    /// Number of sampled plays.
    #[arg(long, default_value_t = 10_000)]
    pub n: u64,
    /// Steps per sampled play.
    #[arg(long, default_value_t = 100)]
    pub horizon: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
}

#[derive(Subcommand, Debug)]
pub enum SolveCommand {
    /// Preorder classes and the two-mode positive strategy.
    Safety {
        #[arg(long)]
        arena: String,
        /// Colours of the absorbing vertices Eve must avoid.
        #[arg(long)]
        bad: String,
    },
    /// LAR reduction to parity on a simple deterministic arena.
    Muller {
        #[arg(long)]
        arena: String,
        #[arg(long)]
        condition: String,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Model {
    Pure,
    Behavioural,
    General,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Player {
    Eve,
    Adam,
}

#[derive(Args, Debug)]
pub struct BoundsArgs {
    /// Sets separated by `;`, with or without the `muller:` prefix.
    #[arg(long)]
    pub muller: String,
    /// Comma-separated colour names.
    #[arg(long)]
    pub colours: String,
    #[arg(long, value_enum)]
    pub model: Option<Model>,
    #[arg(long, value_enum, default_value = "eve")]
    pub player: Player,
}

#[derive(Subcommand, Debug)]
pub enum GalleryCommand {
    /// Names of the built-in arenas and conditions.
    List,
    /// Prints a gallery entry as a document.
    Export { name: String },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InputRecord {
    pub source: String,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub command: Vec<String>,
    pub inputs: BTreeMap<String, InputRecord>,
    pub results: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

pub struct Outcome {
    pub code: i32,
    pub report: Report,
    /// Human-readable rendering.
    pub text: String,
}

impl Outcome {
    pub fn render(&self, json: bool) -> String {
        if json {
            serde_json::to_string_pretty(&self.report).expect("reports serialise") + "\n"
        } else {
            self.text.clone()
        }
    }
}

struct Session {
    inputs: BTreeMap<String, InputRecord>,
    text: String,
}

fn sha256(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

fn gallery_name(spec: &str) -> &str {
    spec.strip_prefix("gallery/").unwrap_or(spec).trim_end_matches(".json")
}

/// Gallery text for `name`: the override directory first, then the
/// built-in copy.
fn gallery_source(name: &str) -> Option<(String, String)> {
    if let Some(dir) = std::env::var_os(GALLERY_ENV) {
        let path = PathBuf::from(dir).join(format!("{name}.json"));
        if let Ok(text) = std::fs::read_to_string(&path) {
            return Some((path.display().to_string(), text));
        }
    }
    gallery::source(name).map(|t| (format!("gallery/{name}"), t.to_owned()))
}

impl Session {
    fn read(&mut self, label: &str, spec: &str) -> Result<(String, String), Error> {
        let (source, text) = if Path::new(spec).is_file() {
            let text = std::fs::read_to_string(spec).map_err(|e| Error::Malformed(format!("{spec}: {e}")))?;
            (spec.to_owned(), text)
        } else {
            gallery_source(gallery_name(spec))
                .ok_or_else(|| Error::UnknownIdentifier(format!("no file or gallery entry `{spec}`")))?
        };
        self.inputs.insert(label.to_owned(), InputRecord { source: source.clone(), sha256: sha256(&text) });
        Ok((source, text))
    }

    fn arena(&mut self, spec: &str) -> Result<Arena, Error> {
        let (source, text) = self.read("arena", spec)?;
        parse_arena(&text).map_err(|e| located(&source, e))
    }

    fn strategy(&mut self, label: &str, spec: &str, arena: &Arena, side: Side, bad: Option<&str>) -> Result<Strategy, Error> {
        if let Some(action) = spec.strip_prefix("pure:") {
            return gallery::constant(arena, side, action);
        }
        match spec {
            "uniform-behavioural" => return Ok(gallery::uniform_behavioural(arena, side)),
            "four-memory-fig1" => return on_side(gallery::four_memory_fig1(arena)?, side),
            "sound-chance" => {
                let bad = bad.ok_or_else(|| Error::Malformed("sound-chance needs --bad".into()))?;
                let bad = vertices_coloured(arena, bad)?;
                let classes = safety_preorder(arena, &bad)?;
                return on_side(sound_chance_strategy(arena, &classes)?, side);
            }
            _ => {}
        }
        let text = std::fs::read_to_string(spec)
            .map_err(|e| Error::UnknownIdentifier(format!("strategy `{spec}`: {e}")))?;
        self.inputs.insert(label.to_owned(), InputRecord { source: spec.to_owned(), sha256: sha256(&text) });
        on_side(parse_strategy(&text, arena).map_err(|e| located(spec, e))?, side)
    }

    fn line(&mut self, s: impl AsRef<str>) {
        self.text.push_str(s.as_ref());
        self.text.push('\n');
    }
}

fn located(source: &str, e: Error) -> Error {
    match e {
        Error::Malformed(m) => Error::Malformed(format!("{source}: {m}")),
        other => other,
    }
}

fn on_side(s: Strategy, side: Side) -> Result<Strategy, Error> {
    if s.side() == side {
        Ok(s)
    } else {
        Err(Error::WrongSide(format!("expected a strategy for {side}, got one for {}", s.side())))
    }
}

fn vertex(arena: &Arena, name: &str) -> Result<usize, Error> {
    arena.vertex_index(name).ok_or_else(|| Error::UnknownIdentifier(format!("vertex `{name}`")))
}

fn vertices_coloured(arena: &Arena, colours: &str) -> Result<BTreeSet<usize>, Error> {
    let mut ids = BTreeSet::new();
    for name in colours.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        ids.insert(arena.colour_index(name).ok_or_else(|| Error::UnknownIdentifier(format!("colour `{name}`")))?);
    }
    Ok(arena.vertices_coloured(&ids))
}

fn names(arena: &Arena, vs: &BTreeSet<usize>) -> Vec<String> {
    vs.iter().map(|&v| arena.vertex_name(v).to_owned()).collect()
}

fn eval(s: &mut Session, a: &EvalArgs) -> Result<Value, Error> {
    let arena = s.arena(&a.arena)?;
    let eve = s.strategy("eve", &a.eve, &arena, Side::Eve, a.bad.as_deref())?;
    let start = vertex(&arena, &a.from)?;
    let condition = Condition::parse(&a.condition, arena.colours())?;
    let adam = match a.adam.as_str() {
        "best-response" => None,
        spec => Some(s.strategy("adam", spec, &arena, Side::Adam, a.bad.as_deref())?),
    };
    if a.mc {
        let adam = adam.ok_or_else(|| Error::UnsupportedQuestion("Monte Carlo needs a fixed Adam strategy".into()))?;
        let est = monte_carlo_with_workers(&arena, &eve, &adam, start, &condition, a.horizon, a.n, a.seed, a.workers)?;
        s.line(format!(
            "{:.6} (99% CI [{:.6}, {:.6}], {} samples, horizon {}, seed {})",
            est.point, est.ci_low, est.ci_high, est.samples, a.horizon, est.seed
        ));
        return Ok(json!({ "mode": "monte-carlo", "horizon": a.horizon, "workers": a.workers, "estimate": est }));
    }
    match adam {
        Some(adam) => {
            let chain = product_chain(&arena, &eve, &adam, start)?;
            let p = format_rational(&chain_probability(&chain, &condition));
            s.line(&p);
            Ok(json!({ "mode": "exact", "chain_states": chain.len(), "probability": p }))
        }
        None => {
            let product = best_response_product(&arena, &eve, start)?;
            let sol = mdp_optimal(&product, &condition, Optimise::Min)?;
            s.line(format!(
                "{:.12} against a full-information adversary (value one: {}, value zero: {})",
                sol.initial_value(),
                sol.initial_value_one(),
                sol.initial_value_zero()
            ));
            Ok(json!({
                "mode": "best-response",
                "product_states": product.len(),
                "value": sol.initial_value(),
                "value_one": sol.initial_value_one(),
                "value_zero": sol.initial_value_zero(),
                "iterations": sol.iterations,
            }))
        }
    }
}

fn solve_safety(s: &mut Session, arena_spec: &str, bad_spec: &str) -> Result<Value, Error> {
    let arena = s.arena(arena_spec)?;
    let bad = vertices_coloured(&arena, bad_spec)?;
    let region = adam_almost_sure_reach_region(&arena, &bad)?;
    let classes = safety_preorder(&arena, &bad)?;
    s.line(format!("classes: {}", classes.render(&arena)));
    let mut safe = BTreeMap::new();
    for (&v, &x) in &classes.safe_action {
        s.line(format!("safe action at {}: {}", arena.vertex_name(v), arena.action_name(Side::Eve, x)));
        safe.insert(arena.vertex_name(v).to_owned(), arena.action_name(Side::Eve, x).to_owned());
    }
    let strategy = sound_chance_strategy(&arena, &classes)?;
    let mut verdicts = BTreeMap::new();
    for v in 0..arena.vertex_count() {
        let ok = verify_positive(&arena, &strategy, v, &bad)?;
        s.line(format!("verify_positive({}) = {ok}", arena.vertex_name(v)));
        verdicts.insert(arena.vertex_name(v).to_owned(), ok);
    }
    let file = strategy_to_json(&strategy, &arena);
    s.line("strategy:");
    s.line(&file);
    Ok(json!({
        "adam_almost_sure_region": names(&arena, &region),
        "classes": classes.classes.iter().map(|c| names(&arena, c)).collect::<Vec<_>>(),
        "safe_actions": safe,
        "verify_positive": verdicts,
        "strategy": serde_json::from_str::<Value>(&file).expect("strategy documents are JSON"),
    }))
}

fn solve_muller(s: &mut Session, arena_spec: &str, condition: &str) -> Result<Value, Error> {
    let arena = s.arena(arena_spec)?;
    let Condition::Muller(family) = Condition::parse(condition, arena.colours())? else {
        return Err(Error::UnsupportedCondition("solve muller expects a muller: condition".into()));
    };
    let sol = solve_simple_muller(&arena, &family)?;
    let eve = names(&arena, &sol.eve_region);
    let adam = names(&arena, &sol.adam_region);
    s.line(format!("eve wins from: {}", eve.join(", ")));
    s.line(format!("adam wins from: {}", adam.join(", ")));
    s.line(format!("parity product: {} vertices", sol.product_size));
    s.line(format!("eve strategy memory: {} records", sol.eve_strategy.memory_size()));
    Ok(json!({
        "eve_region": eve,
        "adam_region": adam,
        "product_size": sol.product_size,
        "eve_memory": sol.eve_strategy.memory_size(),
    }))
}

fn bounds(s: &mut Session, a: &BoundsArgs) -> Result<Value, Error> {
    let colours: Vec<String> = a.colours.split(',').map(|c| c.trim().to_owned()).filter(|c| !c.is_empty()).collect();
    let text = if a.muller.starts_with("muller:") { a.muller.clone() } else { format!("muller:{}", a.muller) };
    let Condition::Muller(family) = Condition::parse(&text, &colours)? else {
        unreachable!("prefix forces a Muller condition")
    };
    validate_family(&family, colours.len())?;
    let family = match a.player {
        Player::Eve => family,
        Player::Adam => muller_complement(&family, colours.len()),
    };
    let tree = zielonka_tree(colours.len(), &family);
    let b = memory_bounds(&tree);
    s.text.push_str(&tree.render(&colours));
    let mut results = json!({ "tree": tree.render(&colours), "nodes": tree.node_count(), "leaves": tree.leaf_count() });
    let mut line = String::new();
    for (model, key, value) in [
        (Model::Pure, "pure", b.pure),
        (Model::Behavioural, "behavioural_upper", b.behavioural_upper),
        (Model::General, "general", b.general),
    ] {
        if a.model.is_none_or(|m| m == model) {
            let _ = write!(line, "{}{key}={value}", if line.is_empty() { "" } else { " " });
            results[key] = json!(value);
        }
    }
    s.line(line);
    Ok(results)
}

fn classify(s: &mut Session, arena_spec: &str) -> Result<Value, Error> {
    let arena = s.arena(arena_spec)?;
    let class = arena.classify();
    s.line(format!("synchronous: {}", class.synchronous));
    s.line(format!("observable actions: {}", class.observable_actions));
    s.line(format!("perfect information: {}", class.perfect_information));
    s.line(format!("simple: {}", class.simple));
    Ok(json!(class))
}

fn gallery_cmd(s: &mut Session, cmd: &GalleryCommand) -> Result<Value, Error> {
    match cmd {
        GalleryCommand::List => {
            for name in gallery::ARENAS {
                s.line(format!("gallery/{name}  arena"));
            }
            for name in gallery::CONDITIONS {
                s.line(format!("gallery/{name}  condition"));
            }
            Ok(json!({ "arenas": gallery::ARENAS, "conditions": gallery::CONDITIONS }))
        }
        GalleryCommand::Export { name } => {
            let name = gallery_name(name);
            let (source, text) =
                gallery_source(name).ok_or_else(|| Error::UnknownIdentifier(format!("gallery entry `{name}`")))?;
            // Arenas go through a parse and re-serialisation round.
            let out = if gallery::ARENAS.contains(&name) {
                arena_to_json(&parse_arena(&text).map_err(|e| located(&source, e))?)
            } else {
                text
            };
            s.inputs.insert("gallery".into(), InputRecord { source, sha256: sha256(&out) });
            s.text.push_str(&out);
            if !out.ends_with('\n') {
                s.text.push('\n');
            }
            Ok(json!({ "name": name, "document": serde_json::from_str::<Value>(&out).map_err(|e| Error::Malformed(e.to_string()))? }))
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    if e.is_unsupported() {
        3
    } else {
        2
    }
}

/// Runs one command line (including the program name) and returns its
/// outcome. Parse failures yield exit code 2 with clap's message as text.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let argv: Vec<std::ffi::OsString> = argv.into_iter().map(Into::into).collect();
    let command: Vec<String> = argv.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return Outcome {
                code,
                report: Report { command, inputs: BTreeMap::new(), results: Value::Null, error: Some(e.to_string()), timing_ms: None },
                text: e.to_string(),
            };
        }
    };
    let started = Instant::now();
    let mut s = Session { inputs: BTreeMap::new(), text: String::new() };
    let result = match &cli.command {
        Command::Eval(a) => eval(&mut s, a),
        Command::Solve(SolveCommand::Safety { arena, bad }) => solve_safety(&mut s, arena, bad),
        Command::Solve(SolveCommand::Muller { arena, condition }) => solve_muller(&mut s, arena, condition),
        Command::Bounds(a) => bounds(&mut s, a),
        Command::Classify { arena } => classify(&mut s, arena),
        Command::Gallery(g) => gallery_cmd(&mut s, g),
    };
    let timing_ms = cli.timing.then(|| started.elapsed().as_secs_f64() * 1e3);
    let (code, results, error) = match result {
        Ok(v) => (0, v, None),
        Err(e) => {
            s.text = format!("error: {e}\n");
            (exit_code(&e), Value::Null, Some(e.to_string()))
        }
    };
    if let Some(ms) = timing_ms {
        let _ = writeln!(s.text, "time: {ms:.1} ms");
    }
    Outcome { code, report: Report { command, inputs: s.inputs, results, error, timing_ms }, text: s.text }
}
