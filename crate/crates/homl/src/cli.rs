//! Command-line front end binding the library modules.
//!
//! Exit codes: 0 success or expected verdicts, 1 verdict mismatch or a
//! countermodel where validity was asked for, 2 bound exceeded, timeout, or
//! skipped work, 3 usage, parse, or type errors.

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Duration;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::corpus::{self, LoadedTheory, SuiteOptions, BOUNDED_CAVEAT};
use crate::filters::count_partial_ultrafilters;
use crate::modelfind::{
    check_bounded_validity, find_model, verify_model, SearchConfig, SearchOutcome, SearchStats,
    ValidityOutcome,
};
use crate::semantics::model::world_name;
use crate::semantics::{parse_model, print_model, Bounds, EvalError, DEFAULT_THIRD_ORDER_LIMIT};
use crate::syntax::{print_theory, Claim, Formula, Frame};
use crate::thf;

#[derive(Parser)]
#[command(
    name = "homl",
    about = "Finite-model workbench for a higher-order modal logic",
    version,
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check bounded validity of a named conjecture against a theory's axioms
    Check(CheckArgs),
    /// Search for a model of a theory's axioms
    Find(FindArgs),
    /// Run corpus claims and compare them with their declared verdicts
    Suite(SuiteArgs),
    /// Evaluate a theory's formulas on a model file
    VerifyModel(VerifyModelArgs),
    /// Count world-indexed ultrafilter candidates on a model file
    CountUltrafilters(CountArgs),
    /// Write TPTP THF problems for a theory's claims
    ExportThf(ExportArgs),
    /// Pretty-print a theory, optionally with definitions expanded
    Print(PrintArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FrameArg {
    K,
    T,
    Kb,
}

impl From<FrameArg> for Frame {
    fn from(f: FrameArg) -> Frame {
        match f {
            FrameArg::K => Frame::K,
            FrameArg::T => Frame::T,
            FrameArg::Kb => Frame::Kb,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Records,
}

#[derive(Args)]
struct SearchFlags {
    /// World bound
    #[arg(long, default_value_t = 2)]
    worlds: usize,

    /// Entity bound
    #[arg(long, default_value_t = 2)]
    entities: usize,

    /// Frame conditions (defaults to the claim's or the theory's frame)
    #[arg(long = "frames", alias = "frame", value_enum)]
    frames: Option<FrameArg>,

    /// Enumerate every raw candidate instead of collapsing unconstrained parts
    #[arg(long)]
    exhaustive: bool,

    /// Force the sequential search order (the default unless --jobs is given)
    #[arg(long)]
    deterministic: bool,

    /// Worker threads for the parallel search
    #[arg(long)]
    jobs: Option<usize>,

    /// Give up after examining this many candidates
    #[arg(long)]
    limit: Option<u64>,

    /// Give up after this many seconds
    #[arg(long)]
    timeout: Option<f64>,
}

impl SearchFlags {
    fn config(&self, frame: Frame) -> SearchConfig {
        let mut cfg = SearchConfig::new(Bounds::new(self.worlds, self.entities), frame);
        cfg.prune = !self.exhaustive;
        cfg.deterministic = self.deterministic || self.jobs.map_or(true, |j| j <= 1);
        cfg.candidate_limit = self.limit;
        cfg.time_limit = self.timeout.map(Duration::from_secs_f64);
        cfg
    }
}

#[derive(Args)]
struct CheckArgs {
    /// `builtin:NAME` or a theory file path
    theory: String,

    /// Name of the claim whose conjecture to check
    #[arg(long)]
    conjecture: String,

    #[command(flatten)]
    search: SearchFlags,

    /// Output style
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct FindArgs {
    /// `builtin:NAME` or a theory file path
    theory: String,

    /// Also require the named claim's conjecture to fail somewhere
    #[arg(long)]
    refuting: Option<String>,

    #[command(flatten)]
    search: SearchFlags,

    /// Output style
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct SuiteArgs {
    /// Theories to run (`builtin:NAME` or paths; default: every builtin)
    theories: Vec<String>,

    /// Only claims matching VARIANT, CLAIM, or VARIANT/CLAIM
    #[arg(long)]
    filter: Option<String>,

    /// Skip declared bounds with more worlds than this
    #[arg(long)]
    worlds: Option<usize>,

    /// Skip declared bounds with more entities than this
    #[arg(long)]
    entities: Option<usize>,

    /// Worker threads for running claims in parallel
    #[arg(long)]
    jobs: Option<usize>,

    /// Force the sequential search order (the default unless --jobs is given)
    #[arg(long)]
    deterministic: bool,

    /// Give up on a claim after examining this many candidates per bound
    #[arg(long)]
    limit: Option<u64>,

    /// Give up on a claim after this many seconds per bound
    #[arg(long)]
    timeout: Option<f64>,

    /// Output style
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct VerifyModelArgs {
    /// `builtin:NAME` or a theory file path
    theory: String,

    /// Model file to evaluate on
    #[arg(long)]
    model: PathBuf,

    /// Axiom or claim names (default: every axiom and claim conjecture)
    names: Vec<String>,

    /// Output style
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct CountArgs {
    /// Model file to census
    #[arg(long)]
    model: PathBuf,

    /// Give up beyond this many candidates
    #[arg(long)]
    limit: Option<u64>,

    /// Output style
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct ExportArgs {
    /// `builtin:NAME` or a theory file path
    theory: String,

    /// Directory to write the problem files into
    #[arg(long)]
    out: PathBuf,

    /// Keep definitions as constants with defining equations
    #[arg(long)]
    keep_definitions: bool,
}

#[derive(Args)]
struct PrintArgs {
    /// `builtin:NAME` or a theory file path
    theory: String,

    /// Print with definitions expanded away
    #[arg(long)]
    expand: bool,
}

/// Runs the command line and returns the process exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.cmd {
        Cmd::Check(a) => cmd_check(a),
        Cmd::Find(a) => cmd_find(a),
        Cmd::Suite(a) => cmd_suite(a),
        Cmd::VerifyModel(a) => cmd_verify_model(a),
        Cmd::CountUltrafilters(a) => cmd_count(a),
        Cmd::ExportThf(a) => cmd_export(a),
        Cmd::Print(a) => cmd_print(a),
    };
    match result {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {}", msg);
            3
        }
    }
}

fn set_jobs(jobs: Option<usize>) {
    if let Some(n) = jobs {
        // Ignored if a global pool already exists (repeat calls in one process).
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn load_theory(spec: &str) -> Result<LoadedTheory, String> {
    corpus::load(spec).map_err(|e| e.to_string())
}

fn named_claim<'t>(lt: &'t LoadedTheory, name: &str) -> Result<&'t Claim, String> {
    lt.expanded
        .claim(name)
        .ok_or_else(|| format!("no claim named `{}` in {}", name, lt.label))
}

fn claim_conjecture<'t>(lt: &'t LoadedTheory, name: &str) -> Result<(&'t Claim, &'t Formula), String> {
    let claim = named_claim(lt, name)?;
    match &claim.conjecture {
        Some(f) => Ok((claim, f)),
        None => Err(format!("claim `{}` carries no conjecture; use `find` for consistency", name)),
    }
}

fn effective_frame(flag: Option<FrameArg>, claim: Option<&Claim>, lt: &LoadedTheory) -> Frame {
    flag.map(Frame::from)
        .or_else(|| claim.and_then(|c| c.frame_override))
        .unwrap_or(lt.theory.frame)
}

fn axiom_formulas(lt: &LoadedTheory) -> Vec<Formula> {
    lt.expanded.axioms.iter().map(|(_, f)| f.clone()).collect()
}

fn stats_line(stats: &SearchStats) -> String {
    format!("examined={} pruned={}", stats.examined, stats.pruned)
}

fn record(value: serde_json::Value) {
    println!("{}", serde_json::to_string(&value).unwrap());
}

fn cmd_check(a: CheckArgs) -> Result<i32, String> {
    set_jobs(a.search.jobs);
    let lt = load_theory(&a.theory)?;
    let (claim, conjecture) = claim_conjecture(&lt, &a.conjecture)?;
    let frame = effective_frame(a.search.frames, Some(claim), &lt);
    let cfg = a.search.config(frame);
    let res = check_bounded_validity(&axiom_formulas(&lt), conjecture, &cfg)
        .map_err(|e| e.to_string())?;
    let at = format!("({},{})", a.search.worlds, a.search.entities);
    let head = format!("{}/{}", lt.label, a.conjecture);
    let (verdict, code, model_text) = match &res.outcome {
        ValidityOutcome::ValidAtBounds => ("valid", 0, None),
        ValidityOutcome::Countermodel(m) => ("countermodel", 1, Some(print_model(m))),
        ValidityOutcome::BoundExceeded(_) => ("bound-exceeded", 2, None),
        ValidityOutcome::TimedOut => ("timeout", 2, None),
    };
    match a.format {
        Format::Text => {
            match &res.outcome {
                ValidityOutcome::ValidAtBounds => println!("{}: valid up to {}", head, at),
                ValidityOutcome::Countermodel(_) => {
                    println!("{}: countermodel found within {}", head, at)
                }
                ValidityOutcome::BoundExceeded(what) => {
                    println!("{}: gave up at {}: {}", head, at, what)
                }
                ValidityOutcome::TimedOut => println!("{}: timed out at {}", head, at),
            }
            if let Some(text) = &model_text {
                print!("{}", text);
            }
            println!("{}", stats_line(&res.stats));
            println!("{}", BOUNDED_CAVEAT);
        }
        Format::Records => record(serde_json::json!({
            "command": "check",
            "theory": lt.label,
            "claim": a.conjecture,
            "frame": frame.tag(),
            "worlds": a.search.worlds,
            "entities": a.search.entities,
            "verdict": verdict,
            "model": model_text,
            "examined": res.stats.examined,
            "pruned": res.stats.pruned,
            "caveat": "bounded verdict",
        })),
    }
    Ok(code)
}

fn cmd_find(a: FindArgs) -> Result<i32, String> {
    set_jobs(a.search.jobs);
    let lt = load_theory(&a.theory)?;
    let mut constraints = axiom_formulas(&lt);
    let claim = match &a.refuting {
        Some(name) => {
            let (claim, conjecture) = claim_conjecture(&lt, name)?;
            constraints.push(Formula::not(conjecture.clone()));
            Some(claim)
        }
        None => None,
    };
    let frame = effective_frame(a.search.frames, claim, &lt);
    let cfg = a.search.config(frame);
    let res = find_model(&constraints, &cfg).map_err(|e| e.to_string())?;
    let at = format!("({},{})", a.search.worlds, a.search.entities);
    let (verdict, code, model_text) = match &res.outcome {
        SearchOutcome::ModelFound(m) => ("model-found", 0, Some(print_model(m))),
        SearchOutcome::ExhaustedAtBounds => ("no-model", 1, None),
        SearchOutcome::BoundExceeded(_) => ("bound-exceeded", 2, None),
        SearchOutcome::TimedOut => ("timeout", 2, None),
    };
    match a.format {
        Format::Text => {
            match &res.outcome {
                SearchOutcome::ModelFound(_) => println!("{}: model found within {}", lt.label, at),
                SearchOutcome::ExhaustedAtBounds => {
                    println!("{}: no model within {}", lt.label, at)
                }
                SearchOutcome::BoundExceeded(what) => {
                    println!("{}: gave up at {}: {}", lt.label, at, what)
                }
                SearchOutcome::TimedOut => println!("{}: timed out at {}", lt.label, at),
            }
            if let Some(text) = &model_text {
                print!("{}", text);
            }
            println!("{}", stats_line(&res.stats));
            println!("{}", BOUNDED_CAVEAT);
        }
        Format::Records => record(serde_json::json!({
            "command": "find",
            "theory": lt.label,
            "refuting": a.refuting,
            "frame": frame.tag(),
            "worlds": a.search.worlds,
            "entities": a.search.entities,
            "verdict": verdict,
            "model": model_text,
            "examined": res.stats.examined,
            "pruned": res.stats.pruned,
            "caveat": "bounded verdict",
        })),
    }
    Ok(code)
}

fn cmd_suite(a: SuiteArgs) -> Result<i32, String> {
    set_jobs(a.jobs);
    let theories: Vec<LoadedTheory> = if a.theories.is_empty() {
        corpus::builtin_theories().to_vec()
    } else {
        a.theories.iter().map(|s| load_theory(s)).collect::<Result<_, _>>()?
    };
    let bounds_cap = match (a.worlds, a.entities) {
        (None, None) => None,
        (w, e) => Some((w.unwrap_or(usize::MAX), e.unwrap_or(usize::MAX))),
    };
    let opts = SuiteOptions {
        bounds_cap,
        candidate_limit: a.limit,
        time_limit: a.timeout.map(Duration::from_secs_f64),
        deterministic: a.deterministic || a.jobs.map_or(true, |j| j <= 1),
        ..SuiteOptions::default()
    };
    let report = corpus::run_suite(&theories, a.filter.as_deref(), &opts);
    match a.format {
        Format::Text => print!("{}", report.render_text()),
        Format::Records => print!("{}", report.render_records()),
    }
    Ok(report.exit_code())
}

fn cmd_verify_model(a: VerifyModelArgs) -> Result<i32, String> {
    let lt = load_theory(&a.theory)?;
    let src = std::fs::read_to_string(&a.model).map_err(|e| e.to_string())?;
    let model = parse_model(&src).map_err(|e| e.to_string())?;
    let names: Vec<String> = if a.names.is_empty() {
        lt.expanded
            .axioms
            .iter()
            .map(|(n, _)| n.clone())
            .chain(
                lt.expanded
                    .claims
                    .iter()
                    .filter(|c| c.conjecture.is_some())
                    .map(|c| c.name.clone()),
            )
            .collect()
    } else {
        a.names.clone()
    };
    let mut formulas = Vec::new();
    for name in &names {
        let f = corpus::premise_formula(&lt.expanded, name)
            .ok_or_else(|| format!("no axiom or claim named `{}` in {}", name, lt.label))?;
        formulas.push((name.clone(), f.peel_global().clone()));
    }
    let checks = match verify_model(&model, &formulas) {
        Ok(checks) => checks,
        Err(EvalError::BoundExceeded { what, limit }) => {
            eprintln!("gave up: {} space exceeds {}", what, limit);
            return Ok(2);
        }
        Err(e) => return Err(e.to_string()),
    };
    match a.format {
        Format::Text => {
            let width = names.iter().map(String::len).max().unwrap_or(0);
            for c in &checks {
                let worlds = c
                    .per_world
                    .iter()
                    .enumerate()
                    .map(|(w, b)| format!("{}={}", world_name(w), b))
                    .collect::<Vec<_>>()
                    .join(" ");
                println!("{:<width$}  {}  global={}", c.name, worlds, c.global, width = width);
            }
            println!("{}", BOUNDED_CAVEAT);
        }
        Format::Records => {
            for c in &checks {
                record(serde_json::json!({
                    "command": "verify-model",
                    "theory": lt.label,
                    "name": c.name,
                    "per_world": c.per_world,
                    "global": c.global,
                }));
            }
        }
    }
    Ok(0)
}

fn cmd_count(a: CountArgs) -> Result<i32, String> {
    let src = std::fs::read_to_string(&a.model).map_err(|e| e.to_string())?;
    let model = parse_model(&src).map_err(|e| e.to_string())?;
    let census = match count_partial_ultrafilters(&model, a.limit.unwrap_or(DEFAULT_THIRD_ORDER_LIMIT)) {
        Ok(census) => census,
        Err(EvalError::BoundExceeded { what, limit }) => {
            eprintln!("gave up: {} space exceeds {}", what, limit);
            return Ok(2);
        }
        Err(e) => return Err(e.to_string()),
    };
    match a.format {
        Format::Text => println!("candidates={} valid={}", census.candidates, census.valid),
        Format::Records => record(serde_json::json!({
            "command": "count-ultrafilters",
            "candidates": census.candidates,
            "valid": census.valid,
        })),
    }
    Ok(0)
}

fn cmd_export(a: ExportArgs) -> Result<i32, String> {
    let lt = load_theory(&a.theory)?;
    let problems = thf::export_theory(&lt, a.keep_definitions);
    std::fs::create_dir_all(&a.out).map_err(|e| e.to_string())?;
    for p in &problems {
        thf::check_problem(&p.text)
            .map_err(|e| format!("internal: {} does not re-parse: {}", p.filename, e))?;
        let path = a.out.join(&p.filename);
        std::fs::write(&path, &p.text).map_err(|e| e.to_string())?;
        println!("wrote {}", path.display());
    }
    println!("{} problems", problems.len());
    Ok(0)
}

fn cmd_print(a: PrintArgs) -> Result<i32, String> {
    let lt = load_theory(&a.theory)?;
    let t = if a.expand { &lt.expanded } else { &lt.theory };
    print!("{}", print_theory(t));
    Ok(0)
}
