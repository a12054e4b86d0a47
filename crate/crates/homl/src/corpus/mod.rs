//! The built-in theory corpus, theory loading, and the batch suite runner.
//!
//! Every theory file, built-in or user-supplied, is parsed on top of one
//! shared prelude: the set algebra from `filters` plus the definitions
//! specific to the argument (Godlike, essence, necessary existence, property
//! entailment, and the two third-order notions used by the meet axiom).

use std::fmt::Write as _;
use std::sync::OnceLock;
use std::time::Duration;

use rayon::prelude::*;
use thiserror::Error;

use crate::filters::set_algebra_defs;
use crate::modelfind::{
    check_bounded_validity, find_model, SearchConfig, SearchOutcome, SearchStats,
    ValidityOutcome,
};
use crate::semantics::{Bounds, EvalError};
use crate::syntax::{
    expand_in_theory, parse_theory_seeded, Claim, ClaimKind, Definition, Formula, SynResult,
    SyntaxError, Theory,
};

const PRELUDE_SRC: &str = "\
theory prelude frame k
def G(x:E) := forall Y:Property. P Y -> Y x
def =>(X:Property, Y:Property) := box (X c= Y)
def Pos(Z:PropSet) := forall X:Property. Z X -> P X
def meetOf(X:Property, Z:PropSet) := box (forallE u. X u <-> (forall Y:Property. Z Y -> Y u))
def ess(Y:Property, x:E) := Y x & (forall Z:Property. Z x -> (Y => Z))
def NE(x:E) := forall Y:Property. ess Y x -> box (existsE z. Y z)
";

/// Definitions in scope in every theory file.
pub fn prelude() -> &'static [Definition] {
    static DEFS: OnceLock<Vec<Definition>> = OnceLock::new();
    DEFS.get_or_init(|| {
        parse_theory_seeded(PRELUDE_SRC, set_algebra_defs())
            .expect("the prelude parses")
            .defs
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VariantId {
    Scott,
    UFilter,
    Simple,
    SimplePG,
    SimpleSE,
    SimpleSEinT,
    SimpleHF,
    Base,
}

impl VariantId {
    pub const ALL: [VariantId; 8] = [
        VariantId::Scott,
        VariantId::UFilter,
        VariantId::Simple,
        VariantId::SimplePG,
        VariantId::SimpleSE,
        VariantId::SimpleSEinT,
        VariantId::SimpleHF,
        VariantId::Base,
    ];

    pub fn name(self) -> &'static str {
        match self {
            VariantId::Scott => "ScottVariant",
            VariantId::UFilter => "UFilterVariant",
            VariantId::Simple => "SimpleVariant",
            VariantId::SimplePG => "SimpleVariantPG",
            VariantId::SimpleSE => "SimpleVariantSE",
            VariantId::SimpleSEinT => "SimpleVariantSEinT",
            VariantId::SimpleHF => "SimpleVariantHF",
            VariantId::Base => "HOMLBase",
        }
    }

    pub fn source(self) -> &'static str {
        match self {
            VariantId::Scott => include_str!("theories/ScottVariant.thy"),
            VariantId::UFilter => include_str!("theories/UFilterVariant.thy"),
            VariantId::Simple => include_str!("theories/SimpleVariant.thy"),
            VariantId::SimplePG => include_str!("theories/SimpleVariantPG.thy"),
            VariantId::SimpleSE => include_str!("theories/SimpleVariantSE.thy"),
            VariantId::SimpleSEinT => include_str!("theories/SimpleVariantSEinT.thy"),
            VariantId::SimpleHF => include_str!("theories/SimpleVariantHF.thy"),
            VariantId::Base => include_str!("theories/HOMLBase.thy"),
        }
    }

    pub fn from_name(name: &str) -> Option<VariantId> {
        VariantId::ALL.iter().copied().find(|v| v.name() == name)
    }
}

/// A theory together with its fully expanded form. Claims are checked
/// against the expanded axioms and conjectures; the unexpanded form is kept
/// for printing and for definition-preserving export.
#[derive(Debug, Clone)]
pub struct LoadedTheory {
    pub label: String,
    pub theory: Theory,
    pub expanded: Theory,
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("unknown builtin theory `{0}`")]
    UnknownBuiltin(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
}

pub fn load_source(label: &str, src: &str) -> SynResult<LoadedTheory> {
    let theory = parse_theory_seeded(src, prelude())?;
    let expanded = expand_in_theory(&theory);
    Ok(LoadedTheory { label: label.to_string(), theory, expanded })
}

/// Loads `builtin:NAME` or a theory file path through one code path.
pub fn load(spec: &str) -> Result<LoadedTheory, CorpusError> {
    if let Some(name) = spec.strip_prefix("builtin:") {
        let v = VariantId::from_name(name)
            .ok_or_else(|| CorpusError::UnknownBuiltin(name.to_string()))?;
        return Ok(builtin(v).clone());
    }
    let src = std::fs::read_to_string(spec)?;
    let label = std::path::Path::new(spec)
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or(spec)
        .to_string();
    Ok(load_source(&label, &src)?)
}

pub fn builtin_theories() -> &'static [LoadedTheory] {
    static ALL: OnceLock<Vec<LoadedTheory>> = OnceLock::new();
    ALL.get_or_init(|| {
        VariantId::ALL
            .iter()
            .map(|v| load_source(v.name(), v.source()).expect("builtin theories parse"))
            .collect()
    })
}

pub fn builtin(v: VariantId) -> &'static LoadedTheory {
    let ix = VariantId::ALL.iter().position(|x| *x == v).unwrap();
    &builtin_theories()[ix]
}

/// Resolves a premise name to an axiom or to the conjecture of a claim.
pub fn premise_formula<'t>(t: &'t Theory, name: &str) -> Option<&'t Formula> {
    t.axioms
        .iter()
        .find(|(n, _)| n == name)
        .map(|(_, f)| f)
        .or_else(|| t.claims.iter().find(|c| c.name == name).and_then(|c| c.conjecture.as_ref()))
}

// ---- suite runner ----------------------------------------------------------

#[derive(Debug, Clone)]
pub struct SuiteOptions {
    /// Claims only run at their declared bounds that fit under the cap;
    /// claims with no such bound are skipped.
    pub bounds_cap: Option<(usize, usize)>,
    pub deterministic: bool,
    pub symmetry_breaking: bool,
    pub candidate_limit: Option<u64>,
    pub time_limit: Option<Duration>,
}

impl Default for SuiteOptions {
    fn default() -> SuiteOptions {
        SuiteOptions {
            bounds_cap: None,
            deterministic: true,
            symmetry_breaking: false,
            candidate_limit: None,
            time_limit: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClaimStatus {
    Match,
    Mismatch(String),
    Skipped(String),
}

#[derive(Debug, Clone)]
pub struct ClaimReport {
    pub variant: String,
    pub claim: String,
    pub kind: ClaimKind,
    pub bounds_run: Vec<(usize, usize)>,
    pub status: ClaimStatus,
    pub stats: SearchStats,
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub reports: Vec<ClaimReport>,
}

pub fn kind_label(kind: ClaimKind) -> &'static str {
    match kind {
        ClaimKind::Valid => "valid",
        ClaimKind::Countersat => "countersat",
        ClaimKind::Consistent => "consistent",
        ClaimKind::Edge => "edge",
    }
}

enum Verdict {
    AsExpected,
    Unexpected(String),
    GaveUp(String),
}

fn check_one(
    lt: &LoadedTheory,
    claim: &Claim,
    cfg: &SearchConfig,
) -> Result<(Verdict, SearchStats), EvalError> {
    let t = &lt.expanded;
    if claim.kind == ClaimKind::Consistent {
        let axioms: Vec<Formula> = t.axioms.iter().map(|(_, f)| f.clone()).collect();
        let r = find_model(&axioms, cfg)?;
        let v = match r.outcome {
            SearchOutcome::ModelFound(_) => Verdict::AsExpected,
            SearchOutcome::ExhaustedAtBounds => {
                Verdict::Unexpected("no model of the axioms at these bounds".into())
            }
            SearchOutcome::BoundExceeded(w) => Verdict::GaveUp(w),
            SearchOutcome::TimedOut => Verdict::GaveUp("timed out".into()),
        };
        return Ok((v, r.stats));
    }
    let conjecture = claim.conjecture.as_ref().expect("parser guarantees a conjecture");
    // Edge claims check a single derivation step: exclusively the premises
    // they cite, under the effective frame. Plain claims use all axioms.
    let axioms: Vec<Formula> = if claim.kind == ClaimKind::Edge {
        claim
            .premises
            .iter()
            .map(|p| premise_formula(t, p).expect("parser resolved premises").clone())
            .collect()
    } else {
        t.axioms.iter().map(|(_, f)| f.clone()).collect()
    };
    let r = check_bounded_validity(&axioms, conjecture, cfg)?;
    let expect_valid = claim.kind != ClaimKind::Countersat;
    let v = match (r.outcome, expect_valid) {
        (ValidityOutcome::ValidAtBounds, true) => Verdict::AsExpected,
        (ValidityOutcome::Countermodel(_), false) => Verdict::AsExpected,
        (ValidityOutcome::ValidAtBounds, false) => {
            Verdict::Unexpected("exhausted the bounds without a countermodel".into())
        }
        (ValidityOutcome::Countermodel(_), true) => {
            Verdict::Unexpected("found a countermodel".into())
        }
        (ValidityOutcome::BoundExceeded(w), _) => Verdict::GaveUp(w),
        (ValidityOutcome::TimedOut, _) => Verdict::GaveUp("timed out".into()),
    };
    Ok((v, r.stats))
}

pub fn run_claim(lt: &LoadedTheory, claim: &Claim, opts: &SuiteOptions) -> ClaimReport {
    let frame = claim.frame_override.unwrap_or(lt.theory.frame);
    let mut bounds_run = Vec::new();
    let mut stats = SearchStats::default();
    let mut mismatch: Option<String> = None;
    let mut gave_up: Option<String> = None;
    let mut capped: Option<String> = None;
    for &(w, e) in &claim.bounds {
        let (w, e) = (w as usize, e as usize);
        if let Some((cw, ce)) = opts.bounds_cap {
            if w > cw || e > ce {
                capped.get_or_insert(format!("declared bound ({},{}) is above the cap", w, e));
                continue;
            }
        }
        let mut cfg = SearchConfig::new(Bounds::new(w, e), frame);
        cfg.deterministic = opts.deterministic;
        cfg.symmetry_breaking = opts.symmetry_breaking;
        cfg.candidate_limit = opts.candidate_limit;
        cfg.time_limit = opts.time_limit;
        bounds_run.push((w, e));
        match check_one(lt, claim, &cfg) {
            Ok((verdict, s)) => {
                stats.examined += s.examined;
                stats.pruned += s.pruned;
                match verdict {
                    Verdict::AsExpected => {}
                    Verdict::Unexpected(d) => {
                        mismatch.get_or_insert(format!("at ({},{}): {}", w, e, d));
                    }
                    Verdict::GaveUp(d) => {
                        gave_up.get_or_insert(format!("at ({},{}): {}", w, e, d));
                    }
                }
            }
            Err(err) => {
                mismatch.get_or_insert(format!("at ({},{}): {}", w, e, err));
            }
        }
        if mismatch.is_some() {
            break;
        }
    }
    let status = if let Some(d) = mismatch {
        ClaimStatus::Mismatch(d)
    } else if let Some(d) = gave_up {
        ClaimStatus::Skipped(d)
    } else if bounds_run.is_empty() {
        ClaimStatus::Skipped(capped.unwrap_or_else(|| "no bounds to run".into()))
    } else {
        ClaimStatus::Match
    };
    ClaimReport {
        variant: lt.label.clone(),
        claim: claim.name.clone(),
        kind: claim.kind,
        bounds_run,
        status,
        stats,
    }
}

fn matches_filter(filter: Option<&str>, variant: &str, claim: &str) -> bool {
    match filter {
        None => true,
        Some(f) => f == variant || f == claim || f == format!("{}/{}", variant, claim),
    }
}

/// Runs every selected claim at its declared bounds. Claims run in parallel;
/// the report keeps corpus order.
pub fn run_suite(
    theories: &[LoadedTheory],
    filter: Option<&str>,
    opts: &SuiteOptions,
) -> SuiteReport {
    let selected: Vec<(&LoadedTheory, &Claim)> = theories
        .iter()
        .flat_map(|lt| lt.expanded.claims.iter().map(move |c| (lt, c)))
        .filter(|(lt, c)| matches_filter(filter, &lt.label, &c.name))
        .collect();
    let reports = selected
        .into_par_iter()
        .map(|(lt, c)| run_claim(lt, c, opts))
        .collect();
    SuiteReport { reports }
}

/// Printed at the foot of every verdict report.
pub const BOUNDED_CAVEAT: &str =
    "Verdicts are relative to the listed bounds only; unbounded validity is not established.";

impl SuiteReport {
    /// 0: every claim matched. 1: at least one mismatch. 2: no mismatches
    /// but at least one claim skipped.
    pub fn exit_code(&self) -> i32 {
        if self.reports.iter().any(|r| matches!(r.status, ClaimStatus::Mismatch(_))) {
            1
        } else if self.reports.iter().any(|r| matches!(r.status, ClaimStatus::Skipped(_))) {
            2
        } else {
            0
        }
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let width = self
            .reports
            .iter()
            .map(|r| r.variant.len() + r.claim.len() + 1)
            .max()
            .unwrap_or(0)
            .max(8);
        for r in &self.reports {
            let qualified = format!("{}/{}", r.variant, r.claim);
            let bounds = r
                .bounds_run
                .iter()
                .map(|(w, e)| format!("({},{})", w, e))
                .collect::<Vec<_>>()
                .join(" ");
            let (tag, detail) = match &r.status {
                ClaimStatus::Match => ("ok", String::new()),
                ClaimStatus::Mismatch(d) => ("MISMATCH", format!("  {}", d)),
                ClaimStatus::Skipped(d) => ("skipped", format!("  {}", d)),
            };
            writeln!(
                out,
                "{:<qw$}  {:<10}  {:<18}  {}{}",
                qualified,
                kind_label(r.kind),
                bounds,
                tag,
                detail,
                qw = width
            )
            .unwrap();
        }
        let ok = self.reports.iter().filter(|r| r.status == ClaimStatus::Match).count();
        let mismatched = self
            .reports
            .iter()
            .filter(|r| matches!(r.status, ClaimStatus::Mismatch(_)))
            .count();
        let skipped = self
            .reports
            .iter()
            .filter(|r| matches!(r.status, ClaimStatus::Skipped(_)))
            .count();
        writeln!(
            out,
            "{} claims checked: {} ok, {} mismatched, {} skipped",
            self.reports.len(),
            ok,
            mismatched,
            skipped
        )
        .unwrap();
        out.push_str(BOUNDED_CAVEAT);
        out.push('\n');
        out
    }

    /// One JSON object per claim, in corpus order.
    pub fn render_records(&self) -> String {
        #[derive(serde::Serialize)]
        struct Rec<'a> {
            variant: &'a str,
            claim: &'a str,
            kind: &'a str,
            bounds: &'a [(usize, usize)],
            status: &'static str,
            #[serde(skip_serializing_if = "Option::is_none")]
            detail: Option<&'a str>,
            examined: u64,
            pruned: u64,
            caveat: &'static str,
        }
        let mut out = String::new();
        for r in &self.reports {
            let (status, detail) = match &r.status {
                ClaimStatus::Match => ("ok", None),
                ClaimStatus::Mismatch(d) => ("mismatch", Some(d.as_str())),
                ClaimStatus::Skipped(d) => ("skipped", Some(d.as_str())),
            };
            let rec = Rec {
                variant: &r.variant,
                claim: &r.claim,
                kind: kind_label(r.kind),
                bounds: &r.bounds_run,
                status,
                detail,
                examined: r.stats.examined,
                pruned: r.stats.pruned,
                caveat: "bounded verdict",
            };
            out.push_str(&serde_json::to_string(&rec).unwrap());
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prelude_holds_the_shared_definitions() {
        let names: Vec<&str> = prelude().iter().map(|d| d.name.as_str()).collect();
        for expected in [
            "member", "c=", "/\\", "U", "emptyset", "Filter", "Ultrafilter", "HF", "G", "=>",
            "Pos", "meetOf", "ess", "NE",
        ] {
            assert!(names.contains(&expected), "missing `{}`", expected);
        }
    }

    #[test]
    fn all_builtin_theories_load_with_their_claims() {
        let all = builtin_theories();
        let counts: Vec<(_, usize)> =
            all.iter().map(|lt| (lt.label.as_str(), lt.theory.claims.len())).collect();
        assert_eq!(
            counts,
            vec![
                ("ScottVariant", 12),
                ("UFilterVariant", 8),
                ("SimpleVariant", 10),
                ("SimpleVariantPG", 4),
                ("SimpleVariantSE", 5),
                ("SimpleVariantSEinT", 7),
                ("SimpleVariantHF", 7),
                ("HOMLBase", 4),
            ]
        );
    }

    #[test]
    fn builtin_scheme_resolves_and_unknown_names_fail() {
        assert_eq!(load("builtin:ScottVariant").unwrap().label, "ScottVariant");
        assert!(matches!(load("builtin:Nope"), Err(CorpusError::UnknownBuiltin(_))));
    }

    #[test]
    fn file_loading_shares_the_builtin_code_path() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("tiny.thy");
        std::fs::write(&path, "theory tiny frame k\nclaim t valid bounds (1,1): T\n").unwrap();
        let lt = load(path.to_str().unwrap()).unwrap();
        assert_eq!(lt.label, "tiny");
        assert_eq!(lt.theory.claims.len(), 1);
    }

    #[test]
    fn a_fast_claim_matches_and_exits_clean() {
        let report =
            run_suite(builtin_theories(), Some("SimpleVariantSE/T3"), &SuiteOptions::default());
        assert_eq!(report.reports.len(), 1);
        assert_eq!(report.reports[0].status, ClaimStatus::Match);
        assert_eq!(report.exit_code(), 0);
    }

    #[test]
    fn an_unmatched_filter_yields_an_empty_clean_report() {
        let report = run_suite(builtin_theories(), Some("NoSuchThing"), &SuiteOptions::default());
        assert!(report.reports.is_empty());
        assert_eq!(report.exit_code(), 0);
    }

    #[test]
    fn the_bounds_cap_skips_claims_it_excludes() {
        let opts = SuiteOptions { bounds_cap: Some((1, 1)), ..SuiteOptions::default() };
        let report = run_suite(builtin_theories(), Some("HOMLBase/barcan"), &opts);
        assert!(matches!(report.reports[0].status, ClaimStatus::Skipped(_)));
        assert_eq!(report.exit_code(), 2);
    }

    #[test]
    fn a_false_expectation_is_reported_as_a_mismatch_naming_the_claim() {
        let lt = load_source("bad", "theory bad frame k\nclaim wrong valid bounds (1,1): F\n")
            .unwrap();
        let report = run_suite(&[lt], None, &SuiteOptions::default());
        assert_eq!(report.reports[0].claim, "wrong");
        match &report.reports[0].status {
            ClaimStatus::Mismatch(d) => assert!(d.contains("countermodel")),
            other => panic!("expected a mismatch, got {:?}", other),
        }
        assert_eq!(report.exit_code(), 1);
        let text = report.render_text();
        assert!(text.contains("bad/wrong"));
        assert!(text.contains("MISMATCH"));
    }

    #[test]
    fn edge_claims_check_exactly_their_cited_premises() {
        // `strong` would make the conjecture hold; the edge cites only
        // `weak`, so the step must fail.
        let src = "theory t frame k\n\
                   axiom weak: T\n\
                   axiom strong: box F\n\
                   claim viaWeak valid bounds (1,1): box F from weak\n";
        let lt = load_source("t", src).unwrap();
        let report = run_suite(&[lt], None, &SuiteOptions::default());
        assert!(matches!(report.reports[0].status, ClaimStatus::Mismatch(_)));
    }

    #[test]
    fn records_are_one_json_object_per_line() {
        let report =
            run_suite(builtin_theories(), Some("SimpleVariantSE/T3"), &SuiteOptions::default());
        let records = report.render_records();
        for line in records.lines() {
            let v: serde_json::Value = serde_json::from_str(line).unwrap();
            assert_eq!(v["variant"], "SimpleVariantSE");
            assert_eq!(v["claim"], "T3");
            assert_eq!(v["status"], "ok");
            assert_eq!(v["kind"], "countersat");
        }
        assert_eq!(records.lines().count(), 1);
    }
}
