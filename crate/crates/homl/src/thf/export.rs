//! Translation into typed higher-order TPTP syntax.
//!
//! Worlds are made explicit: propositions become predicates on a `world`
//! type, the modalities quantify over `acc`-reachable worlds, the actualist
//! quantifiers guard with `exists_at`, and the validity wrapper quantifies
//! over all worlds. Terms denote world-independent intensions, so equality
//! maps to plain equality. The translation is symbolic: third-order
//! quantifiers carry no bound here.
//!
//! Output is deterministic down to the byte: variables are named by binder
//! depth and every connective is fully parenthesized.

use crate::corpus::{premise_formula, LoadedTheory};
use crate::syntax::{Claim, ClaimKind, Definition, Formula, Frame, SimpleType, Theory};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThfProblem {
    pub filename: String,
    pub text: String,
}

/// One problem per claim, in corpus order.
pub fn export_theory(lt: &LoadedTheory, keep_definitions: bool) -> Vec<ThfProblem> {
    let source = if keep_definitions { &lt.theory } else { &lt.expanded };
    source
        .claims
        .iter()
        .map(|claim| export_claim(&lt.label, source, claim, keep_definitions))
        .collect()
}

fn export_claim(
    label: &str,
    t: &Theory,
    claim: &Claim,
    keep_definitions: bool,
) -> ThfProblem {
    let frame = claim.frame_override.unwrap_or(t.frame);
    let expected = match claim.kind {
        ClaimKind::Valid | ClaimKind::Edge => "Theorem",
        // For consistency claims the conjecture below is `$false`: provable
        // exactly when the axioms are inconsistent.
        ClaimKind::Countersat | ClaimKind::Consistent => "CounterSatisfiable",
    };
    let axioms: Vec<(&str, &Formula)> = if claim.kind == ClaimKind::Edge {
        claim
            .premises
            .iter()
            .map(|p| (p.as_str(), premise_formula(t, p).expect("premises resolve")))
            .collect()
    } else {
        t.axioms.iter().map(|(n, f)| (n.as_str(), f)).collect()
    };

    let mut out = String::new();
    out.push_str(&format!("% Problem  : {}/{}\n", label, claim.name));
    out.push_str(&format!("% Frame    : {}\n", frame_tag(frame)));
    out.push_str(&format!("% Expected : SZS status {}\n", expected));
    out.push_str("% The workbench checks this claim exhaustively at small bounds; this file\n");
    out.push_str("% states the unbounded problem for independent provers.\n\n");

    out.push_str("thf(world_type, type, world: $tType).\n");
    out.push_str("thf(entity_type, type, entity: $tType).\n");
    out.push_str("thf(acc_decl, type, acc: world > world > $o).\n");
    out.push_str("thf(exists_at_decl, type, exists_at: entity > world > $o).\n");
    out.push_str("thf(pos_decl, type, pos: (entity > world > $o) > world > $o).\n");

    if keep_definitions {
        for def in &t.defs {
            out.push('\n');
            out.push_str(&definition_units(def));
        }
    }

    match frame {
        Frame::K => {}
        Frame::T => {
            out.push_str(
                "\nthf(frame_reflexive, axiom, ! [W1: world] : (acc @ W1 @ W1)).\n",
            );
        }
        Frame::Kb => {
            out.push_str("\nthf(frame_symmetric, axiom, ! [W1: world] : (! [W2: world] : ((acc @ W1 @ W2) => (acc @ W2 @ W1)))).\n");
        }
    }

    out.push('\n');
    for (name, f) in &axioms {
        out.push_str(&format!(
            "thf({}, axiom, {}).\n",
            unit_name(name),
            Tr::new(keep_definitions).top(f)
        ));
    }

    let conjecture = match &claim.conjecture {
        Some(f) => Tr::new(keep_definitions).top(f),
        None => "$false".to_string(),
    };
    out.push_str(&format!(
        "\nthf({}, conjecture, {}).\n",
        unit_name(&claim.name),
        conjecture
    ));

    ThfProblem { filename: format!("{}__{}.p", file_part(label), file_part(&claim.name)), text: out }
}

fn frame_tag(f: Frame) -> &'static str {
    match f {
        Frame::K => "k",
        Frame::T => "t",
        Frame::Kb => "kb",
    }
}

/// Filename fragment: primes become `p`, anything else non-alphanumeric `_`.
fn file_part(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else if c == '\'' { 'p' } else { '_' })
        .collect()
}

/// TPTP formula name: lowercase, primes become `p`.
fn unit_name(s: &str) -> String {
    let base: String = file_part(s).to_ascii_lowercase();
    if base.starts_with(|c: char| c.is_ascii_lowercase()) {
        base
    } else {
        format!("x{}", base)
    }
}

/// Definition constants keep their surface name behind a `d_` prefix; the
/// operator names get words.
fn const_ident(name: &str) -> String {
    match name {
        "c=" => "d_subset".to_string(),
        "/\\" => "d_meet".to_string(),
        "=>" => "d_entails".to_string(),
        other => format!("d_{}", file_part(other)),
    }
}

fn definition_units(def: &Definition) -> String {
    let ident = const_ident(&def.name);
    let mut tr = Tr::new(true);
    let mut binders = String::new();
    for (pname, pty) in &def.params {
        let v = tr.push_var(pname);
        binders.push_str(&format!("(^ [{}: {}] : ", v, ty_arg(pty)));
    }
    let body = if def.result == SimpleType::Prop {
        let wv = tr.push_world();
        let s = format!("(^ [{}: world] : ({}))", wv, tr.formula(&def.body, &wv));
        tr.pop_world();
        s
    } else {
        tr.term(&def.body)
    };
    let closers = ")".repeat(def.params.len());
    format!(
        "thf({}_decl, type, {}: {}).\nthf({}_def, definition, ({} = {}{}{})).\n",
        ident,
        ident,
        ty(&def.signature()),
        ident,
        ident,
        binders,
        body,
        closers
    )
}

/// Lifted type: `Prop` becomes a world predicate, arrows lift pointwise.
fn ty(t: &SimpleType) -> String {
    match t {
        SimpleType::Ent => "entity".to_string(),
        SimpleType::Prop => "world > $o".to_string(),
        SimpleType::Fun(a, b) => format!("{} > {}", ty_arg(a), ty(b)),
    }
}

fn ty_arg(t: &SimpleType) -> String {
    match t {
        SimpleType::Ent => "entity".to_string(),
        arrow => format!("({})", ty(arrow)),
    }
}

struct Tr {
    keep_definitions: bool,
    /// Source binder name to THF variable, a stack.
    vars: Vec<(String, String)>,
    world_depth: usize,
}

impl Tr {
    fn new(keep_definitions: bool) -> Tr {
        Tr { keep_definitions, vars: Vec::new(), world_depth: 0 }
    }

    fn push_var(&mut self, name: &str) -> String {
        let v = format!("X{}", self.vars.len() + 1);
        self.vars.push((name.to_string(), v.clone()));
        v
    }

    fn pop_var(&mut self) {
        self.vars.pop();
    }

    fn lookup(&self, name: &str) -> String {
        self.vars
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.clone())
            .unwrap_or_else(|| panic!("unbound variable `{}` in export", name))
    }

    fn push_world(&mut self) -> String {
        self.world_depth += 1;
        format!("W{}", self.world_depth)
    }

    fn pop_world(&mut self) {
        self.world_depth -= 1;
    }

    /// Top-level unit: quantifies the outermost world explicitly.
    fn top(&mut self, f: &Formula) -> String {
        let body = f.peel_global();
        let w = self.push_world();
        let s = format!("! [{}: world] : ({})", w, self.formula(body, &w));
        self.pop_world();
        s
    }

    fn formula(&mut self, f: &Formula, w: &str) -> String {
        match f {
            Formula::Top => "$true".to_string(),
            Formula::Bot => "$false".to_string(),
            Formula::Not(a) => format!("~ ({})", self.formula(a, w)),
            Formula::And(a, b) => {
                format!("({} & {})", self.formula(a, w), self.formula(b, w))
            }
            Formula::Or(a, b) => {
                format!("({} | {})", self.formula(a, w), self.formula(b, w))
            }
            Formula::Implies(a, b) => {
                format!("({} => {})", self.formula(a, w), self.formula(b, w))
            }
            Formula::Iff(a, b) => {
                format!("({} <=> {})", self.formula(a, w), self.formula(b, w))
            }
            Formula::Nec(a) => {
                let v = self.push_world();
                let s = format!(
                    "! [{}: world] : ((acc @ {} @ {}) => ({}))",
                    v,
                    w,
                    v,
                    self.formula(a, &v)
                );
                self.pop_world();
                s
            }
            Formula::Dia(a) => {
                let v = self.push_world();
                let s = format!(
                    "? [{}: world] : ((acc @ {} @ {}) & ({}))",
                    v,
                    w,
                    v,
                    self.formula(a, &v)
                );
                self.pop_world();
                s
            }
            Formula::Global(a) => {
                let v = self.push_world();
                let s = format!("! [{}: world] : ({})", v, self.formula(a, &v));
                self.pop_world();
                s
            }
            Formula::Forall(x, t, b) => {
                let xv = self.push_var(x);
                let s = format!("! [{}: {}] : ({})", xv, ty_arg(t), self.formula(b, w));
                self.pop_var();
                s
            }
            Formula::Exists(x, t, b) => {
                let xv = self.push_var(x);
                let s = format!("? [{}: {}] : ({})", xv, ty_arg(t), self.formula(b, w));
                self.pop_var();
                s
            }
            Formula::ForallE(x, b) => {
                let xv = self.push_var(x);
                let s = format!(
                    "! [{}: entity] : ((exists_at @ {} @ {}) => ({}))",
                    xv,
                    xv,
                    w,
                    self.formula(b, w)
                );
                self.pop_var();
                s
            }
            Formula::ExistsE(x, b) => {
                let xv = self.push_var(x);
                let s = format!(
                    "? [{}: entity] : ((exists_at @ {} @ {}) & ({}))",
                    xv,
                    xv,
                    w,
                    self.formula(b, w)
                );
                self.pop_var();
                s
            }
            Formula::Eq(t, a, b) => {
                let t = t.as_ref().expect("equality is type-annotated");
                format!("({} = {})", self.term_of(a, t, w), self.term_of(b, t, w))
            }
            Formula::Neq(t, a, b) => {
                let t = t.as_ref().expect("equality is type-annotated");
                format!("({} != {})", self.term_of(a, t, w), self.term_of(b, t, w))
            }
            // A proposition-typed term holds at the current world.
            term => format!("({} @ {})", self.spine(term), w),
        }
    }

    /// Equality sides: proposition-typed sides are lifted to world
    /// predicates so equality compares whole intensions.
    fn term_of(&mut self, f: &Formula, t: &SimpleType, _w: &str) -> String {
        if *t == SimpleType::Prop {
            let v = self.push_world();
            let s = format!("(^ [{}: world] : ({}))", v, self.formula(f, &v));
            self.pop_world();
            s
        } else {
            self.term(f)
        }
    }

    /// Application chain without its outer parentheses.
    fn spine(&mut self, f: &Formula) -> String {
        match f {
            Formula::App(a, b) => format!("{} @ {}", self.spine(a), self.term(b)),
            other => self.term(other),
        }
    }

    /// A world-independent denotation: a single token or a parenthesized
    /// unit.
    fn term(&mut self, f: &Formula) -> String {
        match f {
            Formula::Var(x, _) => self.lookup(x),
            Formula::Const(name, _) => {
                if name == crate::syntax::POSITIVE {
                    "pos".to_string()
                } else if self.keep_definitions {
                    const_ident(name)
                } else {
                    panic!("unexpanded constant `{}` in export", name)
                }
            }
            Formula::App(..) => format!("({})", self.spine(f)),
            Formula::Lam(x, t, body) => {
                let xv = self.push_var(x);
                let s = if matches!(**body, Formula::Lam(..)) {
                    format!("(^ [{}: {}] : {})", xv, ty_arg(t), self.term(body))
                } else {
                    let wv = self.push_world();
                    let inner = format!(
                        "(^ [{}: world] : ({}))",
                        wv,
                        self.formula(body, &wv.clone())
                    );
                    self.pop_world();
                    format!("(^ [{}: {}] : {})", xv, ty_arg(t), inner)
                };
                self.pop_var();
                s
            }
            Formula::Compl(t) => {
                let xv = self.push_var("_compl");
                let wv = self.push_world();
                let inner = self.term(t);
                let s = format!(
                    "(^ [{}: entity] : (^ [{}: world] : (~ ({} @ {} @ {}))))",
                    xv, wv, inner, xv, wv
                );
                self.pop_world();
                self.pop_var();
                s
            }
            other => panic!("not a term in export: {:?}", other),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{builtin_theories, load_source};

    #[test]
    fn a_small_claim_exports_to_the_pinned_text() {
        let lt = load_source(
            "tiny",
            "theory tiny frame t\naxiom a: box T\nclaim c valid bounds (1,1): dia T\n",
        )
        .unwrap();
        let problems = export_theory(&lt, false);
        assert_eq!(problems.len(), 1);
        assert_eq!(problems[0].filename, "tiny__c.p");
        let text = &problems[0].text;
        assert!(text.contains("% Expected : SZS status Theorem"));
        assert!(text.contains("thf(frame_reflexive, axiom, ! [W1: world] : (acc @ W1 @ W1)).\n"));
        assert!(text.contains(
            "thf(a, axiom, ! [W1: world] : (! [W2: world] : ((acc @ W1 @ W2) => ($true)))).\n"
        ));
        assert!(text.contains(
            "thf(c, conjecture, ! [W1: world] : (? [W2: world] : ((acc @ W1 @ W2) & ($true)))).\n"
        ));
    }

    #[test]
    fn filenames_replace_primes_and_problem_count_matches_claims() {
        let lt = load_source(
            "t",
            "theory t frame k\naxiom a: T\nclaim T1' valid bounds (1,1): T\nclaim c2 consistent bounds (1,1)\n",
        )
        .unwrap();
        let problems = export_theory(&lt, false);
        assert_eq!(problems.len(), 2);
        assert_eq!(problems[0].filename, "t__T1p.p");
        assert!(problems[0].text.contains("thf(t1p, conjecture,"));
    }

    #[test]
    fn consistency_claims_become_a_false_conjecture() {
        let lt = load_source(
            "t",
            "theory t frame k\naxiom a: T\nclaim ok consistent bounds (1,1)\n",
        )
        .unwrap();
        let problems = export_theory(&lt, false);
        assert!(problems[0].text.contains("thf(ok, conjecture, $false).\n"));
        assert!(problems[0].text.contains("% Expected : SZS status CounterSatisfiable"));
    }

    #[test]
    fn edge_claims_export_their_premises_as_the_axioms() {
        let lt = load_source(
            "t",
            "theory t frame k\n\
             axiom weak: T\n\
             axiom strong: box F\n\
             claim viaWeak valid bounds (1,1): box F from weak\n",
        )
        .unwrap();
        let text = &export_theory(&lt, false)[0].text;
        assert!(text.contains("thf(weak, axiom,"));
        assert!(!text.contains("thf(strong, axiom,"));
    }

    #[test]
    fn quantifiers_and_guards_translate_with_world_arguments() {
        let lt = load_source(
            "t",
            "theory t frame k\nclaim q valid bounds (1,1): forall X:Property. (existsE x. X x) -> exists p:Prop. p\n",
        )
        .unwrap();
        let text = &export_theory(&lt, false)[0].text;
        assert!(text.contains(
            "! [X1: (entity > world > $o)] : ((? [X2: entity] : ((exists_at @ X2 @ W1) & ((X1 @ X2 @ W1))) => ? [X2: (world > $o)] : ((X2 @ W1))))"
        ));
    }

    #[test]
    fn equality_compares_intensions_and_complement_is_pointwise() {
        let lt = load_source(
            "t",
            "theory t frame k\nclaim e valid bounds (1,1): (comp (\\x:E. x != x)) = (\\x:E. x = x)\n",
        )
        .unwrap();
        let text = &export_theory(&lt, false)[0].text;
        assert!(text.contains("(^ [X1: entity] : (^ [W2: world] : (~ ("));
        assert!(text.contains("(X2 != X2)"));
        assert!(text.contains(" = (^ [X1: entity] : (^ [W2: world] : ((X1 = X1))))"));
    }

    #[test]
    fn keep_definitions_emits_typed_equations_and_uses_the_constants() {
        let lt = crate::corpus::builtin(crate::corpus::VariantId::SimpleHF);
        let problems = export_theory(lt, true);
        let text = &problems[0].text;
        assert!(text.contains("thf(d_G_decl, type, d_G: entity > world > $o).\n"));
        assert!(text.contains("thf(d_G_def, definition, (d_G = (^ [X1: entity] : "));
        assert!(text.contains("thf(d_Filter_decl, type, d_Filter: ((entity > world > $o) > world > $o) > world > $o).\n"));
        assert!(text.contains("(d_Filter @ (d_HF @ d_G) @ W1)"));
    }

    #[test]
    fn export_is_byte_identical_across_runs() {
        for lt in builtin_theories() {
            let one = export_theory(lt, false);
            let two = export_theory(lt, false);
            assert_eq!(one, two);
            let kept_one = export_theory(lt, true);
            let kept_two = export_theory(lt, true);
            assert_eq!(kept_one, kept_two);
        }
    }

    #[test]
    fn every_exported_problem_reparses_and_type_checks() {
        for lt in builtin_theories() {
            for keep in [false, true] {
                for p in export_theory(lt, keep) {
                    if let Err(e) = crate::thf::check_problem(&p.text) {
                        panic!("{} (keep_definitions={}): {}", p.filename, keep, e);
                    }
                }
            }
        }
    }
}
