//! Canonical formula and theory printing.
//!
//! Output re-parses to the identical tree. Parentheses are inserted from
//! precedence alone, so the printer is total on parser-shaped terms; bare
//! operator constants that only arise in hand-built trees print as their
//! names and are the caller's problem.

use super::ast::*;

// Binding tightness, loose to tight. Binders sit below everything and are
// parenthesized in any context that does not run to the end of the expression.
const L_BINDER: u8 = 0;
const L_IFF: u8 = 1;
const L_IMPLIES: u8 = 2;
const L_OR: u8 = 3;
const L_AND: u8 = 4;
const L_CMP: u8 = 5;
const L_MEET: u8 = 6;
const L_PREFIX: u8 = 7;
const L_APP: u8 = 8;
const L_ATOM: u8 = 9;

fn level(f: &Formula) -> u8 {
    use Formula::*;
    match f {
        Lam(..) | Forall(..) | Exists(..) | ForallE(..) | ExistsE(..) => L_BINDER,
        Iff(..) => L_IFF,
        Implies(..) => L_IMPLIES,
        Or(..) => L_OR,
        And(..) => L_AND,
        Eq(..) | Neq(..) => L_CMP,
        App(..) => match operator_apply(f) {
            Some(("c=", _, _)) | Some(("=>", _, _)) => L_CMP,
            Some(("/\\", _, _)) => L_MEET,
            _ => L_APP,
        },
        Not(..) | Nec(..) | Dia(..) | Compl(..) => L_PREFIX,
        Const(..) | Var(..) | Top | Bot | Global(..) => L_ATOM,
    }
}

/// Matches `((op a) b)` for the infix-definition constants.
fn operator_apply(f: &Formula) -> Option<(&str, &Formula, &Formula)> {
    if let Formula::App(fun, b) = f {
        if let Formula::App(op, a) = fun.as_ref() {
            if let Formula::Const(name, _) = op.as_ref() {
                if name == "c=" || name == "=>" || name == "/\\" {
                    return Some((name.as_str(), a, b));
                }
            }
        }
    }
    None
}

/// Render a formula in canonical concrete syntax.
pub fn print_formula(f: &Formula) -> String {
    let mut out = String::new();
    emit(f, 0, false, &mut out);
    out
}

/// `min` is the loosest level printable bare here; `unit` additionally
/// excludes application chains (prefix operands and application arguments
/// take a single prefixed unit, not a chain).
fn emit(f: &Formula, min: u8, unit: bool, out: &mut String) {
    let bare_app_ok = !(unit && level(f) == L_APP);
    if level(f) >= min && bare_app_ok {
        emit_node(f, out);
    } else {
        out.push('(');
        emit_node(f, out);
        out.push(')');
    }
}

fn emit_node(f: &Formula, out: &mut String) {
    use Formula::*;
    if let Some((op, a, b)) = operator_apply(f) {
        if op == "/\\" {
            emit(a, L_MEET, false, out);
            out.push_str(" /\\ ");
            emit(b, L_PREFIX, false, out);
        } else {
            emit(a, L_MEET, false, out);
            out.push(' ');
            out.push_str(op);
            out.push(' ');
            emit(b, L_MEET, false, out);
        }
        return;
    }
    match f {
        Const(name, _) | Var(name, _) => out.push_str(name),
        Top => out.push('T'),
        Bot => out.push('F'),
        Global(g) => {
            out.push('[');
            emit(g, 0, false, out);
            out.push(']');
        }
        Not(g) => {
            out.push('~');
            emit(g, L_PREFIX, true, out);
        }
        Nec(g) => {
            out.push_str("box ");
            emit(g, L_PREFIX, true, out);
        }
        Dia(g) => {
            out.push_str("dia ");
            emit(g, L_PREFIX, true, out);
        }
        Compl(g) => {
            out.push_str("comp ");
            emit(g, L_PREFIX, true, out);
        }
        And(a, b) => {
            emit(a, L_AND, false, out);
            out.push_str(" & ");
            emit(b, L_CMP, false, out);
        }
        Or(a, b) => {
            emit(a, L_OR, false, out);
            out.push_str(" | ");
            emit(b, L_AND, false, out);
        }
        Implies(a, b) => {
            emit(a, L_OR, false, out);
            out.push_str(" -> ");
            emit(b, L_IMPLIES, false, out);
        }
        Iff(a, b) => {
            emit(a, L_IMPLIES, false, out);
            out.push_str(" <-> ");
            emit(b, L_IFF, false, out);
        }
        Eq(_, a, b) => {
            emit(a, L_MEET, false, out);
            out.push_str(" = ");
            emit(b, L_MEET, false, out);
        }
        Neq(_, a, b) => {
            emit(a, L_MEET, false, out);
            out.push_str(" != ");
            emit(b, L_MEET, false, out);
        }
        App(fun, arg) => {
            emit(fun, L_PREFIX, false, out);
            out.push(' ');
            emit(arg, L_PREFIX, true, out);
        }
        Lam(x, ty, body) => {
            out.push('\\');
            out.push_str(x);
            out.push(':');
            out.push_str(&ty.to_string());
            out.push_str(". ");
            emit(body, 0, false, out);
        }
        Forall(x, ty, body) => binder("forall", x, &ty.to_string(), body, out),
        Exists(x, ty, body) => binder("exists", x, &ty.to_string(), body, out),
        ForallE(x, body) => binder("forall", x, "E_act", body, out),
        ExistsE(x, body) => binder("exists", x, "E_act", body, out),
    }
}

fn binder(kw: &str, x: &str, ty: &str, body: &Formula, out: &mut String) {
    out.push_str(kw);
    out.push(' ');
    out.push_str(x);
    out.push(':');
    out.push_str(ty);
    out.push_str(". ");
    emit(body, 0, false, out);
}

fn kind_word(kind: ClaimKind) -> &'static str {
    match kind {
        ClaimKind::Valid | ClaimKind::Edge => "valid",
        ClaimKind::Countersat => "countersat",
        ClaimKind::Consistent => "consistent",
    }
}

/// Render a whole theory in the line-oriented format.
pub fn print_theory(t: &Theory) -> String {
    let mut out = String::new();
    out.push_str(&format!("theory {} frame {}\n", t.name, t.frame.tag()));
    for d in &t.defs[t.seeded..] {
        out.push_str("def ");
        out.push_str(&d.name);
        if !d.params.is_empty() {
            out.push('(');
            for (i, (p, ty)) in d.params.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push_str(&format!("{}:{}", p, ty));
            }
            out.push(')');
        }
        out.push_str(" := ");
        out.push_str(&print_formula(&d.body));
        out.push('\n');
    }
    for (name, body) in &t.axioms {
        // Axioms are stored globalized; the brackets stay implicit here.
        out.push_str(&format!("axiom {}: {}\n", name, print_formula(body.peel_global())));
    }
    for c in &t.claims {
        out.push_str(&format!("claim {} {} bounds", c.name, kind_word(c.kind)));
        for (w, e) in &c.bounds {
            out.push_str(&format!(" ({},{})", w, e));
        }
        if let Some(fr) = c.frame_override {
            out.push_str(&format!(" frame {}", fr.tag()));
        }
        if let Some(conj) = &c.conjecture {
            out.push_str(": ");
            out.push_str(&print_formula(conj.peel_global()));
        }
        if !c.premises.is_empty() {
            out.push_str(" from");
            for p in &c.premises {
                out.push(' ');
                out.push_str(p);
            }
        }
        out.push('\n');
    }
    out
}
