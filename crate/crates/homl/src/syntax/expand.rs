//! Definition expansion and beta normalization.
//!
//! Expansion replaces every defined constant by its lambda-folded body and
//! then reduces all redexes. The language is simply typed, so normalization
//! terminates, and a second pass is the identity: expanded formulas mention
//! no defined constants and contain no redexes.

use super::ast::*;

fn free_vars(f: &Formula, out: &mut Vec<String>) {
    use Formula::*;
    match f {
        Var(n, _) => {
            if !out.iter().any(|v| v == n) {
                out.push(n.clone());
            }
        }
        Const(..) | Top | Bot => {}
        Not(a) | Nec(a) | Dia(a) | Compl(a) | Global(a) => free_vars(a, out),
        And(a, b) | Or(a, b) | Implies(a, b) | Iff(a, b) | App(a, b) | Eq(_, a, b)
        | Neq(_, a, b) => {
            free_vars(a, out);
            free_vars(b, out);
        }
        Lam(x, _, b) | Forall(x, _, b) | Exists(x, _, b) | ForallE(x, b) | ExistsE(x, b) => {
            let mut inner = Vec::new();
            free_vars(b, &mut inner);
            for v in inner {
                if v != *x && !out.iter().any(|w| w == &v) {
                    out.push(v);
                }
            }
        }
    }
}

fn fresh(base: &str, avoid: &[String]) -> String {
    let mut name = format!("{}'", base);
    while avoid.iter().any(|v| v == &name) {
        name.push('\'');
    }
    name
}

/// Capture-avoiding substitution of `arg` for the free variable `x`.
fn subst(f: &Formula, x: &str, arg: &Formula) -> Formula {
    let mut fv = Vec::new();
    free_vars(arg, &mut fv);
    subst_in(f, x, arg, &fv)
}

fn subst_in(f: &Formula, x: &str, arg: &Formula, fv_arg: &[String]) -> Formula {
    use Formula::*;
    let go = |g: &Formula| subst_in(g, x, arg, fv_arg);
    match f {
        Var(n, _) if n == x => arg.clone(),
        Var(..) | Const(..) | Top | Bot => f.clone(),
        Not(a) => Not(Box::new(go(a))),
        Nec(a) => Nec(Box::new(go(a))),
        Dia(a) => Dia(Box::new(go(a))),
        Compl(a) => Compl(Box::new(go(a))),
        Global(a) => Global(Box::new(go(a))),
        And(a, b) => And(Box::new(go(a)), Box::new(go(b))),
        Or(a, b) => Or(Box::new(go(a)), Box::new(go(b))),
        Implies(a, b) => Implies(Box::new(go(a)), Box::new(go(b))),
        Iff(a, b) => Iff(Box::new(go(a)), Box::new(go(b))),
        App(a, b) => App(Box::new(go(a)), Box::new(go(b))),
        Eq(t, a, b) => Eq(t.clone(), Box::new(go(a)), Box::new(go(b))),
        Neq(t, a, b) => Neq(t.clone(), Box::new(go(a)), Box::new(go(b))),
        Lam(y, ty, b) => {
            let (y, b) = enter_binder(y, b, x, fv_arg);
            match b {
                None => f.clone(),
                Some(b) => Lam(y, ty.clone(), Box::new(subst_in(&b, x, arg, fv_arg))),
            }
        }
        Forall(y, ty, b) => {
            let (y, b) = enter_binder(y, b, x, fv_arg);
            match b {
                None => f.clone(),
                Some(b) => Forall(y, ty.clone(), Box::new(subst_in(&b, x, arg, fv_arg))),
            }
        }
        Exists(y, ty, b) => {
            let (y, b) = enter_binder(y, b, x, fv_arg);
            match b {
                None => f.clone(),
                Some(b) => Exists(y, ty.clone(), Box::new(subst_in(&b, x, arg, fv_arg))),
            }
        }
        ForallE(y, b) => {
            let (y, b) = enter_binder(y, b, x, fv_arg);
            match b {
                None => f.clone(),
                Some(b) => ForallE(y, Box::new(subst_in(&b, x, arg, fv_arg))),
            }
        }
        ExistsE(y, b) => {
            let (y, b) = enter_binder(y, b, x, fv_arg);
            match b {
                None => f.clone(),
                Some(b) => ExistsE(y, Box::new(subst_in(&b, x, arg, fv_arg))),
            }
        }
    }
}

/// Prepares a binder for substitution under it. Returns `None` as the body
/// when the binder shadows `x` and the node passes through untouched;
/// otherwise returns the (possibly renamed) binder and a body to descend
/// into. Renaming picks a primed variant clear of the argument and body.
fn enter_binder(
    y: &str,
    body: &Formula,
    x: &str,
    fv_arg: &[String],
) -> (String, Option<Formula>) {
    if y == x {
        return (y.to_string(), None);
    }
    if fv_arg.iter().any(|v| v == y) {
        let mut avoid = fv_arg.to_vec();
        free_vars(body, &mut avoid);
        avoid.push(x.to_string());
        let y2 = fresh(y, &avoid);
        let renamed = subst(body, y, &var_like(body, y, &y2));
        (y2, Some(renamed))
    } else {
        (y.to_string(), Some(body.clone()))
    }
}

/// A variable node standing in for `y` inside `body`, preserving its type.
fn var_like(body: &Formula, y: &str, new_name: &str) -> Formula {
    fn find_type(f: &Formula, y: &str) -> Option<SimpleType> {
        use Formula::*;
        match f {
            Var(n, t) if n == y => Some(t.clone()),
            Var(..) | Const(..) | Top | Bot => None,
            Not(a) | Nec(a) | Dia(a) | Compl(a) | Global(a) => find_type(a, y),
            And(a, b) | Or(a, b) | Implies(a, b) | Iff(a, b) | App(a, b) | Eq(_, a, b)
            | Neq(_, a, b) => find_type(a, y).or_else(|| find_type(b, y)),
            Lam(x, _, b) | Forall(x, _, b) | Exists(x, _, b) => {
                if x == y {
                    None
                } else {
                    find_type(b, y)
                }
            }
            ForallE(x, b) | ExistsE(x, b) => {
                if x == y {
                    None
                } else {
                    find_type(b, y)
                }
            }
        }
    }
    let ty = find_type(body, y).unwrap_or(SimpleType::Ent);
    Formula::Var(new_name.to_string(), ty)
}

/// Reduce all beta redexes. Terminates because the term is simply typed.
fn normalize(f: &Formula) -> Formula {
    use Formula::*;
    match f {
        Var(..) | Const(..) | Top | Bot => f.clone(),
        Not(a) => Not(Box::new(normalize(a))),
        Nec(a) => Nec(Box::new(normalize(a))),
        Dia(a) => Dia(Box::new(normalize(a))),
        Compl(a) => Compl(Box::new(normalize(a))),
        Global(a) => Global(Box::new(normalize(a))),
        And(a, b) => And(Box::new(normalize(a)), Box::new(normalize(b))),
        Or(a, b) => Or(Box::new(normalize(a)), Box::new(normalize(b))),
        Implies(a, b) => Implies(Box::new(normalize(a)), Box::new(normalize(b))),
        Iff(a, b) => Iff(Box::new(normalize(a)), Box::new(normalize(b))),
        Eq(t, a, b) => Eq(t.clone(), Box::new(normalize(a)), Box::new(normalize(b))),
        Neq(t, a, b) => Neq(t.clone(), Box::new(normalize(a)), Box::new(normalize(b))),
        App(fun, arg) => {
            let nf = normalize(fun);
            let na = normalize(arg);
            if let Lam(x, _, body) = &nf {
                normalize(&subst(body, x, &na))
            } else {
                App(Box::new(nf), Box::new(na))
            }
        }
        Lam(x, t, b) => Lam(x.clone(), t.clone(), Box::new(normalize(b))),
        Forall(x, t, b) => Forall(x.clone(), t.clone(), Box::new(normalize(b))),
        Exists(x, t, b) => Exists(x.clone(), t.clone(), Box::new(normalize(b))),
        ForallE(x, b) => ForallE(x.clone(), Box::new(normalize(b))),
        ExistsE(x, b) => ExistsE(x.clone(), Box::new(normalize(b))),
    }
}

fn replace_consts(f: &Formula, map: &[(String, Formula)]) -> Formula {
    use Formula::*;
    let go = |g: &Formula| replace_consts(g, map);
    match f {
        Const(n, _) => match map.iter().find(|(name, _)| name == n) {
            Some((_, t)) => t.clone(),
            None => f.clone(),
        },
        Var(..) | Top | Bot => f.clone(),
        Not(a) => Not(Box::new(go(a))),
        Nec(a) => Nec(Box::new(go(a))),
        Dia(a) => Dia(Box::new(go(a))),
        Compl(a) => Compl(Box::new(go(a))),
        Global(a) => Global(Box::new(go(a))),
        And(a, b) => And(Box::new(go(a)), Box::new(go(b))),
        Or(a, b) => Or(Box::new(go(a)), Box::new(go(b))),
        Implies(a, b) => Implies(Box::new(go(a)), Box::new(go(b))),
        Iff(a, b) => Iff(Box::new(go(a)), Box::new(go(b))),
        App(a, b) => App(Box::new(go(a)), Box::new(go(b))),
        Eq(t, a, b) => Eq(t.clone(), Box::new(go(a)), Box::new(go(b))),
        Neq(t, a, b) => Neq(t.clone(), Box::new(go(a)), Box::new(go(b))),
        Lam(x, t, b) => Lam(x.clone(), t.clone(), Box::new(go(b))),
        Forall(x, t, b) => Forall(x.clone(), t.clone(), Box::new(go(b))),
        Exists(x, t, b) => Exists(x.clone(), t.clone(), Box::new(go(b))),
        ForallE(x, b) => ForallE(x.clone(), Box::new(go(b))),
        ExistsE(x, b) => ExistsE(x.clone(), Box::new(go(b))),
    }
}

/// Closed lambda terms for each definition, with earlier definitions already
/// expanded inside later ones.
fn expansion_map(defs: &[Definition]) -> Vec<(String, Formula)> {
    let mut map: Vec<(String, Formula)> = Vec::new();
    for d in defs {
        let body = normalize(&replace_consts(&d.body, &map));
        let folded = d
            .params
            .iter()
            .rev()
            .fold(body, |acc, (p, t)| Formula::Lam(p.clone(), t.clone(), Box::new(acc)));
        map.push((d.name.clone(), folded));
    }
    map
}

/// Expand all defined constants in `f` and beta-normalize the result.
pub fn expand_definitions(f: &Formula, defs: &[Definition]) -> Formula {
    normalize(&replace_consts(f, &expansion_map(defs)))
}

/// A copy of the theory whose axioms and conjectures are fully expanded.
pub fn expand_in_theory(t: &Theory) -> Theory {
    let map = expansion_map(&t.defs);
    let expand = |f: &Formula| normalize(&replace_consts(f, &map));
    Theory {
        name: t.name.clone(),
        frame: t.frame,
        defs: t.defs.clone(),
        seeded: t.seeded,
        axioms: t.axioms.iter().map(|(n, f)| (n.clone(), expand(f))).collect(),
        claims: t
            .claims
            .iter()
            .map(|c| Claim {
                name: c.name.clone(),
                kind: c.kind,
                premises: c.premises.clone(),
                conjecture: c.conjecture.as_ref().map(&expand),
                bounds: c.bounds.clone(),
                frame_override: c.frame_override,
            })
            .collect(),
    }
}
