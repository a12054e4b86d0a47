//! Simple-type checking and equality annotation.
//!
//! Checking rebuilds the tree so `=` and `!=` nodes carry the operand type
//! the evaluator needs. Errors name the offending node by a breadcrumb path
//! from the root, which is terser than spans once trees stop matching any
//! single source line.

use super::ast::*;
use super::{SynResult, SyntaxError};

/// Typecheck a closed-over formula and return its type.
pub fn typecheck(f: &Formula) -> SynResult<SimpleType> {
    check(f, &mut Vec::new(), "root").map(|(_, t)| t)
}

/// Typecheck with free variables supplied by `ctx`.
pub fn typecheck_with_context(
    f: &Formula,
    ctx: &[(String, SimpleType)],
) -> SynResult<SimpleType> {
    let mut env: Vec<(String, SimpleType)> = ctx.to_vec();
    check(f, &mut env, "root").map(|(_, t)| t)
}

/// Typecheck and return the tree with `=`/`!=` operand types filled in.
pub fn annotate(f: &Formula) -> SynResult<Formula> {
    check(f, &mut Vec::new(), "root").map(|(g, _)| g)
}

fn err<T>(path: &str, msg: impl Into<String>) -> SynResult<T> {
    Err(SyntaxError::Type { path: path.to_string(), msg: msg.into() })
}

fn want_prop(path: &str, got: &SimpleType) -> SynResult<()> {
    if *got == SimpleType::Prop {
        Ok(())
    } else {
        err(path, format!("expected Prop, found `{}`", got))
    }
}

fn check(
    f: &Formula,
    env: &mut Vec<(String, SimpleType)>,
    path: &str,
) -> SynResult<(Formula, SimpleType)> {
    use Formula::*;
    let sub = |p: &str| format!("{}.{}", path, p);
    match f {
        Const(name, ty) => Ok((Const(name.clone(), ty.clone()), ty.clone())),
        Var(name, ty) => {
            match env.iter().rev().find(|(n, _)| n == name) {
                Some((_, bound)) if bound == ty => Ok((f.clone(), ty.clone())),
                Some((_, bound)) => err(
                    path,
                    format!("`{}` is bound at `{}` but annotated `{}`", name, bound, ty),
                ),
                // Free variables keep their annotation; the caller supplies
                // bindings through `typecheck_with_context` or evaluation.
                None => Ok((f.clone(), ty.clone())),
            }
        }
        Top => Ok((Top, SimpleType::Prop)),
        Bot => Ok((Bot, SimpleType::Prop)),
        Not(a) => {
            let (a, t) = check(a, env, &sub("not"))?;
            want_prop(&sub("not"), &t)?;
            Ok((Not(Box::new(a)), SimpleType::Prop))
        }
        Nec(a) => {
            let (a, t) = check(a, env, &sub("box"))?;
            want_prop(&sub("box"), &t)?;
            Ok((Nec(Box::new(a)), SimpleType::Prop))
        }
        Dia(a) => {
            let (a, t) = check(a, env, &sub("dia"))?;
            want_prop(&sub("dia"), &t)?;
            Ok((Dia(Box::new(a)), SimpleType::Prop))
        }
        Global(a) => {
            let (a, t) = check(a, env, &sub("global"))?;
            want_prop(&sub("global"), &t)?;
            Ok((Global(Box::new(a)), SimpleType::Prop))
        }
        Compl(a) => {
            let (a, t) = check(a, env, &sub("comp"))?;
            if !t.is_property() {
                return err(&sub("comp"), format!("expected Property, found `{}`", t));
            }
            Ok((Compl(Box::new(a)), SimpleType::property()))
        }
        And(a, b) | Or(a, b) | Implies(a, b) | Iff(a, b) => {
            let (ca, ta) = check(a, env, &sub("lhs"))?;
            let (cb, tb) = check(b, env, &sub("rhs"))?;
            want_prop(&sub("lhs"), &ta)?;
            want_prop(&sub("rhs"), &tb)?;
            let node = match f {
                And(..) => And(Box::new(ca), Box::new(cb)),
                Or(..) => Or(Box::new(ca), Box::new(cb)),
                Implies(..) => Implies(Box::new(ca), Box::new(cb)),
                _ => Iff(Box::new(ca), Box::new(cb)),
            };
            Ok((node, SimpleType::Prop))
        }
        Eq(_, a, b) | Neq(_, a, b) => {
            let (ca, ta) = check(a, env, &sub("lhs"))?;
            let (cb, tb) = check(b, env, &sub("rhs"))?;
            if ta != tb {
                return err(path, format!("cannot compare `{}` with `{}`", ta, tb));
            }
            if !ta.is_quantifier_domain() {
                return err(path, format!("cannot compare values of type `{}`", ta));
            }
            let node = match f {
                Eq(..) => Eq(Some(ta.clone()), Box::new(ca), Box::new(cb)),
                _ => Neq(Some(ta.clone()), Box::new(ca), Box::new(cb)),
            };
            Ok((node, SimpleType::Prop))
        }
        App(fun, arg) => {
            let (cf, tf) = check(fun, env, &sub("fun"))?;
            let (ca, ta) = check(arg, env, &sub("arg"))?;
            match tf {
                SimpleType::Fun(dom, cod) => {
                    if *dom != ta {
                        return err(
                            &sub("arg"),
                            format!("expected `{}`, found `{}`", dom, ta),
                        );
                    }
                    Ok((App(Box::new(cf), Box::new(ca)), *cod))
                }
                other => err(&sub("fun"), format!("`{}` is not applicable", other)),
            }
        }
        Lam(x, ty, body) => {
            env.push((x.clone(), ty.clone()));
            let r = check(body, env, &sub(&format!("lam[{}]", x)));
            env.pop();
            let (cb, tb) = r?;
            Ok((Lam(x.clone(), ty.clone(), Box::new(cb)), SimpleType::fun(ty.clone(), tb)))
        }
        Forall(x, ty, body) | Exists(x, ty, body) => {
            if !ty.is_quantifier_domain() {
                return err(path, format!("cannot quantify over `{}`", ty));
            }
            env.push((x.clone(), ty.clone()));
            let r = check(body, env, &sub(&format!("quant[{}]", x)));
            env.pop();
            let (cb, tb) = r?;
            want_prop(&sub(&format!("quant[{}]", x)), &tb)?;
            let node = match f {
                Forall(..) => Forall(x.clone(), ty.clone(), Box::new(cb)),
                _ => Exists(x.clone(), ty.clone(), Box::new(cb)),
            };
            Ok((node, SimpleType::Prop))
        }
        ForallE(x, body) | ExistsE(x, body) => {
            env.push((x.clone(), SimpleType::Ent));
            let r = check(body, env, &sub(&format!("quant[{}]", x)));
            env.pop();
            let (cb, tb) = r?;
            want_prop(&sub(&format!("quant[{}]", x)), &tb)?;
            let node = match f {
                ForallE(..) => ForallE(x.clone(), Box::new(cb)),
                _ => ExistsE(x.clone(), Box::new(cb)),
            };
            Ok((node, SimpleType::Prop))
        }
    }
}
