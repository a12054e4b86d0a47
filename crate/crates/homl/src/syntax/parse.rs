//! Recursive-descent parser for formulas and the line-oriented theory format.
//!
//! Precedence, loosest first: `<->`, `->`, `|`, `&`, comparisons
//! (`=` `!=` `c=` `=>`), `/\`, prefix (`~` `box` `dia` `comp`), application.
//! Binders (`forall`, `exists`, `forallE`, `existsE`, `\`) extend as far right
//! as possible. The three operator tokens `c=`, `=>`, `/\` resolve to
//! definitions of the same name and misparse into nothing else.

use super::ast::*;
use super::lex::{lex, Spanned, Tok};
use super::typecheck;
use super::{SynResult, SyntaxError};

const RESERVED: &[&str] = &[
    "box", "dia", "comp", "forall", "exists", "forallE", "existsE", "T", "F", "from",
];

struct Parser<'a> {
    toks: Vec<Spanned>,
    pos: usize,
    defs: &'a [Definition],
    scope: Vec<(String, SimpleType)>,
    /// Set while parsing a definition body, to turn self-reference into a
    /// cycle error instead of a generic unknown identifier.
    current_def: Option<String>,
    line: u32,
}

impl<'a> Parser<'a> {
    fn new(toks: Vec<Spanned>, defs: &'a [Definition], line: u32) -> Self {
        Parser { toks, pos: 0, defs, scope: Vec::new(), current_def: None, line }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn peek_ident(&self) -> Option<&str> {
        match self.peek() {
            Some(Tok::Ident(s)) => Some(s.as_str()),
            _ => None,
        }
    }

    fn next(&mut self) -> Option<Spanned> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn here(&self) -> (u32, u32) {
        match self.toks.get(self.pos) {
            Some(s) => (s.line, s.col),
            None => match self.toks.last() {
                Some(s) => (s.line, s.col + 1),
                None => (self.line, 1),
            },
        }
    }

    fn fail<T>(&self, msg: impl Into<String>) -> SynResult<T> {
        let (line, col) = self.here();
        Err(SyntaxError::Parse { line, col, msg: msg.into() })
    }

    fn expect(&mut self, want: &Tok) -> SynResult<()> {
        match self.next() {
            Some(s) if s.tok == *want => Ok(()),
            Some(s) => Err(SyntaxError::Parse {
                line: s.line,
                col: s.col,
                msg: format!("expected {}, found {}", want.describe(), s.tok.describe()),
            }),
            None => self.fail(format!("expected {}, found end of input", want.describe())),
        }
    }

    fn expect_ident(&mut self) -> SynResult<String> {
        match self.next() {
            Some(Spanned { tok: Tok::Ident(s), .. }) => Ok(s),
            Some(s) => Err(SyntaxError::Parse {
                line: s.line,
                col: s.col,
                msg: format!("expected an identifier, found {}", s.tok.describe()),
            }),
            None => self.fail("expected an identifier, found end of input"),
        }
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        if self.peek_ident() == Some(kw) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    // ---- types -------------------------------------------------------

    // Surface types are the four named domains; Fun only arises internally.
    fn parse_type(&mut self) -> SynResult<SimpleType> {
        match self.next() {
            Some(Spanned { tok: Tok::Ident(s), line, col }) => match s.as_str() {
                "E" | "Ent" => Ok(SimpleType::Ent),
                "Prop" | "PROP" => Ok(SimpleType::Prop),
                "Property" | "PTY" => Ok(SimpleType::property()),
                "PropSet" | "PSET" => Ok(SimpleType::prop_set()),
                other => Err(SyntaxError::Parse {
                    line,
                    col,
                    msg: format!("unknown type `{}`", other),
                }),
            },
            Some(Spanned { tok: Tok::LParen, .. }) => {
                let t = self.parse_type()?;
                self.expect(&Tok::RParen)?;
                Ok(t)
            }
            Some(s) => Err(SyntaxError::Parse {
                line: s.line,
                col: s.col,
                msg: format!("expected a type, found {}", s.tok.describe()),
            }),
            None => self.fail("expected a type, found end of input"),
        }
    }

    // ---- formulas ----------------------------------------------------

    fn parse_expr(&mut self) -> SynResult<Formula> {
        self.parse_iff()
    }

    fn parse_iff(&mut self) -> SynResult<Formula> {
        let lhs = self.parse_implies()?;
        if self.peek() == Some(&Tok::IffOp) {
            self.pos += 1;
            let rhs = self.parse_iff()?;
            Ok(Formula::Iff(Box::new(lhs), Box::new(rhs)))
        } else {
            Ok(lhs)
        }
    }

    fn parse_implies(&mut self) -> SynResult<Formula> {
        let lhs = self.parse_or()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.pos += 1;
            let rhs = self.parse_implies()?;
            Ok(Formula::Implies(Box::new(lhs), Box::new(rhs)))
        } else {
            Ok(lhs)
        }
    }

    fn parse_or(&mut self) -> SynResult<Formula> {
        let mut lhs = self.parse_and()?;
        while self.peek() == Some(&Tok::Pipe) {
            self.pos += 1;
            let rhs = self.parse_and()?;
            lhs = Formula::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn parse_and(&mut self) -> SynResult<Formula> {
        let mut lhs = self.parse_cmp()?;
        while self.peek() == Some(&Tok::Amp) {
            self.pos += 1;
            let rhs = self.parse_cmp()?;
            lhs = Formula::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn parse_cmp(&mut self) -> SynResult<Formula> {
        let lhs = self.parse_meet()?;
        match self.peek() {
            Some(Tok::EqOp) => {
                self.pos += 1;
                let rhs = self.parse_meet()?;
                Ok(Formula::Eq(None, Box::new(lhs), Box::new(rhs)))
            }
            Some(Tok::NeqOp) => {
                self.pos += 1;
                let rhs = self.parse_meet()?;
                Ok(Formula::Neq(None, Box::new(lhs), Box::new(rhs)))
            }
            Some(Tok::SubOp) => {
                self.pos += 1;
                let op = self.resolve_operator("c=")?;
                let rhs = self.parse_meet()?;
                Ok(Formula::app(Formula::app(op, lhs), rhs))
            }
            Some(Tok::EntailOp) => {
                self.pos += 1;
                let op = self.resolve_operator("=>")?;
                let rhs = self.parse_meet()?;
                Ok(Formula::app(Formula::app(op, lhs), rhs))
            }
            _ => Ok(lhs),
        }
    }

    fn parse_meet(&mut self) -> SynResult<Formula> {
        let mut lhs = self.parse_app()?;
        while self.peek() == Some(&Tok::MeetOp) {
            self.pos += 1;
            let op = self.resolve_operator("/\\")?;
            let rhs = self.parse_app()?;
            lhs = Formula::app(Formula::app(op, lhs), rhs);
        }
        Ok(lhs)
    }

    fn starts_operand(&self) -> bool {
        match self.peek() {
            Some(Tok::Tilde) | Some(Tok::LParen) | Some(Tok::LBrack) | Some(Tok::Lambda) => true,
            Some(Tok::Ident(s)) => s != "from",
            _ => false,
        }
    }

    fn parse_app(&mut self) -> SynResult<Formula> {
        let mut lhs = self.parse_prefixed()?;
        while self.starts_operand() {
            let rhs = self.parse_prefixed()?;
            lhs = Formula::App(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn parse_prefixed(&mut self) -> SynResult<Formula> {
        match self.peek() {
            Some(Tok::Tilde) => {
                self.pos += 1;
                Ok(Formula::Not(Box::new(self.parse_prefixed()?)))
            }
            Some(Tok::Ident(s)) if s == "box" => {
                self.pos += 1;
                Ok(Formula::Nec(Box::new(self.parse_prefixed()?)))
            }
            Some(Tok::Ident(s)) if s == "dia" => {
                self.pos += 1;
                Ok(Formula::Dia(Box::new(self.parse_prefixed()?)))
            }
            Some(Tok::Ident(s)) if s == "comp" => {
                self.pos += 1;
                Ok(Formula::Compl(Box::new(self.parse_prefixed()?)))
            }
            _ => self.parse_atom(),
        }
    }

    fn parse_atom(&mut self) -> SynResult<Formula> {
        match self.peek().cloned() {
            Some(Tok::LParen) => {
                self.pos += 1;
                let f = self.parse_expr()?;
                self.expect(&Tok::RParen)?;
                Ok(f)
            }
            Some(Tok::LBrack) => {
                self.pos += 1;
                let f = self.parse_expr()?;
                self.expect(&Tok::RBrack)?;
                Ok(Formula::Global(Box::new(f)))
            }
            Some(Tok::Lambda) => {
                self.pos += 1;
                let (names, ty, actualist) = self.parse_binder_names(true)?;
                if actualist {
                    return self.fail("`E_act` only marks quantifier domains, not lambda binders");
                }
                let ty = ty.expect("lambda binders are annotated");
                self.parse_binder_body(&names, &ty, |name, ty, body| {
                    Formula::Lam(name, ty, Box::new(body))
                })
            }
            Some(Tok::Ident(s)) if s == "forall" || s == "exists" => {
                self.pos += 1;
                let univ = s == "forall";
                let (names, ty, actualist) = self.parse_binder_names(true)?;
                if actualist {
                    self.parse_actualist_body(&names, univ)
                } else {
                    let ty = ty.expect("quantifier binders are annotated");
                    if !ty.is_quantifier_domain() {
                        return self.fail(format!(
                            "quantifiers range over E, Prop, Property, or PropSet, not `{}`",
                            ty
                        ));
                    }
                    self.parse_binder_body(&names, &ty, |name, ty, body| {
                        if univ {
                            Formula::Forall(name, ty, Box::new(body))
                        } else {
                            Formula::Exists(name, ty, Box::new(body))
                        }
                    })
                }
            }
            Some(Tok::Ident(s)) if s == "forallE" || s == "existsE" => {
                self.pos += 1;
                let (names, _, _) = self.parse_binder_names(false)?;
                self.parse_actualist_body(&names, s == "forallE")
            }
            Some(Tok::Ident(s)) if s == "T" => {
                self.pos += 1;
                Ok(Formula::Top)
            }
            Some(Tok::Ident(s)) if s == "F" => {
                self.pos += 1;
                Ok(Formula::Bot)
            }
            Some(Tok::Ident(s)) if !RESERVED.contains(&s.as_str()) => {
                let (line, col) = self.here();
                self.pos += 1;
                self.resolve_ident(&s, line, col)
            }
            Some(t) => self.fail(format!("expected a formula, found {}", t.describe())),
            None => self.fail("expected a formula, found end of input"),
        }
    }

    /// `x y z : TYPE` (annotated) or `x y z` (actualist shorthand). Returns
    /// the names, the type if any, and whether the domain was `E_act`.
    fn parse_binder_names(
        &mut self,
        annotated: bool,
    ) -> SynResult<(Vec<String>, Option<SimpleType>, bool)> {
        let mut names = vec![self.binder_name()?];
        while let Some(Tok::Ident(s)) = self.peek() {
            if RESERVED.contains(&s.as_str()) {
                break;
            }
            names.push(self.expect_ident()?);
        }
        if !annotated {
            return Ok((names, None, true));
        }
        self.expect(&Tok::Colon)?;
        if self.peek_ident() == Some("E_act") {
            self.pos += 1;
            return Ok((names, None, true));
        }
        let ty = self.parse_type()?;
        Ok((names, Some(ty), false))
    }

    fn binder_name(&mut self) -> SynResult<String> {
        let (line, col) = self.here();
        let name = self.expect_ident()?;
        if RESERVED.contains(&name.as_str()) {
            return Err(SyntaxError::Parse {
                line,
                col,
                msg: format!("`{}` is reserved and cannot bind", name),
            });
        }
        Ok(name)
    }

    fn parse_binder_body(
        &mut self,
        names: &[String],
        ty: &SimpleType,
        wrap: impl Fn(String, SimpleType, Formula) -> Formula,
    ) -> SynResult<Formula> {
        self.expect(&Tok::Dot)?;
        for n in names {
            self.scope.push((n.clone(), ty.clone()));
        }
        let body = self.parse_expr();
        for _ in names {
            self.scope.pop();
        }
        let body = body?;
        Ok(names
            .iter()
            .rev()
            .fold(body, |acc, n| wrap(n.clone(), ty.clone(), acc)))
    }

    fn parse_actualist_body(&mut self, names: &[String], univ: bool) -> SynResult<Formula> {
        self.expect(&Tok::Dot)?;
        for n in names {
            self.scope.push((n.clone(), SimpleType::Ent));
        }
        let body = self.parse_expr();
        for _ in names {
            self.scope.pop();
        }
        let body = body?;
        Ok(names.iter().rev().fold(body, |acc, n| {
            if univ {
                Formula::ForallE(n.clone(), Box::new(acc))
            } else {
                Formula::ExistsE(n.clone(), Box::new(acc))
            }
        }))
    }

    fn resolve_ident(&mut self, name: &str, line: u32, col: u32) -> SynResult<Formula> {
        if let Some((_, ty)) = self.scope.iter().rev().find(|(n, _)| n == name) {
            return Ok(Formula::Var(name.to_string(), ty.clone()));
        }
        if let Some(def) = self.defs.iter().find(|d| d.name == name) {
            return Ok(Formula::Const(name.to_string(), def.signature()));
        }
        if name == POSITIVE {
            return Ok(positive_const());
        }
        if self.current_def.as_deref() == Some(name) {
            return Err(SyntaxError::Cyclic { name: name.to_string() });
        }
        Err(SyntaxError::UnknownIdent { line, col, name: name.to_string() })
    }

    fn resolve_operator(&mut self, name: &str) -> SynResult<Formula> {
        let (line, col) = self.here();
        if let Some(def) = self.defs.iter().find(|d| d.name == name) {
            return Ok(Formula::Const(name.to_string(), def.signature()));
        }
        if self.current_def.as_deref() == Some(name) {
            return Err(SyntaxError::Cyclic { name: name.to_string() });
        }
        Err(SyntaxError::UnknownIdent { line, col, name: name.to_string() })
    }

    fn at_end(&self) -> bool {
        self.pos == self.toks.len()
    }
}

/// Parse and typecheck a single formula against a definition environment.
pub fn parse_formula(src: &str, defs: &[Definition]) -> SynResult<Formula> {
    let toks = lex(src, 1)?;
    let mut p = Parser::new(toks, defs, 1);
    let f = p.parse_expr()?;
    if !p.at_end() {
        return p.fail(format!(
            "unexpected {} after a complete formula",
            p.peek().map(|t| t.describe()).unwrap_or_default()
        ));
    }
    typecheck::annotate(&f)
}

// ---- theory files ------------------------------------------------------

/// Parse a complete theory file.
pub fn parse_theory(src: &str) -> SynResult<Theory> {
    parse_theory_seeded(src, &[])
}

/// Parse a theory file on top of ambient definitions. The seeded names are
/// taken (redefinition is a duplicate-name error) and the result's `defs`
/// include them, so expansion works unchanged.
pub fn parse_theory_seeded(src: &str, prelude: &[Definition]) -> SynResult<Theory> {
    let mut lines = src
        .lines()
        .enumerate()
        .map(|(i, l)| (i as u32 + 1, l))
        .filter(|(_, l)| {
            let stripped = match l.find('#') {
                Some(i) => &l[..i],
                None => l,
            };
            !stripped.trim().is_empty()
        });

    let (line_no, first) = match lines.next() {
        Some(x) => x,
        None => {
            return Err(SyntaxError::Parse { line: 1, col: 1, msg: "empty theory file".into() })
        }
    };
    let toks = lex(first, line_no)?;
    let mut p = Parser::new(toks, &[], line_no);
    if !p.eat_keyword("theory") {
        return p.fail("theory files start with `theory NAME frame TAG`");
    }
    let name = p.expect_ident()?;
    if !p.eat_keyword("frame") {
        return p.fail("expected `frame`");
    }
    let tag = p.expect_ident()?;
    let frame = Frame::from_tag(&tag).ok_or(SyntaxError::UnknownFrame { tag })?;
    if !p.at_end() {
        return p.fail("trailing tokens after theory header");
    }

    let mut theory = Theory {
        name,
        frame,
        defs: prelude.to_vec(),
        seeded: prelude.len(),
        axioms: Vec::new(),
        claims: Vec::new(),
    };
    let mut names_seen: Vec<String> = vec![POSITIVE.to_string()];
    names_seen.extend(prelude.iter().map(|d| d.name.clone()));

    for (line_no, line) in lines {
        let toks = lex(line, line_no)?;
        let head = match toks.first() {
            Some(Spanned { tok: Tok::Ident(s), .. }) => s.clone(),
            _ => {
                return Err(SyntaxError::Parse {
                    line: line_no,
                    col: 1,
                    msg: "expected `def`, `axiom`, or `claim`".into(),
                })
            }
        };
        match head.as_str() {
            "def" => parse_def_line(toks, line_no, &mut theory, &mut names_seen)?,
            "axiom" => parse_axiom_line(toks, line_no, &mut theory, &mut names_seen)?,
            "claim" => parse_claim_line(toks, line_no, &mut theory, &mut names_seen)?,
            other => {
                return Err(SyntaxError::Parse {
                    line: line_no,
                    col: 1,
                    msg: format!("expected `def`, `axiom`, or `claim`, found `{}`", other),
                })
            }
        }
    }
    Ok(theory)
}

fn check_fresh(name: &str, seen: &mut Vec<String>) -> SynResult<()> {
    if seen.iter().any(|n| n == name) {
        return Err(SyntaxError::Duplicate { name: name.to_string() });
    }
    seen.push(name.to_string());
    Ok(())
}

fn parse_def_line(
    toks: Vec<Spanned>,
    line_no: u32,
    theory: &mut Theory,
    seen: &mut Vec<String>,
) -> SynResult<()> {
    let mut p = Parser::new(toks, &theory.defs, line_no);
    p.pos += 1; // def
    let name = match p.next() {
        Some(Spanned { tok: Tok::Ident(s), .. }) => s,
        Some(Spanned { tok: Tok::SubOp, .. }) => "c=".to_string(),
        Some(Spanned { tok: Tok::EntailOp, .. }) => "=>".to_string(),
        Some(Spanned { tok: Tok::MeetOp, .. }) => "/\\".to_string(),
        _ => return p.fail("expected a definition name"),
    };
    check_fresh(&name, seen)?;
    let mut params = Vec::new();
    if p.peek() == Some(&Tok::LParen) {
        p.pos += 1;
        loop {
            let pname = p.expect_ident()?;
            p.expect(&Tok::Colon)?;
            let ty = p.parse_type()?;
            params.push((pname, ty));
            match p.next() {
                Some(Spanned { tok: Tok::Comma, .. }) => continue,
                Some(Spanned { tok: Tok::RParen, .. }) => break,
                _ => return p.fail("expected `,` or `)` in the parameter list"),
            }
        }
    }
    p.expect(&Tok::Assign)?;
    for (n, t) in &params {
        p.scope.push((n.clone(), t.clone()));
    }
    p.current_def = Some(name.clone());
    let body = p.parse_expr()?;
    if !p.at_end() {
        return p.fail("trailing tokens after the definition body");
    }
    let body = typecheck::annotate(&body)?;
    let result = typecheck::typecheck(&body).map_err(|e| type_err_in(&name, e))?;
    theory.defs.push(Definition { name, params, body, result });
    Ok(())
}

fn parse_axiom_line(
    toks: Vec<Spanned>,
    line_no: u32,
    theory: &mut Theory,
    seen: &mut Vec<String>,
) -> SynResult<()> {
    let mut p = Parser::new(toks, &theory.defs, line_no);
    p.pos += 1; // axiom
    let name = p.expect_ident()?;
    check_fresh(&name, seen)?;
    p.expect(&Tok::Colon)?;
    let body = p.parse_expr()?;
    if !p.at_end() {
        return p.fail("trailing tokens after the axiom");
    }
    let body = typecheck::annotate(&body)?;
    expect_prop(&name, &body)?;
    theory.axioms.push((name, body.ensure_global()));
    Ok(())
}

fn parse_claim_line(
    toks: Vec<Spanned>,
    line_no: u32,
    theory: &mut Theory,
    seen: &mut Vec<String>,
) -> SynResult<()> {
    let mut p = Parser::new(toks, &theory.defs, line_no);
    p.pos += 1; // claim
    let name = p.expect_ident()?;
    check_fresh(&name, seen)?;
    let kind_word = p.expect_ident()?;
    let base_kind = match kind_word.as_str() {
        "valid" => ClaimKind::Valid,
        "countersat" => ClaimKind::Countersat,
        "consistent" => ClaimKind::Consistent,
        other => return p.fail(format!("unknown claim kind `{}`", other)),
    };
    if !p.eat_keyword("bounds") {
        return p.fail("expected `bounds`");
    }
    let mut bounds = Vec::new();
    while p.peek() == Some(&Tok::LParen) {
        p.pos += 1;
        let w = match p.next() {
            Some(Spanned { tok: Tok::Int(n), .. }) if n >= 1 => n,
            _ => return p.fail("expected a world count of at least 1"),
        };
        p.expect(&Tok::Comma)?;
        let e = match p.next() {
            Some(Spanned { tok: Tok::Int(n), .. }) if n >= 1 => n,
            _ => return p.fail("expected an entity count of at least 1"),
        };
        p.expect(&Tok::RParen)?;
        bounds.push((w, e));
    }
    if bounds.is_empty() {
        return p.fail("expected at least one `(worlds,entities)` bound");
    }
    let frame_override = if p.eat_keyword("frame") {
        let tag = p.expect_ident()?;
        Some(Frame::from_tag(&tag).ok_or(SyntaxError::UnknownFrame { tag })?)
    } else {
        None
    };

    let (conjecture, premises) = if p.peek() == Some(&Tok::Colon) {
        if base_kind == ClaimKind::Consistent {
            return p.fail("consistency claims carry no conjecture");
        }
        p.pos += 1;
        let body = p.parse_expr()?;
        let body = typecheck::annotate(&body)?;
        expect_prop(&name, &body)?;
        let mut premises = Vec::new();
        if p.eat_keyword("from") {
            while p.peek_ident().is_some() {
                premises.push(p.expect_ident()?);
            }
            if premises.is_empty() {
                return p.fail("expected premise names after `from`");
            }
        }
        if !p.at_end() {
            return p.fail("trailing tokens after the claim");
        }
        (Some(body.ensure_global()), premises)
    } else {
        if base_kind != ClaimKind::Consistent {
            return p.fail("expected `:` and a conjecture");
        }
        if !p.at_end() {
            return p.fail("trailing tokens after the claim");
        }
        (None, Vec::new())
    };

    let kind = match (&base_kind, premises.is_empty()) {
        (ClaimKind::Valid, false) => ClaimKind::Edge,
        (ClaimKind::Countersat, false) => {
            return p.fail("`from` premises only make sense on validity claims")
        }
        _ => base_kind,
    };

    for prem in &premises {
        let known = theory.axioms.iter().any(|(n, _)| n == prem)
            || theory.claims.iter().any(|c| c.name == *prem && c.conjecture.is_some());
        if !known {
            return Err(SyntaxError::UnknownPremise { claim: name, name: prem.clone() });
        }
    }

    theory.claims.push(Claim { name, kind, premises, conjecture, bounds, frame_override });
    Ok(())
}

fn expect_prop(name: &str, f: &Formula) -> SynResult<()> {
    let ty = typecheck::typecheck(f).map_err(|e| type_err_in(name, e))?;
    if ty != SimpleType::Prop {
        return Err(SyntaxError::Type {
            path: name.to_string(),
            msg: format!("expected a proposition, found type `{}`", ty),
        });
    }
    Ok(())
}

fn type_err_in(name: &str, e: SyntaxError) -> SyntaxError {
    match e {
        SyntaxError::Type { path, msg } => {
            SyntaxError::Type { path: format!("{}: {}", name, path), msg }
        }
        other => other,
    }
}
