//! A small reader for the problems the exporter writes: TPTP syntax
//! restricted to the typed higher-order fragment the translation uses.
//! Parsing is followed by a full type check down to `$o`, so an arity or
//! typing slip in the exporter surfaces here.

use std::collections::HashMap;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ThfError {
    #[error("line {line}: {msg}")]
    Parse { line: u32, msg: String },
    #[error("in `{unit}`: {msg}")]
    Type { unit: String, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Type,
    Axiom,
    Definition,
    Conjecture,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ThfType {
    O,
    TType,
    Base(String),
    Fun(Box<ThfType>, Box<ThfType>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    And,
    Or,
    Implies,
    Iff,
    Eq,
    Neq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quant {
    Forall,
    Exists,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Term {
    True,
    False,
    Const(String),
    Var(String),
    Not(Box<Term>),
    Bin(BinOp, Box<Term>, Box<Term>),
    App(Box<Term>, Box<Term>),
    Quant(Quant, String, ThfType, Box<Term>),
    Lam(String, ThfType, Box<Term>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum UnitBody {
    TypeDecl(String, ThfType),
    Formula(Term),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThfUnit {
    pub name: String,
    pub role: Role,
    pub body: UnitBody,
}

// ---- lexing ----------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    LParen,
    RParen,
    LBracket,
    RBracket,
    Colon,
    Comma,
    Dot,
    At,
    Arrow,
    Bang,
    Question,
    Caret,
    Tilde,
    Amp,
    Pipe,
    Implies,
    Iff,
    Eq,
    Neq,
    Lower(String),
    Upper(String),
    Defined(String),
}

struct Lexed {
    tok: Tok,
    line: u32,
}

fn lex(src: &str) -> Result<Vec<Lexed>, ThfError> {
    let mut out = Vec::new();
    let bytes: Vec<char> = src.chars().collect();
    let mut i = 0;
    let mut line = 1u32;
    let err = |line: u32, msg: String| ThfError::Parse { line, msg };
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            '\n' => {
                line += 1;
                i += 1;
            }
            ' ' | '\t' | '\r' => i += 1,
            '%' => {
                while i < bytes.len() && bytes[i] != '\n' {
                    i += 1;
                }
            }
            '(' => {
                out.push(Lexed { tok: Tok::LParen, line });
                i += 1;
            }
            ')' => {
                out.push(Lexed { tok: Tok::RParen, line });
                i += 1;
            }
            '[' => {
                out.push(Lexed { tok: Tok::LBracket, line });
                i += 1;
            }
            ']' => {
                out.push(Lexed { tok: Tok::RBracket, line });
                i += 1;
            }
            ':' => {
                out.push(Lexed { tok: Tok::Colon, line });
                i += 1;
            }
            ',' => {
                out.push(Lexed { tok: Tok::Comma, line });
                i += 1;
            }
            '.' => {
                out.push(Lexed { tok: Tok::Dot, line });
                i += 1;
            }
            '@' => {
                out.push(Lexed { tok: Tok::At, line });
                i += 1;
            }
            '>' => {
                out.push(Lexed { tok: Tok::Arrow, line });
                i += 1;
            }
            '?' => {
                out.push(Lexed { tok: Tok::Question, line });
                i += 1;
            }
            '^' => {
                out.push(Lexed { tok: Tok::Caret, line });
                i += 1;
            }
            '~' => {
                out.push(Lexed { tok: Tok::Tilde, line });
                i += 1;
            }
            '&' => {
                out.push(Lexed { tok: Tok::Amp, line });
                i += 1;
            }
            '|' => {
                out.push(Lexed { tok: Tok::Pipe, line });
                i += 1;
            }
            '<' => {
                if bytes[i..].starts_with(&['<', '=', '>']) {
                    out.push(Lexed { tok: Tok::Iff, line });
                    i += 3;
                } else {
                    return Err(err(line, "stray `<`".into()));
                }
            }
            '=' => {
                if bytes[i..].starts_with(&['=', '>']) {
                    out.push(Lexed { tok: Tok::Implies, line });
                    i += 2;
                } else {
                    out.push(Lexed { tok: Tok::Eq, line });
                    i += 1;
                }
            }
            '!' => {
                if bytes[i..].starts_with(&['!', '=']) {
                    out.push(Lexed { tok: Tok::Neq, line });
                    i += 2;
                } else {
                    out.push(Lexed { tok: Tok::Bang, line });
                    i += 1;
                }
            }
            '$' => {
                let mut j = i + 1;
                while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == '_') {
                    j += 1;
                }
                if j == i + 1 {
                    return Err(err(line, "stray `$`".into()));
                }
                out.push(Lexed { tok: Tok::Defined(bytes[i..j].iter().collect()), line });
                i = j;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut j = i;
                while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == '_') {
                    j += 1;
                }
                let word: String = bytes[i..j].iter().collect();
                let tok = if c.is_ascii_uppercase() { Tok::Upper(word) } else { Tok::Lower(word) };
                out.push(Lexed { tok, line });
                i = j;
            }
            other => return Err(err(line, format!("unexpected character `{}`", other))),
        }
    }
    Ok(out)
}

// ---- parsing ---------------------------------------------------------------

struct Parser {
    toks: Vec<Lexed>,
    pos: usize,
}

impl Parser {
    fn line(&self) -> u32 {
        self.toks.get(self.pos).or_else(|| self.toks.last()).map(|l| l.line).unwrap_or(1)
    }

    fn fail<T>(&self, msg: impl Into<String>) -> Result<T, ThfError> {
        Err(ThfError::Parse { line: self.line(), msg: msg.into() })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|l| &l.tok)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|l| l.tok.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, t: &Tok) -> Result<(), ThfError> {
        if self.peek() == Some(t) {
            self.pos += 1;
            Ok(())
        } else {
            self.fail(format!("expected {:?}", t))
        }
    }

    fn expect_lower(&mut self) -> Result<String, ThfError> {
        match self.next() {
            Some(Tok::Lower(s)) => Ok(s),
            _ => self.fail("expected a lowercase name"),
        }
    }

    fn parse_type(&mut self) -> Result<ThfType, ThfError> {
        let left = match self.next() {
            Some(Tok::Defined(d)) if d == "$o" => ThfType::O,
            Some(Tok::Defined(d)) if d == "$tType" => ThfType::TType,
            Some(Tok::Lower(n)) => ThfType::Base(n),
            Some(Tok::LParen) => {
                let t = self.parse_type()?;
                self.expect(&Tok::RParen)?;
                t
            }
            _ => return self.fail("expected a type"),
        };
        if self.peek() == Some(&Tok::Arrow) {
            self.pos += 1;
            let right = self.parse_type()?;
            Ok(ThfType::Fun(Box::new(left), Box::new(right)))
        } else {
            Ok(left)
        }
    }

    fn parse_binders(&mut self) -> Result<Vec<(String, ThfType)>, ThfError> {
        self.expect(&Tok::LBracket)?;
        let mut out = Vec::new();
        loop {
            let v = match self.next() {
                Some(Tok::Upper(v)) => v,
                _ => return self.fail("expected a variable"),
            };
            self.expect(&Tok::Colon)?;
            let t = self.parse_type()?;
            out.push((v, t));
            match self.next() {
                Some(Tok::Comma) => continue,
                Some(Tok::RBracket) => break,
                _ => return self.fail("expected `,` or `]`"),
            }
        }
        self.expect(&Tok::Colon)?;
        Ok(out)
    }

    fn parse_unit_term(&mut self) -> Result<Term, ThfError> {
        match self.next() {
            Some(Tok::Defined(d)) if d == "$true" => Ok(Term::True),
            Some(Tok::Defined(d)) if d == "$false" => Ok(Term::False),
            Some(Tok::Lower(n)) => Ok(Term::Const(n)),
            Some(Tok::Upper(v)) => Ok(Term::Var(v)),
            Some(Tok::Tilde) => Ok(Term::Not(Box::new(self.parse_unit_term()?))),
            Some(Tok::Bang) => self.parse_binder_term(|v, t, b| {
                Term::Quant(Quant::Forall, v, t, Box::new(b))
            }),
            Some(Tok::Question) => self.parse_binder_term(|v, t, b| {
                Term::Quant(Quant::Exists, v, t, Box::new(b))
            }),
            Some(Tok::Caret) => {
                self.parse_binder_term(|v, t, b| Term::Lam(v, t, Box::new(b)))
            }
            Some(Tok::LParen) => {
                let first = self.parse_unit_term()?;
                match self.peek() {
                    Some(Tok::RParen) => {
                        self.pos += 1;
                        Ok(first)
                    }
                    Some(Tok::At) => {
                        let mut acc = first;
                        while self.peek() == Some(&Tok::At) {
                            self.pos += 1;
                            let arg = self.parse_unit_term()?;
                            acc = Term::App(Box::new(acc), Box::new(arg));
                        }
                        self.expect(&Tok::RParen)?;
                        Ok(acc)
                    }
                    Some(op) => {
                        let op = match op {
                            Tok::Amp => BinOp::And,
                            Tok::Pipe => BinOp::Or,
                            Tok::Implies => BinOp::Implies,
                            Tok::Iff => BinOp::Iff,
                            Tok::Eq => BinOp::Eq,
                            Tok::Neq => BinOp::Neq,
                            _ => return self.fail("expected a connective, `@`, or `)`"),
                        };
                        self.pos += 1;
                        let second = self.parse_unit_term()?;
                        self.expect(&Tok::RParen)?;
                        Ok(Term::Bin(op, Box::new(first), Box::new(second)))
                    }
                    None => self.fail("unclosed `(`"),
                }
            }
            _ => self.fail("expected a term"),
        }
    }

    fn parse_binder_term(
        &mut self,
        build: impl Fn(String, ThfType, Term) -> Term,
    ) -> Result<Term, ThfError> {
        let binders = self.parse_binders()?;
        let body = self.parse_unit_term()?;
        Ok(binders.into_iter().rev().fold(body, |acc, (v, t)| build(v, t, acc)))
    }
}

/// Parses a whole problem file into annotated units.
pub fn parse_problem(src: &str) -> Result<Vec<ThfUnit>, ThfError> {
    let mut p = Parser { toks: lex(src)?, pos: 0 };
    let mut out = Vec::new();
    while p.peek().is_some() {
        let kw = p.expect_lower()?;
        if kw != "thf" {
            return p.fail("expected `thf`");
        }
        p.expect(&Tok::LParen)?;
        let name = p.expect_lower()?;
        p.expect(&Tok::Comma)?;
        let role = match p.expect_lower()?.as_str() {
            "type" => Role::Type,
            "axiom" => Role::Axiom,
            "definition" => Role::Definition,
            "conjecture" => Role::Conjecture,
            other => return p.fail(format!("unknown role `{}`", other)),
        };
        p.expect(&Tok::Comma)?;
        let body = if role == Role::Type {
            let symbol = p.expect_lower()?;
            p.expect(&Tok::Colon)?;
            UnitBody::TypeDecl(symbol, p.parse_type()?)
        } else {
            UnitBody::Formula(p.parse_unit_term()?)
        };
        p.expect(&Tok::RParen)?;
        p.expect(&Tok::Dot)?;
        out.push(ThfUnit { name, role, body });
    }
    Ok(out)
}

// ---- type checking ---------------------------------------------------------

fn type_err<T>(unit: &str, msg: impl Into<String>) -> Result<T, ThfError> {
    Err(ThfError::Type { unit: unit.to_string(), msg: msg.into() })
}

fn check_type_wf(t: &ThfType, bases: &[String], unit: &str) -> Result<(), ThfError> {
    match t {
        ThfType::O => Ok(()),
        ThfType::TType => type_err(unit, "$tType cannot appear inside a type"),
        ThfType::Base(n) => {
            if bases.iter().any(|b| b == n) {
                Ok(())
            } else {
                type_err(unit, format!("undeclared base type `{}`", n))
            }
        }
        ThfType::Fun(a, b) => {
            check_type_wf(a, bases, unit)?;
            check_type_wf(b, bases, unit)
        }
    }
}

fn infer(
    t: &Term,
    consts: &HashMap<String, ThfType>,
    vars: &mut Vec<(String, ThfType)>,
    bases: &[String],
    unit: &str,
) -> Result<ThfType, ThfError> {
    match t {
        Term::True | Term::False => Ok(ThfType::O),
        Term::Const(n) => match consts.get(n) {
            Some(t) => Ok(t.clone()),
            None => type_err(unit, format!("undeclared symbol `{}`", n)),
        },
        Term::Var(v) => match vars.iter().rev().find(|(n, _)| n == v) {
            Some((_, t)) => Ok(t.clone()),
            None => type_err(unit, format!("unbound variable `{}`", v)),
        },
        Term::Not(a) => {
            expect_o(infer(a, consts, vars, bases, unit)?, unit)?;
            Ok(ThfType::O)
        }
        Term::Bin(op, a, b) => {
            let ta = infer(a, consts, vars, bases, unit)?;
            let tb = infer(b, consts, vars, bases, unit)?;
            match op {
                BinOp::Eq | BinOp::Neq => {
                    if ta != tb {
                        return type_err(unit, "equality between different types");
                    }
                }
                _ => {
                    expect_o(ta, unit)?;
                    expect_o(tb, unit)?;
                }
            }
            Ok(ThfType::O)
        }
        Term::App(f, x) => {
            let tf = infer(f, consts, vars, bases, unit)?;
            let tx = infer(x, consts, vars, bases, unit)?;
            match tf {
                ThfType::Fun(param, result) => {
                    if *param != tx {
                        type_err(unit, "argument type mismatch")
                    } else {
                        Ok(*result)
                    }
                }
                _ => type_err(unit, "application of a non-function"),
            }
        }
        Term::Quant(_, v, t, body) => {
            check_type_wf(t, bases, unit)?;
            vars.push((v.clone(), t.clone()));
            let tb = infer(body, consts, vars, bases, unit)?;
            vars.pop();
            expect_o(tb, unit)?;
            Ok(ThfType::O)
        }
        Term::Lam(v, t, body) => {
            check_type_wf(t, bases, unit)?;
            vars.push((v.clone(), t.clone()));
            let tb = infer(body, consts, vars, bases, unit)?;
            vars.pop();
            Ok(ThfType::Fun(Box::new(t.clone()), Box::new(tb)))
        }
    }
}

fn expect_o(t: ThfType, unit: &str) -> Result<(), ThfError> {
    if t == ThfType::O {
        Ok(())
    } else {
        type_err(unit, "expected a formula of type $o")
    }
}

/// Parses and fully type checks a problem: every symbol declared before
/// use, every application well-typed, every formula of type `$o`, and
/// exactly one conjecture.
pub fn check_problem(src: &str) -> Result<Vec<ThfUnit>, ThfError> {
    let units = parse_problem(src)?;
    let mut consts: HashMap<String, ThfType> = HashMap::new();
    let mut bases: Vec<String> = Vec::new();
    let mut conjectures = 0usize;
    for u in &units {
        match &u.body {
            UnitBody::TypeDecl(symbol, t) => {
                if consts.contains_key(symbol) || bases.iter().any(|b| b == symbol) {
                    return type_err(&u.name, format!("`{}` declared twice", symbol));
                }
                if *t == ThfType::TType {
                    bases.push(symbol.clone());
                } else {
                    check_type_wf(t, &bases, &u.name)?;
                    consts.insert(symbol.clone(), t.clone());
                }
            }
            UnitBody::Formula(f) => {
                let ty = infer(f, &consts, &mut Vec::new(), &bases, &u.name)?;
                expect_o(ty, &u.name)?;
                if u.role == Role::Conjecture {
                    conjectures += 1;
                }
            }
        }
    }
    if conjectures != 1 {
        return type_err("problem", format!("expected one conjecture, found {}", conjectures));
    }
    Ok(units)
}
