//! Textual model format, one section per line:
//!
//! ```text
//! # countermodel
//! worlds 2
//! entities 1
//! r (i1,i1) (i2,i1) (i2,i2)
//! existsAt (e1,i1) (e1,i2)
//! P i1 : [(e1,i1),(e1,i2)] [(e1,i1)]
//! P i2 : [(e1,i1),(e1,i2)] [(e1,i2)]
//! ```
//!
//! `r` pairs are (source, target) worlds; `existsAt` pairs are (entity,
//! world); each `[...]` is one intension as its set of (entity, world)
//! pairs. Printing is canonical: sections in the order above, pairs and
//! intensions sorted, so equal models print byte-identically.

use std::fmt::Write as _;

use crate::syntax::lex::{lex, Spanned, Tok};

use super::model::{entity_name, world_name, KripkeModel, ModelError};

struct Cursor {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Cursor {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn line(&self) -> u32 {
        self.toks.get(self.pos.min(self.toks.len().saturating_sub(1))).map_or(0, |s| s.line)
    }

    fn next(&mut self) -> Option<&Spanned> {
        let s = self.toks.get(self.pos);
        self.pos += s.is_some() as usize;
        s
    }

    fn fail<T>(&self, msg: impl Into<String>) -> Result<T, ModelError> {
        Err(ModelError::File { line: self.line(), msg: msg.into() })
    }

    fn expect_keyword(&mut self, word: &str) -> Result<(), ModelError> {
        match self.peek() {
            Some(Tok::Ident(s)) if s == word => {
                self.next();
                Ok(())
            }
            Some(t) => {
                let found = t.describe();
                self.fail(format!("expected `{}`, found {}", word, found))
            }
            None => self.fail(format!("expected `{}`, found end of file", word)),
        }
    }

    fn expect_count(&mut self, what: &str) -> Result<usize, ModelError> {
        match self.peek() {
            Some(&Tok::Int(n)) => {
                self.next();
                Ok(n as usize)
            }
            _ => self.fail(format!("expected a {} count", what)),
        }
    }

    fn expect_tok(&mut self, want: Tok) -> Result<(), ModelError> {
        match self.peek() {
            Some(t) if *t == want => {
                self.next();
                Ok(())
            }
            Some(t) => {
                let found = t.describe();
                self.fail(format!("expected {}, found {}", want.describe(), found))
            }
            None => self.fail(format!("expected {}, found end of file", want.describe())),
        }
    }

    fn expect_label(&mut self, prefix: char, count: usize) -> Result<usize, ModelError> {
        match self.peek() {
            Some(Tok::Ident(s)) => match super::model::parse_label(s, prefix, count) {
                Some(k) => {
                    self.next();
                    Ok(k)
                }
                None => {
                    let s = s.clone();
                    self.fail(format!(
                        "`{}` is not a label in {}1..{}{}",
                        s, prefix, prefix, count
                    ))
                }
            },
            _ => self.fail(format!("expected a {}-label", prefix)),
        }
    }

    /// Parse `(X,Y)` with the given label prefixes.
    fn expect_pair(
        &mut self,
        pa: char,
        ca: usize,
        pb: char,
        cb: usize,
    ) -> Result<(usize, usize), ModelError> {
        self.expect_tok(Tok::LParen)?;
        let a = self.expect_label(pa, ca)?;
        self.expect_tok(Tok::Comma)?;
        let b = self.expect_label(pb, cb)?;
        self.expect_tok(Tok::RParen)?;
        Ok((a, b))
    }
}

/// Parse a model file. Sections must appear in canonical order; `P` lines
/// may be omitted for worlds where P is empty.
pub fn parse_model(src: &str) -> Result<KripkeModel, ModelError> {
    let stripped: String = src
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .collect::<Vec<_>>()
        .join("\n");
    let toks = lex(&stripped, 1)
        .map_err(|e| ModelError::File { line: 0, msg: e.to_string() })?;
    let mut c = Cursor { toks, pos: 0 };

    c.expect_keyword("worlds")?;
    let worlds = c.expect_count("world")?;
    c.expect_keyword("entities")?;
    let entities = c.expect_count("entity")?;
    if worlds == 0 || entities == 0 || worlds > 64 || entities > 64 {
        return c.fail("world and entity counts must be between 1 and the model caps");
    }

    c.expect_keyword("r")?;
    let mut succ = vec![0u64; worlds];
    while c.peek() == Some(&Tok::LParen) {
        let (w, v) = c.expect_pair('i', worlds, 'i', worlds)?;
        succ[w] |= 1 << v;
    }

    c.expect_keyword("existsAt")?;
    let mut exists = 0u64;
    while c.peek() == Some(&Tok::LParen) {
        let (e, w) = c.expect_pair('e', entities, 'i', worlds)?;
        exists |= 1 << (e * worlds + w);
    }

    let mut pos = vec![Vec::new(); worlds];
    let mut seen = vec![false; worlds];
    while matches!(c.peek(), Some(Tok::Ident(s)) if s == "P") {
        c.next();
        let w = c.expect_label('i', worlds)?;
        if seen[w] {
            return c.fail(format!("duplicate `P {}` line", world_name(w)));
        }
        seen[w] = true;
        c.expect_tok(Tok::Colon)?;
        while c.peek() == Some(&Tok::LBrack) {
            c.next();
            let mut ix = 0u64;
            while c.peek() == Some(&Tok::LParen) {
                let (e, v) = c.expect_pair('e', entities, 'i', worlds)?;
                ix |= 1 << (e * worlds + v);
                if c.peek() == Some(&Tok::Comma) {
                    c.next();
                }
            }
            c.expect_tok(Tok::RBrack)?;
            pos[w].push(ix);
        }
    }

    if c.pos != c.toks.len() {
        return c.fail("unexpected trailing input");
    }
    KripkeModel::new(worlds, entities, succ, exists, pos)
}

/// Render one intension as its sorted (entity, world) pair list.
pub fn print_intension(m: &KripkeModel, ix: u64) -> String {
    let mut out = String::from("[");
    let mut first = true;
    for e in 0..m.entities() {
        for w in 0..m.worlds() {
            if ix >> (e * m.worlds() + w) & 1 != 0 {
                if !first {
                    out.push(',');
                }
                let _ = write!(out, "({},{})", entity_name(e), world_name(w));
                first = false;
            }
        }
    }
    out.push(']');
    out
}

/// Canonical text for a model; `parse_model` inverts it.
pub fn print_model(m: &KripkeModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "worlds {}", m.worlds());
    let _ = writeln!(out, "entities {}", m.entities());

    out.push('r');
    for w in 0..m.worlds() {
        for v in 0..m.worlds() {
            if m.succ(w) >> v & 1 != 0 {
                let _ = write!(out, " ({},{})", world_name(w), world_name(v));
            }
        }
    }
    out.push('\n');

    out.push_str("existsAt");
    for e in 0..m.entities() {
        for w in 0..m.worlds() {
            if m.exists_at(e, w) {
                let _ = write!(out, " ({},{})", entity_name(e), world_name(w));
            }
        }
    }
    out.push('\n');

    for w in 0..m.worlds() {
        let _ = write!(out, "P {} :", world_name(w));
        for &ix in m.pos(w) {
            out.push(' ');
            out.push_str(&print_intension(m, ix));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const PAPER_MODEL: &str = "\
# two worlds, one entity
worlds 2
entities 1
r (i1,i1) (i2,i1) (i2,i2)
existsAt (e1,i1) (e1,i2)
P i1 : [(e1,i1)] [(e1,i1),(e1,i2)]
P i2 : [(e1,i2)] [(e1,i1),(e1,i2)]
";

    #[test]
    fn parses_the_two_world_countermodel() {
        let m = parse_model(PAPER_MODEL).unwrap();
        assert_eq!(m.worlds(), 2);
        assert_eq!(m.entities(), 1);
        assert_eq!(m.succ_rows(), &[0b01, 0b11]);
        assert_eq!(m.exists_bits(), 0b11);
        assert_eq!(m.pos(0), &[0b01, 0b11]);
        assert_eq!(m.pos(1), &[0b10, 0b11]);
    }

    #[test]
    fn printing_then_parsing_is_identity() {
        let m = parse_model(PAPER_MODEL).unwrap();
        let text = print_model(&m);
        let again = parse_model(&text).unwrap();
        assert_eq!(m, again);
        assert_eq!(print_model(&again), text);
    }

    #[test]
    fn printing_is_canonical_for_unsorted_input() {
        let scrambled = "\
worlds 2
entities 1
r (i2,i2) (i1,i1) (i2,i1)
existsAt (e1,i2) (e1,i1)
P i2 : [(e1,i1),(e1,i2)] [(e1,i2)]
P i1 : [(e1,i1),(e1,i2)] [(e1,i1)]
";
        let a = parse_model(PAPER_MODEL).unwrap();
        let b = parse_model(scrambled).unwrap();
        assert_eq!(print_model(&a), print_model(&b));
    }

    #[test]
    fn sections_may_be_empty() {
        let m = parse_model("worlds 1\nentities 2\nr\nexistsAt\n").unwrap();
        assert_eq!(m.succ(0), 0);
        assert_eq!(m.exists_bits(), 0);
        assert_eq!(m.pos(0), &[] as &[u64]);
        let text = print_model(&m);
        assert_eq!(parse_model(&text).unwrap(), m);
    }

    #[test]
    fn empty_intension_brackets_parse() {
        let m = parse_model("worlds 1\nentities 1\nr\nexistsAt\nP i1 : []\n").unwrap();
        assert_eq!(m.pos(0), &[0b0]);
        assert_eq!(print_intension(&m, 0), "[]");
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = parse_model("worlds 2\nentities 1\nr (i3,i1)\nexistsAt\n").unwrap_err();
        match e {
            ModelError::File { line, msg } => {
                assert_eq!(line, 3);
                assert!(msg.contains("i3"), "{}", msg);
            }
            other => panic!("unexpected error {:?}", other),
        }
        let e = parse_model("worlds 2\nentities 1\nexistsAt\n").unwrap_err();
        assert!(matches!(e, ModelError::File { .. }));
        let e = parse_model("worlds 1\nentities 1\nr\nexistsAt\nP i1 :\nP i1 :\n").unwrap_err();
        assert!(e.to_string().contains("duplicate"), "{}", e);
    }
}
