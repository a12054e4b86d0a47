//! Tokenizer shared by the formula and theory-file parsers.
//!
//! ASCII is canonical. A handful of unicode aliases are accepted on input and
//! never produced on output.

use super::{SynResult, SyntaxError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    /// Identifier or word keyword. Primes are legal after the first character,
    /// so axiom names like `A2''` lex as single tokens.
    Ident(String),
    Int(u32),
    LParen,
    RParen,
    LBrack,
    RBrack,
    Lambda,
    Colon,
    Assign,
    Dot,
    Comma,
    Tilde,
    Amp,
    Pipe,
    Arrow,
    IffOp,
    EqOp,
    NeqOp,
    /// `c=` : sub-property / set inclusion (a definition name).
    SubOp,
    /// `=>` : necessary entailment (a definition name).
    EntailOp,
    /// `/\` : binary meet (a definition name).
    MeetOp,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{}`", s),
            Tok::Int(n) => format!("`{}`", n),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrack => "`[`".into(),
            Tok::RBrack => "`]`".into(),
            Tok::Lambda => "`\\`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Assign => "`:=`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Tilde => "`~`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Pipe => "`|`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::IffOp => "`<->`".into(),
            Tok::EqOp => "`=`".into(),
            Tok::NeqOp => "`!=`".into(),
            Tok::SubOp => "`c=`".into(),
            Tok::EntailOp => "`=>`".into(),
            Tok::MeetOp => "`/\\`".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Spanned {
    pub tok: Tok,
    pub line: u32,
    pub col: u32,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

/// Tokenize one source string. `line` is the 1-based line number reported in
/// errors; newlines inside `src` bump it. A `#` starts a comment to end of line.
pub fn lex(src: &str, mut line: u32) -> SynResult<Vec<Spanned>> {
    let mut out = Vec::new();
    let mut chars = src.chars().peekable();
    let mut col: u32 = 1;

    macro_rules! push {
        ($tok:expr, $c:expr) => {
            out.push(Spanned { tok: $tok, line, col: $c })
        };
    }

    while let Some(&c) = chars.peek() {
        let start = col;
        let bump = |chars: &mut std::iter::Peekable<std::str::Chars>, col: &mut u32| {
            chars.next();
            *col += 1;
        };
        match c {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => bump(&mut chars, &mut col),
            '#' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                }
            }
            '(' => {
                bump(&mut chars, &mut col);
                push!(Tok::LParen, start);
            }
            ')' => {
                bump(&mut chars, &mut col);
                push!(Tok::RParen, start);
            }
            '[' | '\u{230a}' => {
                bump(&mut chars, &mut col);
                push!(Tok::LBrack, start);
            }
            ']' | '\u{230b}' => {
                bump(&mut chars, &mut col);
                push!(Tok::RBrack, start);
            }
            '\\' | '\u{3bb}' => {
                bump(&mut chars, &mut col);
                push!(Tok::Lambda, start);
            }
            '.' => {
                bump(&mut chars, &mut col);
                push!(Tok::Dot, start);
            }
            ',' => {
                bump(&mut chars, &mut col);
                push!(Tok::Comma, start);
            }
            '~' | '\u{ac}' => {
                bump(&mut chars, &mut col);
                push!(Tok::Tilde, start);
            }
            '&' | '\u{2227}' => {
                bump(&mut chars, &mut col);
                push!(Tok::Amp, start);
            }
            '|' | '\u{2228}' => {
                bump(&mut chars, &mut col);
                push!(Tok::Pipe, start);
            }
            ':' => {
                bump(&mut chars, &mut col);
                if chars.peek() == Some(&'=') {
                    bump(&mut chars, &mut col);
                    push!(Tok::Assign, start);
                } else {
                    push!(Tok::Colon, start);
                }
            }
            '-' | '\u{2192}' => {
                bump(&mut chars, &mut col);
                if c == '-' {
                    if chars.peek() == Some(&'>') {
                        bump(&mut chars, &mut col);
                        push!(Tok::Arrow, start);
                    } else {
                        return Err(SyntaxError::Parse {
                            line,
                            col: start,
                            msg: "expected `->`".into(),
                        });
                    }
                } else {
                    push!(Tok::Arrow, start);
                }
            }
            '<' | '\u{2194}' => {
                bump(&mut chars, &mut col);
                if c == '<' {
                    if chars.peek() == Some(&'-') {
                        bump(&mut chars, &mut col);
                        if chars.peek() == Some(&'>') {
                            bump(&mut chars, &mut col);
                            push!(Tok::IffOp, start);
                        } else {
                            return Err(SyntaxError::Parse {
                                line,
                                col: start,
                                msg: "expected `<->`".into(),
                            });
                        }
                    } else {
                        return Err(SyntaxError::Parse {
                            line,
                            col: start,
                            msg: "expected `<->`".into(),
                        });
                    }
                } else {
                    push!(Tok::IffOp, start);
                }
            }
            '=' | '\u{21db}' => {
                bump(&mut chars, &mut col);
                if c == '=' {
                    if chars.peek() == Some(&'>') {
                        bump(&mut chars, &mut col);
                        push!(Tok::EntailOp, start);
                    } else {
                        push!(Tok::EqOp, start);
                    }
                } else {
                    push!(Tok::EntailOp, start);
                }
            }
            '!' | '\u{2260}' => {
                bump(&mut chars, &mut col);
                if c == '!' {
                    if chars.peek() == Some(&'=') {
                        bump(&mut chars, &mut col);
                        push!(Tok::NeqOp, start);
                    } else {
                        return Err(SyntaxError::Parse {
                            line,
                            col: start,
                            msg: "expected `!=`".into(),
                        });
                    }
                } else {
                    push!(Tok::NeqOp, start);
                }
            }
            '/' | '\u{2293}' => {
                bump(&mut chars, &mut col);
                if c == '/' {
                    if chars.peek() == Some(&'\\') {
                        bump(&mut chars, &mut col);
                        push!(Tok::MeetOp, start);
                    } else {
                        return Err(SyntaxError::Parse {
                            line,
                            col: start,
                            msg: "expected `/\\`".into(),
                        });
                    }
                } else {
                    push!(Tok::MeetOp, start);
                }
            }
            '\u{2291}' | '\u{2286}' => {
                bump(&mut chars, &mut col);
                push!(Tok::SubOp, start);
            }
            '\u{25a1}' => {
                bump(&mut chars, &mut col);
                push!(Tok::Ident("box".into()), start);
            }
            '\u{25c7}' | '\u{2662}' => {
                bump(&mut chars, &mut col);
                push!(Tok::Ident("dia".into()), start);
            }
            '\u{22a4}' => {
                bump(&mut chars, &mut col);
                push!(Tok::Ident("T".into()), start);
            }
            '\u{22a5}' => {
                bump(&mut chars, &mut col);
                push!(Tok::Ident("F".into()), start);
            }
            '\u{2200}' => {
                bump(&mut chars, &mut col);
                push!(Tok::Ident("forall".into()), start);
            }
            '\u{2203}' => {
                bump(&mut chars, &mut col);
                push!(Tok::Ident("exists".into()), start);
            }
            '\u{21c1}' | '\u{2941}' => {
                bump(&mut chars, &mut col);
                push!(Tok::Ident("comp".into()), start);
            }
            '\u{2205}' => {
                bump(&mut chars, &mut col);
                push!(Tok::Ident("emptyset".into()), start);
            }
            c if c.is_ascii_digit() => {
                let mut n: u32 = 0;
                while let Some(&d) = chars.peek() {
                    if let Some(v) = d.to_digit(10) {
                        n = n.saturating_mul(10).saturating_add(v);
                        bump(&mut chars, &mut col);
                    } else {
                        break;
                    }
                }
                push!(Tok::Int(n), start);
            }
            c if is_ident_start(c) => {
                let mut s = String::new();
                while let Some(&d) = chars.peek() {
                    if is_ident_continue(d) {
                        s.push(d);
                        bump(&mut chars, &mut col);
                    } else {
                        break;
                    }
                }
                // `c=` is one token when written without a space.
                if s == "c" && chars.peek() == Some(&'=') {
                    bump(&mut chars, &mut col);
                    push!(Tok::SubOp, start);
                } else {
                    push!(Tok::Ident(s), start);
                }
            }
            other => {
                return Err(SyntaxError::Parse {
                    line,
                    col: start,
                    msg: format!("unexpected character `{}`", other),
                });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(src: &str) -> Vec<Tok> {
        lex(src, 1).unwrap().into_iter().map(|s| s.tok).collect()
    }

    #[test]
    fn operators_lex_greedily() {
        assert_eq!(
            toks("x c= y => z /\\ w"),
            vec![
                Tok::Ident("x".into()),
                Tok::SubOp,
                Tok::Ident("y".into()),
                Tok::EntailOp,
                Tok::Ident("z".into()),
                Tok::MeetOp,
                Tok::Ident("w".into()),
            ]
        );
    }

    #[test]
    fn spaced_c_is_plain_identifier() {
        assert_eq!(
            toks("c = d"),
            vec![Tok::Ident("c".into()), Tok::EqOp, Tok::Ident("d".into())]
        );
    }

    #[test]
    fn primes_stay_inside_identifiers() {
        assert_eq!(toks("A2''"), vec![Tok::Ident("A2''".into())]);
    }

    #[test]
    fn unicode_aliases_map_to_ascii_tokens() {
        assert_eq!(toks("□ ◇ ∀ ∃ ⊑ ⇛ ⊓ ¬ ∧ ∨ → ↔ ≠ ⊤ ⊥"), toks("box dia forall exists c= => /\\ ~ & | -> <-> != T F"));
    }

    #[test]
    fn comments_run_to_end_of_line() {
        assert_eq!(toks("x # y z\nw"), vec![Tok::Ident("x".into()), Tok::Ident("w".into())]);
    }

    #[test]
    fn assign_vs_colon() {
        assert_eq!(toks(":= :"), vec![Tok::Assign, Tok::Colon]);
    }

    #[test]
    fn bad_character_reports_position() {
        let err = lex("x @", 3).unwrap_err();
        assert_eq!(
            err,
            SyntaxError::Parse { line: 3, col: 3, msg: "unexpected character `@`".into() }
        );
    }
}
