//! Surface language: lexing, parsing, printing, typechecking, and definition
//! expansion for the line-oriented theory format.

pub mod ast;
mod expand;
pub(crate) mod lex;
mod parse;
mod print;
mod typecheck;

pub use ast::{Claim, ClaimKind, Definition, Formula, Frame, SimpleType, Theory, POSITIVE};
pub use expand::{expand_definitions, expand_in_theory};
pub use parse::{parse_formula, parse_theory, parse_theory_seeded};
pub use print::{print_formula, print_theory};
pub use typecheck::{typecheck, typecheck_with_context};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SyntaxError {
    #[error("{line}:{col}: {msg}")]
    Parse { line: u32, col: u32, msg: String },

    #[error("{line}:{col}: unknown identifier `{name}`")]
    UnknownIdent { line: u32, col: u32, name: String },

    #[error("duplicate name `{name}`")]
    Duplicate { name: String },

    #[error("definition `{name}` refers to itself")]
    Cyclic { name: String },

    #[error("unknown frame tag `{tag}` (expected k, t, or kb)")]
    UnknownFrame { tag: String },

    #[error("claim `{claim}`: unknown premise `{name}`")]
    UnknownPremise { claim: String, name: String },

    #[error("type error at {path}: {msg}")]
    Type { path: String, msg: String },
}

pub type SynResult<T> = Result<T, SyntaxError>;
