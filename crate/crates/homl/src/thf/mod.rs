//! Export of theories as typed higher-order TPTP problems, one file per
//! claim, plus a minimal reader used to validate the exported files.

pub mod export;
pub mod reader;

pub use export::{export_theory, ThfProblem};
pub use reader::{check_problem, parse_problem, ThfError};
