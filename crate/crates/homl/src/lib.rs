//! Finite-model workbench for a higher-order modal logic.
//!
//! The library evaluates formulas of a simply typed modal language over
//! finite Kripke models and searches bounded model spaces for witnesses and
//! countermodels. Propositions denote sets of worlds, properties denote
//! world-indexed sets of entities, and the sole built-in constant `P` picks
//! out a set of properties at each world. On top of the evaluator sit a
//! small theory format, a model file format, a proof-net checker, and an
//! exporter to typed higher-order TPTP syntax.

pub mod cli;
pub mod corpus;
pub mod filters;
pub mod modelfind;
pub mod semantics;
pub mod syntax;
pub mod thf;
