//! Finite Kripke models and world-mask evaluation of expanded formulas,
//! including quantification over properties and sets of properties.

pub mod eval;
pub mod model;
pub mod modelfile;
pub mod reduce;

pub use eval::{
    enumerate_domain, eval, holds_globally, propset_space, truth_mask, Assignment, Compiled,
    EvalError, PropSetVal, Value,
};
pub use model::{Bounds, KripkeModel, ModelError, DEFAULT_THIRD_ORDER_LIMIT};
pub use modelfile::{parse_model, print_intension, print_model};
pub use reduce::reduce_conj_of_set;
