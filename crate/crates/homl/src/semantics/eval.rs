//! World-mask evaluation of fully expanded formulas.
//!
//! A formula is compiled once into a flat node arena (variables become
//! binder levels), then evaluated against any model: every propositional
//! node yields the full mask of worlds where it is true, so modalities are
//! mask algebra over accessibility rows. Quantifiers enumerate their finite
//! domains, except that a set-of-properties quantifier whose space exceeds
//! the configured limit is answered by the conjunction-of-a-set reduction
//! when its body has that shape.

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::syntax::{Formula, SimpleType, POSITIVE};

use super::model::{KripkeModel, DEFAULT_THIRD_ORDER_LIMIT};
use super::reduce;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("{what} exceeds the enumeration limit {limit}")]
    BoundExceeded { what: String, limit: u64 },

    #[error("formula does not have the conjunction-of-a-set shape")]
    PatternMismatch,

    #[error("{msg}")]
    Malformed { msg: String },
}

fn malformed<T>(msg: impl Into<String>) -> Result<T, EvalError> {
    Err(EvalError::Malformed { msg: msg.into() })
}

/// Denotation of a set of properties: the mask of worlds where a given
/// intension is a member. `Positive` defers to the model's interpretation
/// of P; `Table` is indexed by intension mask.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PropSetVal {
    Positive,
    Table(Arc<Vec<u64>>),
}

/// A closed denotation. Truth values and intensions are bit masks in the
/// layouts fixed by `KripkeModel`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Value {
    Ent(u32),
    Truth(u64),
    Intension(u64),
    PropSet(PropSetVal),
}

/// Free-variable bindings for evaluation.
#[derive(Debug, Clone, Default)]
pub struct Assignment {
    entries: Vec<(String, Value)>,
}

impl Assignment {
    pub fn new() -> Assignment {
        Assignment::default()
    }

    pub fn bind(mut self, name: impl Into<String>, v: Value) -> Assignment {
        self.set(name, v);
        self
    }

    pub fn set(&mut self, name: impl Into<String>, v: Value) {
        let name = name.into();
        match self.entries.iter_mut().find(|(n, _)| *n == name) {
            Some(slot) => slot.1 = v,
            None => self.entries.push((name, v)),
        }
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.entries.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }
}

// ---- compilation ---------------------------------------------------------

pub(crate) type NodeId = u32;

/// Arena node. Variables are de Bruijn levels (`Bound`) or slots into the
/// free-variable table (`Free`), so structural equality of closed subtrees
/// is alpha-equivalence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Node {
    Positive,
    Bound(u32),
    Free(u32),
    Top,
    Bot,
    Not(NodeId),
    And(NodeId, NodeId),
    Or(NodeId, NodeId),
    Implies(NodeId, NodeId),
    Iff(NodeId, NodeId),
    Nec(NodeId),
    Dia(NodeId),
    Global(NodeId),
    Compl(NodeId),
    Eq(SimpleType, NodeId, NodeId),
    Neq(SimpleType, NodeId, NodeId),
    App(NodeId, NodeId),
    Lam(SimpleType, NodeId),
    Forall(SimpleType, NodeId),
    Exists(SimpleType, NodeId),
    ForallE(NodeId),
    ExistsE(NodeId),
}

#[derive(Debug, Clone)]
pub(crate) struct Comp {
    pub nodes: Vec<Node>,
    /// Per node: mask of binder levels occurring free beneath it.
    pub uses: Vec<u64>,
    /// Per node: whether any free-variable slot occurs beneath it.
    pub open: Vec<bool>,
    pub free_names: Vec<String>,
    pub root: NodeId,
}

impl Comp {
    fn push(&mut self, node: Node, uses: u64, open: bool) -> NodeId {
        let id = self.nodes.len() as NodeId;
        self.nodes.push(node);
        self.uses.push(uses);
        self.open.push(open);
        id
    }

    fn u(&self, id: NodeId) -> u64 {
        self.uses[id as usize]
    }

    fn o(&self, id: NodeId) -> bool {
        self.open[id as usize]
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id as usize]
    }
}

/// Binder depth cap so level masks fit in a `u64`.
const MAX_DEPTH: usize = 64;

pub(crate) fn compile(f: &Formula) -> Result<Comp, EvalError> {
    let mut comp =
        Comp { nodes: vec![], uses: vec![], open: vec![], free_names: vec![], root: 0 };
    let mut scope: Vec<String> = Vec::new();
    let root = lower(f, &mut scope, &mut comp)?;
    comp.root = root;
    Ok(comp)
}

fn lower(f: &Formula, scope: &mut Vec<String>, c: &mut Comp) -> Result<NodeId, EvalError> {
    use Formula::*;

    let unary = |c: &mut Comp, a: NodeId, make: fn(NodeId) -> Node| {
        let (u, o) = (c.u(a), c.o(a));
        c.push(make(a), u, o)
    };
    let binary = |c: &mut Comp, a: NodeId, b: NodeId, make: fn(NodeId, NodeId) -> Node| {
        let (u, o) = (c.u(a) | c.u(b), c.o(a) || c.o(b));
        c.push(make(a, b), u, o)
    };
    fn binder(
        scope: &mut Vec<String>,
        c: &mut Comp,
        x: &str,
        body: &Formula,
    ) -> Result<(NodeId, u64, bool), EvalError> {
        if scope.len() >= MAX_DEPTH {
            return malformed(format!("more than {} nested binders", MAX_DEPTH));
        }
        let level = scope.len();
        scope.push(x.to_string());
        let b = lower(body, scope, c);
        scope.pop();
        let b = b?;
        Ok((b, c.u(b) & !(1 << level), c.o(b)))
    }

    Ok(match f {
        Const(name, _) if name == POSITIVE => c.push(Node::Positive, 0, false),
        Const(name, _) => {
            return malformed(format!("unexpanded constant `{}`; expand definitions first", name))
        }
        Var(name, _) => match scope.iter().rposition(|s| s == name) {
            Some(level) => c.push(Node::Bound(level as u32), 1 << level, false),
            None => {
                let slot = match c.free_names.iter().position(|s| s == name) {
                    Some(i) => i,
                    None => {
                        c.free_names.push(name.clone());
                        c.free_names.len() - 1
                    }
                };
                c.push(Node::Free(slot as u32), 0, true)
            }
        },
        Top => c.push(Node::Top, 0, false),
        Bot => c.push(Node::Bot, 0, false),
        Not(a) => {
            let a = lower(a, scope, c)?;
            unary(c, a, Node::Not)
        }
        And(a, b) => {
            let (a, b) = (lower(a, scope, c)?, lower(b, scope, c)?);
            binary(c, a, b, Node::And)
        }
        Or(a, b) => {
            let (a, b) = (lower(a, scope, c)?, lower(b, scope, c)?);
            binary(c, a, b, Node::Or)
        }
        Implies(a, b) => {
            let (a, b) = (lower(a, scope, c)?, lower(b, scope, c)?);
            binary(c, a, b, Node::Implies)
        }
        Iff(a, b) => {
            let (a, b) = (lower(a, scope, c)?, lower(b, scope, c)?);
            binary(c, a, b, Node::Iff)
        }
        Nec(a) => {
            let a = lower(a, scope, c)?;
            unary(c, a, Node::Nec)
        }
        Dia(a) => {
            let a = lower(a, scope, c)?;
            unary(c, a, Node::Dia)
        }
        Global(a) => {
            let a = lower(a, scope, c)?;
            unary(c, a, Node::Global)
        }
        Compl(a) => {
            let a = lower(a, scope, c)?;
            unary(c, a, Node::Compl)
        }
        Eq(ann, a, b) | Neq(ann, a, b) => {
            let Some(ty) = ann else {
                return malformed("equality lacks a type annotation; run the typechecker");
            };
            let (a, b) = (lower(a, scope, c)?, lower(b, scope, c)?);
            let (u, o) = (c.u(a) | c.u(b), c.o(a) || c.o(b));
            let node = match f {
                Eq(..) => Node::Eq(ty.clone(), a, b),
                _ => Node::Neq(ty.clone(), a, b),
            };
            c.push(node, u, o)
        }
        App(fun, arg) => {
            let (fun, arg) = (lower(fun, scope, c)?, lower(arg, scope, c)?);
            binary(c, fun, arg, Node::App)
        }
        Lam(x, ty, body) => {
            let (b, u, o) = binder(scope, c, x, body)?;
            c.push(Node::Lam(ty.clone(), b), u, o)
        }
        Forall(x, ty, body) => {
            let (b, u, o) = binder(scope, c, x, body)?;
            c.push(Node::Forall(ty.clone(), b), u, o)
        }
        Exists(x, ty, body) => {
            let (b, u, o) = binder(scope, c, x, body)?;
            c.push(Node::Exists(ty.clone(), b), u, o)
        }
        ForallE(x, body) => {
            let (b, u, o) = binder(scope, c, x, body)?;
            c.push(Node::ForallE(b), u, o)
        }
        ExistsE(x, body) => {
            let (b, u, o) = binder(scope, c, x, body)?;
            c.push(Node::ExistsE(b), u, o)
        }
    })
}

// ---- evaluation ----------------------------------------------------------

/// A formula compiled for repeated evaluation; model-independent.
#[derive(Debug, Clone)]
pub struct Compiled {
    comp: Comp,
}

impl Compiled {
    pub fn new(f: &Formula) -> Result<Compiled, EvalError> {
        Ok(Compiled { comp: compile(f)? })
    }

    pub fn free_names(&self) -> &[String] {
        &self.comp.free_names
    }

    pub(crate) fn comp(&self) -> &Comp {
        &self.comp
    }

    /// Mask of worlds where the formula holds under `a`.
    pub fn truth(&self, m: &KripkeModel, a: &Assignment) -> Result<u64, EvalError> {
        self.truth_limited(m, a, DEFAULT_THIRD_ORDER_LIMIT)
    }

    pub fn truth_limited(
        &self,
        m: &KripkeModel,
        a: &Assignment,
        limit: u64,
    ) -> Result<u64, EvalError> {
        let mut frees = Vec::with_capacity(self.comp.free_names.len());
        for name in &self.comp.free_names {
            match a.get(name) {
                Some(v) => frees.push(v.clone()),
                None => return malformed(format!("unbound variable `{}`", name)),
            }
        }
        let mut ev = Evaluator {
            m,
            limit,
            comp: &self.comp,
            frees,
            stack: Vec::new(),
            memo: HashMap::new(),
        };
        match ev.eval(self.comp.root)? {
            Value::Truth(t) => Ok(t),
            other => malformed(format!("formula evaluates to a non-proposition {:?}", other)),
        }
    }
}

struct Evaluator<'a> {
    m: &'a KripkeModel,
    limit: u64,
    comp: &'a Comp,
    frees: Vec<Value>,
    /// Binder values; index = level.
    stack: Vec<Value>,
    /// Scoped to one `truth` call: quantifier and lambda results keyed by
    /// node and the values of the binder levels they actually use.
    memo: HashMap<(NodeId, Vec<Value>), Value>,
}

impl<'a> Evaluator<'a> {
    fn full(&self) -> u64 {
        self.m.world_mask()
    }

    fn member_worlds(&self, ps: &PropSetVal, ix: u64) -> u64 {
        match ps {
            PropSetVal::Positive => self.m.pos_member_worlds(ix),
            PropSetVal::Table(tab) => tab[ix as usize],
        }
    }

    fn truth_of(&mut self, id: NodeId) -> Result<u64, EvalError> {
        match self.eval(id)? {
            Value::Truth(t) => Ok(t),
            other => malformed(format!("expected a proposition, got {:?}", other)),
        }
    }

    fn intension_of(&mut self, id: NodeId) -> Result<u64, EvalError> {
        match self.eval(id)? {
            Value::Intension(ix) => Ok(ix),
            other => malformed(format!("expected a property, got {:?}", other)),
        }
    }

    fn eval(&mut self, id: NodeId) -> Result<Value, EvalError> {
        let memoable = matches!(
            self.comp.node(id),
            Node::Forall(..)
                | Node::Exists(..)
                | Node::ForallE(..)
                | Node::ExistsE(..)
                | Node::Lam(..)
        );
        if !memoable {
            return self.eval_raw(id);
        }
        let mut key = Vec::new();
        let mut used = self.comp.u(id);
        while used != 0 {
            let level = used.trailing_zeros() as usize;
            key.push(self.stack[level].clone());
            used &= used - 1;
        }
        if let Some(v) = self.memo.get(&(id, key.clone())) {
            return Ok(v.clone());
        }
        let v = self.eval_raw(id)?;
        self.memo.insert((id, key), v.clone());
        Ok(v)
    }

    fn eval_raw(&mut self, id: NodeId) -> Result<Value, EvalError> {
        let full = self.full();
        let n = self.m.worlds();
        match *self.comp.node(id) {
            Node::Positive => Ok(Value::PropSet(PropSetVal::Positive)),
            Node::Bound(level) => Ok(self.stack[level as usize].clone()),
            Node::Free(slot) => Ok(self.frees[slot as usize].clone()),
            Node::Top => Ok(Value::Truth(full)),
            Node::Bot => Ok(Value::Truth(0)),
            Node::Not(a) => {
                let t = self.truth_of(a)?;
                Ok(Value::Truth(full & !t))
            }
            Node::And(a, b) => {
                let (ta, tb) = (self.truth_of(a)?, self.truth_of(b)?);
                Ok(Value::Truth(ta & tb))
            }
            Node::Or(a, b) => {
                let (ta, tb) = (self.truth_of(a)?, self.truth_of(b)?);
                Ok(Value::Truth(ta | tb))
            }
            Node::Implies(a, b) => {
                let (ta, tb) = (self.truth_of(a)?, self.truth_of(b)?);
                Ok(Value::Truth(full & !ta | tb))
            }
            Node::Iff(a, b) => {
                let (ta, tb) = (self.truth_of(a)?, self.truth_of(b)?);
                Ok(Value::Truth(full & !(ta ^ tb)))
            }
            Node::Nec(a) => {
                let t = self.truth_of(a)?;
                let mut out = 0;
                for w in 0..n {
                    if self.m.succ(w) & !t == 0 {
                        out |= 1 << w;
                    }
                }
                Ok(Value::Truth(out))
            }
            Node::Dia(a) => {
                let t = self.truth_of(a)?;
                let mut out = 0;
                for w in 0..n {
                    if self.m.succ(w) & t != 0 {
                        out |= 1 << w;
                    }
                }
                Ok(Value::Truth(out))
            }
            Node::Global(a) => {
                let t = self.truth_of(a)?;
                Ok(Value::Truth(if t == full { full } else { 0 }))
            }
            Node::Compl(a) => {
                let ix = self.intension_of(a)?;
                Ok(Value::Intension(self.m.full_intension() & !ix))
            }
            Node::Eq(_, a, b) | Node::Neq(_, a, b) => {
                let (va, vb) = (self.eval(a)?, self.eval(b)?);
                let eq = self.values_equal(&va, &vb)?;
                let neq = matches!(self.comp.node(id), Node::Neq(..));
                Ok(Value::Truth(if eq != neq { full } else { 0 }))
            }
            Node::App(f, a) => {
                if let Node::Lam(_, body) = *self.comp.node(f) {
                    let va = self.eval(a)?;
                    self.stack.push(va);
                    let r = self.eval(body);
                    self.stack.pop();
                    return r;
                }
                let vf = self.eval(f)?;
                let va = self.eval(a)?;
                match (vf, va) {
                    (Value::Intension(ix), Value::Ent(e)) => {
                        Ok(Value::Truth(ix >> (e as usize * n) & full))
                    }
                    (Value::PropSet(ps), Value::Intension(ix)) => {
                        Ok(Value::Truth(self.member_worlds(&ps, ix)))
                    }
                    (vf, va) => malformed(format!("cannot apply {:?} to {:?}", vf, va)),
                }
            }
            Node::Lam(ref ty, body) => match ty.clone() {
                SimpleType::Ent => {
                    let mut ix = 0;
                    for e in 0..self.m.entities() {
                        self.stack.push(Value::Ent(e as u32));
                        let t = self.truth_of(body);
                        self.stack.pop();
                        ix |= t? << (e * n);
                    }
                    Ok(Value::Intension(ix))
                }
                ty if ty.is_property() => {
                    let count = self.m.intension_count();
                    if count > self.limit {
                        return Err(EvalError::BoundExceeded {
                            what: format!("property table of size {}", count),
                            limit: self.limit,
                        });
                    }
                    let mut tab = Vec::with_capacity(count as usize);
                    for ix in 0..count {
                        self.stack.push(Value::Intension(ix));
                        let t = self.truth_of(body);
                        self.stack.pop();
                        tab.push(t?);
                    }
                    Ok(Value::PropSet(PropSetVal::Table(Arc::new(tab))))
                }
                ty => malformed(format!("cannot evaluate a function over `{}` values", ty)),
            },
            Node::Forall(ref ty, body) => self.quantifier(id, ty.clone(), body, true),
            Node::Exists(ref ty, body) => self.quantifier(id, ty.clone(), body, false),
            Node::ForallE(body) => {
                let mut acc = full;
                for e in 0..self.m.entities() {
                    let guard = self.m.exists_worlds(e);
                    self.stack.push(Value::Ent(e as u32));
                    let t = self.truth_of(body);
                    self.stack.pop();
                    acc &= full & !guard | t?;
                    if acc == 0 {
                        break;
                    }
                }
                Ok(Value::Truth(acc))
            }
            Node::ExistsE(body) => {
                let mut acc = 0;
                for e in 0..self.m.entities() {
                    let guard = self.m.exists_worlds(e);
                    self.stack.push(Value::Ent(e as u32));
                    let t = self.truth_of(body);
                    self.stack.pop();
                    acc |= guard & t?;
                    if acc == full {
                        break;
                    }
                }
                Ok(Value::Truth(acc))
            }
        }
    }

    /// Possibilist quantification: intersect or unite body truth over every
    /// denotation of `ty`.
    fn quantifier(
        &mut self,
        id: NodeId,
        ty: SimpleType,
        body: NodeId,
        universal: bool,
    ) -> Result<Value, EvalError> {
        let full = self.full();
        let mut acc = if universal { full } else { 0 };
        let stop = if universal { 0 } else { full };

        let step = |ev: &mut Self, v: Value, acc: &mut u64| -> Result<bool, EvalError> {
            ev.stack.push(v);
            let t = ev.truth_of(body);
            ev.stack.pop();
            let t = t?;
            if universal {
                *acc &= t;
            } else {
                *acc |= t;
            }
            Ok(*acc == stop)
        };

        match ty {
            SimpleType::Ent => {
                for e in 0..self.m.entities() {
                    if step(self, Value::Ent(e as u32), &mut acc)? {
                        break;
                    }
                }
            }
            SimpleType::Prop => {
                for t in 0..=full {
                    if step(self, Value::Truth(t), &mut acc)? {
                        break;
                    }
                }
            }
            ty if ty.is_property() => {
                for ix in 0..self.m.intension_count() {
                    if step(self, Value::Intension(ix), &mut acc)? {
                        break;
                    }
                }
            }
            ty if ty.is_prop_set() => {
                let space = propset_space(self.m);
                match space.filter(|&s| s <= self.limit) {
                    Some(s) => {
                        for code in 0..s {
                            let tab = table_from_code(self.m, code);
                            let v = Value::PropSet(PropSetVal::Table(Arc::new(tab)));
                            if step(self, v, &mut acc)? {
                                break;
                            }
                        }
                    }
                    None => {
                        // Closed conjunction-of-a-set instances evaluate
                        // without touching the third-order space.
                        if universal
                            && self.comp.u(id) == 0
                            && !self.comp.o(id)
                            && reduce::matches_set_conjunction(self.comp, id, self.stack.len())
                        {
                            return Ok(Value::Truth(reduce::set_conjunction_mask(self.m)));
                        }
                        let bits = self.m.intension_count() * n_u64(self.m.worlds());
                        return Err(EvalError::BoundExceeded {
                            what: format!("third-order quantifier space 2^{}", bits),
                            limit: self.limit,
                        });
                    }
                }
            }
            ty => return malformed(format!("cannot quantify over `{}`", ty)),
        }
        Ok(Value::Truth(acc))
    }

    fn values_equal(&self, a: &Value, b: &Value) -> Result<bool, EvalError> {
        match (a, b) {
            (Value::PropSet(x), Value::PropSet(y)) => {
                Ok((0..self.m.intension_count())
                    .all(|ix| self.member_worlds(x, ix) == self.member_worlds(y, ix)))
            }
            (x, y) => Ok(x == y),
        }
    }
}

fn n_u64(n: usize) -> u64 {
    n as u64
}

/// Number of world-indexed intension sets, when it fits both `u64` and any
/// conceivable enumeration: `2^(intensions * worlds)`.
pub fn propset_space(m: &KripkeModel) -> Option<u64> {
    let bits = m.intension_count().checked_mul(m.worlds() as u64)?;
    if bits <= 63 {
        Some(1 << bits)
    } else {
        None
    }
}

/// Decode one world-indexed intension set. The code is world-major: the
/// membership mask for `i1` occupies the most significant digit, and within
/// a world, bit `ix` marks intension `ix` as a member. Returns the
/// member-worlds table indexed by intension.
pub(crate) fn table_from_code(m: &KripkeModel, code: u64) -> Vec<u64> {
    let n = m.worlds();
    let count = m.intension_count();
    let mut tab = vec![0u64; count as usize];
    for w in 0..n {
        let digit = code >> ((n - 1 - w) as u64 * count) & super::model::mask(count as usize);
        for (ix, entry) in tab.iter_mut().enumerate() {
            if digit >> ix & 1 != 0 {
                *entry |= 1 << w;
            }
        }
    }
    tab
}

// ---- public entry points -------------------------------------------------

/// Truth of `f` at world `w` under assignment `a`.
pub fn eval(m: &KripkeModel, w: usize, a: &Assignment, f: &Formula) -> Result<bool, EvalError> {
    Ok(truth_mask(m, a, f)? >> w & 1 != 0)
}

/// Mask of worlds where `f` holds under `a`.
pub fn truth_mask(m: &KripkeModel, a: &Assignment, f: &Formula) -> Result<u64, EvalError> {
    Compiled::new(f)?.truth(m, a)
}

/// Truth of closed `f` at every world.
pub fn holds_globally(m: &KripkeModel, f: &Formula) -> Result<bool, EvalError> {
    Ok(truth_mask(m, &Assignment::new(), f)? == m.world_mask())
}

/// All denotations of a quantifiable type, in evaluation order. `actualist`
/// filters entities by existence at `w`.
pub fn enumerate_domain(
    m: &KripkeModel,
    ty: &SimpleType,
    w: Option<usize>,
    actualist: bool,
    limit: u64,
) -> Result<Vec<Value>, EvalError> {
    if actualist && *ty != SimpleType::Ent {
        return malformed("actualist domains exist only for entities");
    }
    match ty {
        SimpleType::Ent => {
            let allowed = match (actualist, w) {
                (true, Some(w)) => m.exists_entities(w),
                (true, None) => return malformed("actualist enumeration needs a world"),
                (false, _) => m.entity_mask(),
            };
            Ok((0..m.entities() as u32)
                .filter(|e| allowed >> e & 1 != 0)
                .map(Value::Ent)
                .collect())
        }
        SimpleType::Prop => Ok((0..=m.world_mask()).map(Value::Truth).collect()),
        ty if ty.is_property() => {
            Ok((0..m.intension_count()).map(Value::Intension).collect())
        }
        ty if ty.is_prop_set() => {
            let space = propset_space(m).filter(|&s| s <= limit).ok_or_else(|| {
                EvalError::BoundExceeded {
                    what: format!(
                        "third-order domain space 2^{}",
                        m.intension_count() * m.worlds() as u64
                    ),
                    limit,
                }
            })?;
            Ok((0..space)
                .map(|code| {
                    Value::PropSet(PropSetVal::Table(Arc::new(table_from_code(m, code))))
                })
                .collect())
        }
        ty => malformed(format!("cannot enumerate `{}`", ty)),
    }
}
