//! Enumeration-free answer for the conjunction-of-a-set axiom shape
//!
//! ```text
//! forall Z:PropSet. (forall X. Z X -> P X) ->
//!     forall X. (box (forallE u. X u <-> (forall Y. Z Y -> Y u))) -> P X
//! ```
//!
//! The only data the body extracts from `Z` is (i) whether the members of
//! `Z` at the evaluation world are all positive there and (ii), per
//! accessible world `v`, the intersection of the `v`-extensions of `Z`'s
//! members at `v`, restricted to entities existing at `v`. At worlds other
//! than the evaluation world the intersection ranges over every subset of
//! the existing entities; at a self-accessible evaluation world it ranges
//! over the meet closure of the positive extensions there (the full set for
//! the empty family). The instance holds iff every intension matching such
//! a choice pattern on its pinned bits is positive, so the third-order
//! space never materializes.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use crate::syntax::{parse_formula, Formula};

use super::eval::{compile, Comp, EvalError, Node, NodeId};
use super::model::KripkeModel;

const PATTERN_SRC: &str = "forall Z:PropSet. (forall X:Property. Z X -> P X) -> \
     (forall X:Property. (box (forallE u. X u <-> (forall Y:Property. Z Y -> Y u))) -> P X)";

fn pattern() -> &'static Comp {
    static PATTERN: OnceLock<Comp> = OnceLock::new();
    PATTERN.get_or_init(|| {
        let f = parse_formula(PATTERN_SRC, &[]).expect("pattern source parses");
        compile(&f).expect("pattern source compiles")
    })
}

/// Structural match against the pattern. The instance sits `depth` binders
/// deep, so its levels exceed the pattern's by exactly `depth`; a closed
/// instance therefore matches at any nesting depth.
pub(crate) fn matches_set_conjunction(comp: &Comp, id: NodeId, depth: usize) -> bool {
    let pat = pattern();
    subtree_eq(comp, id, pat, pat.root, depth)
}

fn subtree_eq(a: &Comp, ia: NodeId, b: &Comp, ib: NodeId, offset: usize) -> bool {
    use Node::*;
    match (a.node(ia), b.node(ib)) {
        (Positive, Positive) | (Top, Top) | (Bot, Bot) => true,
        (Bound(x), Bound(y)) => {
            let (x, y) = (*x as usize, *y as usize);
            x >= offset && x - offset == y
        }
        (Not(x), Not(y))
        | (Nec(x), Nec(y))
        | (Dia(x), Dia(y))
        | (Global(x), Global(y))
        | (Compl(x), Compl(y)) => subtree_eq(a, *x, b, *y, offset),
        (And(x1, x2), And(y1, y2))
        | (Or(x1, x2), Or(y1, y2))
        | (Implies(x1, x2), Implies(y1, y2))
        | (Iff(x1, x2), Iff(y1, y2))
        | (App(x1, x2), App(y1, y2)) => {
            subtree_eq(a, *x1, b, *y1, offset) && subtree_eq(a, *x2, b, *y2, offset)
        }
        (Eq(t1, x1, x2), Eq(t2, y1, y2)) | (Neq(t1, x1, x2), Neq(t2, y1, y2)) => {
            t1 == t2
                && subtree_eq(a, *x1, b, *y1, offset)
                && subtree_eq(a, *x2, b, *y2, offset)
        }
        (Lam(t1, x), Lam(t2, y)) | (Forall(t1, x), Forall(t2, y)) | (Exists(t1, x), Exists(t2, y)) => {
            t1 == t2 && subtree_eq(a, *x, b, *y, offset)
        }
        (ForallE(x), ForallE(y)) | (ExistsE(x), ExistsE(y)) => subtree_eq(a, *x, b, *y, offset),
        _ => false,
    }
}

/// Truth mask of the instance over all worlds, computed by the reduction.
pub(crate) fn set_conjunction_mask(m: &KripkeModel) -> u64 {
    (0..m.worlds()).fold(0, |out, w| out | (u64::from(holds_at(m, w)) << w))
}

fn holds_at(m: &KripkeModel, w: usize) -> bool {
    let n = m.worlds();
    let acc: Vec<usize> = (0..n).filter(|&v| m.succ(w) >> v & 1 != 0).collect();

    // Achievable intersections, as sets of existing entities per accessible world.
    let ranges: Vec<Vec<u64>> = acc
        .iter()
        .map(|&v| {
            let dom = m.exists_entities(v);
            if v == w {
                meet_closure(m.pos(w).iter().map(|&y| m.extension_at(y, w) & dom), dom)
            } else {
                submasks(dom)
            }
        })
        .collect();

    // Bits of an intension not pinned by any choice: nonexistent entities at
    // accessible worlds and everything at inaccessible worlds.
    let mut free_bits: Vec<usize> = Vec::new();
    for e in 0..m.entities() {
        for v in 0..n {
            if !(acc.contains(&v) && m.exists_at(e, v)) {
                free_bits.push(e * n + v);
            }
        }
    }
    // Distinct fillings are distinct intensions that all must be positive.
    if (1u64 << free_bits.len()) > m.pos(w).len() as u64 {
        return false;
    }

    let mut idx = vec![0usize; ranges.len()];
    loop {
        let mut base = 0u64;
        for (k, &v) in acc.iter().enumerate() {
            let choice = ranges[k][idx[k]];
            for e in 0..m.entities() {
                if m.exists_at(e, v) && choice >> e & 1 != 0 {
                    base |= 1 << (e * n + v);
                }
            }
        }
        for fill in 0..1u64 << free_bits.len() {
            let mut x = base;
            for (i, &bit) in free_bits.iter().enumerate() {
                if fill >> i & 1 != 0 {
                    x |= 1 << bit;
                }
            }
            if !m.pos_contains(w, x) {
                return false;
            }
        }
        let mut k = 0;
        loop {
            if k == ranges.len() {
                return true;
            }
            idx[k] += 1;
            if idx[k] < ranges[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// All meets of subfamilies of `bases`, with `full` for the empty family.
fn meet_closure(bases: impl Iterator<Item = u64>, full: u64) -> Vec<u64> {
    let mut out = BTreeSet::new();
    out.insert(full);
    for b in bases {
        let snapshot: Vec<u64> = out.iter().copied().collect();
        for s in snapshot {
            out.insert(s & b);
        }
    }
    out.into_iter().collect()
}

fn submasks(dom: u64) -> Vec<u64> {
    let bits: Vec<u32> = (0..64).filter(|&b| dom >> b & 1 != 0).collect();
    (0..1u64 << bits.len())
        .map(|code| bits.iter().enumerate().fold(0, |m, (i, &b)| m | ((code >> i & 1) << b)))
        .collect()
}

/// Truth of a conjunction-of-a-set instance at `w`, without third-order
/// enumeration. The instance must be the fully expanded quantified shape.
pub fn reduce_conj_of_set(
    m: &KripkeModel,
    w: usize,
    instance: &Formula,
) -> Result<bool, EvalError> {
    let comp = compile(instance)?;
    if !matches_set_conjunction(&comp, comp.root, 0) {
        return Err(EvalError::PatternMismatch);
    }
    Ok(set_conjunction_mask(m) >> w & 1 != 0)
}
