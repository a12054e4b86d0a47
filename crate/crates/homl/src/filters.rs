//! World-lifted set algebra on properties, the filter and ultrafilter
//! conditions on sets of properties, and a brute-force census of partial
//! ultrafilter structures over a fixed model.
//!
//! A "partial" structure is a pair of a world-indexed family F of intension
//! sets and a distinguished world i; it is counted valid when F satisfies all
//! five ultrafilter conditions evaluated at i. Membership is intensional:
//! properness rejects the empty-set object itself, not extensional emptiness.

use std::fmt;
use std::sync::OnceLock;

use rayon::prelude::*;

use crate::semantics::eval::table_from_code;
use crate::semantics::model::world_name;
use crate::semantics::{
    print_intension, propset_space, Assignment, Compiled, EvalError, KripkeModel, PropSetVal,
    Value,
};
use crate::syntax::{
    expand_definitions, parse_theory, typecheck, Definition, Formula, SimpleType, SynResult,
    SyntaxError,
};

/// Definition source for the set algebra and the (ultra)filter conditions.
/// `member` is world-lifted elementhood of a property in a property set;
/// `c=` is actualist pointwise inclusion; `/\` is pointwise meet; `U` and
/// `emptyset` are the full and empty properties; `HF g` is the set of
/// supersets of `g`.
const DEFS_SRC: &str = "\
theory setalgebra frame k
def member(X:Property, Z:PropSet) := Z X
def c=(X:Property, Y:Property) := forallE z. X z -> Y z
def /\\(X:Property, Y:Property) := \\u:E. X u & Y u
def U := \\u:E. T
def emptyset := \\u:E. F
def Filter(Z:PropSet) := member U Z & ~(member emptyset Z) & (forall X Y:Property. (member X Z & (X c= Y)) -> member Y Z) & (forall X Y:Property. (member X Z & member Y Z) -> member (X /\\ Y) Z)
def Ultrafilter(Z:PropSet) := Filter Z & (forall X:Property. member X Z | member (comp X) Z)
def HF(g:Property) := \\psi:Property. g c= psi
";

/// The shared set-algebra and filter definitions, parsed once.
pub fn set_algebra_defs() -> &'static [Definition] {
    static DEFS: OnceLock<Vec<Definition>> = OnceLock::new();
    DEFS.get_or_init(|| parse_theory(DEFS_SRC).expect("builtin definitions parse").defs)
}

/// `defs` extended with any set-algebra definitions it does not already have.
fn with_set_algebra(defs: &[Definition]) -> Vec<Definition> {
    let mut all: Vec<Definition> = set_algebra_defs()
        .iter()
        .filter(|d| !defs.iter().any(|e| e.name == d.name))
        .cloned()
        .collect();
    all.extend(defs.iter().cloned());
    all
}

fn apply_named(
    name: &str,
    target: &Formula,
    expect_target: SimpleType,
    defs: &[Definition],
) -> SynResult<Formula> {
    let got = typecheck(target).map_err(|e| SyntaxError::Type {
        path: name.to_string(),
        msg: e.to_string(),
    })?;
    if got != expect_target {
        return Err(SyntaxError::Type {
            path: name.to_string(),
            msg: format!("expected an argument of type `{}`, found `{}`", expect_target, got),
        });
    }
    let defs = with_set_algebra(defs);
    let def = defs.iter().find(|d| d.name == name).expect("definition present");
    let applied = Formula::app(Formula::Const(name.to_string(), def.signature()), target.clone());
    Ok(expand_definitions(&applied, &defs))
}

/// The conjunction of the four filter conditions applied to `target`
/// (a PropSet-typed formula), fully expanded. `defs` supplies definitions
/// that `target` itself mentions.
pub fn instantiate_filter(target: &Formula, defs: &[Definition]) -> SynResult<Formula> {
    apply_named("Filter", target, SimpleType::prop_set(), defs)
}

/// As `instantiate_filter` plus the maximality conjunct.
pub fn instantiate_ultrafilter(target: &Formula, defs: &[Definition]) -> SynResult<Formula> {
    apply_named("Ultrafilter", target, SimpleType::prop_set(), defs)
}

/// The set of all supersets of `g` under actualist inclusion, as an expanded
/// PropSet-typed formula.
pub fn hauptfilter(g: &Formula, defs: &[Definition]) -> SynResult<Formula> {
    apply_named("HF", g, SimpleType::property(), defs)
}

/// One valid census pair: the world-indexed family (as a PropSet table code,
/// world-major digits) and the world at which the conditions hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct CensusWitness {
    pub code: u64,
    pub world: usize,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct Census {
    pub candidates: u64,
    pub valid: u64,
    pub witnesses: Vec<CensusWitness>,
}

/// A witness printed in model-file intension notation, one intension list
/// per world of the family, then the distinguished world.
pub struct WitnessDisplay<'a> {
    m: &'a KripkeModel,
    w: CensusWitness,
}

pub fn display_witness(m: &KripkeModel, w: CensusWitness) -> WitnessDisplay<'_> {
    WitnessDisplay { m, w }
}

impl fmt::Display for WitnessDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let table = table_from_code(self.m, self.w.code);
        for w in 0..self.m.worlds() {
            let members: Vec<String> = (0..self.m.intension_count())
                .filter(|&ix| table[ix as usize] >> w & 1 == 1)
                .map(|ix| print_intension(self.m, ix))
                .collect();
            write!(f, "F {} : {{{}}} ", world_name(w), members.join(", "))?;
        }
        write!(f, "at {}", world_name(self.w.world))
    }
}

/// Counts world-indexed families of intension sets that satisfy the five
/// ultrafilter conditions at each world. Candidates are all families paired
/// with all worlds; the candidate index of (code, i) is `code * worlds + i`
/// and witnesses are reported in that order.
pub fn count_partial_ultrafilters(m: &KripkeModel, limit: u64) -> Result<Census, EvalError> {
    let n = m.worlds() as u64;
    let exceeded = || EvalError::BoundExceeded {
        what: format!(
            "ultrafilter census over {} families of {} intension sets",
            m.worlds(),
            m.intension_count()
        ),
        limit,
    };
    let space = propset_space(m).ok_or_else(exceeded)?;
    let candidates = space.checked_mul(n).ok_or_else(exceeded)?;
    if candidates > limit {
        return Err(exceeded());
    }

    let compiled = ultrafilter_of_var()?;
    let per_code = |code: u64| -> Result<(u64, Vec<CensusWitness>), EvalError> {
        let table = table_from_code(m, code);
        let asg = Assignment::new().bind("Z", Value::PropSet(PropSetVal::Table(table.into())));
        let mask = compiled.truth(m, &asg)?;
        let witnesses = (0..m.worlds())
            .filter(|&i| mask >> i & 1 == 1)
            .map(|i| CensusWitness { code, world: i })
            .collect::<Vec<_>>();
        Ok((witnesses.len() as u64, witnesses))
    };

    let results: Result<Vec<_>, EvalError> = (0..space).into_par_iter().map(per_code).collect();
    let mut valid = 0;
    let mut witnesses = Vec::new();
    for (count, mut ws) in results? {
        valid += count;
        witnesses.append(&mut ws);
    }
    Ok(Census { candidates, valid, witnesses })
}

/// `Ultrafilter Z` with `Z` free, expanded and compiled once.
fn ultrafilter_of_var() -> Result<&'static Compiled, EvalError> {
    static C: OnceLock<Compiled> = OnceLock::new();
    if let Some(c) = C.get() {
        return Ok(c);
    }
    let z = Formula::Var("Z".to_string(), SimpleType::prop_set());
    let f = instantiate_ultrafilter(&z, &[]).expect("builtin definitions typecheck");
    let compiled = Compiled::new(&f)?;
    Ok(C.get_or_init(|| compiled))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::eval;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const LIMIT: u64 = 1 << 20;

    /// The two-world, one-entity model whose census is 512 candidates and
    /// 32 valid pairs: r = {(i1,i1),(i2,i1),(i2,i2)}, the entity exists
    /// everywhere, P at i1 = {(e1@i1), U}, P at i2 = {(e1@i2), U}.
    fn census_model() -> KripkeModel {
        KripkeModel::new(2, 1, vec![0b01, 0b11], 0b11, vec![vec![0b01, 0b11], vec![0b10, 0b11]])
            .unwrap()
    }

    /// Bit-level restatement of the five conditions, independent of the
    /// formula evaluator. `digits[w]` holds the membership bitmask of F at w.
    fn oracle_valid(m: &KripkeModel, digits: &[u64], i: usize) -> bool {
        let count = m.intension_count();
        let full = m.full_intension();
        let ei = m.exists_entities(i);
        let mem = |x: u64| digits[i] >> x & 1 == 1;
        let ext = |x: u64| m.extension_at(x, i);
        if !mem(full) || mem(0) {
            return false;
        }
        for x in 0..count {
            if !mem(x) && !mem(full ^ x) {
                return false;
            }
            if !mem(x) {
                continue;
            }
            for y in 0..count {
                if ext(x) & ei & !ext(y) == 0 && !mem(y) {
                    return false;
                }
                if mem(y) && !mem(x & y) {
                    return false;
                }
            }
        }
        true
    }

    /// Enumerates digit tuples directly (most significant digit first) and
    /// recomputes the world-major code, so it cross-checks the code layout.
    fn oracle_census(m: &KripkeModel) -> (u64, Vec<CensusWitness>) {
        let per = 1u64 << m.intension_count();
        let n = m.worlds();
        let space = per.pow(n as u32);
        let mut witnesses = Vec::new();
        for code in 0..space {
            let mut digits = vec![0u64; n];
            let mut c = code;
            for w in (0..n).rev() {
                digits[w] = c % per;
                c /= per;
            }
            for i in 0..n {
                if oracle_valid(m, &digits, i) {
                    witnesses.push(CensusWitness { code, world: i });
                }
            }
        }
        (space * n as u64, witnesses)
    }

    fn random_model(rng: &mut ChaCha8Rng, worlds: usize, entities: usize) -> KripkeModel {
        let succ = (0..worlds).map(|_| rng.gen_range(0..1u64 << worlds)).collect();
        let exists = rng.gen_range(0..1u64 << (worlds * entities));
        let count = 1u64 << (worlds * entities);
        let pos = (0..worlds)
            .map(|_| (0..count).filter(|_| rng.gen_bool(0.5)).collect())
            .collect();
        KripkeModel::new(worlds, entities, succ, exists, pos).unwrap()
    }

    #[test]
    fn census_counts_on_the_two_world_model_are_512_and_32() {
        let m = census_model();
        let census = count_partial_ultrafilters(&m, LIMIT).unwrap();
        assert_eq!(census.candidates, 512);
        assert_eq!(census.valid, 32);
        assert_eq!(census.witnesses.len(), 32);
    }

    #[test]
    fn census_counts_at_one_world_one_entity_are_4_and_1() {
        let m = KripkeModel::new(1, 1, vec![0b1], 0b1, vec![vec![]]).unwrap();
        let census = count_partial_ultrafilters(&m, LIMIT).unwrap();
        assert_eq!(census.candidates, 4);
        assert_eq!(census.valid, 1);
        // The only valid family is {U}: membership bit for intension 1 only.
        assert_eq!(census.witnesses, vec![CensusWitness { code: 0b10, world: 0 }]);
    }

    #[test]
    fn census_counts_at_one_world_two_entities_are_16_and_2() {
        let m = KripkeModel::new(1, 2, vec![0b1], 0b11, vec![vec![]]).unwrap();
        let census = count_partial_ultrafilters(&m, LIMIT).unwrap();
        assert_eq!(census.candidates, 16);
        assert_eq!(census.valid, 2);
        // The principal ultrafilters at e1 ({01,11}) and e2 ({10,11}).
        let codes: Vec<u64> = census.witnesses.iter().map(|w| w.code).collect();
        assert_eq!(codes, vec![0b1010, 0b1100]);
    }

    #[test]
    fn census_agrees_with_the_bitwise_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xf117e5);
        for &(w, e) in &[(1, 1), (2, 1), (1, 2)] {
            for _ in 0..30 {
                let m = random_model(&mut rng, w, e);
                let census = count_partial_ultrafilters(&m, LIMIT).unwrap();
                let (candidates, witnesses) = oracle_census(&m);
                assert_eq!(census.candidates, candidates);
                assert_eq!(census.witnesses, witnesses);
            }
        }
    }

    #[test]
    fn mixed_family_is_valid_at_the_second_world_only() {
        // F at i1 = {emptyset, (e1@i1)}, F at i2 = {U, (e1@i2)}: digits 3 and
        // 12, code 3 * 16 + 12 = 60. Properness fails at i1.
        let m = census_model();
        let census = count_partial_ultrafilters(&m, LIMIT).unwrap();
        assert!(census.witnesses.contains(&CensusWitness { code: 60, world: 1 }));
        assert!(!census.witnesses.contains(&CensusWitness { code: 60, world: 0 }));
        let shown = display_witness(&m, CensusWitness { code: 60, world: 1 }).to_string();
        assert_eq!(shown, "F i1 : {[], [(e1,i1)]} F i2 : {[(e1,i2)], [(e1,i1),(e1,i2)]} at i2");
    }

    #[test]
    fn witnesses_reverify_under_the_instantiated_ultrafilter_formula() {
        let m = census_model();
        let census = count_partial_ultrafilters(&m, LIMIT).unwrap();
        let z = Formula::Var("Z".to_string(), SimpleType::prop_set());
        let f = instantiate_ultrafilter(&z, &[]).unwrap();
        for w in &census.witnesses {
            let table = table_from_code(&m, w.code);
            let asg = Assignment::new().bind("Z", Value::PropSet(PropSetVal::Table(table.into())));
            assert!(eval(&m, w.world, &asg, &f).unwrap());
        }
    }

    #[test]
    fn world_constant_families_link_census_and_global_filter_truth() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5e7a1);
        let z = Formula::Var("Z".to_string(), SimpleType::prop_set());
        let filter = Compiled::new(&instantiate_filter(&z, &[]).unwrap()).unwrap();
        for _ in 0..20 {
            let m = random_model(&mut rng, 2, 1);
            let per = 1u64 << m.intension_count();
            for digit in 0..per {
                let code = digit * per + digit;
                let table = table_from_code(&m, code);
                let asg =
                    Assignment::new().bind("Z", Value::PropSet(PropSetVal::Table(table.into())));
                let mask = filter.truth(&m, &asg).unwrap();
                let digits = vec![digit; 2];
                let all_filter = (0..2).all(|i| oracle_filter(&m, &digits, i));
                assert_eq!(mask == m.world_mask(), all_filter);
            }
        }
    }

    /// The filter conditions alone (no maximality), bit level.
    fn oracle_filter(m: &KripkeModel, digits: &[u64], i: usize) -> bool {
        let count = m.intension_count();
        let ei = m.exists_entities(i);
        let mem = |x: u64| digits[i] >> x & 1 == 1;
        let ext = |x: u64| m.extension_at(x, i);
        if !mem(m.full_intension()) || mem(0) {
            return false;
        }
        for x in (0..count).filter(|&x| mem(x)) {
            for y in 0..count {
                if ext(x) & ei & !ext(y) == 0 && !mem(y) {
                    return false;
                }
                if mem(y) && !mem(x & y) {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn positive_is_an_ultrafilter_on_the_census_model() {
        let m = census_model();
        let p = crate::syntax::ast::positive_const();
        let f = instantiate_ultrafilter(&p, &[]).unwrap();
        let compiled = Compiled::new(&f).unwrap();
        assert_eq!(compiled.truth(&m, &Assignment::new()).unwrap(), m.world_mask());
    }

    #[test]
    fn hauptfilter_of_the_empty_property_is_large_but_not_proper() {
        // At a world with a nonempty domain every property includes the
        // empty one, so largeness holds and properness fails.
        let m = KripkeModel::new(1, 1, vec![0b1], 0b1, vec![vec![]]).unwrap();
        let defs = set_algebra_defs();
        let empty = defs.iter().find(|d| d.name == "emptyset").unwrap();
        let hf = hauptfilter(&Formula::Const("emptyset".into(), empty.signature()), defs).unwrap();
        let f = instantiate_filter(&hf, defs).unwrap();
        assert_eq!(Compiled::new(&f).unwrap().truth(&m, &Assignment::new()).unwrap(), 0);
    }

    #[test]
    fn census_respects_the_candidate_limit() {
        let m = census_model();
        let err = count_partial_ultrafilters(&m, 100).unwrap_err();
        assert!(matches!(err, EvalError::BoundExceeded { limit: 100, .. }));
    }
}
