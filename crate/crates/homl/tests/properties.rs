//! Mechanical invariants checked over random models and random formulas:
//! modal schemas tied to frame classes, the dual evaluation routes for
//! third-order quantifiers, verdict stability across search modes, witness
//! re-verification, and printer round-trips.

use homl::corpus::{builtin_theories, load_source, prelude};
use homl::modelfind::{
    check_bounded_validity, verify_model, SearchConfig, ValidityOutcome,
};
use homl::semantics::{Assignment, Bounds, Compiled, KripkeModel, DEFAULT_THIRD_ORDER_LIMIT};
use homl::syntax::{
    expand_definitions, expand_in_theory, parse_formula, print_formula, print_theory, Formula,
    Frame,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn mask(bits: usize) -> u64 {
    (1u64 << bits) - 1
}

fn random_model(rng: &mut ChaCha8Rng, worlds: usize, entities: usize) -> KripkeModel {
    let bits = worlds * entities;
    let succ: Vec<u64> = (0..worlds).map(|_| rng.gen::<u64>() & mask(worlds)).collect();
    let exists = rng.gen::<u64>() & mask(bits);
    let pos: Vec<Vec<u64>> = (0..worlds)
        .map(|_| {
            let count = rng.gen_range(0..=4usize);
            (0..count).map(|_| rng.gen::<u64>() & mask(bits)).collect()
        })
        .collect();
    KripkeModel::new(worlds, entities, succ, exists, pos).expect("sampled model is in range")
}

fn sample_sizes(rng: &mut ChaCha8Rng) -> (usize, usize) {
    (rng.gen_range(1..=3), rng.gen_range(1..=2))
}

fn reflexive(m: &KripkeModel) -> KripkeModel {
    let succ: Vec<u64> =
        m.succ_rows().iter().enumerate().map(|(w, &row)| row | 1 << w).collect();
    rebuild(m, succ)
}

fn symmetric(m: &KripkeModel) -> KripkeModel {
    let mut succ = m.succ_rows().to_vec();
    for w in 0..m.worlds() {
        for v in 0..m.worlds() {
            if succ[w] >> v & 1 == 1 {
                succ[v] |= 1 << w;
            }
        }
    }
    rebuild(m, succ)
}

fn rebuild(m: &KripkeModel, succ: Vec<u64>) -> KripkeModel {
    KripkeModel::new(m.worlds(), m.entities(), succ, m.exists_bits(), m.pos_rows().to_vec())
        .unwrap()
}

fn compiled(src: &str) -> Compiled {
    Compiled::new(&parse_formula(src, &[]).unwrap()).unwrap()
}

fn holds_everywhere(c: &Compiled, m: &KripkeModel) -> bool {
    c.truth(m, &Assignment::new()).unwrap() == mask(m.worlds())
}

/// Checks a schema against 1000 sampled models, each first normalized by
/// `fix` into the intended frame class.
fn schema_holds(src: &str, fix: impl Fn(&KripkeModel) -> KripkeModel, seed: u64) {
    let c = compiled(src);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for round in 0..1000 {
        let (w, e) = sample_sizes(&mut rng);
        let m = fix(&random_model(&mut rng, w, e));
        assert!(holds_everywhere(&c, &m), "round {}: schema fails on {:?}", round, m);
    }
}

#[test]
fn schema_k_holds_in_every_sampled_model() {
    schema_holds(
        "forall p:Prop. forall q:Prop. box (p -> q) -> (box p -> box q)",
        |m| m.clone(),
        11,
    );
}

#[test]
fn schema_b_holds_once_accessibility_is_symmetrized() {
    schema_holds("forall p:Prop. p -> box dia p", symmetric, 12);
}

#[test]
fn schema_t_holds_once_accessibility_is_reflexive() {
    schema_holds("forall p:Prop. box p -> p", reflexive, 13);
}

#[test]
fn double_complement_is_the_identity() {
    schema_holds(
        "forall X:Property. forall x:E. comp (comp X) x <-> X x",
        |m| m.clone(),
        14,
    );
}

#[test]
fn possibilist_barcan_and_its_converse_hold_everywhere() {
    schema_holds(
        "forall X:Property. (forall x:E. box (X x)) -> box (forall x:E. X x)",
        |m| m.clone(),
        15,
    );
    schema_holds(
        "forall X:Property. box (forall x:E. X x) -> (forall x:E. box (X x))",
        |m| m.clone(),
        16,
    );
}

/// The conjunction-of-a-set axiom evaluated by naive third-order enumeration
/// and by the enumeration-free reduction, on 1002 random models spread over
/// the sizes where the naive route is feasible.
#[test]
fn set_quantifier_reduction_agrees_with_naive_enumeration() {
    let f = parse_formula(
        "forall Z:PropSet. Pos Z -> (forall X:Property. meetOf X Z -> P X)",
        prelude(),
    )
    .unwrap();
    let c = Compiled::new(&expand_definitions(&f, prelude())).unwrap();
    let a = Assignment::new();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for round in 0..1002 {
        let (w, e) = [(1, 1), (2, 1), (1, 2)][round % 3];
        let m = random_model(&mut rng, w, e);
        let naive = c.truth_limited(&m, &a, DEFAULT_THIRD_ORDER_LIMIT).unwrap();
        let reduced = c.truth_limited(&m, &a, 1).unwrap();
        assert_eq!(naive, reduced, "round {}: routes disagree on {:?}", round, m);
    }
}

// ---- random formulas -------------------------------------------------------

fn leaf(src: &str) -> Formula {
    parse_formula(src, &[]).unwrap()
}

fn arb_formula() -> impl Strategy<Value = Formula> {
    let leaves = prop_oneof![
        Just(Formula::Top),
        Just(Formula::Bot),
        Just(leaf("P (\\u:E. u = u)")),
        Just(leaf("P (\\u:E. u != u)")),
        Just(leaf("existsE z. z = z")),
        Just(leaf("forall u:E. existsE v. v = u")),
    ];
    leaves.prop_recursive(3, 20, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|f| Formula::Not(Box::new(f))),
            inner.clone().prop_map(|f| Formula::Nec(Box::new(f))),
            inner.clone().prop_map(|f| Formula::Dia(Box::new(f))),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Formula::And(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Formula::Or(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Formula::Implies(Box::new(a), Box::new(b))),
            (inner.clone(), inner)
                .prop_map(|(a, b)| Formula::Iff(Box::new(a), Box::new(b))),
        ]
    })
}

fn config(frame: Frame, prune: bool, symmetry: bool, deterministic: bool) -> SearchConfig {
    let mut cfg = SearchConfig::new(Bounds::new(2, 1), frame);
    cfg.prune = prune;
    cfg.symmetry_breaking = symmetry;
    cfg.deterministic = deterministic;
    cfg
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 96, ..ProptestConfig::default() })]

    /// One verdict per formula, whatever the search mode; countermodel
    /// witnesses are identical because every mode keeps canonical order.
    #[test]
    fn verdicts_do_not_depend_on_the_search_mode(f in arb_formula(), frame_ix in 0usize..3) {
        let frame = [Frame::K, Frame::T, Frame::Kb][frame_ix];
        let conjecture = f.ensure_global();
        let base = check_bounded_validity(&[], &conjecture, &config(frame, true, false, true))
            .unwrap();
        for (prune, symmetry, deterministic) in
            [(false, false, true), (true, true, true), (true, false, false)]
        {
            let other = check_bounded_validity(
                &[],
                &conjecture,
                &config(frame, prune, symmetry, deterministic),
            )
            .unwrap();
            match (&base.outcome, &other.outcome) {
                (ValidityOutcome::ValidAtBounds, ValidityOutcome::ValidAtBounds) => {}
                (ValidityOutcome::Countermodel(a), ValidityOutcome::Countermodel(b)) => {
                    prop_assert_eq!(a, b);
                }
                (a, b) => prop_assert!(false, "verdicts diverge: {:?} vs {:?}", a, b),
            }
        }
    }

    /// Every countermodel the search returns actually refutes the conjecture.
    #[test]
    fn countermodel_witnesses_survive_reverification(f in arb_formula()) {
        let conjecture = f.clone().ensure_global();
        let res = check_bounded_validity(&[], &conjecture, &config(Frame::K, true, false, true))
            .unwrap();
        if let ValidityOutcome::Countermodel(m) = &res.outcome {
            let checks =
                verify_model(m, &[("refuted".to_string(), conjecture.clone())]).unwrap();
            prop_assert!(!checks[0].global, "witness fails to refute {:?}", f);
        }
    }

    /// Printing then parsing is the identity up to inferred type annotations,
    /// so the printed text is a fixed point.
    #[test]
    fn printed_formulas_reparse_to_the_same_text(f in arb_formula()) {
        let once = print_formula(&f);
        let reparsed = parse_formula(&once, &[]).unwrap();
        prop_assert_eq!(print_formula(&reparsed), once);
    }
}

// ---- corpus round-trips ------------------------------------------------------

#[test]
fn printing_and_reloading_fixes_the_corpus() {
    for lt in builtin_theories() {
        let once = print_theory(&lt.theory);
        let back = load_source(&lt.label, &once).expect("printed theory reloads");
        assert_eq!(print_theory(&back.theory), once, "{} drifts under print", lt.label);
    }
}

#[test]
fn expansion_is_idempotent_on_the_corpus() {
    for lt in builtin_theories() {
        let twice = expand_in_theory(&lt.expanded);
        assert_eq!(twice, lt.expanded, "{} expands twice to something new", lt.label);
    }
}
