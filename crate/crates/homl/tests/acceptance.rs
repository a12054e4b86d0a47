//! End-to-end gate: every headline result the workbench is built to
//! reproduce, checked at its stated bounds. One test per result; the test
//! name states what is being reproduced.

use homl::corpus::{
    builtin, builtin_theories, premise_formula, prelude, run_suite, ClaimStatus, LoadedTheory,
    SuiteOptions, VariantId,
};
use homl::filters::count_partial_ultrafilters;
use homl::modelfind::{
    check_bounded_validity, find_model, verify_model, verify_proof_net, ProofEdge, SearchConfig,
    SearchOutcome, ValidityOutcome,
};
use homl::semantics::{Assignment, Bounds, Compiled, KripkeModel, DEFAULT_THIRD_ORDER_LIMIT};
use homl::syntax::{expand_definitions, parse_formula, ClaimKind, Formula, Frame};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn axioms_of(lt: &LoadedTheory) -> Vec<Formula> {
    lt.expanded.axioms.iter().map(|(_, f)| f.clone()).collect()
}

/// Constraints a claim is checked against: its cited premises if it carries
/// any, the theory's axioms otherwise.
fn constraints_of(lt: &LoadedTheory, name: &str) -> Vec<Formula> {
    let claim = lt.expanded.claim(name).expect("claim exists");
    if claim.kind == ClaimKind::Edge {
        claim
            .premises
            .iter()
            .map(|p| premise_formula(&lt.expanded, p).expect("premise resolves").clone())
            .collect()
    } else {
        axioms_of(lt)
    }
}

fn claim_frame(lt: &LoadedTheory, name: &str) -> Frame {
    lt.expanded.claim(name).unwrap().frame_override.unwrap_or(lt.theory.frame)
}

fn config(lt: &LoadedTheory, name: &str, w: usize, e: usize, exhaustive: bool) -> SearchConfig {
    let mut cfg = SearchConfig::new(Bounds::new(w, e), claim_frame(lt, name));
    cfg.prune = !exhaustive;
    cfg
}

fn assert_valid(lt: &LoadedTheory, name: &str, w: usize, e: usize, exhaustive: bool) {
    let conjecture = lt.expanded.claim(name).unwrap().conjecture.clone().unwrap();
    let res = check_bounded_validity(
        &constraints_of(lt, name),
        &conjecture,
        &config(lt, name, w, e, exhaustive),
    )
    .unwrap();
    assert!(
        matches!(res.outcome, ValidityOutcome::ValidAtBounds),
        "{}/{} expected valid at ({},{}), got {:?}",
        lt.label,
        name,
        w,
        e,
        res.outcome
    );
}

fn countermodel(lt: &LoadedTheory, name: &str, w: usize, e: usize) -> KripkeModel {
    let conjecture = lt.expanded.claim(name).unwrap().conjecture.clone().unwrap();
    let res = check_bounded_validity(
        &constraints_of(lt, name),
        &conjecture,
        &config(lt, name, w, e, false),
    )
    .unwrap();
    match res.outcome {
        ValidityOutcome::Countermodel(m) => m,
        other => panic!("{}/{} expected a countermodel at ({},{}), got {:?}", lt.label, name, w, e, other),
    }
}

/// Global truth of a source-syntax formula on a model, definitions expanded.
fn globally_true(m: &KripkeModel, src: &str) -> bool {
    let f = parse_formula(src, prelude()).unwrap();
    let c = Compiled::new(&expand_definitions(&f, prelude())).unwrap();
    c.truth(m, &Assignment::new()).unwrap() == (1 << m.worlds()) - 1
}

fn suite_all_match(lt: &LoadedTheory) {
    let report = run_suite(&[lt.clone()], None, &SuiteOptions::default());
    for r in &report.reports {
        assert_eq!(
            r.status,
            ClaimStatus::Match,
            "{}/{} does not reproduce its declared verdict",
            r.variant,
            r.claim
        );
    }
}

#[test]
fn scott_axioms_have_a_one_world_model_with_a_godlike_entity() {
    let lt = builtin(VariantId::Scott);
    let cfg = SearchConfig::new(Bounds::new(1, 1), Frame::Kb);
    let res = find_model(&axioms_of(lt), &cfg).unwrap();
    let m = match res.outcome {
        SearchOutcome::ModelFound(m) => m,
        other => panic!("expected a model at (1,1), got {:?}", other),
    };
    assert_eq!((m.worlds(), m.entities()), (1, 1));
    assert!(globally_true(&m, "forall x:E. G x"), "sole entity is not Godlike: {:?}", m);
    assert!(globally_true(&m, "existsE x. G x"), "Godlike entity does not exist: {:?}", m);
}

#[test]
fn scott_theorems_and_filter_facts_are_valid_at_small_bounds() {
    let lt = builtin(VariantId::Scott);
    let names = ["T1", "T2", "T3", "T4", "T5", "T6", "MC", "U1", "F1", "U2", "T6Again"];
    for (w, e) in [(2, 1), (1, 2)] {
        for name in names {
            assert_valid(lt, name, w, e, true);
        }
    }
}

#[test]
fn ultrafilter_axioms_admit_the_known_collapse_countermodel() {
    let lt = builtin(VariantId::UFilter);
    let m = countermodel(lt, "MC", 2, 1);
    let expected =
        KripkeModel::new(2, 1, vec![0b01, 0b11], 0b11, vec![vec![1, 3], vec![2, 3]]).unwrap();
    assert_eq!(m, expected, "countermodel drifted from the published one");

    let formulas: Vec<(String, Formula)> = ["U1", "A2", "A3", "MC", "A4"]
        .iter()
        .map(|n| {
            let f = premise_formula(&lt.expanded, n)
                .or_else(|| lt.expanded.claim(n).and_then(|c| c.conjecture.as_ref()))
                .unwrap();
            (n.to_string(), f.peel_global().clone())
        })
        .collect();
    let checks = verify_model(&m, &formulas).unwrap();
    let by_name = |n: &str| checks.iter().find(|c| c.name == n).unwrap();
    assert!(by_name("U1").global);
    assert!(by_name("A2").global);
    assert!(by_name("A3").global);
    assert_eq!(by_name("MC").per_world, vec![true, false]);
    assert_eq!(by_name("A4").per_world, vec![true, false]);
}

#[test]
fn the_collapse_countermodel_census_is_512_candidates_and_32_valid() {
    let lt = builtin(VariantId::UFilter);
    let m = countermodel(lt, "MC", 2, 1);
    let census = count_partial_ultrafilters(&m, DEFAULT_THIRD_ORDER_LIMIT).unwrap();
    assert_eq!((census.candidates, census.valid), (512, 32));
}

#[test]
fn simplified_axioms_keep_t6_and_shed_the_contested_consequences() {
    let lt = builtin(VariantId::Simple);
    for (w, e) in [(2, 1), (1, 2)] {
        assert_valid(lt, "T6", w, e, false);
        assert_valid(lt, "FilterP", w, e, false);
        assert_valid(lt, "SelfId", w, e, false);
    }
    for (name, w, e) in
        [("MC", 2, 1), ("MT", 1, 2), ("A1", 1, 2), ("A4", 2, 1), ("A5", 2, 1), ("UltrafilterP", 1, 2)]
    {
        countermodel(lt, name, w, e);
    }
    suite_all_match(lt);
}

#[test]
fn strengthened_premises_carry_actual_existence_and_need_reflexivity_for_t3() {
    let se = builtin(VariantId::SimpleSE);
    for (w, e) in [(2, 1), (1, 2)] {
        assert_valid(se, "T6", w, e, false);
        assert_valid(se, "T7", w, e, false);
        assert_valid(se, "T3inT", w, e, false);
    }

    let m = countermodel(se, "T3", 1, 1);
    let expected = KripkeModel::new(1, 1, vec![0], 1, vec![vec![1]]).unwrap();
    assert_eq!(m, expected, "the T3 countermodel is not the empty-accessibility world");
    assert_eq!(m.succ(0), 0, "accessibility must be empty");

    let seint = builtin(VariantId::SimpleSEinT);
    let edge = |name: &str| {
        let c = seint.expanded.claim(name).unwrap();
        ProofEdge {
            name: name.to_string(),
            premises: c.premises.clone(),
            conclusion: c.conjecture.clone().unwrap(),
        }
    };
    let chain: Vec<ProofEdge> =
        ["L1", "L2", "T1'", "T3'", "L3", "T6"].iter().map(|n| edge(n)).collect();
    for (w, e) in [(2, 1), (1, 2)] {
        let cfg = SearchConfig::new(Bounds::new(w, e), Frame::T);
        for (name, res) in verify_proof_net(&seint.expanded, &chain, &cfg).unwrap() {
            assert!(
                matches!(res.outcome, ValidityOutcome::ValidAtBounds),
                "edge {} fails at ({},{})",
                name,
                w,
                e
            );
        }
    }
}

#[test]
fn the_principal_filter_premise_alone_carries_the_argument() {
    let lt = builtin(VariantId::SimpleHF);
    for (w, e) in [(2, 1), (1, 2)] {
        assert_valid(lt, "T6", w, e, false);
        assert_valid(lt, "T7", w, e, false);
        assert_valid(lt, "T3inT", w, e, false);
    }
    countermodel(lt, "T3", 1, 1);
    countermodel(lt, "MC", 2, 1);
    countermodel(lt, "MT", 1, 2);
    let cfg = SearchConfig::new(Bounds::new(1, 1), Frame::K);
    let res = find_model(&axioms_of(lt), &cfg).unwrap();
    assert!(matches!(res.outcome, SearchOutcome::ModelFound(_)), "axioms have no (1,1) model");
}

#[test]
fn barcan_laws_hold_for_possibilist_and_split_for_actualist_quantifiers() {
    let lt = builtin(VariantId::Base);
    assert_valid(lt, "barcan", 2, 2, false);
    assert_valid(lt, "barcanConverse", 2, 2, false);

    let m = countermodel(lt, "barcanConverseActualist", 2, 2);
    let domains: Vec<u64> = (0..m.worlds()).map(|w| m.exists_entities(w)).collect();
    assert!(
        domains.windows(2).any(|p| p[0] != p[1]),
        "countermodel should vary its domains: {:?}",
        m
    );
}

#[test]
fn the_set_quantifier_reduction_matches_naive_enumeration() {
    let f = parse_formula(
        "forall Z:PropSet. Pos Z -> (forall X:Property. meetOf X Z -> P X)",
        prelude(),
    )
    .unwrap();
    let c = Compiled::new(&expand_definitions(&f, prelude())).unwrap();
    let a = Assignment::new();
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let mask = |bits: usize| (1u64 << bits) - 1;
    for round in 0..1002 {
        let (w, e) = [(1, 1), (2, 1), (1, 2)][round % 3];
        let bits = w * e;
        let succ: Vec<u64> = (0..w).map(|_| rng.gen::<u64>() & mask(w)).collect();
        let exists = rng.gen::<u64>() & mask(bits);
        let pos: Vec<Vec<u64>> = (0..w)
            .map(|_| (0..rng.gen_range(0..=4usize)).map(|_| rng.gen::<u64>() & mask(bits)).collect())
            .collect();
        let m = KripkeModel::new(w, e, succ, exists, pos).unwrap();
        let naive = c.truth_limited(&m, &a, DEFAULT_THIRD_ORDER_LIMIT).unwrap();
        let reduced = c.truth_limited(&m, &a, 1).unwrap();
        assert_eq!(naive, reduced, "round {}: evaluation routes disagree on {:?}", round, m);
    }
}

#[test]
fn modal_schemas_track_their_frame_classes_and_witnesses_reverify() {
    let k = Compiled::new(
        &parse_formula("forall p:Prop. forall q:Prop. box (p -> q) -> (box p -> box q)", &[])
            .unwrap(),
    )
    .unwrap();
    let b = Compiled::new(&parse_formula("forall p:Prop. p -> box dia p", &[]).unwrap()).unwrap();
    let t = Compiled::new(&parse_formula("forall p:Prop. box p -> p", &[]).unwrap()).unwrap();
    let dc = Compiled::new(
        &parse_formula("forall X:Property. forall x:E. comp (comp X) x <-> X x", &[]).unwrap(),
    )
    .unwrap();
    let a = Assignment::new();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mask = |bits: usize| (1u64 << bits) - 1;
    for round in 0..1000 {
        let (w, e) = (rng.gen_range(1..=3usize), rng.gen_range(1..=2usize));
        let bits = w * e;
        let mut succ: Vec<u64> = (0..w).map(|_| rng.gen::<u64>() & mask(w)).collect();
        let exists = rng.gen::<u64>() & mask(bits);
        let pos: Vec<Vec<u64>> = (0..w)
            .map(|_| (0..rng.gen_range(0..=4usize)).map(|_| rng.gen::<u64>() & mask(bits)).collect())
            .collect();
        let m = KripkeModel::new(w, e, succ.clone(), exists, pos.clone()).unwrap();
        let all = mask(w);
        assert_eq!(k.truth(&m, &a).unwrap(), all, "round {}: distribution fails", round);
        assert_eq!(dc.truth(&m, &a).unwrap(), all, "round {}: double complement fails", round);

        for v in 0..w {
            succ[v] |= 1 << v;
        }
        let refl = KripkeModel::new(w, e, succ.clone(), exists, pos.clone()).unwrap();
        assert_eq!(t.truth(&refl, &a).unwrap(), all, "round {}: T fails on reflexive", round);

        for x in 0..w {
            for y in 0..w {
                if succ[x] >> y & 1 == 1 {
                    succ[y] |= 1 << x;
                }
            }
        }
        let sym = KripkeModel::new(w, e, succ, exists, pos).unwrap();
        assert_eq!(b.truth(&sym, &a).unwrap(), all, "round {}: B fails on symmetric", round);
    }

    // Every witness the corpus searches produce satisfies what it was found for.
    for lt in builtin_theories() {
        for claim in &lt.expanded.claims {
            let (w, e) = {
                let (w, e) = claim.bounds[0];
                (w as usize, e as usize)
            };
            match claim.kind {
                ClaimKind::Countersat => {
                    let m = countermodel(lt, &claim.name, w, e);
                    let conj = claim.conjecture.clone().unwrap();
                    let checks = verify_model(&m, &[(claim.name.clone(), conj)]).unwrap();
                    assert!(!checks[0].global, "{}/{} witness fails", lt.label, claim.name);
                }
                ClaimKind::Consistent => {
                    let cfg = SearchConfig::new(Bounds::new(w, e), claim_frame(lt, &claim.name));
                    let res = find_model(&axioms_of(lt), &cfg).unwrap();
                    let m = match res.outcome {
                        SearchOutcome::ModelFound(m) => m,
                        other => panic!("{} has no model: {:?}", lt.label, other),
                    };
                    let formulas: Vec<(String, Formula)> = lt
                        .expanded
                        .axioms
                        .iter()
                        .map(|(n, f)| (n.clone(), f.clone()))
                        .collect();
                    for c in verify_model(&m, &formulas).unwrap() {
                        assert!(c.global, "{} axiom {} fails on its witness", lt.label, c.name);
                    }
                }
                _ => {}
            }
        }
    }
}

#[test]
fn thf_export_covers_the_corpus_reparses_and_is_reproducible() {
    for lt in builtin_theories() {
        for keep in [false, true] {
            let problems = homl::thf::export_theory(lt, keep);
            assert_eq!(problems.len(), lt.theory.claims.len(), "{}: one problem per claim", lt.label);
            for p in &problems {
                homl::thf::check_problem(&p.text).unwrap_or_else(|e| {
                    panic!("{} does not re-parse: {}", p.filename, e);
                });
            }
            assert_eq!(problems, homl::thf::export_theory(lt, keep), "{}: export drifts", lt.label);
        }
    }
}

#[test]
fn the_whole_corpus_reproduces_its_declared_verdicts() {
    let report = run_suite(builtin_theories(), None, &SuiteOptions::default());
    assert_eq!(report.exit_code(), 0, "suite mismatches:\n{}", report.render_text());
}
