mod common;

use common::*;
use folid::coding::*;
use folid::semantics::{eval_closed, kleene_stages, standardize, FiniteStructure, FuncTable};
use folid::termmodel::*;
use folid::{Formula, Signature, Term, Theory};
use num_bigint::BigUint;
use proptest::prelude::*;

fn parse(text: &str, sig: &Signature) -> Formula {
    folid::parser::parse_formula(text, sig).unwrap()
}

fn example_clamp() -> FiniteStructure {
    FiniteStructure::new(3)
        .with_const("0", 0)
        .with_func("s", FuncTable::new(1, vec![1, 2, 2]))
        .with_ind("N", [vec![0], vec![1], vec![2]])
}

#[test]
fn single_element_names() {
    let m = FiniteStructure::new(1)
        .with_const("0", 0)
        .with_func("s", FuncTable::new(1, vec![0]))
        .with_ind("N", [vec![0]]);
    assert_eq!(name_extend(&m, 4).unwrap().names(), &[0, 0, 0, 0]);
    let tm = term_model(&m, &Theory::example_nat(), 4, 2);
    assert!(check_termmodel_name_extended(&tm));
    assert_eq!(tm.classes().len(), 1);
}

#[test]
fn name_standard_examples() {
    let th = nat_theory();
    for name in STANDARD_MODELS {
        assert!(check_name_standard(&model(name), &th, 8).unwrap(), "{name}");
    }
    assert!(!check_name_standard(&model("junk"), &th, 8).unwrap());
}

#[test]
fn class_count_is_stable_in_depth() {
    let th = nat_theory();
    for name in STANDARD_MODELS {
        let m = model(name);
        let counts: Vec<usize> = (0..=3).map(|d| term_model(&m, &th, 8, d).classes().len()).collect();
        assert!(counts.iter().all(|&c| c == m.size()), "{name}: {counts:?}");
    }
}

#[test]
fn term_models_of_fixtures() {
    let th = nat_theory();
    for name in STANDARD_MODELS {
        let tm = term_model(&model(name), &th, 8, 2);
        assert!(check_termmodel_name_extended(&tm), "{name}");
        assert!(check_termmodel_standard(&tm, &th).unwrap(), "{name}");
        assert!(!check_termmodel_name_extended(&tm.forget_names().unwrap()), "{name}");
    }
}

#[test]
fn truth_transfer_examples() {
    let th = nat_theory();
    let sig = th.signature();
    let clamp = model("clamp");
    let fixed = model("fixed");
    assert_eq!(
        check_truth_transfer(&clamp, sig, &parse("forall x. N(x)", sig), 2).unwrap(),
        (true, true)
    );
    assert_eq!(
        check_truth_transfer(&fixed, sig, &parse("exists x. ~N(x)", sig), 2).unwrap(),
        (true, true)
    );
    assert_eq!(
        check_truth_transfer(&clamp, sig, &parse("0 = 0", sig), 2).unwrap(),
        (true, true)
    );
    assert!(matches!(
        check_truth_transfer(&clamp, sig, &parse("N(x)", sig), 2),
        Err(TermModelError::OpenFormula(_))
    ));
}

#[test]
fn code_examples() {
    let sig = Signature::example_nat();
    let s0 = folid::parser::parse_term("s(0)", &sig).unwrap();
    assert_eq!(decode_term(&encode_term(&s0)).unwrap(), s0);
    assert_ne!(encode_term(&Term::cnst("0")), encode_term(&s0));
    let atom = parse("N(s(0))", &sig);
    assert_eq!(decode(&encode_formula(&atom)).unwrap().head_tag(), "indatom");
    assert!(unpair(&BigUint::from(1u8)).is_err());
}

/// `⟨a, b⟩` read back bit by bit, without the library's decoder.
fn naive_unpair(c: &BigUint) -> (BigUint, BigUint) {
    let bits: Vec<bool> = (0..c.bits()).map(|i| c.bit(i)).collect();
    let m = bits.iter().take_while(|&&b| b).count();
    assert!(!bits[m]);
    let len_bits = &bits[m + 1..m + 1 + m];
    let len = len_bits
        .iter()
        .enumerate()
        .fold(0usize, |acc, (i, &b)| acc | (usize::from(b) << i));
    let a_bits = &bits[2 * m + 1..2 * m + 1 + len];
    let a = a_bits
        .iter()
        .rev()
        .fold(BigUint::from(0u8), |acc, &b| (acc << 1u8) + BigUint::from(u8::from(b)));
    let b = c >> (2 * m + 1 + len);
    (a, b)
}

proptest! {
    #[test]
    fn pairing_matches_its_bit_layout(a in 0u64..1_000_000, b in 0u64..1_000_000) {
        let (a, b) = (BigUint::from(a), BigUint::from(b));
        let c = pair(&a, &b);
        prop_assert_eq!(naive_unpair(&c), (a.clone(), b.clone()));
        prop_assert_eq!(unpair(&c).unwrap(), (a, b));
    }

    #[test]
    fn formula_codes_round_trip(f in arb_formula()) {
        let c = encode_formula(&f);
        prop_assert_eq!(decode_formula(&c).unwrap(), f);
    }

    #[test]
    fn formula_codes_are_injective(f in arb_formula(), g in arb_formula()) {
        prop_assert_eq!(f == g, encode_formula(&f) == encode_formula(&g));
    }

    #[test]
    fn sequences_round_trip(items in prop::collection::vec(0u32..5000, 0..6)) {
        let codes: Vec<BigUint> = items.iter().map(|&i| BigUint::from(i)).collect();
        let s = seq(&codes);
        prop_assert_eq!(seq_len(&s).unwrap(), codes.len());
        for (i, c) in codes.iter().enumerate() {
            prop_assert_eq!(&proj(&s, i).unwrap(), c);
            prop_assert!(seq_member(c, &s).unwrap());
        }
        prop_assert_eq!(unseq(&s).unwrap(), codes);
    }
}

fn nat_layer_setting(depth: usize) -> (Theory, TermUniverse, OrdinaryOracle) {
    let th = Theory::example_nat();
    let u = TermUniverse::new(&Signature::example_nat(), depth);
    let m = FiniteStructure::new(4)
        .with_const("0", 0)
        .with_func("s", FuncTable::new(1, vec![1, 2, 3, 3]));
    (th, u, OrdinaryOracle::Model(m))
}

fn code_of(text: &str) -> Code {
    let sig = Signature::example_nat();
    encode_tuple(&[folid::parser::parse_term(text, &sig).unwrap()])
}

#[test]
fn coded_stages() {
    let (th, u, oracle) = nat_layer_setting(2);
    let layer = CodedLayer::new(&th, &u, &oracle);
    let s1 = layer.apply(&layer.empty()).unwrap();
    assert_eq!(s1[0], [code_of("0")].into());
    let s2 = layer.apply(&s1).unwrap();
    assert_eq!(s2[0], [code_of("0"), code_of("s(0)")].into());
}

#[test]
fn w_examples() {
    let (th, u, oracle) = nat_layer_setting(2);
    let layer = CodedLayer::new(&th, &u, &oracle);
    let empty = stage_code(&layer.empty());
    let zero = stage_code(&vec![[code_of("0")].into()]);
    let one = stage_code(&vec![[code_of("s(0)")].into()]);
    assert!(layer.eval_w(&empty, &zero).unwrap());
    assert!(!layer.eval_w(&empty, &one).unwrap());
    assert!(layer.eval_w(&zero, &one).unwrap());
    assert!(layer.eval_w(&one, &empty).unwrap());
}

#[test]
fn witness_search_examples() {
    let (th, u, oracle) = nat_layer_setting(2);
    let w = search_p_tilde("N", &code_of("s(0)"), &oracle, &th, &u, 3)
        .unwrap()
        .unwrap();
    assert_eq!(w.len(), 3);
    assert!(w.stages[2][0].contains(&code_of("s(0)")));
    assert_eq!(
        search_p_tilde("N", &code_of("0"), &oracle, &th, &u, 3)
            .unwrap()
            .unwrap()
            .len(),
        2
    );
    assert!(search_p_tilde("N", &code_of("s(s(0))"), &oracle, &th, &u, 1)
        .unwrap()
        .is_none());
}

#[test]
fn negated_oracle_breaks_correspondence() {
    let th = Theory::example_nat();
    let tm = term_model(&example_clamp(), &th, 3, 2);
    let u = tm.universe().clone();
    let good = OrdinaryOracle::Model(tm.base().clone());
    assert!(check_code_correspondence(&tm, &good, &th, &u, 3).unwrap().is_empty());
    let bad = good.negated();
    assert!(!check_code_correspondence(&tm, &bad, &th, &u, 3).unwrap().is_empty());
    let zero = check_code_correspondence(&tm, &OrdinaryOracle::Model(tm.base().clone()), &th, &u, 0).unwrap();
    assert!(zero.is_empty());
}

/// Searches for every universe term agree with the semantic stages, and
/// every returned witness chains under `W`.
fn cross_validate(tm: &TermModel, th: &Theory, k_max: usize) {
    let th = th.with_name_budget(tm.signature().name_budget());
    let u = tm.universe();
    let oracle = OrdinaryOracle::Model(tm.base().clone());
    let layer = CodedLayer::new(&th, u, &oracle);
    let stages = kleene_stages(&tm.as_structure(), &th, k_max).unwrap();
    for (i, (p, _)) in th.signature().inductive_preds().iter().enumerate() {
        for t in u.terms() {
            let code = encode_tuple(std::slice::from_ref(t));
            let found = layer.search(p, &code, k_max).unwrap();
            let class = tm.class_of_term(t).unwrap();
            assert_eq!(found.is_some(), stages[k_max][i].contains(&vec![class]), "{p}({t})");
            if let Some(w) = found {
                let codes = w.stage_codes();
                for pair in codes.windows(2) {
                    assert!(layer.eval_w(&pair[0], &pair[1]).unwrap());
                }
                let last = &w.stages[w.len() - 1][i];
                assert!(last.iter().any(|c| {
                    let s = decode_tuple(c).unwrap();
                    eval_closed(&Formula::eq(s[0].clone(), t.clone()), tm.base()).unwrap()
                }));
            }
        }
    }
}

#[test]
fn search_and_w_agree_on_the_mutual_system() {
    let th = nat_theory();
    for name in STANDARD_MODELS {
        let tm = term_model(&model(name), &th, 3, 2);
        cross_validate(&tm, &th, 3);
    }
}

#[test]
fn truth_assignment_examples() {
    let th = Theory::example_nat();
    let tm = term_model(&example_clamp(), &th, 8, 2);
    let sig = tm.signature().clone();
    let f = derive_truth_assignment(&tm, 80);
    assert_eq!(f.value(&parse("0 = 0", &sig)), Some(0));
    assert_eq!(f.value(&parse("N(s(c_1))", &sig)), Some(0));
    assert_eq!(f.value(&parse("exists x. ~N(x)", &sig)), Some(1));
    let corpus = vec![parse("forall x. N(x) -> N(s(x))", &sig), parse("~(0 = 0)", &sig)];
    let report = check_i_clauses(&f, &th.with_name_budget(8), tm.universe(), 80, &corpus).unwrap();
    assert!(report.is_empty(), "{:?}", report.violations);
    assert_eq!(report.quantifiers, QuantifierCheck::Verified);
}

#[test]
fn clause_violations_are_reported() {
    let th = Theory::example_nat().with_name_budget(8);
    let tm = term_model(&example_clamp(), &Theory::example_nat(), 8, 1);
    let sig = tm.signature().clone();
    let mut f = derive_truth_assignment(&tm, 80);
    f.set(&parse("~(0 = 0)", &sig), 0);
    let report = check_i_clauses(&f, &th, tm.universe(), 80, &[parse("~(0 = 0)", &sig)]).unwrap();
    assert!(report.violations.iter().any(|v| v.clause == Clause::Negation));
    let mut g = derive_truth_assignment(&tm, 80);
    g.set(&parse("N(c_1)", &sig), 1);
    let report = check_i_clauses(&g, &th, tm.universe(), 80, &[]).unwrap();
    assert!(report
        .violations
        .iter()
        .any(|v| v.clause == Clause::Inductive && v.formula == "N(c_1)"));
}

#[test]
fn truth_rebuilds_the_term_model() {
    let th = nat_theory();
    for name in STANDARD_MODELS {
        let tm = term_model(&model(name), &th, 8, 2);
        let f = derive_truth_assignment(&tm, 80);
        let rebuilt = rebuild_from_truth(&f, tm.signature(), tm.universe()).unwrap();
        assert_eq!(rebuilt, tm.as_structure(), "{name}");
    }
}

#[test]
fn standardized_family_term_models_are_standard() {
    let th = Theory::example_nat();
    for m in small_family(&["N"], 3) {
        let m = standardize(&m, &th).unwrap();
        let tm = term_model(&m, &th, m.size(), 1);
        assert!(check_termmodel_standard(&tm, &th).unwrap());
    }
}
