mod common;

use std::collections::BTreeMap;

use common::*;
use folid::parser::*;
use folid::semantics::{eval_formula, Assignment, FiniteStructure, FuncTable};
use folid::{Formula, Sequent, Substitution, Term};
use proptest::prelude::*;

fn sig3() -> folid::Signature {
    nat_theory().signature().with_name_budget(3)
}

/// A structure interpreting `0`, `s`, `N`, `E`, `O` and the names `c_1..c_3`.
fn test_structure() -> FiniteStructure {
    let m = FiniteStructure::new(3)
        .with_const("0", 0)
        .with_func("s", FuncTable::new(1, vec![1, 2, 0]))
        .with_ind("N", [vec![0], vec![2]])
        .with_ind("E", [vec![1]])
        .with_ind("O", []);
    folid::termmodel::name_extend(&m, 3).unwrap()
}

fn arb_subst() -> impl Strategy<Value = Substitution> {
    prop::collection::btree_map(prop::sample::select(vec!["x", "y", "z"]), arb_term(), 0..3)
        .prop_map(|m: BTreeMap<&str, Term>| Substitution::from_pairs(m))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn terms_round_trip(t in arb_term()) {
        prop_assert_eq!(parse_term(&t.to_string(), &sig3()).unwrap(), t);
    }

    #[test]
    fn formulas_round_trip(f in arb_formula()) {
        prop_assert_eq!(parse_formula(&f.to_string(), &sig3()).unwrap(), f);
    }

    #[test]
    fn sequents_round_trip(a in prop::collection::vec(arb_formula(), 0..3), b in prop::collection::vec(arb_formula(), 0..3)) {
        let s = Sequent::new(a, b);
        prop_assert_eq!(parse_sequent(&s.to_string(), &sig3()).unwrap(), s);
    }

    #[test]
    fn substitution_commutes_with_evaluation(f in arb_formula(), theta in arb_subst(), vals in prop::collection::vec(0usize..3, 3)) {
        // M, ρ ⊨ Aθ iff M, ρ' ⊨ A with ρ'(x) = ⟦xθ⟧ρ
        let m = test_structure();
        let rho: Assignment = ["x", "y", "z"].iter().map(|x| x.to_string()).zip(vals).collect();
        let mut shifted = rho.clone();
        for x in ["x", "y", "z"] {
            let t = theta.get(x).cloned().unwrap_or_else(|| Term::var(x));
            shifted.insert(x.to_string(), value(&t, &m, &rho));
        }
        let lhs = eval_formula(&f.substitute(&theta), &m, &rho).unwrap();
        prop_assert_eq!(lhs, eval_formula(&f, &m, &shifted).unwrap());
    }

    #[test]
    fn substitution_free_vars(f in arb_formula(), theta in arb_subst()) {
        let g = f.substitute(&theta);
        let mut want = std::collections::BTreeSet::new();
        for x in f.free_vars() {
            match theta.get(&x) {
                Some(t) => want.extend(t.free_vars()),
                None => { want.insert(x); }
            }
        }
        prop_assert_eq!(g.free_vars(), want);
    }

    #[test]
    fn canonical_key_is_alpha_invariant(f in arb_formula(), fresh in prop::sample::select(vec!["u", "v", "w"])) {
        // renaming one bound variable to a fresh one
        let g = rename_outer_binder(&f, fresh);
        prop_assert!(f.alpha_eq(&g));
        prop_assert_eq!(f.canonical_key(), g.canonical_key());
        prop_assert_eq!(f.canonical().canonical(), f.canonical());
    }

    #[test]
    fn equal_keys_mean_equal_truth(f in arb_formula(), g in arb_formula()) {
        if f.canonical_key() == g.canonical_key() {
            let m = test_structure();
            for vals in folid::semantics::all_tuples(3, 3) {
                let rho: Assignment = ["x", "y", "z"].iter().map(|x| x.to_string()).zip(vals).collect();
                prop_assert_eq!(eval_formula(&f, &m, &rho).unwrap(), eval_formula(&g, &m, &rho).unwrap());
            }
        }
    }
}

/// Renames the outermost binder, if any, to `fresh` (absent from the
/// generator's variables).
fn rename_outer_binder(f: &Formula, fresh: &str) -> Formula {
    match f {
        Formula::Forall(x, b) => Formula::forall(fresh, b.replace_var(x, &Term::var(fresh))),
        Formula::Exists(x, b) => Formula::exists(fresh, b.replace_var(x, &Term::var(fresh))),
        Formula::Not(b) => Formula::not(rename_outer_binder(b, fresh)),
        Formula::And(a, b) => Formula::and(rename_outer_binder(a, fresh), (**b).clone()),
        Formula::Or(a, b) => Formula::or(rename_outer_binder(a, fresh), (**b).clone()),
        Formula::Imp(a, b) => Formula::imp(rename_outer_binder(a, fresh), (**b).clone()),
        _ => f.clone(),
    }
}

#[test]
fn fixture_files_round_trip() {
    let th = nat_theory();
    assert_eq!(parse_signature(&print_signature(&th)).unwrap(), th);
    for name in ["clamp", "cycle2", "junk", "fixed"] {
        let m = model(name);
        assert_eq!(
            parse_structure(&print_structure(&m), th.signature()).unwrap(),
            m,
            "{name}"
        );
    }
    for name in PASSING.iter().chain(&FAILING_GTC).chain(&["allr_fresh"]) {
        let pg = proof(name);
        let again = parse_proof(&print_proof(&pg), th.signature()).unwrap();
        assert_eq!(print_proof(&again), print_proof(&pg), "{name}");
        assert_eq!(again.len(), pg.len());
    }
}

#[test]
fn error_kinds() {
    let th = nat_theory();
    let sig = th.signature();
    let kind = |r: Result<Formula, ParseError>| r.unwrap_err().kind;
    assert_eq!(kind(parse_formula("s(0, 0) = 0", sig)), ParseErrorKind::ArityMismatch);
    assert_eq!(kind(parse_formula("Q(0)", sig)), ParseErrorKind::UndeclaredSymbol);
    assert_eq!(kind(parse_formula("N(0) /\\", sig)), ParseErrorKind::Syntax);
    assert_eq!(
        kind(parse_formula("c_4 = 0", &sig3())),
        ParseErrorKind::UndeclaredSymbol
    );
    let dup = parse_signature("sig const 0; const 0; rules").unwrap_err();
    assert_eq!(dup.kind, ParseErrorKind::DuplicateSymbol);
    let bad_rule = parse_signature("sig const 0; ind N 1; rules rule r: N(0) => 0 = 0;").unwrap_err();
    assert!(matches!(
        bad_rule.kind,
        ParseErrorKind::NotInductive | ParseErrorKind::Syntax
    ));
    let dangling = parse_proof("node 1: |- N(0) by Wk premises [7];", sig).unwrap_err();
    assert_eq!(dangling.kind, ParseErrorKind::DanglingPremise);
    let table = parse_structure(
        r#"{"universe": 2, "consts": {"0": 0}, "funcs": {"s": [1]}, "ind": {"N": [], "E": [], "O": []}}"#,
        sig,
    )
    .unwrap_err();
    assert_eq!(table.kind, ParseErrorKind::TableIncomplete);
}

#[test]
fn spans_point_at_the_offending_token() {
    let th = nat_theory();
    let err = parse_formula("N(0) /\\\n  Q(0)", th.signature()).unwrap_err();
    assert_eq!((err.span.line, err.span.column), (2, 3));
}
