//! Arithmetic with an extra unary function `F`, the `N`-relativization of
//! its formulas, and the sequent that reduces truth in standard models of
//! PA+F to validity over `(Σ, Φ_N)`.
//!
//! `+` and `×` are the binary function symbols `add` and `mul`.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::semantics::{
    all_tuples, check_standard, eval_formula, eval_term, Assignment, FiniteStructure, SemanticsError,
};
use crate::syntax::{Atom, Formula, ProductionRule, Sequent, Signature, Term, Theory};

pub const NAT: &str = "N";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranslateError {
    #[error("`{0}` is not a symbol of PA+F")]
    ForeignSymbol(String),
    #[error("the inductive predicate N may not occur in a PA+F formula")]
    InductiveAtom,
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

/// The signature `{0, s, F, add, mul, N}` and the rules `Φ_N`.
pub fn builtin_pa_signature() -> Theory {
    let mut sig = Signature::new();
    sig.add_constant("0").expect("fresh");
    sig.add_function("s", 1).expect("fresh");
    sig.add_function("F", 1).expect("fresh");
    sig.add_function("add", 2).expect("fresh");
    sig.add_function("mul", 2).expect("fresh");
    sig.add_inductive(NAT, 1).expect("fresh");
    let x = Term::var("x");
    let rules = vec![
        ProductionRule::new("z", Atom::new(NAT, vec![Term::cnst("0")]), vec![], vec![]),
        ProductionRule::new(
            "sc",
            Atom::new(NAT, vec![Term::app1("s", x.clone())]),
            vec![],
            vec![Atom::new(NAT, vec![x])],
        ),
    ];
    Theory::new(sig, rules).expect("well-formed")
}

/// A formula of PA+F: only `0, s, F, add, mul` and equality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PaFormula(Formula);

impl PaFormula {
    pub fn new(f: Formula) -> Result<Self, TranslateError> {
        fn term_ok(t: &Term) -> Result<(), TranslateError> {
            match t {
                Term::Var(_) => Ok(()),
                Term::Const(c) if c == "0" => Ok(()),
                Term::App(g, args)
                    if matches!((g.as_str(), args.len()), ("s", 1) | ("F", 1) | ("add", 2) | ("mul", 2)) =>
                {
                    args.iter().try_for_each(term_ok)
                }
                Term::Const(c) | Term::App(c, _) => Err(TranslateError::ForeignSymbol(c.clone())),
                Term::Name(i) => Err(TranslateError::ForeignSymbol(format!("c{i}"))),
            }
        }
        fn ok(f: &Formula) -> Result<(), TranslateError> {
            match f {
                Formula::False => Ok(()),
                Formula::Eq(t, u) => {
                    term_ok(t)?;
                    term_ok(u)
                }
                Formula::Ind(p, _) if p == NAT => Err(TranslateError::InductiveAtom),
                Formula::Rel(p, _) | Formula::Ind(p, _) => Err(TranslateError::ForeignSymbol(p.clone())),
                Formula::Not(a) | Formula::Forall(_, a) | Formula::Exists(_, a) => ok(a),
                Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                    ok(a)?;
                    ok(b)
                }
            }
        }
        ok(&f)?;
        Ok(PaFormula(f))
    }

    pub fn formula(&self) -> &Formula {
        &self.0
    }

    pub fn into_formula(self) -> Formula {
        self.0
    }
}

fn v(x: &str) -> Term {
    Term::var(x)
}

fn s(t: Term) -> Term {
    Term::app1("s", t)
}

fn add(a: Term, b: Term) -> Term {
    Term::app("add", vec![a, b])
}

fn mul(a: Term, b: Term) -> Term {
    Term::app("mul", vec![a, b])
}

fn nat(t: Term) -> Formula {
    Formula::ind(NAT, vec![t])
}

/// PA1–PA6, in order.
pub fn peano_axioms() -> Vec<PaFormula> {
    let zero = || Term::cnst("0");
    let axioms = vec![
        Formula::forall("x", Formula::not(Formula::eq(s(v("x")), zero()))),
        Formula::forall(
            "x",
            Formula::forall(
                "y",
                Formula::imp(Formula::eq(s(v("x")), s(v("y"))), Formula::eq(v("x"), v("y"))),
            ),
        ),
        Formula::forall("x", Formula::eq(add(v("x"), zero()), v("x"))),
        Formula::forall(
            "x",
            Formula::forall("y", Formula::eq(add(v("x"), s(v("y"))), s(add(v("x"), v("y"))))),
        ),
        Formula::forall("x", Formula::eq(mul(v("x"), zero()), zero())),
        Formula::forall(
            "x",
            Formula::forall(
                "y",
                Formula::eq(mul(v("x"), s(v("y"))), add(mul(v("x"), v("y")), v("x"))),
            ),
        ),
    ];
    axioms
        .into_iter()
        .map(|a| PaFormula::new(a).expect("PA formula"))
        .collect()
}

/// `(F)`: `∀x (N(x) → N(F(x)))`.
pub fn f_closure() -> Formula {
    Formula::forall("x", Formula::imp(nat(v("x")), nat(Term::app1("F", v("x")))))
}

fn relativize_formula(a: &Formula) -> Formula {
    match a {
        Formula::False | Formula::Eq(..) | Formula::Rel(..) | Formula::Ind(..) => a.clone(),
        Formula::Not(b) => Formula::not(relativize_formula(b)),
        Formula::And(b, c) => Formula::and(relativize_formula(b), relativize_formula(c)),
        Formula::Or(b, c) => Formula::or(relativize_formula(b), relativize_formula(c)),
        Formula::Imp(b, c) => Formula::imp(relativize_formula(b), relativize_formula(c)),
        Formula::Forall(x, b) => Formula::forall(x.clone(), Formula::imp(nat(v(x)), relativize_formula(b))),
        Formula::Exists(x, b) => Formula::exists(x.clone(), Formula::and(nat(v(x)), relativize_formula(b))),
    }
}

/// `A^N`.
pub fn relativize(a: &PaFormula) -> Formula {
    relativize_formula(&a.0)
}

/// Every quantifier body is `N(x) → …` (for `∀x`) or `N(x) ∧ …` (for `∃x`).
pub fn quantifiers_guarded(a: &Formula) -> bool {
    match a {
        Formula::False | Formula::Eq(..) | Formula::Rel(..) | Formula::Ind(..) => true,
        Formula::Not(b) => quantifiers_guarded(b),
        Formula::And(b, c) | Formula::Or(b, c) | Formula::Imp(b, c) => quantifiers_guarded(b) && quantifiers_guarded(c),
        Formula::Forall(x, b) => match &**b {
            Formula::Imp(g, rest) => **g == nat(v(x)) && quantifiers_guarded(rest),
            _ => false,
        },
        Formula::Exists(x, b) => match &**b {
            Formula::And(g, rest) => **g == nat(v(x)) && quantifiers_guarded(rest),
            _ => false,
        },
    }
}

/// `(PA1)^N, …, (PA6)^N, (F), N(x_1), …, N(x_n) ⊢ A^N` with `x_i` the free
/// variables of `A`.
pub fn hardness_sequent(a: &PaFormula) -> Sequent {
    let mut ante: Vec<Formula> = peano_axioms().iter().map(relativize).collect();
    ante.push(f_closure());
    ante.extend(a.0.free_vars().into_iter().map(|x| nat(Term::Var(x))));
    Sequent::new(ante, vec![relativize(a)])
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct B1Violation {
    pub term: String,
    pub assignment: Assignment,
    pub value: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct B1Report {
    /// Unsatisfied hypotheses; the term check still runs.
    pub preconditions: Vec<String>,
    pub terms_checked: usize,
    pub violations: Vec<B1Violation>,
}

impl B1Report {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Terms over `0, s, F, add, mul` and the variables `vars`, up to `depth`.
pub fn pa_terms(vars: &[&str], depth: usize) -> Vec<Term> {
    let mut all: Vec<Term> = std::iter::once(Term::cnst("0"))
        .chain(vars.iter().map(|x| v(x)))
        .collect();
    let mut newest = 0;
    for _ in 0..depth {
        let old = all.len();
        let mut layer = Vec::new();
        for f in ["s", "F"] {
            for t in &all[newest..old] {
                layer.push(Term::app1(f, t.clone()));
            }
        }
        for f in ["add", "mul"] {
            for (i, a) in all.iter().enumerate() {
                for (j, b) in all.iter().enumerate() {
                    if i >= newest || j >= newest {
                        layer.push(Term::app(f, vec![a.clone(), b.clone()]));
                    }
                }
            }
        }
        newest = old;
        all.extend(layer);
    }
    all
}

/// The hypotheses checked by [`check_b1`]: standardness, PA2–PA6
/// relativized and `(F)`. PA1 is left out since no finite model with `N`
/// the least fixpoint satisfies PA1^N and PA2^N together.
pub fn b1_hypotheses() -> Vec<(String, Formula)> {
    let mut out: Vec<(String, Formula)> = peano_axioms()
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, a)| (format!("PA{}", i + 1), relativize(a)))
        .collect();
    out.push(("F".into(), f_closure()));
    out
}

/// Every term of depth `≤ d` over two variables denotes an `N`-element, for
/// every assignment into `N`.
pub fn check_b1(m: &FiniteStructure, theory: &Theory, d: usize) -> Result<B1Report, TranslateError> {
    let mut preconditions = Vec::new();
    if !check_standard(m, theory)? {
        preconditions.push("standard".to_string());
    }
    let empty = Assignment::new();
    for (name, h) in b1_hypotheses() {
        if !eval_formula(&h, m, &empty)? {
            preconditions.push(name);
        }
    }
    let ns: BTreeSet<usize> = m.ind(NAT).map(|r| r.iter().map(|t| t[0]).collect()).unwrap_or_default();
    let vars = ["x", "y"];
    let names: Vec<String> = vars.iter().map(|x| x.to_string()).collect();
    let terms = pa_terms(&vars, d);
    let mut violations = Vec::new();
    let dom: Vec<usize> = ns.iter().copied().collect();
    for t in &terms {
        for tuple in all_tuples(dom.len(), names.len()) {
            let rho: Assignment = names.iter().cloned().zip(tuple.iter().map(|&i| dom[i])).collect();
            let value = eval_term(t, m, &rho)?;
            if !ns.contains(&value) {
                violations.push(B1Violation {
                    term: t.to_string(),
                    assignment: rho,
                    value,
                });
            }
        }
    }
    Ok(B1Report {
        preconditions,
        terms_checked: terms.len(),
        violations,
    })
}

/// Truth with quantifiers ranging over `dom` only.
fn eval_restricted(
    a: &Formula,
    m: &FiniteStructure,
    dom: &[usize],
    rho: &mut Assignment,
) -> Result<bool, SemanticsError> {
    Ok(match a {
        Formula::False | Formula::Eq(..) | Formula::Rel(..) | Formula::Ind(..) => eval_formula(a, m, rho)?,
        Formula::Not(b) => !eval_restricted(b, m, dom, rho)?,
        Formula::And(b, c) => eval_restricted(b, m, dom, rho)? && eval_restricted(c, m, dom, rho)?,
        Formula::Or(b, c) => eval_restricted(b, m, dom, rho)? || eval_restricted(c, m, dom, rho)?,
        Formula::Imp(b, c) => !eval_restricted(b, m, dom, rho)? || eval_restricted(c, m, dom, rho)?,
        Formula::Forall(x, b) | Formula::Exists(x, b) => {
            let universal = matches!(a, Formula::Forall(..));
            let saved = rho.get(x).copied();
            let mut result = universal;
            for &u in dom {
                rho.insert(x.clone(), u);
                if eval_restricted(b, m, dom, rho)? != universal {
                    result = !universal;
                    break;
                }
            }
            match saved {
                Some(u) => rho.insert(x.clone(), u),
                None => rho.remove(x),
            };
            result
        }
    })
}

/// `(M ⊨ B` with quantifiers and free variables ranging over `⟦N⟧`,
/// `M ⊨ B^N` for every `N`-valued assignment of the free variables`)`.
pub fn check_b2_finite(m: &FiniteStructure, b: &PaFormula) -> Result<(bool, bool), TranslateError> {
    let dom: Vec<usize> = m
        .ind(NAT)
        .map(|r| r.iter().map(|t| t[0]).collect::<BTreeSet<_>>().into_iter().collect())
        .unwrap_or_default();
    let vars: Vec<String> = b.0.free_vars().into_iter().collect();
    let relativized = relativize(b);
    let (mut plain, mut rel) = (true, true);
    for tuple in all_tuples(dom.len(), vars.len()) {
        let mut rho: Assignment = vars.iter().cloned().zip(tuple.iter().map(|&i| dom[i])).collect();
        plain &= eval_restricted(&b.0, m, &dom, &mut rho)?;
        rel &= eval_formula(&relativized, m, &rho)?;
    }
    Ok((plain, rel))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_formula as formula;

    fn pa(text: &str) -> PaFormula {
        let th = builtin_pa_signature();
        PaFormula::new(formula(text, th.signature()).unwrap()).unwrap()
    }

    #[test]
    fn two_rules_and_six_axioms() {
        let th = builtin_pa_signature();
        assert_eq!(th.rules().len(), 2);
        assert_eq!(th.signature().function_arity("F"), Some(1));
        let ax = peano_axioms();
        assert_eq!(ax.len(), 6);
        assert_eq!(ax[0].formula().to_string(), "forall x. ~s(x) = 0");
        assert_eq!(ax[2].formula(), pa("forall x. add(x, 0) = x").formula());
    }

    #[test]
    fn relativization_examples() {
        assert_eq!(
            relativize(&pa("exists x. x = 0")),
            formula("exists x. N(x) /\\ x = 0", builtin_pa_signature().signature()).unwrap()
        );
        let r = relativize(&pa("forall x. exists y. y = s(x)"));
        let want = formula(
            "forall x. N(x) -> exists y. N(y) /\\ y = s(x)",
            builtin_pa_signature().signature(),
        )
        .unwrap();
        assert_eq!(r, want);
        assert!(quantifiers_guarded(&r));
    }

    #[test]
    fn n_is_rejected() {
        let th = builtin_pa_signature();
        let f = formula("N(0)", th.signature()).unwrap();
        assert_eq!(PaFormula::new(f), Err(TranslateError::InductiveAtom));
    }

    #[test]
    fn sequent_shape() {
        assert_eq!(hardness_sequent(&pa("0 = 0")).antecedent.len(), 7);
        assert_eq!(hardness_sequent(&pa("x = 0")).antecedent.len(), 8);
    }

    #[test]
    fn term_layers() {
        assert_eq!(pa_terms(&["x"], 0).len(), 2);
        // depth 1: s, F of 2 terms, add, mul of 4 pairs
        assert_eq!(pa_terms(&["x"], 1).len(), 2 + 4 + 8);
    }
}
