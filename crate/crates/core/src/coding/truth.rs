use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use serde::Serialize;

use crate::semantics::{all_tuples, eval_closed, FiniteStructure, FuncTable};
use crate::syntax::{Formula, Signature, Term, Theory};
use crate::termmodel::{TermModel, TermUniverse};

use super::code::{decode_formula, encode_formula, encode_tuple, Code};
use super::stage::{CodedLayer, OrdinaryOracle};
use super::CodingError;

/// A valuation `f` of formula codes, `0` for true and `1` for false.
///
/// Explicit entries take precedence. A derived assignment answers every
/// other closed formula of print length at most `size_bound` by evaluation
/// in the term model, with quantifiers ranging over class representatives.
#[derive(Clone, Debug)]
pub struct TruthAssignment {
    table: BTreeMap<Code, u8>,
    model: Option<FiniteStructure>,
    representatives: Vec<Term>,
    size_bound: usize,
}

impl TruthAssignment {
    /// A purely tabulated assignment.
    pub fn from_table(entries: impl IntoIterator<Item = (Formula, u8)>, size_bound: usize) -> Self {
        TruthAssignment {
            table: entries.into_iter().map(|(f, v)| (encode_formula(&f), v)).collect(),
            model: None,
            representatives: Vec::new(),
            size_bound,
        }
    }

    pub fn is_derived(&self) -> bool {
        self.model.is_some()
    }

    pub fn size_bound(&self) -> usize {
        self.size_bound
    }

    pub fn representatives(&self) -> &[Term] {
        &self.representatives
    }

    /// Overrides the value at `a`.
    pub fn set(&mut self, a: &Formula, v: u8) {
        self.table.insert(encode_formula(a), v);
    }

    pub fn value(&self, a: &Formula) -> Option<u8> {
        if !self.table.is_empty() {
            if let Some(v) = self.table.get(&encode_formula(a)) {
                return Some(*v);
            }
        }
        let m = self.model.as_ref()?;
        if !a.is_closed() || a.to_string().chars().count() > self.size_bound {
            return None;
        }
        eval_closed(a, m).ok().map(|b| u8::from(!b))
    }

    pub fn value_code(&self, c: &Code) -> Option<u8> {
        if let Some(v) = self.table.get(c) {
            return Some(*v);
        }
        self.model.as_ref()?;
        self.value(&decode_formula(c).ok()?)
    }
}

/// `f(⌜B⌝) = 0` iff `M_T ⊨ B`, for closed `B` of print length at most
/// `size_bound`.
pub fn derive_truth_assignment(tm: &TermModel, size_bound: usize) -> TruthAssignment {
    TruthAssignment {
        table: BTreeMap::new(),
        model: Some(tm.as_structure()),
        representatives: tm.representatives(),
        size_bound,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Clause {
    TwoValued,
    Negation,
    Conjunction,
    Disjunction,
    Implication,
    Universal,
    Existential,
    EqReflexive,
    EqSubstitution,
    Inductive,
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("serializable");
        write!(f, "{}", s.as_str().unwrap_or("?"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClauseViolation {
    pub clause: Clause,
    pub formula: String,
    pub detail: String,
}

/// How far the quantifier clauses were checked.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuantifierCheck {
    /// Checked over class representatives of the model `f` came from.
    Verified,
    /// Checked over the bounded term universe only; can refute but not
    /// confirm.
    BoundedPass,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IReport {
    pub violations: Vec<ClauseViolation>,
    pub formulas_checked: usize,
    pub quantifiers: QuantifierCheck,
}

impl IReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }
}

fn print_len(a: &Formula) -> usize {
    a.to_string().chars().count()
}

/// Closed formulas reachable from `corpus` by taking immediate subformulas
/// and quantifier instances at the terms in `range`, keeping those within
/// the size bound.
fn checked_fragment(corpus: &[Formula], range: &[Term], size_bound: usize) -> Vec<Formula> {
    let mut seen: HashSet<Formula> = HashSet::new();
    let mut out = Vec::new();
    let mut work: Vec<Formula> = corpus.iter().rev().cloned().collect();
    while let Some(a) = work.pop() {
        if !a.is_closed() || print_len(&a) > size_bound || !seen.insert(a.clone()) {
            continue;
        }
        match &a {
            Formula::Not(b) => work.push((**b).clone()),
            Formula::And(b, c) | Formula::Or(b, c) | Formula::Imp(b, c) => {
                work.push((**c).clone());
                work.push((**b).clone());
            }
            Formula::Forall(x, b) | Formula::Exists(x, b) => {
                for t in range.iter().rev() {
                    work.push(b.replace_var(x, t));
                }
            }
            _ => {}
        }
        out.push(a);
    }
    out
}

/// Atoms with a free `x` in some argument, the other arguments ranging over
/// the depth-0 terms of the universe.
fn atomic_templates(sig: &Signature, universe: &TermUniverse, x: &str) -> Vec<Formula> {
    let mut slots: Vec<Term> = vec![Term::var(x)];
    slots.extend(universe.terms().iter().filter(|t| t.depth() == 0).cloned());
    let with_x = |args: &[usize]| args.contains(&0);
    let mut out = Vec::new();
    for args in all_tuples(slots.len(), 2).filter(|a| with_x(a)) {
        out.push(Formula::eq(slots[args[0]].clone(), slots[args[1]].clone()));
    }
    let preds = sig
        .ordinary_preds()
        .iter()
        .map(|(q, k)| (q, *k, false))
        .chain(sig.inductive_preds().iter().map(|(p, k)| (p, *k, true)));
    for (p, k, inductive) in preds {
        for args in all_tuples(slots.len(), k).filter(|a| with_x(a)) {
            let ts = args.iter().map(|&i| slots[i].clone()).collect();
            out.push(if inductive {
                Formula::ind(p.clone(), ts)
            } else {
                Formula::rel(p.clone(), ts)
            });
        }
    }
    out
}

/// Checks the clauses of `I(f)` on the fragment generated by `corpus`.
///
/// The inductive clause compares `f(⌜P_i(t⃗)⌝) = 0` with membership of
/// `⌜t⃗⌝` in the saturated coded stages, i.e. with the success of the
/// `P̃_i` witness search without a stage bound.
pub fn check_i_clauses(
    f: &TruthAssignment,
    theory: &Theory,
    universe: &TermUniverse,
    size_bound: usize,
    corpus: &[Formula],
) -> Result<IReport, CodingError> {
    let range: Vec<Term> = if f.is_derived() {
        f.representatives().to_vec()
    } else {
        universe.terms().to_vec()
    };
    let fragment = checked_fragment(corpus, &range, size_bound);
    let mut violations = Vec::new();
    let mut violate = |clause: Clause, a: &Formula, detail: String| {
        violations.push(ClauseViolation {
            clause,
            formula: a.to_string(),
            detail,
        })
    };

    for a in &fragment {
        let Some(v) = f.value(a) else {
            violate(Clause::TwoValued, a, "f is undefined".into());
            continue;
        };
        if v > 1 {
            violate(Clause::TwoValued, a, format!("f takes the value {v}"));
            continue;
        }
        let sub = |b: &Formula| f.value(b).filter(|&w| w <= 1);
        let (clause, expected) = match a {
            Formula::Not(b) => (Clause::Negation, sub(b).map(|w| 1 - w)),
            Formula::And(b, c) => (Clause::Conjunction, sub(b).zip(sub(c)).map(|(p, q)| p.max(q))),
            Formula::Or(b, c) => (Clause::Disjunction, sub(b).zip(sub(c)).map(|(p, q)| p.min(q))),
            Formula::Imp(b, c) => (Clause::Implication, sub(b).zip(sub(c)).map(|(p, q)| (1 - p).min(q))),
            Formula::Forall(x, b) | Formula::Exists(x, b) => {
                let values: Option<Vec<u8>> = range.iter().map(|t| sub(&b.replace_var(x, t))).collect();
                match a {
                    Formula::Forall(..) => (Clause::Universal, values.map(|vs| u8::from(vs.contains(&1)))),
                    _ => (Clause::Existential, values.map(|vs| u8::from(!vs.contains(&0)))),
                }
            }
            _ => continue,
        };
        if let Some(e) = expected {
            if e != v {
                violate(clause, a, format!("f = {v}, the clause requires {e}"));
            }
        }
    }

    for t in universe.terms() {
        let a = Formula::eq(t.clone(), t.clone());
        if print_len(&a) <= size_bound && f.value(&a) != Some(0) {
            violate(Clause::EqReflexive, &a, "f(t = t) must be 0".into());
        }
    }

    let x = "x";
    let depth0: Vec<Term> = universe.terms().iter().filter(|t| t.depth() == 0).cloned().collect();
    let mut bodies: BTreeSet<(String, Formula)> = BTreeSet::new();
    for a in &fragment {
        if let Formula::Forall(y, b) | Formula::Exists(y, b) = a {
            bodies.insert((y.clone(), (**b).clone()));
        }
    }
    let templates = atomic_templates(theory.signature(), universe, x);
    let mut eq_subst = |var: &str, b: &Formula, pairs: &[Term]| {
        for t in pairs {
            for u in pairs {
                let a = Formula::imp(
                    Formula::and(Formula::eq(t.clone(), u.clone()), b.replace_var(var, t)),
                    b.replace_var(var, u),
                );
                if print_len(&a) > size_bound {
                    continue;
                }
                if f.value(&a) != Some(0) {
                    violate(Clause::EqSubstitution, &a, "f must be 0".into());
                }
            }
        }
    };
    for b in &templates {
        eq_subst(x, b, universe.terms());
    }
    for (y, b) in &bodies {
        eq_subst(y, b, &depth0);
    }

    let oracle = OrdinaryOracle::Truth(f.clone());
    let layer = CodedLayer::new(theory, universe, &oracle);
    let stages = layer.saturate_stages()?;
    let last = stages.last().expect("non-empty");
    for (i, (p, k)) in theory.signature().inductive_preds().iter().enumerate() {
        for tuple in all_tuples(universe.len(), *k) {
            let ts: Vec<Term> = tuple.iter().map(|&j| universe.terms()[j].clone()).collect();
            let a = Formula::ind(p.clone(), ts.clone());
            let claimed = f.value(&a) == Some(0);
            let derived = last[i].contains(&encode_tuple(&ts));
            if claimed != derived {
                violate(
                    Clause::Inductive,
                    &a,
                    if derived {
                        "the witness search succeeds but f is not 0".into()
                    } else {
                        "f is 0 but the witness search fails".into()
                    },
                );
            }
        }
    }

    Ok(IReport {
        violations,
        formulas_checked: fragment.len(),
        quantifiers: if f.is_derived() {
            QuantifierCheck::Verified
        } else {
            QuantifierCheck::BoundedPass
        },
    })
}

/// Rebuilds a finite structure from `f`: universe terms are identified when
/// `f(⌜t = u⌝) = 0`, classes ordered by first member, and tables read off
/// atom values at class representatives.
pub fn rebuild_from_truth(
    f: &TruthAssignment,
    sig: &Signature,
    universe: &TermUniverse,
) -> Result<FiniteStructure, CodingError> {
    let holds = |a: Formula| f.value(&a) == Some(0);
    let terms = universe.terms();
    let mut class_of: Vec<usize> = Vec::with_capacity(terms.len());
    let mut reps: Vec<usize> = Vec::new();
    for (i, t) in terms.iter().enumerate() {
        match reps
            .iter()
            .position(|&r| holds(Formula::eq(terms[r].clone(), t.clone())))
        {
            Some(c) => class_of.push(c),
            None => {
                class_of.push(reps.len());
                reps.push(i);
            }
        }
    }
    let n = reps.len();
    let find = |t: &Term| -> Result<usize, CodingError> {
        if let Some(i) = universe.index_of(t) {
            return Ok(class_of[i]);
        }
        reps.iter()
            .position(|&r| holds(Formula::eq(t.clone(), terms[r].clone())))
            .ok_or_else(|| CodingError::OutsideUniverse(t.to_string()))
    };
    let mut m = FiniteStructure::new(n);
    for c in sig.constants() {
        m = m.with_const(c.clone(), find(&Term::cnst(c.clone()))?);
    }
    for (g, k) in sig.functions() {
        let mut values = Vec::new();
        for args in all_tuples(n, *k) {
            let t = Term::app(g.clone(), args.iter().map(|&a| terms[reps[a]].clone()).collect());
            values.push(find(&t)?);
        }
        m = m.with_func(g.clone(), FuncTable::new(*k, values));
    }
    let rep_terms = |args: &[usize]| -> Vec<Term> { args.iter().map(|&a| terms[reps[a]].clone()).collect() };
    for (q, k) in sig.ordinary_preds() {
        let rows: Vec<Vec<usize>> = all_tuples(n, *k)
            .filter(|a| holds(Formula::rel(q.clone(), rep_terms(a))))
            .collect();
        m = m.with_pred(q.clone(), rows);
    }
    for (p, k) in sig.inductive_preds() {
        let rows: Vec<Vec<usize>> = all_tuples(n, *k)
            .filter(|a| holds(Formula::ind(p.clone(), rep_terms(a))))
            .collect();
        m = m.with_ind(p.clone(), rows);
    }
    let names = (1..=sig.name_budget())
        .map(|i| find(&Term::Name(i)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(m.with_names(names))
}
