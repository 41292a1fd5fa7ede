//! Name extension, enumerated closed-term universes, and term models.
//!
//! A term model identifies closed terms that denote the same element of a
//! base structure. Once every element has a name constant, each class
//! already contains a depth-0 term, so a finite enumeration is exact.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::semantics::{self, eval_closed, eval_term, Assignment, FiniteStructure, FuncTable, SemanticsError};
use crate::syntax::{Formula, Signature, Term, Theory};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermModelError {
    #[error("name budget {budget} is smaller than the universe size {size}")]
    BudgetTooSmall { budget: usize, size: usize },
    #[error("elements {0:?} are not named by any name constant")]
    NotNameExtended(Vec<usize>),
    #[error("formula has free variables {0:?}")]
    OpenFormula(Vec<String>),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

/// `M_c`: interprets `c_i` as the `i`-th element for `i ≤ n` and as the
/// first element beyond that.
pub fn name_extend(m: &FiniteStructure, budget: usize) -> Result<FiniteStructure, TermModelError> {
    let n = m.size();
    if budget < n {
        return Err(TermModelError::BudgetTooSmall { budget, size: n });
    }
    let names = (1..=budget).map(|i| if i <= n { i - 1 } else { 0 }).collect();
    Ok(m.clone().with_names(names))
}

/// Elements of `m` not denoted by any name constant.
pub fn unnamed_elements(m: &FiniteStructure) -> Vec<usize> {
    let named: BTreeSet<usize> = m.names().iter().copied().collect();
    (0..m.size()).filter(|v| !named.contains(v)).collect()
}

/// Checks that name-extending a standard model keeps it standard.
pub fn check_name_standard(m: &FiniteStructure, theory: &Theory, budget: usize) -> Result<bool, TermModelError> {
    let mc = name_extend(m, budget)?;
    Ok(semantics::check_standard(&mc, &theory.with_name_budget(budget))?)
}

/// Closed terms of a signature up to a depth bound: declared constants then
/// name constants at depth 0, and at each further depth the new terms in
/// lexicographic order of their printed form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermUniverse {
    depth: usize,
    terms: Vec<Term>,
    index: HashMap<Term, usize>,
}

impl TermUniverse {
    pub fn new(sig: &Signature, depth: usize) -> Self {
        let mut terms: Vec<Term> = sig.constants().iter().map(|c| Term::cnst(c.clone())).collect();
        terms.extend((1..=sig.name_budget()).map(Term::Name));
        // Start of the newest layer; new terms need an argument from it.
        let mut newest = 0;
        for _ in 0..depth {
            let n = terms.len();
            let mut fresh = Vec::new();
            for (f, k) in sig.functions() {
                for args in semantics::all_tuples(n, *k) {
                    if args.iter().any(|&a| a >= newest) {
                        fresh.push(Term::app(f.clone(), args.iter().map(|&a| terms[a].clone()).collect()));
                    }
                }
            }
            let mut keyed: Vec<(String, Term)> = fresh.into_iter().map(|t| (t.to_string(), t)).collect();
            keyed.sort();
            newest = n;
            terms.extend(keyed.into_iter().map(|(_, t)| t));
        }
        let index = terms.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
        TermUniverse { depth, terms, index }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn index_of(&self, t: &Term) -> Option<usize> {
        self.index.get(t).copied()
    }

    pub fn contains(&self, t: &Term) -> bool {
        self.index.contains_key(t)
    }
}

/// One equivalence class of closed terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermClass {
    /// The element of the base structure every member denotes.
    pub value: usize,
    /// Indices into the term universe, ascending.
    pub members: Vec<usize>,
    pub representative: Term,
}

/// `M_T` over an enumerated term universe.
#[derive(Clone, Debug)]
pub struct TermModel {
    base: FiniteStructure,
    sig: Signature,
    universe: TermUniverse,
    classes: Vec<TermClass>,
    class_of_value: BTreeMap<usize, usize>,
}

/// Elements reachable as values of closed terms, each with a witness term.
fn closed_term_image(m: &FiniteStructure, sig: &Signature) -> Result<BTreeMap<usize, Term>, SemanticsError> {
    let empty = Assignment::new();
    let mut image: BTreeMap<usize, Term> = BTreeMap::new();
    let seeds = sig
        .constants()
        .iter()
        .map(|c| Term::cnst(c.clone()))
        .chain((1..=sig.name_budget()).map(Term::Name));
    for t in seeds {
        let v = eval_term(&t, m, &empty)?;
        image.entry(v).or_insert(t);
    }
    loop {
        let mut added = false;
        for (f, k) in sig.functions() {
            let table: &FuncTable = m.func(f).ok_or_else(|| SemanticsError::UnknownSymbol(f.clone()))?;
            let known: Vec<(usize, Term)> = image.iter().map(|(v, t)| (*v, t.clone())).collect();
            for pick in semantics::all_tuples(known.len(), *k) {
                let vals: Vec<usize> = pick.iter().map(|&i| known[i].0).collect();
                let v = table.apply(m.size(), &vals);
                if let std::collections::btree_map::Entry::Vacant(slot) = image.entry(v) {
                    let args = pick.iter().map(|&i| known[i].1.clone()).collect();
                    slot.insert(Term::app(f.clone(), args));
                    added = true;
                }
            }
        }
        if !added {
            return Ok(image);
        }
    }
}

impl TermModel {
    /// Builds the quotient without requiring name extension. Classes are
    /// ordered by their first enumerated member; classes with no member in
    /// the enumeration come last, by value.
    pub fn build_unchecked(m: &FiniteStructure, sig: &Signature, depth: usize) -> Result<Self, TermModelError> {
        let universe = TermUniverse::new(sig, depth);
        let empty = Assignment::new();
        let image = closed_term_image(m, sig)?;
        let mut members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, t) in universe.terms().iter().enumerate() {
            members.entry(eval_term(t, m, &empty)?).or_default().push(i);
        }
        let mut order: Vec<(usize, usize)> = image
            .keys()
            .map(|&v| {
                (
                    members.get(&v).and_then(|ms| ms.first().copied()).unwrap_or(usize::MAX),
                    v,
                )
            })
            .collect();
        order.sort_unstable();
        let mut classes = Vec::new();
        let mut class_of_value = BTreeMap::new();
        for (_, v) in order {
            let ms = members.remove(&v).unwrap_or_default();
            let representative = ms
                .iter()
                .filter_map(|&i| match universe.terms()[i] {
                    Term::Name(k) => Some(k),
                    _ => None,
                })
                .min()
                .map(Term::Name)
                .or_else(|| ms.first().map(|&i| universe.terms()[i].clone()))
                .unwrap_or_else(|| image[&v].clone());
            class_of_value.insert(v, classes.len());
            classes.push(TermClass {
                value: v,
                members: ms,
                representative,
            });
        }
        Ok(TermModel {
            base: m.clone(),
            sig: sig.clone(),
            universe,
            classes,
            class_of_value,
        })
    }

    pub fn base(&self) -> &FiniteStructure {
        &self.base
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn universe(&self) -> &TermUniverse {
        &self.universe
    }

    pub fn classes(&self) -> &[TermClass] {
        &self.classes
    }

    pub fn representatives(&self) -> Vec<Term> {
        self.classes.iter().map(|c| c.representative.clone()).collect()
    }

    /// Class of a closed term, if its value is a class of this model.
    pub fn class_of_term(&self, t: &Term) -> Option<usize> {
        let v = eval_term(t, &self.base, &Assignment::new()).ok()?;
        self.class_of_value.get(&v).copied()
    }

    /// Drops the interpretation of every name constant; used to build
    /// models that are deliberately not name-extended.
    pub fn forget_names(&self) -> Result<TermModel, TermModelError> {
        let mut m = self.base.clone().with_names(Vec::new());
        for (p, r) in self.base.inds() {
            m.set_ind(p.clone(), r.clone());
        }
        TermModel::build_unchecked(&m, &self.sig.with_name_budget(0), self.universe.depth())
    }

    /// The model as a finite structure whose `k`-th element is the `k`-th
    /// class. Name constants are interpreted whenever the base has them.
    pub fn as_structure(&self) -> FiniteStructure {
        let n = self.classes.len();
        let to_class = |v: usize| self.class_of_value[&v];
        let mut out = FiniteStructure::new(n);
        for (c, v) in self.base.consts() {
            out = out.with_const(c.clone(), to_class(*v));
        }
        for (f, table) in self.base.funcs() {
            let values = semantics::all_tuples(n, table.arity)
                .map(|args| {
                    let vals: Vec<usize> = args.iter().map(|&a| self.classes[a].value).collect();
                    to_class(table.apply(self.base.size(), &vals))
                })
                .collect();
            out = out.with_func(f.clone(), FuncTable::new(table.arity, values));
        }
        let lift = |r: &semantics::Relation| -> Vec<Vec<usize>> {
            r.iter()
                .filter(|t| t.iter().all(|v| self.class_of_value.contains_key(v)))
                .map(|t| t.iter().map(|&v| to_class(v)).collect())
                .collect()
        };
        for (q, r) in self.base.preds() {
            out = out.with_pred(q.clone(), lift(r));
        }
        for (p, r) in self.base.inds() {
            out = out.with_ind(p.clone(), lift(r));
        }
        let names: Vec<usize> = self.base.names().iter().map(|&v| to_class(v)).collect();
        out.with_names(names)
    }
}

/// `M_T` for a name-extended `m`.
pub fn build_term_model(m: &FiniteStructure, sig: &Signature, depth: usize) -> Result<TermModel, TermModelError> {
    let missing = unnamed_elements(m);
    if !missing.is_empty() {
        return Err(TermModelError::NotNameExtended(missing));
    }
    TermModel::build_unchecked(m, sig, depth)
}

/// True iff every class contains a name constant.
pub fn check_termmodel_name_extended(tm: &TermModel) -> bool {
    tm.classes().iter().all(|c| {
        c.members
            .iter()
            .any(|&i| matches!(tm.universe().terms()[i], Term::Name(_)))
    })
}

/// Runs the standardness check on the term model read as a finite structure.
pub fn check_termmodel_standard(tm: &TermModel, theory: &Theory) -> Result<bool, TermModelError> {
    let th = theory.with_name_budget(tm.signature().name_budget());
    Ok(semantics::check_standard(&tm.as_structure(), &th)?)
}

/// `(M ⊨ A, M_cT ⊨ A)`. If `m` has no name constants it is name-extended
/// first, with a budget covering both the universe and the names in `a`.
pub fn check_truth_transfer(
    m: &FiniteStructure,
    sig: &Signature,
    a: &Formula,
    depth: usize,
) -> Result<(bool, bool), TermModelError> {
    let fv = a.free_vars();
    if !fv.is_empty() {
        return Err(TermModelError::OpenFormula(fv.into_iter().collect()));
    }
    let (mc, sig_c) = if m.names().is_empty() {
        let mut used = Vec::new();
        a.collect_terms(&mut used);
        let max_name = used.iter().map(max_name_index).max().unwrap_or(0);
        let budget = m.size().max(max_name).max(sig.name_budget());
        (name_extend(m, budget)?, sig.with_name_budget(budget))
    } else {
        (m.clone(), sig.clone())
    };
    let tm = build_term_model(&mc, &sig_c, depth)?;
    let lhs = eval_closed(a, m)?;
    let rhs = eval_closed(a, &tm.as_structure())?;
    Ok((lhs, rhs))
}

fn max_name_index(t: &Term) -> usize {
    match t {
        Term::Name(i) => *i,
        Term::App(_, args) => args.iter().map(max_name_index).max().unwrap_or(0),
        _ => 0,
    }
}
