use std::collections::BTreeSet;
use std::fmt;

use super::formula::Formula;
use super::signature::Signature;
use super::term::{Substitution, Term};
use super::SyntaxError;

/// A finite set of formulas kept in canonical order (by the print form of
/// the alpha-normalised formula), without alpha-duplicates.
#[derive(Clone, Debug, Default)]
pub struct FormulaSet {
    items: Vec<(String, Formula)>,
}

impl FormulaSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, f: Formula) -> bool {
        let key = f.canonical_key();
        match self.items.binary_search_by(|(k, _)| k.as_str().cmp(&key)) {
            Ok(_) => false,
            Err(pos) => {
                self.items.insert(pos, (key, f));
                true
            }
        }
    }

    pub fn remove(&mut self, f: &Formula) -> bool {
        match self.position(f) {
            Some(pos) => {
                self.items.remove(pos);
                true
            }
            None => false,
        }
    }

    /// Index of `f` (up to alpha-equivalence) in canonical order.
    pub fn position(&self, f: &Formula) -> Option<usize> {
        let key = f.canonical_key();
        self.items.binary_search_by(|(k, _)| k.as_str().cmp(&key)).ok()
    }

    pub fn contains(&self, f: &Formula) -> bool {
        self.position(f).is_some()
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<&Formula> {
        self.items.get(i).map(|(_, f)| f)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Formula> {
        self.items.iter().map(|(_, f)| f)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.items.iter().map(|(k, _)| k.as_str())
    }

    pub fn is_subset(&self, other: &FormulaSet) -> bool {
        self.keys()
            .all(|k| other.items.binary_search_by(|(o, _)| o.as_str().cmp(k)).is_ok())
    }

    pub fn intersects(&self, other: &FormulaSet) -> bool {
        self.keys()
            .any(|k| other.items.binary_search_by(|(o, _)| o.as_str().cmp(k)).is_ok())
    }

    pub fn substitute(&self, theta: &Substitution) -> FormulaSet {
        self.iter().map(|f| f.substitute(theta)).collect()
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for f in self.iter() {
            f.collect_free_vars(&mut out);
        }
        out
    }

    pub fn with(&self, f: Formula) -> FormulaSet {
        let mut s = self.clone();
        s.insert(f);
        s
    }

    pub fn without(&self, f: &Formula) -> FormulaSet {
        let mut s = self.clone();
        s.remove(f);
        s
    }
}

impl PartialEq for FormulaSet {
    fn eq(&self, other: &Self) -> bool {
        self.keys().eq(other.keys())
    }
}

impl Eq for FormulaSet {}

impl FromIterator<Formula> for FormulaSet {
    fn from_iter<I: IntoIterator<Item = Formula>>(iter: I) -> Self {
        let mut s = FormulaSet::new();
        for f in iter {
            s.insert(f);
        }
        s
    }
}

impl Extend<Formula> for FormulaSet {
    fn extend<I: IntoIterator<Item = Formula>>(&mut self, iter: I) {
        for f in iter {
            self.insert(f);
        }
    }
}

/// `Γ ⊢ Δ` with set semantics on both sides.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Sequent {
    pub antecedent: FormulaSet,
    pub succedent: FormulaSet,
}

impl Sequent {
    pub fn new(antecedent: impl IntoIterator<Item = Formula>, succedent: impl IntoIterator<Item = Formula>) -> Self {
        Sequent {
            antecedent: antecedent.into_iter().collect(),
            succedent: succedent.into_iter().collect(),
        }
    }

    pub fn from_sets(antecedent: FormulaSet, succedent: FormulaSet) -> Self {
        Sequent { antecedent, succedent }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = self.antecedent.free_vars();
        out.extend(self.succedent.free_vars());
        out
    }

    pub fn substitute(&self, theta: &Substitution) -> Sequent {
        Sequent {
            antecedent: self.antecedent.substitute(theta),
            succedent: self.succedent.substitute(theta),
        }
    }

    /// The closed formula `∀x⃗(⋀Γ → ⋁Δ)` over the sequent's free variables.
    ///
    /// The empty conjunction is dropped; the empty disjunction becomes
    /// `~(c = c)` for the first constant of the signature.
    pub fn closure(&self, sig: &Signature) -> Result<Formula, SyntaxError> {
        let right = match Formula::disj(self.succedent.iter().cloned()) {
            Some(d) => d,
            None => {
                let c = sig.first_closed_term().ok_or(SyntaxError::NoClosedTerm)?;
                Formula::not(Formula::eq(c.clone(), c))
            }
        };
        let body = match Formula::conj(self.antecedent.iter().cloned()) {
            Some(g) => Formula::imp(g, right),
            None => right,
        };
        Ok(self
            .free_vars()
            .into_iter()
            .rev()
            .fold(body, |acc, x| Formula::forall(x, acc)))
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |s: &FormulaSet| s.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(", ");
        let left = side(&self.antecedent);
        let right = side(&self.succedent);
        match (left.is_empty(), right.is_empty()) {
            (true, true) => f.write_str("|-"),
            (true, false) => write!(f, "|- {right}"),
            (false, true) => write!(f, "{left} |-"),
            (false, false) => write!(f, "{left} |- {right}"),
        }
    }
}

impl Signature {
    /// A closed term usable as a witness: the first ordinary constant, or
    /// `c_1` when name constants are available.
    pub fn first_closed_term(&self) -> Option<Term> {
        self.constants()
            .first()
            .map(|c| Term::cnst(c.clone()))
            .or_else(|| (self.name_budget() > 0).then_some(Term::Name(1)))
    }
}
