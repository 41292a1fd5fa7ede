//! Seeded generators: the small-structure family for the natural-number
//! theory and corpora of closed formulas.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::semantics::{all_tuples, standardize, FiniteStructure, FuncTable, SemanticsError};
use crate::syntax::{Formula, Signature, Term, Theory};

/// Every structure for `{0, s, N}` with universe size `1..=max_size`:
/// all tables for `s`, all values of `0`, `N` empty.
pub fn nat_family(max_size: usize) -> Vec<FiniteStructure> {
    let mut out = Vec::new();
    for n in 1..=max_size {
        for table in all_tuples(n, n) {
            for zero in 0..n {
                out.push(
                    FiniteStructure::new(n)
                        .with_const("0", zero)
                        .with_func("s", FuncTable::new(1, table.clone()))
                        .with_ind("N", []),
                );
            }
        }
    }
    out
}

/// [`nat_family`] with `N` replaced by its least fixpoint.
pub fn standard_nat_family(theory: &Theory, max_size: usize) -> Result<Vec<FiniteStructure>, SemanticsError> {
    nat_family(max_size).iter().map(|m| standardize(m, theory)).collect()
}

/// Settings for [`formula_corpus`].
#[derive(Clone, Debug)]
pub struct CorpusConfig {
    pub seed: u64,
    pub count: usize,
    pub max_depth: usize,
    pub max_term_depth: usize,
    /// Give up after this many draws.
    pub attempts: usize,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig {
            seed: 0x5eed,
            count: 500,
            max_depth: 3,
            max_term_depth: 2,
            attempts: 200_000,
        }
    }
}

const BOUND_VARS: [&str; 3] = ["x", "y", "z"];

struct Drawer<'a> {
    sig: &'a Signature,
    rng: ChaCha8Rng,
    term_depth: usize,
}

impl Drawer<'_> {
    fn term(&mut self, scope: &[String], depth: usize) -> Term {
        let funcs = self.sig.functions();
        let leaves = self.sig.constants().len() + scope.len();
        if depth > 0 && !funcs.is_empty() && (leaves == 0 || self.rng.random_bool(0.5)) {
            let (f, arity) = funcs[self.rng.random_range(0..funcs.len())].clone();
            let args = (0..arity).map(|_| self.term(scope, depth - 1)).collect();
            return Term::app(f, args);
        }
        let k = self.rng.random_range(0..leaves.max(1));
        match self.sig.constants().get(k) {
            Some(c) => Term::cnst(c.clone()),
            None => Term::var(scope[k - self.sig.constants().len()].clone()),
        }
    }

    fn atom(&mut self, scope: &[String]) -> Formula {
        let preds: Vec<(String, usize, bool)> = self
            .sig
            .ordinary_preds()
            .iter()
            .map(|(p, a)| (p.clone(), *a, false))
            .chain(self.sig.inductive_preds().iter().map(|(p, a)| (p.clone(), *a, true)))
            .collect();
        let roll = self.rng.random_range(0..preds.len() + 2);
        if roll >= preds.len() {
            let d = self.term_depth;
            return Formula::eq(self.term(scope, d), self.term(scope, d));
        }
        let (p, arity, inductive) = &preds[roll];
        let d = self.term_depth;
        let args = (0..*arity).map(|_| self.term(scope, d)).collect();
        if *inductive {
            Formula::ind(p.clone(), args)
        } else {
            Formula::rel(p.clone(), args)
        }
    }

    /// A formula of depth exactly `depth`.
    fn formula(&mut self, scope: &mut Vec<String>, depth: usize) -> Formula {
        if depth == 0 {
            return self.atom(scope);
        }
        match self.rng.random_range(0..6) {
            0 => Formula::not(self.formula(scope, depth - 1)),
            k @ 1..=3 => {
                let other = self.rng.random_range(0..depth);
                let (l, r) = if self.rng.random_bool(0.5) {
                    (depth - 1, other)
                } else {
                    (other, depth - 1)
                };
                let a = self.formula(scope, l);
                let b = self.formula(scope, r);
                match k {
                    1 => Formula::and(a, b),
                    2 => Formula::or(a, b),
                    _ => Formula::imp(a, b),
                }
            }
            k => {
                let x = BOUND_VARS[self.rng.random_range(0..BOUND_VARS.len())].to_string();
                scope.push(x.clone());
                let body = self.formula(scope, depth - 1);
                scope.pop();
                if k == 4 {
                    Formula::forall(x, body)
                } else {
                    Formula::exists(x, body)
                }
            }
        }
    }
}

/// Distinct (up to α-equivalence) closed formulas of depth `≤ max_depth`
/// over `sig`, without name constants. Deterministic in the seed.
pub fn formula_corpus(sig: &Signature, config: &CorpusConfig) -> Vec<Formula> {
    let mut d = Drawer {
        sig,
        rng: ChaCha8Rng::seed_from_u64(config.seed),
        term_depth: config.max_term_depth,
    };
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for _ in 0..config.attempts {
        if out.len() >= config.count {
            break;
        }
        let depth = d.rng.random_range(0..=config.max_depth);
        let f = d.formula(&mut Vec::new(), depth);
        if f.is_closed() && seen.insert(f.canonical_key()) {
            out.push(f);
        }
    }
    out
}
