use std::collections::{BTreeMap, BTreeSet};

use crate::syntax::Signature;

use super::SemanticsError;

pub type Tuple = Vec<usize>;
pub type Relation = BTreeSet<Tuple>;

/// A total function table over `U^arity`, stored row-major in lexicographic
/// argument order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FuncTable {
    pub arity: usize,
    pub values: Vec<usize>,
}

impl FuncTable {
    pub fn new(arity: usize, values: Vec<usize>) -> Self {
        FuncTable { arity, values }
    }

    /// Builds the table of `f` by evaluating it on every argument tuple.
    pub fn from_fn(size: usize, arity: usize, f: impl Fn(&[usize]) -> usize) -> Self {
        let values = all_tuples(size, arity).map(|t| f(&t)).collect();
        FuncTable { arity, values }
    }

    pub fn apply(&self, size: usize, args: &[usize]) -> usize {
        self.values[row_index(size, args)]
    }
}

pub(crate) fn row_index(size: usize, args: &[usize]) -> usize {
    args.iter().fold(0, |acc, &a| acc * size + a)
}

/// All tuples of `U^arity` in lexicographic order.
pub fn all_tuples(size: usize, arity: usize) -> impl Iterator<Item = Tuple> {
    let total = if arity == 0 { 1 } else { size.pow(arity as u32) };
    (0..total).map(move |mut idx| {
        let mut t = vec![0; arity];
        for slot in t.iter_mut().rev() {
            *slot = idx % size.max(1);
            idx /= size.max(1);
        }
        t
    })
}

/// A finite structure with universe `{0, …, n−1}`. Name constants `c_i` are
/// interpreted by `names[i-1]` when present.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteStructure {
    size: usize,
    consts: BTreeMap<String, usize>,
    names: Vec<usize>,
    funcs: BTreeMap<String, FuncTable>,
    preds: BTreeMap<String, Relation>,
    ind: BTreeMap<String, Relation>,
}

/// Interpretations of the inductive predicates, indexed like the signature.
pub type PredFamily = Vec<Relation>;

impl FiniteStructure {
    pub fn new(size: usize) -> Self {
        FiniteStructure {
            size,
            consts: BTreeMap::new(),
            names: Vec::new(),
            funcs: BTreeMap::new(),
            preds: BTreeMap::new(),
            ind: BTreeMap::new(),
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn with_const(mut self, name: impl Into<String>, value: usize) -> Self {
        self.consts.insert(name.into(), value);
        self
    }

    pub fn with_func(mut self, name: impl Into<String>, table: FuncTable) -> Self {
        self.funcs.insert(name.into(), table);
        self
    }

    pub fn with_pred(mut self, name: impl Into<String>, tuples: impl IntoIterator<Item = Tuple>) -> Self {
        self.preds.insert(name.into(), tuples.into_iter().collect());
        self
    }

    pub fn with_ind(mut self, name: impl Into<String>, tuples: impl IntoIterator<Item = Tuple>) -> Self {
        self.ind.insert(name.into(), tuples.into_iter().collect());
        self
    }

    pub fn with_names(mut self, names: Vec<usize>) -> Self {
        self.names = names;
        self
    }

    pub fn set_ind(&mut self, name: impl Into<String>, tuples: Relation) {
        self.ind.insert(name.into(), tuples);
    }

    pub fn consts(&self) -> &BTreeMap<String, usize> {
        &self.consts
    }

    pub fn funcs(&self) -> &BTreeMap<String, FuncTable> {
        &self.funcs
    }

    pub fn preds(&self) -> &BTreeMap<String, Relation> {
        &self.preds
    }

    pub fn inds(&self) -> &BTreeMap<String, Relation> {
        &self.ind
    }

    pub fn names(&self) -> &[usize] {
        &self.names
    }

    pub fn constant(&self, name: &str) -> Option<usize> {
        self.consts.get(name).copied()
    }

    pub fn name_value(&self, i: usize) -> Option<usize> {
        i.checked_sub(1).and_then(|k| self.names.get(k)).copied()
    }

    pub fn func(&self, name: &str) -> Option<&FuncTable> {
        self.funcs.get(name)
    }

    pub fn pred(&self, name: &str) -> Option<&Relation> {
        self.preds.get(name)
    }

    pub fn ind(&self, name: &str) -> Option<&Relation> {
        self.ind.get(name)
    }

    /// The inductive tables in signature order (missing tables are empty).
    pub fn family(&self, sig: &Signature) -> PredFamily {
        sig.inductive_preds()
            .iter()
            .map(|(p, _)| self.ind.get(p).cloned().unwrap_or_default())
            .collect()
    }

    /// The same structure with the inductive predicates reinterpreted.
    pub fn with_family(&self, sig: &Signature, family: &PredFamily) -> FiniteStructure {
        let mut m = self.clone();
        for ((p, _), rel) in sig.inductive_preds().iter().zip(family) {
            m.ind.insert(p.clone(), rel.clone());
        }
        m
    }

    /// Checks that every symbol of `sig` is interpreted by a total table
    /// with values inside the universe.
    pub fn validate(&self, sig: &Signature) -> Result<(), SemanticsError> {
        let n = self.size;
        if n == 0 {
            return Err(SemanticsError::EmptyUniverse);
        }
        let out = |what: String| SemanticsError::OutOfUniverse(what);
        for c in sig.constants() {
            match self.consts.get(c) {
                None => return Err(SemanticsError::TableIncomplete(c.clone())),
                Some(&v) if v >= n => return Err(out(c.clone())),
                _ => {}
            }
        }
        for (f, k) in sig.functions() {
            let table = self
                .funcs
                .get(f)
                .ok_or_else(|| SemanticsError::TableIncomplete(f.clone()))?;
            if table.arity != *k || table.values.len() != n.pow(*k as u32) {
                return Err(SemanticsError::TableIncomplete(f.clone()));
            }
            if table.values.iter().any(|&v| v >= n) {
                return Err(out(f.clone()));
            }
        }
        let check_rel = |name: &String, k: usize, rel: Option<&Relation>| -> Result<(), SemanticsError> {
            for t in rel.into_iter().flatten() {
                if t.len() != k {
                    return Err(SemanticsError::ArityMismatch(name.clone()));
                }
                if t.iter().any(|&v| v >= n) {
                    return Err(SemanticsError::OutOfUniverse(name.clone()));
                }
            }
            Ok(())
        };
        for (q, k) in sig.ordinary_preds() {
            check_rel(q, *k, self.preds.get(q))?;
        }
        for (p, k) in sig.inductive_preds() {
            check_rel(p, *k, self.ind.get(p))?;
        }
        if self.names.iter().any(|&v| v >= n) {
            return Err(out("name constants".into()));
        }
        Ok(())
    }
}
