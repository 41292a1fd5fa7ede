use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// A first-order term over a signature, possibly mentioning name constants.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(String),
    Const(String),
    /// Name constant `c_i` of the name-extended signature (1-based index).
    Name(usize),
    App(String, Vec<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn cnst(name: impl Into<String>) -> Self {
        Term::Const(name.into())
    }

    pub fn app(func: impl Into<String>, args: Vec<Term>) -> Self {
        Term::App(func.into(), args)
    }

    /// Unary application, the common case for successor-style symbols.
    pub fn app1(func: impl Into<String>, arg: Term) -> Self {
        Term::App(func.into(), vec![arg])
    }

    pub fn collect_free_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(x) => {
                out.insert(x.clone());
            }
            Term::Const(_) | Term::Name(_) => {}
            Term::App(_, args) => args.iter().for_each(|a| a.collect_free_vars(out)),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free_vars(&mut out);
        out
    }

    /// Variables in order of first occurrence, left to right.
    pub fn collect_vars_ordered(&self, out: &mut Vec<String>) {
        match self {
            Term::Var(x) => {
                if !out.contains(x) {
                    out.push(x.clone());
                }
            }
            Term::Const(_) | Term::Name(_) => {}
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars_ordered(out)),
        }
    }

    pub fn has_var(&self, x: &str) -> bool {
        match self {
            Term::Var(y) => y == x,
            Term::Const(_) | Term::Name(_) => false,
            Term::App(_, args) => args.iter().any(|a| a.has_var(x)),
        }
    }

    pub fn is_closed(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Const(_) | Term::Name(_) => true,
            Term::App(_, args) => args.iter().all(Term::is_closed),
        }
    }

    /// Nesting depth of function applications; atoms have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Term::App(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
            _ => 0,
        }
    }

    pub fn mentions_name(&self) -> bool {
        match self {
            Term::Name(_) => true,
            Term::App(_, args) => args.iter().any(Term::mentions_name),
            _ => false,
        }
    }

    pub fn substitute(&self, theta: &Substitution) -> Term {
        match self {
            Term::Var(x) => theta.get(x).cloned().unwrap_or_else(|| self.clone()),
            Term::Const(_) | Term::Name(_) => self.clone(),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| a.substitute(theta)).collect()),
        }
    }

    pub fn replace_var(&self, x: &str, t: &Term) -> Term {
        self.substitute(&Substitution::single(x, t.clone()))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(x) | Term::Const(x) => f.write_str(x),
            Term::Name(i) => write!(f, "c_{i}"),
            Term::App(g, args) => {
                write!(f, "{g}(")?;
                for (k, a) in args.iter().enumerate() {
                    if k > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// A finite simultaneous substitution `[x_1 := t_1, ..., x_m := t_m]`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Substitution {
    map: BTreeMap<String, Term>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(x: impl Into<String>, t: Term) -> Self {
        let mut s = Self::new();
        s.insert(x, t);
        s
    }

    /// Later bindings for the same variable overwrite earlier ones.
    pub fn from_pairs<I, S>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, Term)>,
        S: Into<String>,
    {
        let mut s = Self::new();
        for (x, t) in pairs {
            s.insert(x, t);
        }
        s
    }

    pub fn insert(&mut self, x: impl Into<String>, t: Term) {
        self.map.insert(x.into(), t);
    }

    pub fn get(&self, x: &str) -> Option<&Term> {
        self.map.get(x)
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Term)> {
        self.map.iter()
    }

    pub fn domain(&self) -> impl Iterator<Item = &String> {
        self.map.keys()
    }

    /// The same substitution without a binding for `x`.
    pub fn without(&self, x: &str) -> Substitution {
        let mut map = self.map.clone();
        map.remove(x);
        Substitution { map }
    }

    /// Drops bindings that do not touch `keep`, and identity bindings.
    pub fn restrict(&self, keep: &BTreeSet<String>) -> Substitution {
        Substitution {
            map: self
                .map
                .iter()
                .filter(|(x, t)| keep.contains(*x) && **t != Term::Var((*x).clone()))
                .map(|(x, t)| (x.clone(), t.clone()))
                .collect(),
        }
    }

    /// Free variables of the terms in the range.
    pub fn range_free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for t in self.map.values() {
            t.collect_free_vars(&mut out);
        }
        out
    }

    /// `self` followed by `other`: applying the result equals applying `self` then `other`.
    pub fn then(&self, other: &Substitution) -> Substitution {
        let mut map: BTreeMap<String, Term> = self.map.iter().map(|(x, t)| (x.clone(), t.substitute(other))).collect();
        for (x, t) in &other.map {
            map.entry(x.clone()).or_insert_with(|| t.clone());
        }
        Substitution { map }
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (k, (x, t)) in self.map.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}:={t}")?;
        }
        f.write_str("]")
    }
}

/// First variant of `base` (by appending primes) not in `avoid`.
pub fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    let mut name = format!("{base}'");
    while avoid.contains(&name) {
        name.push('\'');
    }
    name
}
