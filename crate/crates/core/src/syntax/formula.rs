use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::term::{fresh_name, Substitution, Term};

/// Formulas of first-order logic with equality and inductive predicates.
///
/// Ordinary and inductive atoms are separate variants so that traces and
/// coding can tell them apart without consulting a signature.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    /// Canonical falsum, printed `false`.
    False,
    Eq(Term, Term),
    Rel(String, Vec<Term>),
    Ind(String, Vec<Term>),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    Forall(String, Box<Formula>),
    Exists(String, Box<Formula>),
}

impl Formula {
    pub fn eq(t: Term, u: Term) -> Self {
        Formula::Eq(t, u)
    }

    pub fn rel(p: impl Into<String>, args: Vec<Term>) -> Self {
        Formula::Rel(p.into(), args)
    }

    pub fn ind(p: impl Into<String>, args: Vec<Term>) -> Self {
        Formula::Ind(p.into(), args)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Formula) -> Self {
        Formula::Not(Box::new(a))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn imp(a: Formula, b: Formula) -> Self {
        Formula::Imp(Box::new(a), Box::new(b))
    }

    pub fn forall(x: impl Into<String>, a: Formula) -> Self {
        Formula::Forall(x.into(), Box::new(a))
    }

    pub fn exists(x: impl Into<String>, a: Formula) -> Self {
        Formula::Exists(x.into(), Box::new(a))
    }

    /// Left-nested conjunction; `None` for the empty list.
    pub fn conj(parts: impl IntoIterator<Item = Formula>) -> Option<Formula> {
        parts.into_iter().reduce(Formula::and)
    }

    /// Left-nested disjunction; `None` for the empty list.
    pub fn disj(parts: impl IntoIterator<Item = Formula>) -> Option<Formula> {
        parts.into_iter().reduce(Formula::or)
    }

    pub fn is_inductive_atom(&self) -> bool {
        matches!(self, Formula::Ind(..))
    }

    pub fn collect_free_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::False => {}
            Formula::Eq(t, u) => {
                t.collect_free_vars(out);
                u.collect_free_vars(out);
            }
            Formula::Rel(_, args) | Formula::Ind(_, args) => args.iter().for_each(|a| a.collect_free_vars(out)),
            Formula::Not(a) => a.collect_free_vars(out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.collect_free_vars(out);
                b.collect_free_vars(out);
            }
            Formula::Forall(x, a) | Formula::Exists(x, a) => {
                let mut inner = a.free_vars();
                inner.remove(x);
                out.extend(inner);
            }
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free_vars(&mut out);
        out
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Syntax depth: atoms are 0, each connective or quantifier adds one.
    pub fn depth(&self) -> usize {
        match self {
            Formula::False | Formula::Eq(..) | Formula::Rel(..) | Formula::Ind(..) => 0,
            Formula::Not(a) | Formula::Forall(_, a) | Formula::Exists(_, a) => 1 + a.depth(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    /// Number of connective, quantifier and atom nodes.
    pub fn size(&self) -> usize {
        match self {
            Formula::False | Formula::Eq(..) | Formula::Rel(..) | Formula::Ind(..) => 1,
            Formula::Not(a) | Formula::Forall(_, a) | Formula::Exists(_, a) => 1 + a.size(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Capture-avoiding simultaneous substitution.
    pub fn substitute(&self, theta: &Substitution) -> Formula {
        if theta.is_empty() {
            return self.clone();
        }
        match self {
            Formula::False => Formula::False,
            Formula::Eq(t, u) => Formula::Eq(t.substitute(theta), u.substitute(theta)),
            Formula::Rel(p, args) => Formula::Rel(p.clone(), args.iter().map(|a| a.substitute(theta)).collect()),
            Formula::Ind(p, args) => Formula::Ind(p.clone(), args.iter().map(|a| a.substitute(theta)).collect()),
            Formula::Not(a) => Formula::not(a.substitute(theta)),
            Formula::And(a, b) => Formula::and(a.substitute(theta), b.substitute(theta)),
            Formula::Or(a, b) => Formula::or(a.substitute(theta), b.substitute(theta)),
            Formula::Imp(a, b) => Formula::imp(a.substitute(theta), b.substitute(theta)),
            Formula::Forall(x, a) => {
                let (y, body) = subst_under_binder(x, a, theta);
                Formula::Forall(y, Box::new(body))
            }
            Formula::Exists(x, a) => {
                let (y, body) = subst_under_binder(x, a, theta);
                Formula::Exists(y, Box::new(body))
            }
        }
    }

    pub fn replace_var(&self, x: &str, t: &Term) -> Formula {
        self.substitute(&Substitution::single(x, t.clone()))
    }

    /// Bound variables renamed by binder depth; alpha-equivalent formulas
    /// have identical canonical forms.
    pub fn canonical(&self) -> Formula {
        fn go(f: &Formula, env: &mut BTreeMap<String, Vec<String>>, depth: usize) -> Formula {
            let term = |t: &Term, env: &BTreeMap<String, Vec<String>>| rename_term(t, env);
            match f {
                Formula::False => Formula::False,
                Formula::Eq(t, u) => Formula::Eq(term(t, env), term(u, env)),
                Formula::Rel(p, args) => Formula::Rel(p.clone(), args.iter().map(|a| term(a, env)).collect()),
                Formula::Ind(p, args) => Formula::Ind(p.clone(), args.iter().map(|a| term(a, env)).collect()),
                Formula::Not(a) => Formula::not(go(a, env, depth)),
                Formula::And(a, b) => Formula::and(go(a, env, depth), go(b, env, depth)),
                Formula::Or(a, b) => Formula::or(go(a, env, depth), go(b, env, depth)),
                Formula::Imp(a, b) => Formula::imp(go(a, env, depth), go(b, env, depth)),
                Formula::Forall(x, a) | Formula::Exists(x, a) => {
                    let bound = format!("%{depth}");
                    env.entry(x.clone()).or_default().push(bound.clone());
                    let body = go(a, env, depth + 1);
                    env.get_mut(x).map(Vec::pop);
                    if matches!(f, Formula::Forall(..)) {
                        Formula::Forall(bound, Box::new(body))
                    } else {
                        Formula::Exists(bound, Box::new(body))
                    }
                }
            }
        }
        fn rename_term(t: &Term, env: &BTreeMap<String, Vec<String>>) -> Term {
            match t {
                Term::Var(x) => match env.get(x).and_then(|v| v.last()) {
                    Some(b) => Term::Var(b.clone()),
                    None => t.clone(),
                },
                Term::App(g, args) => Term::App(g.clone(), args.iter().map(|a| rename_term(a, env)).collect()),
                _ => t.clone(),
            }
        }
        go(self, &mut BTreeMap::new(), 0)
    }

    /// Sort key used for canonical ordering of formula sets.
    pub fn canonical_key(&self) -> String {
        self.canonical().to_string()
    }

    pub fn alpha_eq(&self, other: &Formula) -> bool {
        self.canonical() == other.canonical()
    }

    /// Closed terms occurring anywhere in the formula (maximal or not).
    pub fn collect_terms(&self, out: &mut Vec<Term>) {
        fn walk(t: &Term, out: &mut Vec<Term>) {
            if !out.contains(t) {
                out.push(t.clone());
            }
            if let Term::App(_, args) = t {
                args.iter().for_each(|a| walk(a, out));
            }
        }
        match self {
            Formula::False => {}
            Formula::Eq(t, u) => {
                walk(t, out);
                walk(u, out);
            }
            Formula::Rel(_, args) | Formula::Ind(_, args) => args.iter().for_each(|a| walk(a, out)),
            Formula::Not(a) | Formula::Forall(_, a) | Formula::Exists(_, a) => a.collect_terms(out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.collect_terms(out);
                b.collect_terms(out);
            }
        }
    }

    pub fn mentions_name(&self) -> bool {
        let mut terms = Vec::new();
        self.collect_terms(&mut terms);
        terms.iter().any(Term::mentions_name)
    }

    /// Whether any inductive predicate symbol occurs.
    pub fn mentions_inductive(&self) -> bool {
        match self {
            Formula::Ind(..) => true,
            Formula::False | Formula::Eq(..) | Formula::Rel(..) => false,
            Formula::Not(a) | Formula::Forall(_, a) | Formula::Exists(_, a) => a.mentions_inductive(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.mentions_inductive() || b.mentions_inductive()
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Forall(..) | Formula::Exists(..) => 0,
            Formula::Imp(..) => 1,
            Formula::Or(..) => 2,
            Formula::And(..) => 3,
            _ => 4,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, ctx: u8) -> fmt::Result {
        let paren = self.precedence() < ctx;
        if paren {
            f.write_str("(")?;
        }
        match self {
            Formula::False => f.write_str("false")?,
            Formula::Eq(t, u) => write!(f, "{t} = {u}")?,
            Formula::Rel(p, args) | Formula::Ind(p, args) => {
                f.write_str(p)?;
                if !args.is_empty() {
                    f.write_str("(")?;
                    for (k, a) in args.iter().enumerate() {
                        if k > 0 {
                            f.write_str(", ")?;
                        }
                        write!(f, "{a}")?;
                    }
                    f.write_str(")")?;
                }
            }
            Formula::Not(a) => {
                f.write_str("~")?;
                a.fmt_prec(f, 4)?;
            }
            Formula::And(a, b) => {
                a.fmt_prec(f, 3)?;
                f.write_str(" /\\ ")?;
                b.fmt_prec(f, 4)?;
            }
            Formula::Or(a, b) => {
                a.fmt_prec(f, 2)?;
                f.write_str(" \\/ ")?;
                b.fmt_prec(f, 3)?;
            }
            Formula::Imp(a, b) => {
                a.fmt_prec(f, 2)?;
                f.write_str(" -> ")?;
                b.fmt_prec(f, 1)?;
            }
            Formula::Forall(x, a) => {
                write!(f, "forall {x}. ")?;
                a.fmt_prec(f, 0)?;
            }
            Formula::Exists(x, a) => {
                write!(f, "exists {x}. ")?;
                a.fmt_prec(f, 0)?;
            }
        }
        if paren {
            f.write_str(")")?;
        }
        Ok(())
    }
}

fn subst_under_binder(x: &str, body: &Formula, theta: &Substitution) -> (String, Formula) {
    let body_fv = body.free_vars();
    let mut keep = body_fv.clone();
    keep.remove(x);
    let inner = theta.restrict(&keep);
    if inner.is_empty() {
        return (x.to_string(), body.clone());
    }
    let range = inner.range_free_vars();
    if !range.contains(x) {
        return (x.to_string(), body.substitute(&inner));
    }
    let mut avoid = range;
    avoid.extend(body_fv);
    avoid.extend(inner.domain().cloned());
    let y = fresh_name(x, &avoid);
    let mut renamed = inner;
    renamed.insert(x, Term::Var(y.clone()));
    (y, body.substitute(&renamed))
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}
