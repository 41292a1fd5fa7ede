use std::collections::BTreeMap;

use crate::syntax::{Formula, Sequent, Term};

use super::structure::{all_tuples, FiniteStructure};
use super::SemanticsError;

/// A variable assignment `ρ`.
pub type Assignment = BTreeMap<String, usize>;

/// Evaluation environment: bound variables on a stack over a base assignment.
struct Env<'a> {
    m: &'a FiniteStructure,
    base: &'a Assignment,
    stack: Vec<(&'a str, usize)>,
}

impl<'a> Env<'a> {
    fn var(&self, x: &str) -> Result<usize, SemanticsError> {
        if let Some((_, v)) = self.stack.iter().rev().find(|(y, _)| *y == x) {
            return Ok(*v);
        }
        self.base
            .get(x)
            .copied()
            .ok_or_else(|| SemanticsError::UnboundVariable(x.to_string()))
    }

    fn term(&self, t: &Term) -> Result<usize, SemanticsError> {
        match t {
            Term::Var(x) => self.var(x),
            Term::Const(c) => self
                .m
                .constant(c)
                .ok_or_else(|| SemanticsError::UnknownSymbol(c.clone())),
            Term::Name(i) => self.m.name_value(*i).ok_or(SemanticsError::UnnamedConstant(*i)),
            Term::App(f, args) => {
                let table = self.m.func(f).ok_or_else(|| SemanticsError::UnknownSymbol(f.clone()))?;
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    vals.push(self.term(a)?);
                }
                Ok(table.apply(self.m.size(), &vals))
            }
        }
    }

    fn terms(&self, ts: &[Term]) -> Result<Vec<usize>, SemanticsError> {
        ts.iter().map(|t| self.term(t)).collect()
    }

    fn formula(&mut self, a: &'a Formula) -> Result<bool, SemanticsError> {
        Ok(match a {
            Formula::False => false,
            Formula::Eq(t, u) => self.term(t)? == self.term(u)?,
            Formula::Rel(q, ts) => {
                let vals = self.terms(ts)?;
                self.m.pred(q).is_some_and(|r| r.contains(&vals))
            }
            Formula::Ind(p, ts) => {
                let vals = self.terms(ts)?;
                self.m.ind(p).is_some_and(|r| r.contains(&vals))
            }
            Formula::Not(b) => !self.formula(b)?,
            Formula::And(b, c) => self.formula(b)? && self.formula(c)?,
            Formula::Or(b, c) => self.formula(b)? || self.formula(c)?,
            Formula::Imp(b, c) => !self.formula(b)? || self.formula(c)?,
            Formula::Forall(x, b) => {
                let mut all = true;
                for v in 0..self.m.size() {
                    self.stack.push((x, v));
                    let r = self.formula(b);
                    self.stack.pop();
                    if !r? {
                        all = false;
                        break;
                    }
                }
                all
            }
            Formula::Exists(x, b) => {
                let mut some = false;
                for v in 0..self.m.size() {
                    self.stack.push((x, v));
                    let r = self.formula(b);
                    self.stack.pop();
                    if r? {
                        some = true;
                        break;
                    }
                }
                some
            }
        })
    }
}

pub fn eval_term(t: &Term, m: &FiniteStructure, rho: &Assignment) -> Result<usize, SemanticsError> {
    Env {
        m,
        base: rho,
        stack: Vec::new(),
    }
    .term(t)
}

/// Tarskian truth of `a` in `m` under `rho`; quantifiers range over the
/// universe and inductive atoms are read from the structure's tables.
pub fn eval_formula(a: &Formula, m: &FiniteStructure, rho: &Assignment) -> Result<bool, SemanticsError> {
    Env {
        m,
        base: rho,
        stack: Vec::new(),
    }
    .formula(a)
}

/// Truth of a closed formula.
pub fn eval_closed(a: &Formula, m: &FiniteStructure) -> Result<bool, SemanticsError> {
    eval_formula(a, m, &Assignment::new())
}

/// Every assignment of universe elements to `vars`.
pub fn assignments<'a>(vars: &'a [String], size: usize) -> impl Iterator<Item = Assignment> + 'a {
    all_tuples(size, vars.len()).map(move |t| vars.iter().cloned().zip(t).collect())
}

/// An assignment to the sequent's free variables making every antecedent
/// formula true and every succedent formula false, if one exists.
pub fn sequent_counterexample(s: &Sequent, m: &FiniteStructure) -> Result<Option<Assignment>, SemanticsError> {
    let vars: Vec<String> = s.free_vars().into_iter().collect();
    for rho in assignments(&vars, m.size()) {
        let mut holds_left = true;
        for a in s.antecedent.iter() {
            if !eval_formula(a, m, &rho)? {
                holds_left = false;
                break;
            }
        }
        if !holds_left {
            continue;
        }
        let mut some_right = false;
        for d in s.succedent.iter() {
            if eval_formula(d, m, &rho)? {
                some_right = true;
                break;
            }
        }
        if !some_right {
            return Ok(Some(rho));
        }
    }
    Ok(None)
}

/// True iff under every assignment some formula of `Γ` fails or some
/// formula of `Δ` holds.
pub fn sequent_valid(s: &Sequent, m: &FiniteStructure) -> Result<bool, SemanticsError> {
    Ok(sequent_counterexample(s, m)?.is_none())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::structure::FuncTable;

    fn clamp() -> FiniteStructure {
        FiniteStructure::new(3)
            .with_const("0", 0)
            .with_func("s", FuncTable::new(1, vec![1, 2, 2]))
            .with_ind("N", [vec![0], vec![1], vec![2]])
    }

    fn s(t: Term) -> Term {
        Term::app1("s", t)
    }

    #[test]
    fn terms_under_clamped_successor() {
        let m = clamp();
        let rho = Assignment::new();
        assert_eq!(eval_term(&Term::cnst("0"), &m, &rho), Ok(0));
        assert_eq!(eval_term(&s(s(Term::cnst("0"))), &m, &rho), Ok(2));
        assert_eq!(eval_term(&s(s(s(Term::cnst("0")))), &m, &rho), Ok(2));
        assert_eq!(
            eval_term(&Term::var("x"), &m, &rho),
            Err(SemanticsError::UnboundVariable("x".into()))
        );
    }

    #[test]
    fn formulas() {
        let m = clamp();
        let n0 = Formula::ind("N", vec![Term::cnst("0")]);
        assert_eq!(
            eval_closed(&Formula::forall("x", Formula::ind("N", vec![Term::var("x")])), &m),
            Ok(true)
        );
        assert_eq!(eval_closed(&Formula::and(n0.clone(), Formula::not(n0)), &m), Ok(false));
        let ex = Formula::exists("x", Formula::not(Formula::eq(Term::var("x"), Term::cnst("0"))));
        assert_eq!(eval_closed(&ex, &m), Ok(true));
    }

    #[test]
    fn shadowed_binders() {
        let m = clamp();
        let f = Formula::forall("x", Formula::exists("x", Formula::eq(Term::var("x"), Term::cnst("0"))));
        assert_eq!(eval_closed(&f, &m), Ok(true));
    }

    #[test]
    fn sequent_validity() {
        let m = clamp();
        let nx = Formula::ind("N", vec![Term::var("x")]);
        assert_eq!(sequent_valid(&Sequent::new([nx.clone()], [nx.clone()]), &m), Ok(true));
        assert_eq!(sequent_valid(&Sequent::new([], [nx.clone()]), &m), Ok(true));
        let fixed = FiniteStructure::new(3)
            .with_const("0", 0)
            .with_func("s", FuncTable::new(1, vec![0, 1, 2]))
            .with_ind("N", [vec![0]]);
        let cx = sequent_counterexample(&Sequent::new([], [nx]), &fixed).unwrap();
        assert_eq!(cx, Some(Assignment::from([("x".to_string(), 1)])));
    }
}
