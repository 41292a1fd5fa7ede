use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::formula::Formula;
use super::term::{Substitution, Term};
use super::SyntaxError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymbolKind {
    Constant,
    Function(usize),
    Ordinary(usize),
    /// Carries the 0-based index of the inductive predicate.
    Inductive(usize),
}

/// Symbol tables of a signature. Name constants `c_1..c_B` are not listed;
/// only their budget `B` is recorded.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    constants: Vec<String>,
    functions: Vec<(String, usize)>,
    ordinary: Vec<(String, usize)>,
    inductive: Vec<(String, usize)>,
    name_budget: usize,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    /// `0`, `s` and the inductive `N`.
    pub fn example_nat() -> Self {
        let mut sig = Signature::new();
        sig.add_constant("0").unwrap();
        sig.add_function("s", 1).unwrap();
        sig.add_inductive("N", 1).unwrap();
        sig
    }

    fn check_fresh(&self, name: &str) -> Result<(), SyntaxError> {
        if self.lookup(name).is_some() {
            return Err(SyntaxError::DuplicateSymbol(name.to_string()));
        }
        if is_name_constant(name).is_some() {
            return Err(SyntaxError::ReservedName(name.to_string()));
        }
        Ok(())
    }

    pub fn add_constant(&mut self, name: impl Into<String>) -> Result<(), SyntaxError> {
        let name = name.into();
        self.check_fresh(&name)?;
        self.constants.push(name);
        Ok(())
    }

    pub fn add_function(&mut self, name: impl Into<String>, arity: usize) -> Result<(), SyntaxError> {
        let name = name.into();
        self.check_fresh(&name)?;
        if arity == 0 {
            return Err(SyntaxError::NullaryFunction(name));
        }
        self.functions.push((name, arity));
        Ok(())
    }

    pub fn add_ordinary(&mut self, name: impl Into<String>, arity: usize) -> Result<(), SyntaxError> {
        let name = name.into();
        self.check_fresh(&name)?;
        self.ordinary.push((name, arity));
        Ok(())
    }

    pub fn add_inductive(&mut self, name: impl Into<String>, arity: usize) -> Result<(), SyntaxError> {
        let name = name.into();
        self.check_fresh(&name)?;
        self.inductive.push((name, arity));
        Ok(())
    }

    pub fn set_name_budget(&mut self, budget: usize) {
        self.name_budget = budget;
    }

    /// The name-extended signature `Σ_c` with `budget` name constants.
    pub fn with_name_budget(&self, budget: usize) -> Signature {
        let mut sig = self.clone();
        sig.name_budget = budget;
        sig
    }

    pub fn constants(&self) -> &[String] {
        &self.constants
    }

    pub fn functions(&self) -> &[(String, usize)] {
        &self.functions
    }

    pub fn ordinary_preds(&self) -> &[(String, usize)] {
        &self.ordinary
    }

    pub fn inductive_preds(&self) -> &[(String, usize)] {
        &self.inductive
    }

    pub fn name_budget(&self) -> usize {
        self.name_budget
    }

    pub fn lookup(&self, name: &str) -> Option<SymbolKind> {
        if self.constants.iter().any(|c| c == name) {
            return Some(SymbolKind::Constant);
        }
        if let Some((_, a)) = self.functions.iter().find(|(f, _)| f == name) {
            return Some(SymbolKind::Function(*a));
        }
        if let Some((_, a)) = self.ordinary.iter().find(|(q, _)| q == name) {
            return Some(SymbolKind::Ordinary(*a));
        }
        self.inductive_index(name).map(SymbolKind::Inductive)
    }

    pub fn inductive_index(&self, name: &str) -> Option<usize> {
        self.inductive.iter().position(|(p, _)| p == name)
    }

    pub fn inductive_arity(&self, i: usize) -> usize {
        self.inductive[i].1
    }

    pub fn inductive_name(&self, i: usize) -> &str {
        &self.inductive[i].0
    }

    pub fn function_arity(&self, name: &str) -> Option<usize> {
        self.functions.iter().find(|(f, _)| f == name).map(|(_, a)| *a)
    }

    pub fn ordinary_arity(&self, name: &str) -> Option<usize> {
        self.ordinary.iter().find(|(q, _)| q == name).map(|(_, a)| *a)
    }

    /// Whether a term only uses symbols of this signature with the right arities.
    pub fn check_term(&self, t: &Term) -> Result<(), SyntaxError> {
        match t {
            Term::Var(_) => Ok(()),
            Term::Const(c) => match self.lookup(c) {
                Some(SymbolKind::Constant) => Ok(()),
                _ => Err(SyntaxError::UndeclaredSymbol(c.clone())),
            },
            Term::Name(i) => {
                if *i >= 1 && *i <= self.name_budget {
                    Ok(())
                } else {
                    Err(SyntaxError::UndeclaredSymbol(format!("c_{i}")))
                }
            }
            Term::App(f, args) => {
                let arity = self
                    .function_arity(f)
                    .ok_or_else(|| SyntaxError::UndeclaredSymbol(f.clone()))?;
                if arity != args.len() {
                    return Err(SyntaxError::ArityMismatch {
                        symbol: f.clone(),
                        expected: arity,
                        found: args.len(),
                    });
                }
                args.iter().try_for_each(|a| self.check_term(a))
            }
        }
    }

    pub fn check_formula(&self, f: &Formula) -> Result<(), SyntaxError> {
        let check_args = |p: &str, expected: Option<usize>, args: &[Term]| {
            let arity = expected.ok_or_else(|| SyntaxError::UndeclaredSymbol(p.to_string()))?;
            if arity != args.len() {
                return Err(SyntaxError::ArityMismatch {
                    symbol: p.to_string(),
                    expected: arity,
                    found: args.len(),
                });
            }
            args.iter().try_for_each(|a| self.check_term(a))
        };
        match f {
            Formula::False => Ok(()),
            Formula::Eq(t, u) => {
                self.check_term(t)?;
                self.check_term(u)
            }
            Formula::Rel(p, args) => check_args(p, self.ordinary_arity(p), args),
            Formula::Ind(p, args) => check_args(p, self.inductive_index(p).map(|i| self.inductive_arity(i)), args),
            Formula::Not(a) | Formula::Forall(_, a) | Formula::Exists(_, a) => self.check_formula(a),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                self.check_formula(a)?;
                self.check_formula(b)
            }
        }
    }
}

/// Parses `c_<k>` with `k ≥ 1`.
pub fn is_name_constant(name: &str) -> Option<usize> {
    let digits = name.strip_prefix("c_")?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || digits.starts_with('0') {
        return None;
    }
    digits.parse().ok()
}

/// A predicate applied to terms, as it appears inside a production rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Atom {
    pub pred: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(pred: impl Into<String>, args: Vec<Term>) -> Self {
        Atom {
            pred: pred.into(),
            args,
        }
    }

    pub fn substitute(&self, theta: &Substitution) -> Atom {
        Atom {
            pred: self.pred.clone(),
            args: self.args.iter().map(|a| a.substitute(theta)).collect(),
        }
    }

    pub fn to_inductive(&self) -> Formula {
        Formula::Ind(self.pred.clone(), self.args.clone())
    }

    pub fn to_ordinary(&self) -> Formula {
        Formula::Rel(self.pred.clone(), self.args.clone())
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_ordinary().fmt(f)
    }
}

/// `Q_1 u⃗_1, …, Q_h u⃗_h, P_{j_1} t⃗_1, …, P_{j_m} t⃗_m ⇒ P_i t⃗`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductionRule {
    pub label: String,
    pub head: Atom,
    pub ordinary_premises: Vec<Atom>,
    pub inductive_premises: Vec<Atom>,
    /// Free variables of the rule in order of first occurrence (head first).
    pub vars: Vec<String>,
}

impl ProductionRule {
    pub fn new(
        label: impl Into<String>,
        head: Atom,
        ordinary_premises: Vec<Atom>,
        inductive_premises: Vec<Atom>,
    ) -> Self {
        let mut vars = Vec::new();
        for atom in std::iter::once(&head)
            .chain(ordinary_premises.iter())
            .chain(inductive_premises.iter())
        {
            atom.args.iter().for_each(|t| t.collect_vars_ordered(&mut vars));
        }
        ProductionRule {
            label: label.into(),
            head,
            ordinary_premises,
            inductive_premises,
            vars,
        }
    }

    /// Rename the rule's variables simultaneously.
    pub fn instantiate(&self, theta: &Substitution) -> ProductionRule {
        ProductionRule::new(
            self.label.clone(),
            self.head.substitute(theta),
            self.ordinary_premises.iter().map(|a| a.substitute(theta)).collect(),
            self.inductive_premises.iter().map(|a| a.substitute(theta)).collect(),
        )
    }

    /// Maximal nesting depth of the terms in the rule.
    pub fn term_depth(&self) -> usize {
        std::iter::once(&self.head)
            .chain(self.ordinary_premises.iter())
            .chain(self.inductive_premises.iter())
            .flat_map(|a| a.args.iter())
            .map(Term::depth)
            .max()
            .unwrap_or(0)
    }
}

impl fmt::Display for ProductionRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let premises: Vec<String> = self
            .ordinary_premises
            .iter()
            .chain(self.inductive_premises.iter())
            .map(|a| a.to_string())
            .collect();
        if premises.is_empty() {
            write!(f, "rule {}: => {};", self.label, self.head)
        } else {
            write!(f, "rule {}: {} => {};", self.label, premises.join(", "), self.head)
        }
    }
}

/// A signature together with its production rules `Φ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Theory {
    signature: Signature,
    rules: Vec<ProductionRule>,
}

impl Theory {
    pub fn new(signature: Signature, rules: Vec<ProductionRule>) -> Result<Self, SyntaxError> {
        let mut labels = BTreeSet::new();
        for rule in &rules {
            if !labels.insert(rule.label.clone()) {
                return Err(SyntaxError::DuplicateSymbol(rule.label.clone()));
            }
            let head_index = signature
                .inductive_index(&rule.head.pred)
                .ok_or_else(|| SyntaxError::NotInductive(rule.head.pred.clone()))?;
            check_atom(&signature, &rule.head, signature.inductive_arity(head_index))?;
            for q in &rule.ordinary_premises {
                let arity = signature
                    .ordinary_arity(&q.pred)
                    .ok_or_else(|| SyntaxError::UndeclaredSymbol(q.pred.clone()))?;
                check_atom(&signature, q, arity)?;
            }
            for p in &rule.inductive_premises {
                let i = signature
                    .inductive_index(&p.pred)
                    .ok_or_else(|| SyntaxError::NotInductive(p.pred.clone()))?;
                check_atom(&signature, p, signature.inductive_arity(i))?;
            }
            for t in std::iter::once(&rule.head)
                .chain(&rule.ordinary_premises)
                .chain(&rule.inductive_premises)
                .flat_map(|a| a.args.iter())
            {
                if t.mentions_name() {
                    return Err(SyntaxError::NameInRule(rule.label.clone()));
                }
            }
        }
        Ok(Theory { signature, rules })
    }

    /// The natural numbers: `=> N(0)` and `N(x) => N(s(x))`.
    pub fn example_nat() -> Self {
        let x = Term::var("x");
        let rules = vec![
            ProductionRule::new("z", Atom::new("N", vec![Term::cnst("0")]), vec![], vec![]),
            ProductionRule::new(
                "sc",
                Atom::new("N", vec![Term::app1("s", x.clone())]),
                vec![],
                vec![Atom::new("N", vec![x])],
            ),
        ];
        Theory::new(Signature::example_nat(), rules).expect("well-formed")
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn rules(&self) -> &[ProductionRule] {
        &self.rules
    }

    /// The same rules over the name-extended signature.
    pub fn with_name_budget(&self, budget: usize) -> Theory {
        Theory {
            signature: self.signature.with_name_budget(budget),
            rules: self.rules.clone(),
        }
    }

    /// Rules with head `pred`, numbered from 1 in declaration order.
    pub fn rules_for<'a>(&'a self, pred: &'a str) -> impl Iterator<Item = (usize, &'a ProductionRule)> + 'a {
        self.rules
            .iter()
            .filter(move |r| r.head.pred == pred)
            .enumerate()
            .map(|(k, r)| (k + 1, r))
    }

    pub fn rule_for(&self, pred: &str, r: usize) -> Option<&ProductionRule> {
        self.rules
            .iter()
            .filter(|rule| rule.head.pred == pred)
            .nth(r.checked_sub(1)?)
    }

    /// Inductive predicates in the strongly connected component of `pred`
    /// in the dependency graph `P_i → P_j` (P_j an inductive premise of a
    /// rule for P_i), in declaration order.
    pub fn mutual_component(&self, pred: &str) -> Vec<String> {
        let n = self.signature.inductive_preds().len();
        let Some(start) = self.signature.inductive_index(pred) else {
            return Vec::new();
        };
        let mut edges: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
        for rule in &self.rules {
            let from = self.signature.inductive_index(&rule.head.pred).unwrap();
            for p in &rule.inductive_premises {
                let to = self.signature.inductive_index(&p.pred).unwrap();
                edges.entry(from).or_default().insert(to);
            }
        }
        let reach = |src: usize| {
            let mut seen = BTreeSet::from([src]);
            let mut stack = vec![src];
            while let Some(v) = stack.pop() {
                for &w in edges.get(&v).into_iter().flatten() {
                    if seen.insert(w) {
                        stack.push(w);
                    }
                }
            }
            seen
        };
        let forward = reach(start);
        (0..n)
            .filter(|&j| forward.contains(&j) && reach(j).contains(&start))
            .map(|j| self.signature.inductive_name(j).to_string())
            .collect()
    }
}

fn check_atom(sig: &Signature, atom: &Atom, arity: usize) -> Result<(), SyntaxError> {
    if atom.args.len() != arity {
        return Err(SyntaxError::ArityMismatch {
            symbol: atom.pred.clone(),
            expected: arity,
            found: atom.args.len(),
        });
    }
    atom.args.iter().try_for_each(|t| sig.check_term(t))
}
