use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::semantics::{eval_closed, kleene_stages, FiniteStructure};
use crate::syntax::{Formula, ProductionRule, Substitution, Term, Theory};
use crate::termmodel::{TermModel, TermUniverse};

use super::code::{decode_tuple, encode_formula, encode_tuple, seq, unseq, Code};
use super::truth::TruthAssignment;
use super::CodingError;

/// The valuation `f` restricted to closed atoms: ordinary atoms and
/// equalities. `holds(A)` means `f(⌜A⌝) = 0`.
#[derive(Clone, Debug)]
pub enum OrdinaryOracle {
    /// Truth in a structure interpreting every closed term involved.
    Model(FiniteStructure),
    /// An explicit table over atom codes; missing atoms do not hold.
    Table(BTreeMap<Code, bool>),
    Truth(TruthAssignment),
    /// Flips every answer of the inner oracle.
    Negated(Box<OrdinaryOracle>),
}

impl OrdinaryOracle {
    pub fn holds(&self, atom: &Formula) -> bool {
        match self {
            OrdinaryOracle::Model(m) => eval_closed(atom, m).unwrap_or(false),
            OrdinaryOracle::Table(t) => t.get(&encode_formula(atom)).copied().unwrap_or(false),
            OrdinaryOracle::Truth(f) => f.value(atom) == Some(0),
            OrdinaryOracle::Negated(inner) => !inner.holds(atom),
        }
    }

    pub fn negated(self) -> Self {
        OrdinaryOracle::Negated(Box::new(self))
    }
}

/// A family of code sets, one per inductive predicate.
pub type CodeFamily = Vec<BTreeSet<Code>>;

/// Stage sets as tuples of indices into the term universe.
type IndexFamily = Vec<BTreeSet<Vec<usize>>>;

/// The coded operator `φ̃` over a fixed term universe and oracle.
///
/// Membership of a tuple in a stage is taken up to `f`-equality, and each
/// stage contains every universe tuple `f`-equal to a derived head. Heads
/// of rules may leave the universe (for example `s(c_B)` at depth 0); they
/// enter the stage through the universe tuples equal to them.
pub struct CodedLayer<'a> {
    theory: &'a Theory,
    universe: &'a TermUniverse,
    oracle: &'a OrdinaryOracle,
    same: Vec<Vec<bool>>,
    eq_cache: RefCell<HashMap<Term, Vec<usize>>>,
}

impl<'a> CodedLayer<'a> {
    pub fn new(theory: &'a Theory, universe: &'a TermUniverse, oracle: &'a OrdinaryOracle) -> Self {
        let terms = universe.terms();
        let same = terms
            .iter()
            .map(|t| {
                terms
                    .iter()
                    .map(|u| t == u || oracle.holds(&Formula::eq(t.clone(), u.clone())))
                    .collect()
            })
            .collect();
        CodedLayer {
            theory,
            universe,
            oracle,
            same,
            eq_cache: RefCell::new(HashMap::new()),
        }
    }

    fn preds(&self) -> &[(String, usize)] {
        self.theory.signature().inductive_preds()
    }

    fn pred_index(&self, pred: &str) -> Result<usize, CodingError> {
        self.theory
            .signature()
            .inductive_index(pred)
            .ok_or_else(|| CodingError::UnknownPredicate(pred.to_string()))
    }

    /// Universe terms `f`-equal to `t`.
    fn equal_in_universe(&self, t: &Term) -> Vec<usize> {
        if let Some(i) = self.universe.index_of(t) {
            return (0..self.universe.len()).filter(|&j| self.same[i][j]).collect();
        }
        if let Some(v) = self.eq_cache.borrow().get(t) {
            return v.clone();
        }
        let v: Vec<usize> = self
            .universe
            .terms()
            .iter()
            .enumerate()
            .filter(|(_, u)| self.oracle.holds(&Formula::eq(t.clone(), (*u).clone())))
            .map(|(j, _)| j)
            .collect();
        self.eq_cache.borrow_mut().insert(t.clone(), v.clone());
        v
    }

    fn member(&self, ts: &[Term], set: &BTreeSet<Vec<usize>>) -> bool {
        let options: Vec<Vec<usize>> = ts.iter().map(|t| self.equal_in_universe(t)).collect();
        set.iter()
            .any(|x| x.iter().zip(&options).all(|(i, opts)| opts.contains(i)))
    }

    fn saturate(&self, ts: &[Term], out: &mut BTreeSet<Vec<usize>>) {
        let options: Vec<Vec<usize>> = ts.iter().map(|t| self.equal_in_universe(t)).collect();
        let mut current = vec![Vec::new()];
        for opts in &options {
            current = current
                .into_iter()
                .flat_map(|prefix: Vec<usize>| {
                    opts.iter().map(move |&i| {
                        let mut p = prefix.clone();
                        p.push(i);
                        p
                    })
                })
                .collect();
        }
        out.extend(current);
    }

    /// Calls `emit` with the instantiated head arguments of every firing of
    /// `rule` whose ordinary premises hold and whose inductive premises are
    /// members of `x`.
    fn firings(
        &self,
        rule: &ProductionRule,
        x: &IndexFamily,
        emit: &mut dyn FnMut(Vec<Term>),
    ) -> Result<(), CodingError> {
        let n = rule.vars.len();
        // Premises grouped by the number of leading variables they need.
        let mut ready: Vec<Vec<(bool, usize)>> = vec![Vec::new(); n + 1];
        let level = |args: &[Term]| {
            args.iter()
                .flat_map(|t| t.free_vars())
                .map(|v| rule.vars.iter().position(|w| *w == v).expect("rule variable") + 1)
                .max()
                .unwrap_or(0)
        };
        for (i, q) in rule.ordinary_premises.iter().enumerate() {
            ready[level(&q.args)].push((false, i));
        }
        for (i, p) in rule.inductive_premises.iter().enumerate() {
            ready[level(&p.args)].push((true, i));
        }
        let mut inductive_targets = Vec::new();
        for p in &rule.inductive_premises {
            inductive_targets.push(self.pred_index(&p.pred)?);
        }
        let terms = self.universe.terms();
        let mut theta = Substitution::new();
        #[allow(clippy::too_many_arguments)]
        fn go(
            layer: &CodedLayer,
            rule: &ProductionRule,
            ready: &[Vec<(bool, usize)>],
            targets: &[usize],
            terms: &[Term],
            x: &IndexFamily,
            level: usize,
            theta: &mut Substitution,
            emit: &mut dyn FnMut(Vec<Term>),
        ) {
            for &(inductive, i) in &ready[level] {
                let ok = if inductive {
                    let a = rule.inductive_premises[i].substitute(theta);
                    layer.member(&a.args, &x[targets[i]])
                } else {
                    let q = rule.ordinary_premises[i].substitute(theta);
                    layer.oracle.holds(&q.to_ordinary())
                };
                if !ok {
                    return;
                }
            }
            if level == rule.vars.len() {
                emit(rule.head.substitute(theta).args);
                return;
            }
            for t in terms {
                theta.insert(rule.vars[level].clone(), t.clone());
                go(layer, rule, ready, targets, terms, x, level + 1, theta, emit);
            }
            *theta = theta.without(&rule.vars[level]);
        }
        go(self, rule, &ready, &inductive_targets, terms, x, 0, &mut theta, emit);
        Ok(())
    }

    fn step(&self, x: &IndexFamily) -> Result<IndexFamily, CodingError> {
        let mut out: IndexFamily = vec![BTreeSet::new(); self.preds().len()];
        for rule in self.theory.rules() {
            let i = self.pred_index(&rule.head.pred)?;
            let mut heads = Vec::new();
            self.firings(rule, x, &mut |h| heads.push(h))?;
            for h in heads {
                self.saturate(&h, &mut out[i]);
            }
        }
        Ok(out)
    }

    fn tuple_code(&self, t: &[usize]) -> Code {
        let ts: Vec<Term> = t.iter().map(|&i| self.universe.terms()[i].clone()).collect();
        encode_tuple(&ts)
    }

    fn to_codes(&self, x: &IndexFamily) -> CodeFamily {
        x.iter()
            .map(|s| s.iter().map(|t| self.tuple_code(t)).collect())
            .collect()
    }

    fn index_family(&self, x: &CodeFamily) -> Result<IndexFamily, CodingError> {
        if x.len() != self.preds().len() {
            return Err(CodingError::InvalidCode(format!(
                "expected {} code sets, found {}",
                self.preds().len(),
                x.len()
            )));
        }
        x.iter()
            .map(|set| {
                set.iter()
                    .map(|c| {
                        decode_tuple(c)?
                            .iter()
                            .map(|t| {
                                self.universe
                                    .index_of(t)
                                    .ok_or_else(|| CodingError::OutsideUniverse(t.to_string()))
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect()
    }

    pub fn empty(&self) -> CodeFamily {
        vec![BTreeSet::new(); self.preds().len()]
    }

    /// One application of `φ̃`.
    pub fn apply(&self, x: &CodeFamily) -> Result<CodeFamily, CodingError> {
        Ok(self.to_codes(&self.step(&self.index_family(x)?)?))
    }

    /// `φ̃^0(∅⃗), …, φ̃^k(∅⃗)`.
    pub fn stages(&self, k: usize) -> Result<Vec<CodeFamily>, CodingError> {
        Ok(self.index_stages(k)?.iter().map(|x| self.to_codes(x)).collect())
    }

    fn index_stages(&self, k: usize) -> Result<Vec<IndexFamily>, CodingError> {
        let mut out: Vec<IndexFamily> = vec![vec![BTreeSet::new(); self.preds().len()]];
        for _ in 0..k {
            let next = self.step(out.last().expect("non-empty"))?;
            let done = Some(&next) == out.last();
            out.push(next);
            if done {
                // Saturated: the remaining stages repeat this one.
                while out.len() <= k {
                    out.push(out.last().expect("non-empty").clone());
                }
                break;
            }
        }
        Ok(out)
    }

    /// Stages up to saturation.
    pub fn saturate_stages(&self) -> Result<Vec<CodeFamily>, CodingError> {
        let mut out: Vec<IndexFamily> = vec![vec![BTreeSet::new(); self.preds().len()]];
        loop {
            let next = self.step(out.last().expect("non-empty"))?;
            if Some(&next) == out.last() {
                return Ok(out.iter().map(|x| self.to_codes(x)).collect());
            }
            out.push(next);
        }
    }

    /// Decodes an `n`-tuple of sequences of tuple codes.
    fn decode_stage(&self, c: &Code) -> Result<Vec<Vec<Vec<Term>>>, CodingError> {
        let parts = unseq(c)?;
        if parts.len() != self.preds().len() {
            return Err(CodingError::InvalidCode(format!(
                "stage code has {} components, expected {}",
                parts.len(),
                self.preds().len()
            )));
        }
        parts
            .iter()
            .map(|p| unseq(p)?.iter().map(decode_tuple).collect())
            .collect()
    }

    /// `W(y, z)`: every entry of every `(z)_i` is `f`-equal to the head of a
    /// firing whose inductive premises are entries of `y`.
    pub fn eval_w(&self, y: &Code, z: &Code) -> Result<bool, CodingError> {
        let ys = self.decode_stage(y)?;
        let zs = self.decode_stage(z)?;
        // Premises are looked up in `y` up to f-equality, so `y` is read
        // as the universe tuples equal to its entries.
        let mut yfam: IndexFamily = vec![BTreeSet::new(); ys.len()];
        for (set, entries) in yfam.iter_mut().zip(&ys) {
            for e in entries {
                self.saturate(e, set);
            }
        }
        for (i, entries) in zs.iter().enumerate() {
            let pred = &self.preds()[i].0;
            for x in entries {
                let mut found = false;
                for (_, rule) in self.theory.rules_for(pred) {
                    if rule.head.args.len() != x.len() {
                        continue;
                    }
                    self.firings(rule, &yfam, &mut |h| {
                        if !found
                            && h.iter()
                                .zip(x)
                                .all(|(a, b)| a == b || self.oracle.holds(&Formula::eq(a.clone(), b.clone())))
                        {
                            found = true;
                        }
                    })?;
                    if found {
                        break;
                    }
                }
                if !found {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Looks for a stage sequence `z` witnessing `a ∈ P̃_i`: the stages
    /// `φ̃^0(∅⃗), …, φ̃^l(∅⃗)` for the least `l ≤ k_max` whose `i`-th
    /// component contains a tuple `f`-equal to `a`.
    pub fn search(&self, pred: &str, a: &Code, k_max: usize) -> Result<Option<StageWitness>, CodingError> {
        let i = self.pred_index(pred)?;
        let target = decode_tuple(a)?;
        let mut stages: Vec<IndexFamily> = vec![vec![BTreeSet::new(); self.preds().len()]];
        loop {
            let last = stages.last().expect("non-empty");
            if self.member(&target, &last[i]) {
                let coded: Vec<CodeFamily> = stages.iter().map(|x| self.to_codes(x)).collect();
                return Ok(Some(StageWitness::new(coded)));
            }
            if stages.len() > k_max {
                return Ok(None);
            }
            let next = self.step(last)?;
            if &next == last {
                return Ok(None);
            }
            stages.push(next);
        }
    }
}

/// A stage sequence `z` with `(z)_0` the tuple of empty sequences.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageWitness {
    pub stages: Vec<CodeFamily>,
    pub code: Code,
}

/// Code of an `n`-tuple of sequences, each sorted ascending.
pub fn stage_code(x: &CodeFamily) -> Code {
    let parts: Vec<Code> = x.iter().map(|s| seq(&s.iter().cloned().collect::<Vec<_>>())).collect();
    seq(&parts)
}

impl StageWitness {
    fn new(stages: Vec<CodeFamily>) -> Self {
        let parts: Vec<Code> = stages.iter().map(stage_code).collect();
        let code = seq(&parts);
        StageWitness { stages, code }
    }

    pub fn len(&self) -> usize {
        self.stages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }

    /// `(z)_l` for each `l`.
    pub fn stage_codes(&self) -> Vec<Code> {
        self.stages.iter().map(stage_code).collect()
    }
}

pub fn apply_phi_tilde(
    theory: &Theory,
    oracle: &OrdinaryOracle,
    x: &CodeFamily,
    universe: &TermUniverse,
) -> Result<CodeFamily, CodingError> {
    CodedLayer::new(theory, universe, oracle).apply(x)
}

pub fn eval_w(
    y: &Code,
    z: &Code,
    oracle: &OrdinaryOracle,
    theory: &Theory,
    universe: &TermUniverse,
) -> Result<bool, CodingError> {
    CodedLayer::new(theory, universe, oracle).eval_w(y, z)
}

pub fn search_p_tilde(
    pred: &str,
    a: &Code,
    oracle: &OrdinaryOracle,
    theory: &Theory,
    universe: &TermUniverse,
    k_max: usize,
) -> Result<Option<StageWitness>, CodingError> {
    CodedLayer::new(theory, universe, oracle).search(pred, a, k_max)
}

/// A disagreement between `φ^k` on the term model and `φ̃^k` on codes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeMismatch {
    pub pred: String,
    pub terms: Vec<Term>,
    pub stage: usize,
    pub in_phi: bool,
    pub in_phi_tilde: bool,
}

/// Compares `[t⃗] ∈ φ^k(∅⃗)_i` on the term model with `⌜t⃗⌝ ∈ φ̃^k(∅⃗)_i`
/// for every universe tuple and every `k ≤ k_max`.
pub fn check_code_correspondence(
    tm: &TermModel,
    oracle: &OrdinaryOracle,
    theory: &Theory,
    universe: &TermUniverse,
    k_max: usize,
) -> Result<Vec<CodeMismatch>, CodingError> {
    let th = theory.with_name_budget(tm.signature().name_budget());
    let layer = CodedLayer::new(&th, universe, oracle);
    let coded = layer.index_stages(k_max)?;
    let semantic = kleene_stages(&tm.as_structure(), &th, k_max)?;
    let classes: Vec<Option<usize>> = universe.terms().iter().map(|t| tm.class_of_term(t)).collect();
    let mut report = Vec::new();
    for (k, (sem, cod)) in semantic.iter().zip(&coded).enumerate() {
        for (i, (pred, arity)) in th.signature().inductive_preds().iter().enumerate() {
            for tuple in crate::semantics::all_tuples(universe.len(), *arity) {
                let Some(class_tuple) = tuple.iter().map(|&j| classes[j]).collect::<Option<Vec<usize>>>() else {
                    continue;
                };
                let in_phi = sem[i].contains(&class_tuple);
                let in_phi_tilde = cod[i].contains(&tuple);
                if in_phi != in_phi_tilde {
                    report.push(CodeMismatch {
                        pred: pred.clone(),
                        terms: tuple.iter().map(|&j| universe.terms()[j].clone()).collect(),
                        stage: k,
                        in_phi,
                        in_phi_tilde,
                    });
                }
            }
        }
    }
    Ok(report)
}
