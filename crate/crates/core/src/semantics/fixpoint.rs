use crate::syntax::{Atom, ProductionRule, Signature, Theory};

use super::eval::{eval_term, Assignment};
use super::structure::{FiniteStructure, PredFamily, Relation, Tuple};
use super::SemanticsError;

fn atom_tuple(a: &Atom, m: &FiniteStructure, rho: &Assignment) -> Result<Tuple, SemanticsError> {
    a.args.iter().map(|t| eval_term(t, m, rho)).collect()
}

/// Number of leading rule variables that must be bound before `a` can be
/// evaluated.
fn ready_level(a: &Atom, vars: &[String]) -> usize {
    let mut level = 0;
    for t in &a.args {
        for x in t.free_vars() {
            let pos = vars.iter().position(|v| *v == x).expect("rule variable");
            level = level.max(pos + 1);
        }
    }
    level
}

/// Calls `emit` with the head tuple of every instance of `rule` whose
/// ordinary premises hold in `m` and whose inductive premises pass `accept`
/// (called with the premise position and its tuple). Variables are bound
/// one at a time and each premise is tested as soon as it is ground.
fn for_each_firing(
    m: &FiniteStructure,
    rule: &ProductionRule,
    accept: &dyn Fn(usize, &Tuple) -> bool,
    emit: &mut dyn FnMut(Tuple),
) -> Result<(), SemanticsError> {
    let vars = &rule.vars;
    let mut checks: Vec<Vec<(bool, usize)>> = vec![Vec::new(); vars.len() + 1];
    for (i, q) in rule.ordinary_premises.iter().enumerate() {
        checks[ready_level(q, vars)].push((false, i));
    }
    for (i, p) in rule.inductive_premises.iter().enumerate() {
        checks[ready_level(p, vars)].push((true, i));
    }
    let mut rho = Assignment::new();

    fn go(
        level: usize,
        m: &FiniteStructure,
        rule: &ProductionRule,
        checks: &[Vec<(bool, usize)>],
        rho: &mut Assignment,
        accept: &dyn Fn(usize, &Tuple) -> bool,
        emit: &mut dyn FnMut(Tuple),
    ) -> Result<(), SemanticsError> {
        for &(inductive, i) in &checks[level] {
            let ok = if inductive {
                accept(i, &atom_tuple(&rule.inductive_premises[i], m, rho)?)
            } else {
                let q = &rule.ordinary_premises[i];
                let t = atom_tuple(q, m, rho)?;
                m.pred(&q.pred).is_some_and(|r| r.contains(&t))
            };
            if !ok {
                return Ok(());
            }
        }
        if level == rule.vars.len() {
            emit(atom_tuple(&rule.head, m, rho)?);
            return Ok(());
        }
        let x = rule.vars[level].clone();
        for v in 0..m.size() {
            rho.insert(x.clone(), v);
            go(level + 1, m, rule, checks, rho, accept, emit)?;
        }
        rho.remove(&x);
        Ok(())
    }

    go(0, m, rule, &checks, &mut rho, accept, emit)
}

fn empty_family(sig: &Signature) -> PredFamily {
    vec![Relation::new(); sig.inductive_preds().len()]
}

fn index_of(sig: &Signature, pred: &str) -> usize {
    sig.inductive_index(pred).expect("declared inductive predicate")
}

/// One application of the operator `φ` to `x`. Ordinary premises are read
/// from `m`, inductive premises from `x`.
pub fn apply_phi(m: &FiniteStructure, theory: &Theory, x: &PredFamily) -> Result<PredFamily, SemanticsError> {
    let sig = theory.signature();
    let mut out = empty_family(sig);
    for rule in theory.rules() {
        let head = index_of(sig, &rule.head.pred);
        let prem: Vec<usize> = rule.inductive_premises.iter().map(|p| index_of(sig, &p.pred)).collect();
        let accept = |i: usize, t: &Tuple| x[prem[i]].contains(t);
        let target = &mut out[head];
        for_each_firing(m, rule, &accept, &mut |t| {
            target.insert(t);
        })?;
    }
    Ok(out)
}

/// The stages `φ^0(∅⃗), φ^1(∅⃗), …, φ^k_max(∅⃗)`.
pub fn kleene_stages(m: &FiniteStructure, theory: &Theory, k_max: usize) -> Result<Vec<PredFamily>, SemanticsError> {
    let mut stages = vec![empty_family(theory.signature())];
    for _ in 0..k_max {
        let next = apply_phi(m, theory, stages.last().expect("non-empty"))?;
        stages.push(next);
    }
    Ok(stages)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lfp {
    pub family: PredFamily,
    /// The first `k` with `φ^{k+1}(∅⃗) = φ^k(∅⃗)`.
    pub stage: usize,
}

/// Upper bound `1 + Σ_i n^{k_i}` on the number of Kleene iterations.
pub fn iteration_bound(m: &FiniteStructure, sig: &Signature) -> usize {
    1 + sig
        .inductive_preds()
        .iter()
        .map(|(_, k)| m.size().pow(*k as u32))
        .sum::<usize>()
}

/// Least fixpoint by plain Kleene iteration from `∅⃗`.
pub fn compute_lfp_naive(m: &FiniteStructure, theory: &Theory) -> Result<Lfp, SemanticsError> {
    let mut current = empty_family(theory.signature());
    let mut k = 0;
    loop {
        let next = apply_phi(m, theory, &current)?;
        if next == current {
            return Ok(Lfp {
                family: current,
                stage: k,
            });
        }
        current = next;
        k += 1;
    }
}

/// Least fixpoint by semi-naive iteration: after the first round a rule
/// instance is only re-fired when one of its inductive premises was new in
/// the previous round. Produces the same stages as the naive iteration.
pub fn compute_lfp(m: &FiniteStructure, theory: &Theory) -> Result<Lfp, SemanticsError> {
    let sig = theory.signature();
    let mut total = empty_family(sig);
    let mut delta = apply_phi(m, theory, &total)?;
    let mut k = 0;
    while delta.iter().any(|d| !d.is_empty()) {
        for (t, d) in total.iter_mut().zip(&delta) {
            t.extend(d.iter().cloned());
        }
        k += 1;
        let mut fresh = empty_family(sig);
        for rule in theory.rules() {
            let head = index_of(sig, &rule.head.pred);
            let prem: Vec<usize> = rule.inductive_premises.iter().map(|p| index_of(sig, &p.pred)).collect();
            for pivot in 0..prem.len() {
                let accept = |i: usize, t: &Tuple| {
                    if i == pivot {
                        delta[prem[i]].contains(t)
                    } else {
                        total[prem[i]].contains(t)
                    }
                };
                let known = &total[head];
                let target = &mut fresh[head];
                for_each_firing(m, rule, &accept, &mut |t| {
                    if !known.contains(&t) {
                        target.insert(t);
                    }
                })?;
            }
        }
        delta = fresh;
    }
    Ok(Lfp {
        family: total,
        stage: k,
    })
}

/// True iff every `⟦P_i⟧` of `m` is the `i`-th component of `lfp φ`.
pub fn check_standard(m: &FiniteStructure, theory: &Theory) -> Result<bool, SemanticsError> {
    Ok(m.family(theory.signature()) == compute_lfp(m, theory)?.family)
}

/// The structure with its inductive tables replaced by the least fixpoint.
pub fn standardize(m: &FiniteStructure, theory: &Theory) -> Result<FiniteStructure, SemanticsError> {
    let lfp = compute_lfp(m, theory)?;
    Ok(m.with_family(theory.signature(), &lfp.family))
}
