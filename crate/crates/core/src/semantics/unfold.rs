use std::collections::BTreeSet;

use crate::syntax::{fresh_name, Formula, Substitution, Term, Theory};

use super::eval::eval_formula;
use super::fixpoint::kleene_stages;
use super::structure::{all_tuples, FiniteStructure, Tuple};
use super::SemanticsError;

/// Argument variables of an unfolded predicate: `x` for unary predicates,
/// `x1, …, xk` otherwise.
pub fn argument_vars(arity: usize) -> Vec<String> {
    if arity == 1 {
        vec!["x".to_string()]
    } else {
        (1..=arity).map(|i| format!("x{i}")).collect()
    }
}

/// `P^(k)(x⃗)`: `false` for `k = 0`; otherwise the disjunction over the
/// rules for `P` of `∃y⃗(x⃗ = t⃗ ∧ ⋀Q u⃗ ∧ ⋀P_j^(k-1)(t⃗_j))`. Falsum
/// subformulas are kept; nothing is simplified.
pub fn unfold_formula(theory: &Theory, pred: &str, k: usize) -> Option<Formula> {
    let sig = theory.signature();
    sig.inductive_index(pred)?;
    let mut level: Vec<Formula> = vec![Formula::False; sig.inductive_preds().len()];
    for _ in 0..k {
        let previous = level.clone();
        level = sig
            .inductive_preds()
            .iter()
            .map(|(p, arity)| unfold_step(theory, p, *arity, &previous))
            .collect();
    }
    Some(level[sig.inductive_index(pred)?].clone())
}

fn unfold_step(theory: &Theory, pred: &str, arity: usize, previous: &[Formula]) -> Formula {
    let sig = theory.signature();
    let xs = argument_vars(arity);
    let disjuncts = theory.rules_for(pred).map(|(_, rule)| {
        // keep the rule's variables apart from the argument variables
        let mut avoid: BTreeSet<String> = xs.iter().cloned().collect();
        avoid.extend(rule.vars.iter().cloned());
        let mut renaming = Substitution::new();
        let mut ys = Vec::new();
        for v in &rule.vars {
            if xs.contains(v) {
                let y = fresh_name(v, &avoid);
                avoid.insert(y.clone());
                renaming.insert(v.clone(), Term::var(y.clone()));
                ys.push(y);
            } else {
                ys.push(v.clone());
            }
        }
        let rule = rule.instantiate(&renaming);
        let mut parts: Vec<Formula> = xs
            .iter()
            .zip(&rule.head.args)
            .map(|(x, t)| Formula::eq(Term::var(x.clone()), t.clone()))
            .collect();
        parts.extend(rule.ordinary_premises.iter().map(|q| q.to_ordinary()));
        for p in &rule.inductive_premises {
            let j = sig.inductive_index(&p.pred).expect("declared");
            let inner_vars = argument_vars(sig.inductive_arity(j));
            let theta = Substitution::from_pairs(inner_vars.into_iter().zip(p.args.iter().cloned()));
            parts.push(previous[j].substitute(&theta));
        }
        let body = Formula::conj(parts).unwrap_or_else(|| Formula::not(Formula::False));
        ys.into_iter().rev().fold(body, |acc, y| Formula::exists(y, acc))
    });
    Formula::disj(disjuncts).unwrap_or(Formula::False)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnfoldViolation {
    pub pred: String,
    pub tuple: Tuple,
    pub k: usize,
    pub in_stage: bool,
    pub formula_holds: bool,
}

/// Compares `u⃗ ∈ (φ^k(∅⃗))_i` with `M ⊨ P_i^(k)[x⃗ := u⃗]` for every
/// predicate, tuple and `k ≤ k_max`. An empty result means agreement.
pub fn check_unfold_equivalence(
    m: &FiniteStructure,
    theory: &Theory,
    k_max: usize,
) -> Result<Vec<UnfoldViolation>, SemanticsError> {
    let sig = theory.signature();
    let stages = kleene_stages(m, theory, k_max)?;
    let mut violations = Vec::new();
    for (i, (pred, arity)) in sig.inductive_preds().iter().enumerate() {
        let xs = argument_vars(*arity);
        for (k, stage) in stages.iter().enumerate() {
            let f = unfold_formula(theory, pred, k).expect("declared");
            for u in all_tuples(m.size(), *arity) {
                let rho = xs.iter().cloned().zip(u.iter().copied()).collect();
                let holds = eval_formula(&f, m, &rho)?;
                let member = stage[i].contains(&u);
                if holds != member {
                    violations.push(UnfoldViolation {
                        pred: pred.clone(),
                        tuple: u,
                        k,
                        in_stage: member,
                        formula_holds: holds,
                    });
                }
            }
        }
    }
    Ok(violations)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::structure::FuncTable;

    #[test]
    fn zeroth_unfolding_is_falsum() {
        let th = Theory::example_nat();
        assert_eq!(unfold_formula(&th, "N", 0), Some(Formula::False));
        assert_eq!(unfold_formula(&th, "M", 0), None);
    }

    #[test]
    fn first_unfolding_keeps_falsum() {
        let th = Theory::example_nat();
        let f = unfold_formula(&th, "N", 1).unwrap();
        assert_eq!(f.to_string(), "x = 0 \\/ (exists x'. x = s(x') /\\ false)");
        assert_eq!(f.free_vars().into_iter().collect::<Vec<_>>(), vec!["x"]);
    }

    #[test]
    fn clamp_model_agrees_up_to_four() {
        let th = Theory::example_nat();
        let m = FiniteStructure::new(3)
            .with_const("0", 0)
            .with_func("s", FuncTable::new(1, vec![1, 2, 2]));
        assert!(check_unfold_equivalence(&m, &th, 4).unwrap().is_empty());
    }
}
