use std::collections::BTreeSet;
use std::fmt;

use crate::syntax::{Formula, FormulaSet, ProductionRule, Sequent, Substitution, Term, Theory};

use super::KernelError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PropRule {
    NegL,
    NegR,
    OrL,
    OrR,
    AndL,
    AndR,
    ImpL,
    ImpR,
}

impl PropRule {
    pub const ALL: [PropRule; 8] = [
        PropRule::NegL,
        PropRule::NegR,
        PropRule::OrL,
        PropRule::OrR,
        PropRule::AndL,
        PropRule::AndR,
        PropRule::ImpL,
        PropRule::ImpR,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PropRule::NegL => "NegL",
            PropRule::NegR => "NegR",
            PropRule::OrL => "OrL",
            PropRule::OrR => "OrR",
            PropRule::AndL => "AndL",
            PropRule::AndR => "AndR",
            PropRule::ImpL => "ImpL",
            PropRule::ImpR => "ImpR",
        }
    }

    pub fn is_left(self) -> bool {
        matches!(self, PropRule::NegL | PropRule::OrL | PropRule::AndL | PropRule::ImpL)
    }
}

/// An inference rule together with the parameters that fix its premises.
///
/// `keep` retains the principal formula in the premises (contraction is
/// implicit in set-based sequents, so both readings are instances).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RuleInstance {
    Axiom,
    Wk,
    Cut {
        formula: Formula,
    },
    Subst {
        theta: Substitution,
    },
    Prop {
        rule: PropRule,
        principal: Formula,
        keep: bool,
    },
    AllL {
        principal: Formula,
        term: Term,
        keep: bool,
    },
    AllR {
        principal: Formula,
        var: Option<String>,
    },
    ExL {
        principal: Formula,
        var: Option<String>,
    },
    ExR {
        principal: Formula,
        term: Term,
        keep: bool,
    },
    EqL {
        principal: Formula,
    },
    EqR,
    IndR {
        pred: String,
        rule: usize,
        terms: Vec<Term>,
        keep: bool,
    },
    Case {
        pred: String,
        principal: Formula,
        fresh: Vec<Vec<String>>,
        keep: bool,
    },
}

impl RuleInstance {
    pub fn name(&self) -> String {
        match self {
            RuleInstance::Axiom => "Axiom".into(),
            RuleInstance::Wk => "Wk".into(),
            RuleInstance::Cut { .. } => "Cut".into(),
            RuleInstance::Subst { .. } => "Subst".into(),
            RuleInstance::Prop { rule, .. } => rule.name().into(),
            RuleInstance::AllL { .. } => "AllL".into(),
            RuleInstance::AllR { .. } => "AllR".into(),
            RuleInstance::ExL { .. } => "ExL".into(),
            RuleInstance::ExR { .. } => "ExR".into(),
            RuleInstance::EqL { .. } => "EqL".into(),
            RuleInstance::EqR => "EqR".into(),
            RuleInstance::IndR { pred, rule, .. } => format!("IndR({pred},{rule})"),
            RuleInstance::Case { pred, .. } => format!("Case({pred})"),
        }
    }

    /// The parameters as `key=value` pairs in print order.
    pub fn params(&self) -> Vec<(&'static str, String)> {
        let quote = |s: String| format!("\"{s}\"");
        let mut out = Vec::new();
        let keep_flag = |out: &mut Vec<(&'static str, String)>, keep: bool| {
            if keep {
                out.push(("keep", "true".to_string()));
            }
        };
        match self {
            RuleInstance::Axiom | RuleInstance::Wk | RuleInstance::EqR => {}
            RuleInstance::Cut { formula } => out.push(("formula", quote(formula.to_string()))),
            RuleInstance::Subst { theta } => out.push(("theta", quote(theta.to_string()))),
            RuleInstance::Prop { principal, keep, .. } => {
                out.push(("principal", quote(principal.to_string())));
                keep_flag(&mut out, *keep);
            }
            RuleInstance::AllL { principal, term, keep } | RuleInstance::ExR { principal, term, keep } => {
                out.push(("principal", quote(principal.to_string())));
                out.push(("term", quote(term.to_string())));
                keep_flag(&mut out, *keep);
            }
            RuleInstance::AllR { principal, var } | RuleInstance::ExL { principal, var } => {
                out.push(("principal", quote(principal.to_string())));
                if let Some(v) = var {
                    out.push(("var", v.clone()));
                }
            }
            RuleInstance::EqL { principal } => out.push(("principal", quote(principal.to_string()))),
            RuleInstance::IndR { terms, keep, .. } => {
                let ts: Vec<String> = terms.iter().map(|t| quote(t.to_string())).collect();
                out.push(("terms", format!("[{}]", ts.join(", "))));
                keep_flag(&mut out, *keep);
            }
            RuleInstance::Case {
                principal, fresh, keep, ..
            } => {
                out.push(("principal", quote(principal.to_string())));
                let cases: Vec<String> = fresh.iter().map(|ys| format!("[{}]", ys.join(", "))).collect();
                out.push(("fresh", format!("[{}]", cases.join(", "))));
                keep_flag(&mut out, *keep);
            }
        }
        out
    }
}

impl fmt::Display for RuleInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())?;
        let params = self.params();
        if !params.is_empty() {
            let body: Vec<String> = params.into_iter().map(|(k, v)| format!("{k}={v}")).collect();
            write!(f, "({})", body.join(", "))?;
        }
        Ok(())
    }
}

/// The case distinctions of `Case(pred)`: every rule of every predicate
/// mutually dependent with `pred`, predicates in declaration order and rules
/// in declaration order within each predicate.
pub fn case_rules(theory: &Theory, pred: &str) -> Vec<(String, ProductionRule)> {
    theory
        .mutual_component(pred)
        .into_iter()
        .flat_map(|p| {
            theory
                .rules_for(&p)
                .map(|(_, r)| (p.clone(), r.clone()))
                .collect::<Vec<_>>()
        })
        .collect()
}

fn require_left<'a>(s: &'a Sequent, f: &Formula, rule: &str) -> Result<&'a Formula, KernelError> {
    s.antecedent
        .position(f)
        .and_then(|i| s.antecedent.get(i))
        .ok_or_else(|| KernelError::BadParameters(format!("{rule}: principal `{f}` is not in the antecedent")))
}

fn require_right<'a>(s: &'a Sequent, f: &Formula, rule: &str) -> Result<&'a Formula, KernelError> {
    s.succedent
        .position(f)
        .and_then(|i| s.succedent.get(i))
        .ok_or_else(|| KernelError::BadParameters(format!("{rule}: principal `{f}` is not in the succedent")))
}

fn frame(set: &FormulaSet, principal: &Formula, keep: bool) -> FormulaSet {
    if keep {
        set.clone()
    } else {
        set.without(principal)
    }
}

fn wrong_shape(rule: &str, f: &Formula) -> KernelError {
    KernelError::BadParameters(format!("{rule}: principal `{f}` has the wrong shape"))
}

/// The case-split premises together with, per premise, the case-descendant
/// atoms.
pub fn case_premises(
    theory: &Theory,
    conclusion: &Sequent,
    pred: &str,
    principal: &Formula,
    fresh: &[Vec<String>],
    keep: bool,
) -> Result<Vec<(Sequent, Vec<Formula>)>, KernelError> {
    let name = format!("Case({pred})");
    let p = require_left(conclusion, principal, &name)?;
    let us = match p {
        Formula::Ind(q, us) if q == pred => us.clone(),
        _ => return Err(wrong_shape(&name, principal)),
    };
    let distinctions = case_rules(theory, pred);
    if distinctions.len() != fresh.len() {
        return Err(KernelError::BadParameters(format!(
            "{name}: {} case distinction(s) but {} fresh-variable list(s)",
            distinctions.len(),
            fresh.len()
        )));
    }
    let taken = conclusion.free_vars();
    let sig = theory.signature();
    let gamma = frame(&conclusion.antecedent, principal, keep);
    let mut out = Vec::new();
    for ((_, rule), ys) in distinctions.iter().zip(fresh) {
        if ys.len() != rule.vars.len() {
            return Err(KernelError::BadParameters(format!(
                "{name}: rule `{}` needs {} fresh variable(s), got {}",
                rule.label,
                rule.vars.len(),
                ys.len()
            )));
        }
        let mut seen = BTreeSet::new();
        for y in ys {
            if sig.lookup(y).is_some() || crate::syntax::is_name_constant(y).is_some() {
                return Err(KernelError::BadParameters(format!("{name}: `{y}` is not a variable")));
            }
            if taken.contains(y) || !seen.insert(y.clone()) {
                return Err(KernelError::FreshnessViolation(format!(
                    "{name}: `{y}` is not fresh for rule `{}`",
                    rule.label
                )));
            }
        }
        if rule.head.args.len() != us.len() {
            return Err(KernelError::BadParameters(format!(
                "{name}: rule `{}` has a head of different arity",
                rule.label
            )));
        }
        let sigma = Substitution::from_pairs(rule.vars.iter().cloned().zip(ys.iter().map(|y| Term::var(y.clone()))));
        let inst = rule.instantiate(&sigma);
        let mut ante = gamma.clone();
        for (u, t) in us.iter().zip(&inst.head.args) {
            ante.insert(Formula::eq(u.clone(), t.clone()));
        }
        ante.extend(inst.ordinary_premises.iter().map(|q| q.to_ordinary()));
        let descendants: Vec<Formula> = inst.inductive_premises.iter().map(|a| a.to_inductive()).collect();
        ante.extend(descendants.iter().cloned());
        out.push((Sequent::from_sets(ante, conclusion.succedent.clone()), descendants));
    }
    Ok(out)
}

/// Term-level check that `a = F[x:=t, y:=u]` and `b = F[x:=u, y:=t]` for
/// some `F`.
fn terms_swap(a: &Term, b: &Term, t: &Term, u: &Term) -> bool {
    if a == b || (a == t && b == u) || (a == u && b == t) {
        return true;
    }
    match (a, b) {
        (Term::App(f, xs), Term::App(g, ys)) if f == g && xs.len() == ys.len() => {
            xs.iter().zip(ys).all(|(x, y)| terms_swap(x, y, t, u))
        }
        _ => false,
    }
}

fn formulas_swap(a: &Formula, b: &Formula, t: &Term, u: &Term) -> bool {
    let args =
        |xs: &[Term], ys: &[Term]| xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| terms_swap(x, y, t, u));
    match (a, b) {
        (Formula::False, Formula::False) => true,
        (Formula::Eq(a1, a2), Formula::Eq(b1, b2)) => terms_swap(a1, b1, t, u) && terms_swap(a2, b2, t, u),
        (Formula::Rel(p, xs), Formula::Rel(q, ys)) | (Formula::Ind(p, xs), Formula::Ind(q, ys)) => {
            p == q && args(xs, ys)
        }
        (Formula::Not(x), Formula::Not(y)) => formulas_swap(x, y, t, u),
        (Formula::And(a1, a2), Formula::And(b1, b2))
        | (Formula::Or(a1, a2), Formula::Or(b1, b2))
        | (Formula::Imp(a1, a2), Formula::Imp(b1, b2)) => formulas_swap(a1, b1, t, u) && formulas_swap(a2, b2, t, u),
        (Formula::Forall(x, f), Formula::Forall(y, g)) | (Formula::Exists(x, f), Formula::Exists(y, g)) => {
            x == y && formulas_swap(f, g, t, u)
        }
        _ => false,
    }
}

/// True iff `a` and `b` are the two sides of an equality step along `t = u`:
/// `a ≡ F[x:=t, y:=u]` and `b ≡ F[x:=u, y:=t]`. Bound variables are
/// compared in canonical form so that `t` and `u` never match a bound
/// occurrence.
pub fn eq_related(a: &Formula, b: &Formula, t: &Term, u: &Term) -> bool {
    formulas_swap(&a.canonical(), &b.canonical(), t, u)
}

fn eq_sides(principal: &Formula) -> Option<(&Term, &Term)> {
    match principal {
        Formula::Eq(t, u) => Some((t, u)),
        _ => None,
    }
}

/// Checks the `(=L)` relation between a conclusion and its premise: every
/// formula on each side has a partner on the same side of the other
/// sequent related by [`eq_related`]. The principal equality may vanish.
fn check_eq_left(conclusion: &Sequent, principal: &Formula, premise: &Sequent) -> Result<(), KernelError> {
    let (t, u) = eq_sides(principal).ok_or_else(|| wrong_shape("EqL", principal))?;
    let left_c: Vec<&Formula> = conclusion.antecedent.iter().collect();
    let partner = |a: &Formula, pool: &[&Formula]| pool.iter().any(|b| eq_related(a, b, t, u));
    let left_p: Vec<&Formula> = premise.antecedent.iter().collect();
    let right_c: Vec<&Formula> = conclusion.succedent.iter().collect();
    let right_p: Vec<&Formula> = premise.succedent.iter().collect();
    for a in &left_c {
        if !a.alpha_eq(principal) && !partner(a, &left_p) {
            return Err(KernelError::SideCondition(format!(
                "EqL: `{a}` has no counterpart in the premise"
            )));
        }
    }
    for b in &left_p {
        if !partner(b, &left_c) {
            return Err(KernelError::SideCondition(format!(
                "EqL: premise formula `{b}` has no counterpart"
            )));
        }
    }
    for a in &right_c {
        if !partner(a, &right_p) {
            return Err(KernelError::SideCondition(format!(
                "EqL: `{a}` has no counterpart in the premise"
            )));
        }
    }
    for b in &right_p {
        if !partner(b, &right_c) {
            return Err(KernelError::SideCondition(format!(
                "EqL: premise formula `{b}` has no counterpart"
            )));
        }
    }
    Ok(())
}

fn single<'a>(actual: &'a [Sequent], rule: &str) -> Result<&'a Sequent, KernelError> {
    match actual {
        [p] => Ok(p),
        _ => Err(KernelError::BadParameters(format!(
            "{rule} takes exactly one premise, found {}",
            actual.len()
        ))),
    }
}

fn check_fresh(var: &str, conclusion: &Sequent, rule: &str) -> Result<(), KernelError> {
    if conclusion.free_vars().contains(var) {
        return Err(KernelError::FreshnessViolation(format!(
            "{rule}: `{var}` occurs free in the conclusion"
        )));
    }
    Ok(())
}

/// The premises prescribed by `inst` for `conclusion`.
///
/// Most rules determine their premises from the conclusion alone. `Wk`,
/// `Subst` and `EqL` do not (the premise of a substitution cannot be
/// recovered from its instance), so for those the single `actual` premise
/// is checked against the rule's side condition and returned unchanged.
pub fn expected_premises(
    theory: &Theory,
    conclusion: &Sequent,
    inst: &RuleInstance,
    actual: &[Sequent],
) -> Result<Vec<Sequent>, KernelError> {
    let gamma = &conclusion.antecedent;
    let delta = &conclusion.succedent;
    let seq = |a: FormulaSet, d: FormulaSet| Sequent::from_sets(a, d);
    Ok(match inst {
        RuleInstance::Axiom => {
            if !gamma.intersects(delta) {
                return Err(KernelError::SideCondition(
                    "Axiom: antecedent and succedent are disjoint".into(),
                ));
            }
            vec![]
        }
        RuleInstance::EqR => {
            let has_refl = delta.iter().any(|f| matches!(f, Formula::Eq(t, u) if t == u));
            if !has_refl {
                return Err(KernelError::SideCondition(
                    "EqR: no formula `t = t` in the succedent".into(),
                ));
            }
            vec![]
        }
        RuleInstance::Wk => {
            let p = single(actual, "Wk")?;
            if !p.antecedent.is_subset(gamma) || !p.succedent.is_subset(delta) {
                return Err(KernelError::SideCondition(
                    "Wk: premise is not a subsequent of the conclusion".into(),
                ));
            }
            vec![p.clone()]
        }
        RuleInstance::Subst { theta } => {
            let p = single(actual, "Subst")?;
            if p.substitute(theta) != *conclusion {
                return Err(KernelError::SideCondition(format!(
                    "Subst: premise under {theta} is `{}`, not the conclusion",
                    p.substitute(theta)
                )));
            }
            vec![p.clone()]
        }
        RuleInstance::EqL { principal } => {
            require_left(conclusion, principal, "EqL")?;
            let p = single(actual, "EqL")?;
            check_eq_left(conclusion, principal, p)?;
            vec![p.clone()]
        }
        RuleInstance::Cut { formula } => vec![
            seq(gamma.clone(), delta.with(formula.clone())),
            seq(gamma.with(formula.clone()), delta.clone()),
        ],
        RuleInstance::Prop { rule, principal, keep } => {
            let name = rule.name();
            let p = if rule.is_left() {
                require_left(conclusion, principal, name)?
            } else {
                require_right(conclusion, principal, name)?
            };
            let g = frame(gamma, p, *keep && rule.is_left());
            let d = frame(delta, p, *keep && !rule.is_left());
            let bad = || wrong_shape(name, principal);
            match (rule, p) {
                (PropRule::NegL, Formula::Not(f)) => vec![seq(g, d.with((**f).clone()))],
                (PropRule::NegR, Formula::Not(f)) => vec![seq(g.with((**f).clone()), d)],
                (PropRule::OrL, Formula::Or(f, h)) => {
                    vec![seq(g.with((**f).clone()), d.clone()), seq(g.with((**h).clone()), d)]
                }
                (PropRule::OrR, Formula::Or(f, h)) => vec![seq(g, d.with((**f).clone()).with((**h).clone()))],
                (PropRule::AndL, Formula::And(f, h)) => vec![seq(g.with((**f).clone()).with((**h).clone()), d)],
                (PropRule::AndR, Formula::And(f, h)) => {
                    vec![seq(g.clone(), d.with((**f).clone())), seq(g, d.with((**h).clone()))]
                }
                (PropRule::ImpL, Formula::Imp(f, h)) => {
                    vec![seq(g.clone(), d.with((**f).clone())), seq(g.with((**h).clone()), d)]
                }
                (PropRule::ImpR, Formula::Imp(f, h)) => vec![seq(g.with((**f).clone()), d.with((**h).clone()))],
                _ => return Err(bad()),
            }
        }
        RuleInstance::AllL { principal, term, keep } => match require_left(conclusion, principal, "AllL")? {
            p @ Formula::Forall(x, f) => {
                vec![seq(frame(gamma, p, *keep).with(f.replace_var(x, term)), delta.clone())]
            }
            _ => return Err(wrong_shape("AllL", principal)),
        },
        RuleInstance::ExR { principal, term, keep } => match require_right(conclusion, principal, "ExR")? {
            p @ Formula::Exists(x, f) => {
                vec![seq(gamma.clone(), frame(delta, p, *keep).with(f.replace_var(x, term)))]
            }
            _ => return Err(wrong_shape("ExR", principal)),
        },
        RuleInstance::AllR { principal, var } => match require_right(conclusion, principal, "AllR")? {
            p @ Formula::Forall(x, f) => {
                let z = var.clone().unwrap_or_else(|| x.clone());
                let rest = Sequent::from_sets(gamma.clone(), delta.without(p));
                check_fresh(&z, &rest, "AllR")?;
                if z != *x && f.free_vars().contains(&z) {
                    return Err(KernelError::FreshnessViolation(format!(
                        "AllR: `{z}` would be captured"
                    )));
                }
                vec![seq(
                    gamma.clone(),
                    delta.without(p).with(f.replace_var(x, &Term::var(z))),
                )]
            }
            _ => return Err(wrong_shape("AllR", principal)),
        },
        RuleInstance::ExL { principal, var } => match require_left(conclusion, principal, "ExL")? {
            p @ Formula::Exists(x, f) => {
                let z = var.clone().unwrap_or_else(|| x.clone());
                let rest = Sequent::from_sets(gamma.without(p), delta.clone());
                check_fresh(&z, &rest, "ExL")?;
                if z != *x && f.free_vars().contains(&z) {
                    return Err(KernelError::FreshnessViolation(format!("ExL: `{z}` would be captured")));
                }
                vec![seq(
                    gamma.without(p).with(f.replace_var(x, &Term::var(z))),
                    delta.clone(),
                )]
            }
            _ => return Err(wrong_shape("ExL", principal)),
        },
        RuleInstance::IndR {
            pred,
            rule,
            terms,
            keep,
        } => {
            let r = theory
                .rule_for(pred, *rule)
                .ok_or_else(|| KernelError::NoSuchProductionRule {
                    pred: pred.clone(),
                    rule: *rule,
                })?;
            if terms.len() != r.vars.len() {
                return Err(KernelError::BadParameters(format!(
                    "IndR({pred},{rule}): rule `{}` has {} variable(s), got {} term(s)",
                    r.label,
                    r.vars.len(),
                    terms.len()
                )));
            }
            let theta = Substitution::from_pairs(r.vars.iter().cloned().zip(terms.iter().cloned()));
            let inst = r.instantiate(&theta);
            let head = inst.head.to_inductive();
            let name = format!("IndR({pred},{rule})");
            require_right(conclusion, &head, &name)?;
            let d = frame(delta, &head, *keep);
            inst.ordinary_premises
                .iter()
                .map(|q| q.to_ordinary())
                .chain(inst.inductive_premises.iter().map(|p| p.to_inductive()))
                .map(|f| seq(gamma.clone(), d.with(f)))
                .collect()
        }
        RuleInstance::Case {
            pred,
            principal,
            fresh,
            keep,
        } => case_premises(theory, conclusion, pred, principal, fresh, *keep)?
            .into_iter()
            .map(|(s, _)| s)
            .collect(),
    })
}
