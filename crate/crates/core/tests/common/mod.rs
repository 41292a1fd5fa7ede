#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use folid::kernel::ProofGraph;
use folid::parser::{parse_proof, parse_signature, parse_structure};
use folid::semantics::{all_tuples, FiniteStructure, FuncTable, PredFamily};
use folid::trace::TraceGraph;
use folid::{Formula, Term, Theory};
use proptest::prelude::*;

pub const PASSING: [&str; 7] = [
    "nat_refl",
    "even_odd",
    "even_nat",
    "two",
    "succ_closed",
    "and_left",
    "no_contradiction",
];
pub const FAILING_GTC: [&str; 3] = ["no_progress", "bad_cut", "mixed_loop"];

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

pub fn read(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn nat_theory() -> Theory {
    parse_signature(&read("nat.folid")).unwrap()
}

pub fn proof(name: &str) -> ProofGraph {
    parse_proof(&read(&format!("{name}.proof")), nat_theory().signature()).unwrap()
}

pub fn model(name: &str) -> FiniteStructure {
    parse_structure(&read(&format!("{name}.model")), nat_theory().signature()).unwrap()
}

/// Every `{0, s}` structure of size ≤ `max` with the given inductive
/// predicates (all unary) left empty.
pub fn small_family(inductive: &[&str], max: usize) -> Vec<FiniteStructure> {
    let mut out = Vec::new();
    for n in 1..=max {
        for table in all_tuples(n, n) {
            for zero in 0..n {
                let mut m = FiniteStructure::new(n)
                    .with_const("0", zero)
                    .with_func("s", FuncTable::new(1, table.clone()));
                for p in inductive {
                    m = m.with_ind(*p, []);
                }
                out.push(m);
            }
        }
    }
    out
}

// --- naive term evaluation, independent of the library's evaluator -------

pub fn value(t: &Term, m: &FiniteStructure, rho: &BTreeMap<String, usize>) -> usize {
    match t {
        Term::Var(x) => rho[x],
        Term::Const(c) => m.constant(c).unwrap(),
        Term::Name(i) => m.name_value(*i).unwrap(),
        Term::App(f, args) => {
            let vals: Vec<usize> = args.iter().map(|a| value(a, m, rho)).collect();
            m.func(f).unwrap().apply(m.size(), &vals)
        }
    }
}

/// Least prefixpoint of the rules by brute force: the intersection of all
/// families `X` with `φ(X) ⊆ X`.
pub fn least_prefixpoint(m: &FiniteStructure, theory: &Theory) -> PredFamily {
    let sig = theory.signature();
    let preds: Vec<(String, usize)> = sig.inductive_preds().to_vec();
    let slots: Vec<(usize, Vec<usize>)> = preds
        .iter()
        .enumerate()
        .flat_map(|(i, (_, a))| all_tuples(m.size(), *a).map(move |t| (i, t)))
        .collect();
    assert!(slots.len() <= 16, "too many atoms for exhaustive search");
    let mut best: Option<Vec<BTreeSet<Vec<usize>>>> = None;
    for mask in 0u32..(1 << slots.len()) {
        let mut x: Vec<BTreeSet<Vec<usize>>> = vec![BTreeSet::new(); preds.len()];
        for (k, (i, t)) in slots.iter().enumerate() {
            if mask & (1 << k) != 0 {
                x[*i].insert(t.clone());
            }
        }
        if closed_under_rules(m, theory, &x) {
            best = Some(match best {
                None => x,
                Some(b) => b
                    .iter()
                    .zip(&x)
                    .map(|(p, q)| p.intersection(q).cloned().collect())
                    .collect(),
            });
        }
    }
    best.expect("the full family is a prefixpoint").into_iter().collect()
}

fn closed_under_rules(m: &FiniteStructure, theory: &Theory, x: &[BTreeSet<Vec<usize>>]) -> bool {
    let sig = theory.signature();
    for rule in theory.rules() {
        let vars: Vec<String> = rule.vars.clone();
        for vals in all_tuples(m.size(), vars.len()) {
            let rho: BTreeMap<String, usize> = vars.iter().cloned().zip(vals).collect();
            let eval = |args: &[Term]| args.iter().map(|t| value(t, m, &rho)).collect::<Vec<_>>();
            let ordinary = rule
                .ordinary_premises
                .iter()
                .all(|q| m.pred(&q.pred).is_some_and(|r| r.contains(&eval(&q.args))));
            let inductive = rule
                .inductive_premises
                .iter()
                .all(|p| x[sig.inductive_index(&p.pred).unwrap()].contains(&eval(&p.args)));
            if ordinary
                && inductive
                && !x[sig.inductive_index(&rule.head.pred).unwrap()].contains(&eval(&rule.head.args))
            {
                return false;
            }
        }
    }
    true
}

// --- ultimately periodic path oracle for the trace condition --------------

/// Whether the infinite repetition of `cycle` (a closed walk) carries a
/// trace with infinitely many progress points. A tail trace can be taken to
/// start at a period boundary, so it exists iff the one-period position
/// graph has a cycle through a progress edge; such a cycle has at most
/// `positions` periods, so `positions + 1` repetitions of the period
/// suffice.
pub fn periodic_path_progresses(tg: &TraceGraph, cycle: &[usize]) -> bool {
    let start = cycle[0];
    let n = tg.positions(start).len();
    let mut steps: Vec<(usize, usize)> = cycle.windows(2).map(|w| (w[0], w[1])).collect();
    steps.push((*cycle.last().unwrap(), start));
    // one period as a set of (from, to, progress)
    let period = |p: usize| -> BTreeSet<(usize, bool)> {
        let mut cur: BTreeSet<(usize, bool)> = [(p, false)].into();
        for &(v, w) in &steps {
            let rel = tg.relation_to(v, w).expect("closed walk");
            let mut next = BTreeSet::new();
            for &(q, prog) in &cur {
                for (a, b, pr) in rel.pairs() {
                    if a == q {
                        next.insert((b, prog || pr));
                    }
                }
            }
            cur = next;
        }
        cur
    };
    let one: BTreeMap<usize, BTreeSet<(usize, bool)>> = tg.positions(start).iter().map(|&p| (p, period(p))).collect();
    let k = n + 1;
    for &p in tg.positions(start) {
        let mut frontier: BTreeSet<(usize, bool)> = [(p, false)].into();
        for _ in 1..k {
            let mut next = BTreeSet::new();
            for &(q, prog) in &frontier {
                for &(r, pr) in one.get(&q).into_iter().flatten() {
                    next.insert((r, prog || pr));
                }
            }
            if next.contains(&(p, true)) {
                return true;
            }
            frontier = next;
        }
    }
    false
}

/// Premise-edge segments from `v` ending in a bud, as node lists.
fn segments(tg: &TraceGraph, v: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut stack = vec![vec![v]];
    while let Some(path) = stack.pop() {
        let last = *path.last().unwrap();
        if tg.is_bud(last) {
            out.push(path);
            continue;
        }
        for &w in tg.successors(last) {
            let mut p = path.clone();
            p.push(w);
            stack.push(p);
        }
    }
    out
}

/// Brute-force verdict: every ultimately periodic path whose stem has at
/// most `max_stem` and whose period has at most `max_period`
/// root/companion-to-companion segments carries a progressing trace.
/// Returns a progress-free period if there is one.
pub fn brute_force_gtc(tg: &TraceGraph, max_stem: usize, max_period: usize) -> Option<Vec<usize>> {
    let mut segs: BTreeMap<usize, Vec<Vec<usize>>> = BTreeMap::new();
    let mut todo = vec![tg.root()];
    while let Some(v) = todo.pop() {
        if segs.contains_key(&v) {
            continue;
        }
        let ss = segments(tg, v);
        for s in &ss {
            todo.push(tg.successors(*s.last().unwrap())[0]);
        }
        segs.insert(v, ss);
    }
    let target = |s: &Vec<usize>| tg.successors(*s.last().unwrap())[0];
    // vertices reachable within max_stem segments
    let mut reach: BTreeSet<usize> = [tg.root()].into();
    let mut layer = reach.clone();
    for _ in 0..max_stem {
        layer = layer.iter().flat_map(|v| segs[v].iter().map(target)).collect();
        reach.extend(layer.iter().copied());
    }
    for &c in &reach {
        // closed walks c → … → c of 1..=max_period segments
        let mut walks: Vec<(usize, Vec<usize>)> = vec![(c, Vec::new())];
        for _ in 0..max_period {
            let mut next = Vec::new();
            for (v, nodes) in &walks {
                for s in &segs[v] {
                    let mut ns = nodes.clone();
                    ns.extend(s);
                    let t = target(s);
                    if t == c && !periodic_path_progresses(tg, &ns) {
                        return Some(ns);
                    }
                    next.push((t, ns));
                }
            }
            walks = next;
        }
    }
    None
}

pub fn closed_formula(text: &str, theory: &Theory) -> Formula {
    folid::parser::parse_formula(text, theory.signature()).unwrap()
}

pub const STANDARD_MODELS: [&str; 3] = ["clamp", "cycle2", "fixed"];

/// Name-extends `m` with budget `budget` and builds its term model.
pub fn term_model(m: &FiniteStructure, theory: &Theory, budget: usize, depth: usize) -> folid::termmodel::TermModel {
    let sig = theory.signature().with_name_budget(budget);
    let mc = folid::termmodel::name_extend(m, budget).unwrap();
    folid::termmodel::build_term_model(&mc, &sig, depth).unwrap()
}

// --- proptest strategies over the natural-number signature ---------------

pub fn arb_term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        Just(Term::cnst("0")),
        prop::sample::select(vec!["x", "y", "z"]).prop_map(Term::var),
        (1usize..4).prop_map(Term::Name),
    ];
    leaf.prop_recursive(3, 8, 1, |inner| inner.prop_map(|t| Term::app1("s", t)))
}

pub fn arb_formula() -> impl Strategy<Value = Formula> {
    let atom = prop_oneof![
        (arb_term(), arb_term()).prop_map(|(a, b)| Formula::eq(a, b)),
        (prop::sample::select(vec!["N", "E", "O"]), arb_term()).prop_map(|(p, t)| Formula::ind(p, vec![t])),
        Just(Formula::False),
    ];
    atom.prop_recursive(4, 24, 2, |inner| {
        let var = prop::sample::select(vec!["x", "y", "z"]);
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::imp(a, b)),
            (var.clone(), inner.clone()).prop_map(|(x, a)| Formula::forall(x, a)),
            (var, inner).prop_map(|(x, a)| Formula::exists(x, a)),
        ]
    })
}
