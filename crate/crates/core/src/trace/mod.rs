//! Traces through cyclic proofs and the global trace condition.
//!
//! Trace positions are indices of inductive atoms in a node's canonical
//! antecedent. The condition is decided by closing the relations of
//! companion-to-companion path segments under composition: it holds iff
//! every idempotent self-relation has a progressing pair `(p, p)`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::kernel::{case_premises, eq_related, NodeKind, ProofGraph, RuleInstance};
use crate::syntax::{Formula, Sequent, Theory};

/// A trace relation: `(from, to) ↦ progress`. A progressing pair subsumes
/// a non-progressing one.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Relation(BTreeMap<(usize, usize), bool>);

impl Relation {
    pub fn new() -> Self {
        Relation::default()
    }

    pub fn identity(positions: &[usize]) -> Self {
        Relation(positions.iter().map(|&p| ((p, p), false)).collect())
    }

    pub fn insert(&mut self, from: usize, to: usize, progress: bool) {
        let e = self.0.entry((from, to)).or_insert(progress);
        *e |= progress;
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, bool)> + '_ {
        self.0.iter().map(|(&(a, b), &p)| (a, b, p))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn get(&self, from: usize, to: usize) -> Option<bool> {
        self.0.get(&(from, to)).copied()
    }

    /// `self ; other`: first `self`, then `other`; progress is or-ed.
    pub fn compose(&self, other: &Relation) -> Relation {
        let mut out = Relation::new();
        for (&(a, b), &p) in &self.0 {
            for (&(_, c), &q) in other.0.range((b, 0)..=(b, usize::MAX)) {
                out.insert(a, c, p || q);
            }
        }
        out
    }

    pub fn is_idempotent(&self) -> bool {
        self.compose(self) == *self
    }

    /// Some `(p, p)` with progress.
    pub fn has_progressing_loop(&self) -> bool {
        self.0.iter().any(|(&(a, b), &p)| a == b && p)
    }

    /// The first power `R^j` that is idempotent.
    pub fn idempotent_power(&self) -> Relation {
        let mut power = self.clone();
        loop {
            if power.is_idempotent() {
                return power;
            }
            power = power.compose(self);
        }
    }
}

fn inductive_positions(s: &Sequent) -> Vec<usize> {
    s.antecedent
        .iter()
        .enumerate()
        .filter(|(_, f)| f.is_inductive_atom())
        .map(|(i, _)| i)
        .collect()
}

fn identity_pairs(conclusion: &Sequent, premise: &Sequent, rel: &mut Relation) {
    for i in inductive_positions(conclusion) {
        let a = conclusion.antecedent.get(i).expect("index in range");
        if let Some(j) = premise.antecedent.position(a) {
            rel.insert(i, j, false);
        }
    }
}

/// The trace pairs licensed along the edge from node `node` to its
/// `slot`-th successor (the companion, for a bud).
pub fn edge_relation(pg: &ProofGraph, theory: &Theory, node: usize, slot: usize) -> Relation {
    let n = pg.node(node);
    let conclusion = &n.sequent;
    let mut rel = Relation::new();
    let (rule, premise) = match &n.kind {
        NodeKind::Bud { companion } => {
            identity_pairs(conclusion, &pg.node(*companion).sequent, &mut rel);
            return rel;
        }
        NodeKind::Inference { rule, premises } => match premises.get(slot) {
            Some(&p) => (rule, &pg.node(p).sequent),
            None => return rel,
        },
    };
    let atom = |s: &Sequent, i: usize| -> Formula { s.antecedent.get(i).expect("index in range").clone() };
    match rule {
        RuleInstance::Subst { theta } => {
            for j in inductive_positions(premise) {
                let b = atom(premise, j).substitute(theta);
                if let Some(i) = conclusion.antecedent.position(&b) {
                    rel.insert(i, j, false);
                }
            }
        }
        RuleInstance::EqL {
            principal: Formula::Eq(t, u),
        } => {
            for i in inductive_positions(conclusion) {
                let a = atom(conclusion, i);
                for j in inductive_positions(premise) {
                    if eq_related(&a, &atom(premise, j), t, u) {
                        rel.insert(i, j, false);
                    }
                }
            }
        }
        RuleInstance::Case {
            pred,
            principal,
            fresh,
            keep,
        } => {
            identity_pairs(conclusion, premise, &mut rel);
            if let Ok(cases) = case_premises(theory, conclusion, pred, principal, fresh, *keep) {
                if let (Some((_, descendants)), Some(i)) = (cases.get(slot), conclusion.antecedent.position(principal))
                {
                    for d in descendants {
                        if let Some(j) = premise.antecedent.position(d) {
                            rel.insert(i, j, true);
                        }
                    }
                }
            }
        }
        _ => identity_pairs(conclusion, premise, &mut rel),
    }
    rel
}

/// A stem from the root and a cycle; the path is `stem · cycle^ω`, the
/// last cycle node leading back to the first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lasso {
    pub stem: Vec<usize>,
    pub cycle: Vec<usize>,
}

impl Lasso {
    pub fn ids(&self, pg: &ProofGraph) -> LassoIds {
        LassoIds {
            stem: self.stem.iter().map(|&i| pg.node(i).id).collect(),
            cycle: self.cycle.iter().map(|&i| pg.node(i).id).collect(),
        }
    }

    pub fn from_ids(pg: &ProofGraph, ids: &LassoIds) -> Result<Lasso, TraceError> {
        let look = |id: &u64| pg.index_of(*id).ok_or(TraceError::UnknownNode(*id));
        Ok(Lasso {
            stem: ids.stem.iter().map(look).collect::<Result<_, _>>()?,
            cycle: ids.cycle.iter().map(look).collect::<Result<_, _>>()?,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LassoIds {
    pub stem: Vec<u64>,
    pub cycle: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail(Lasso),
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("the lasso is empty")]
    EmptyLasso,
    #[error("the lasso has a stem but no cycle")]
    StemOnly,
    #[error("no node with id {0}")]
    UnknownNode(u64),
    #[error("not a path: {0}")]
    NotAPath(String),
}

/// Edge relations of a proof graph, detached from the proof so that tests
/// can strengthen them.
#[derive(Clone, Debug)]
pub struct TraceGraph {
    ids: Vec<u64>,
    root: usize,
    buds: Vec<bool>,
    successors: Vec<Vec<usize>>,
    relations: Vec<Vec<Relation>>,
    positions: Vec<Vec<usize>>,
}

impl TraceGraph {
    pub fn new(pg: &ProofGraph, theory: &Theory) -> Self {
        let n = pg.len();
        let successors: Vec<Vec<usize>> = (0..n).map(|v| pg.successors(v)).collect();
        let relations = (0..n)
            .map(|v| {
                (0..successors[v].len())
                    .map(|k| edge_relation(pg, theory, v, k))
                    .collect()
            })
            .collect();
        TraceGraph {
            ids: pg.nodes().iter().map(|n| n.id).collect(),
            root: pg.root(),
            buds: (0..n).map(|v| pg.is_bud(v)).collect(),
            successors,
            relations,
            positions: pg.nodes().iter().map(|n| inductive_positions(&n.sequent)).collect(),
        }
    }

    /// A trace graph given directly: node `v` is a bud iff `buds[v]`, in
    /// which case `successors[v]` is its single companion. Premise edges
    /// must be acyclic.
    pub fn from_parts(
        root: usize,
        buds: Vec<bool>,
        successors: Vec<Vec<usize>>,
        relations: Vec<Vec<Relation>>,
        positions: Vec<Vec<usize>>,
    ) -> Self {
        TraceGraph {
            ids: (1..=buds.len() as u64).collect(),
            root,
            buds,
            successors,
            relations,
            positions,
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn is_bud(&self, v: usize) -> bool {
        self.buds[v]
    }

    pub fn successors(&self, v: usize) -> &[usize] {
        &self.successors[v]
    }

    pub fn relation(&self, v: usize, slot: usize) -> &Relation {
        &self.relations[v][slot]
    }

    /// Relation along the edge `v → w`; the first matching slot.
    pub fn relation_to(&self, v: usize, w: usize) -> Option<&Relation> {
        let k = self.successors[v].iter().position(|&x| x == w)?;
        Some(&self.relations[v][k])
    }

    pub fn positions(&self, v: usize) -> &[usize] {
        &self.positions[v]
    }

    pub fn root(&self) -> usize {
        self.root
    }

    /// Adds (or strengthens) a pair on the edge `v → successors[v][slot]`.
    pub fn add_pair(&mut self, v: usize, slot: usize, from: usize, to: usize, progress: bool) {
        self.relations[v][slot].insert(from, to, progress);
    }

    fn shortest_path(&self, from: usize, to: usize) -> Option<Vec<usize>> {
        let mut prev = vec![usize::MAX; self.ids.len()];
        let mut seen = vec![false; self.ids.len()];
        let mut queue = VecDeque::from([from]);
        seen[from] = true;
        while let Some(v) = queue.pop_front() {
            if v == to {
                let mut path = vec![v];
                let mut cur = v;
                while cur != from {
                    cur = prev[cur];
                    path.push(cur);
                }
                path.reverse();
                return Some(path);
            }
            for &w in &self.successors[v] {
                if !seen[w] {
                    seen[w] = true;
                    prev[w] = v;
                    queue.push_back(w);
                }
            }
        }
        None
    }

    /// Segments from companion `c` through premise edges to a bud and on
    /// to that bud's companion, one per distinct relation.
    fn segments(&self, c: usize) -> Vec<(usize, Relation, Vec<usize>)> {
        let mut out = Vec::new();
        let mut seen: BTreeSet<(usize, Relation)> = BTreeSet::new();
        let mut stack = vec![(c, Relation::identity(&self.positions[c]), vec![c])];
        while let Some((v, rel, path)) = stack.pop() {
            if !seen.insert((v, rel.clone())) {
                continue;
            }
            if self.buds[v] {
                let target = self.successors[v][0];
                out.push((target, rel.compose(&self.relations[v][0]), path));
                continue;
            }
            for (k, &w) in self.successors[v].iter().enumerate().rev() {
                let mut p = path.clone();
                p.push(w);
                stack.push((w, rel.compose(&self.relations[v][k]), p));
            }
        }
        out
    }

    /// Decides the global trace condition.
    pub fn check(&self) -> Verdict {
        let reach = {
            let mut seen = vec![false; self.ids.len()];
            let mut stack = vec![self.root];
            seen[self.root] = true;
            while let Some(v) = stack.pop() {
                for &w in &self.successors[v] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            seen
        };
        let companions: BTreeSet<usize> = (0..self.ids.len())
            .filter(|&v| reach[v] && self.buds[v])
            .map(|v| self.successors[v][0])
            .collect();
        // (from, to, relation) ↦ witnessing path (from … last bud).
        let mut closure: BTreeMap<(usize, usize, Relation), Vec<usize>> = BTreeMap::new();
        let mut work: VecDeque<(usize, usize, Relation)> = VecDeque::new();
        for &c in &companions {
            for (to, rel, path) in self.segments(c) {
                let key = (c, to, rel);
                if !closure.contains_key(&key) {
                    closure.insert(key.clone(), path);
                    work.push_back(key);
                }
            }
        }
        while let Some((a, b, r)) = work.pop_front() {
            let path_ab = closure[&(a, b, r.clone())].clone();
            let mut fresh = Vec::new();
            for ((c, d, s), path) in &closure {
                if *c == b {
                    let mut p = path_ab.clone();
                    p.extend(path);
                    fresh.push(((a, *d, r.compose(s)), p));
                }
                if *d == a {
                    let mut p = path.clone();
                    p.extend(&path_ab);
                    fresh.push(((*c, b, s.compose(&r)), p));
                }
            }
            for (key, p) in fresh {
                if !closure.contains_key(&key) {
                    closure.insert(key.clone(), p);
                    work.push_back(key);
                }
            }
        }
        let bad = closure
            .iter()
            .filter(|((a, b, r), _)| a == b && r.is_idempotent() && !r.has_progressing_loop())
            .min_by_key(|((a, _, r), path)| (path.len(), *a, (*r).clone()));
        match bad {
            None => Verdict::Pass,
            Some(((c, _, _), path)) => {
                let mut stem = self.shortest_path(self.root, *c).expect("companion is reachable");
                stem.pop();
                Verdict::Fail(Lasso {
                    stem,
                    cycle: path.clone(),
                })
            }
        }
    }

    /// Relation composed along `path` (consecutive nodes), including the
    /// closing edge back to `path[0]` when `closed`.
    pub fn path_relation(&self, path: &[usize], closed: bool) -> Option<Relation> {
        let mut rel = Relation::identity(&self.positions[*path.first()?]);
        let mut steps: Vec<(usize, usize)> = path.windows(2).map(|w| (w[0], w[1])).collect();
        if closed {
            steps.push((*path.last()?, path[0]));
        }
        for (v, w) in steps {
            rel = rel.compose(self.relation_to(v, w)?);
        }
        Some(rel)
    }
}

pub fn check_gtc(pg: &ProofGraph, theory: &Theory) -> Verdict {
    TraceGraph::new(pg, theory).check()
}

fn check_lasso(tg: &TraceGraph, lasso: &Lasso) -> Result<(), TraceError> {
    match (lasso.stem.is_empty(), lasso.cycle.is_empty()) {
        (true, true) => return Err(TraceError::EmptyLasso),
        (false, true) => return Err(TraceError::StemOnly),
        _ => {}
    }
    let mut walk: Vec<usize> = lasso.stem.iter().chain(&lasso.cycle).copied().collect();
    walk.push(lasso.cycle[0]);
    for w in walk.windows(2) {
        if !tg.successors(w[0]).contains(&w[1]) {
            return Err(TraceError::NotAPath(format!(
                "{} does not lead to {}",
                tg.ids[w[0]], tg.ids[w[1]]
            )));
        }
    }
    Ok(())
}

fn rule_label(pg: &ProofGraph, v: usize) -> String {
    match &pg.node(v).kind {
        NodeKind::Inference { rule, .. } => rule.name(),
        NodeKind::Bud { .. } => "bud".into(),
    }
}

fn describe_pairs(pg: &ProofGraph, v: usize, w: usize, rel: &Relation) -> String {
    if rel.is_empty() {
        return "no trace continues".into();
    }
    let atom = |n: usize, i: usize| pg.node(n).sequent.antecedent.get(i).expect("index").to_string();
    rel.pairs()
        .map(|(a, b, p)| format!("{} ~> {}{}", atom(v, a), atom(w, b), if p { " [progress]" } else { "" }))
        .collect::<Vec<_>>()
        .join("; ")
}

/// Human-readable account of the traces along a lasso.
pub fn explain_trace(pg: &ProofGraph, theory: &Theory, lasso: &Lasso) -> Result<String, TraceError> {
    let tg = TraceGraph::new(pg, theory);
    check_lasso(&tg, lasso)?;
    let ids = lasso.ids(pg);
    let list = |xs: &[u64]| xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
    let mut out = String::new();
    let _ = writeln!(out, "lasso: stem [{}] cycle [{}]", list(&ids.stem), list(&ids.cycle));
    let mut walk: Vec<usize> = lasso.stem.iter().chain(&lasso.cycle).copied().collect();
    walk.push(lasso.cycle[0]);
    for (k, w) in walk.windows(2).enumerate() {
        let (v, next) = (w[0], w[1]);
        if k == 0 && !lasso.stem.is_empty() {
            let _ = writeln!(out, "stem:");
        }
        if k == lasso.stem.len() {
            let _ = writeln!(out, "cycle:");
        }
        let node = pg.node(v);
        let _ = writeln!(out, "  {}: {}   [{}]", node.id, node.sequent, rule_label(pg, v));
        let rel = tg.relation_to(v, next).expect("checked path");
        let arrow = if pg.is_bud(v) { "companion " } else { "" };
        let _ = writeln!(
            out,
            "    -> {arrow}{}: {}",
            pg.node(next).id,
            describe_pairs(pg, v, next, rel)
        );
    }
    let turn = tg.path_relation(&lasso.cycle, true).expect("checked path");
    let c = lasso.cycle[0];
    let _ = writeln!(out, "one turn of the cycle: {}", describe_pairs(pg, c, c, &turn));
    let power = turn.idempotent_power();
    if power.has_progressing_loop() {
        let _ = writeln!(out, "a trace progresses infinitely along this lasso");
    } else if power.is_empty() {
        let _ = writeln!(
            out,
            "every trace dies on the cycle; no trace progresses infinitely along this lasso"
        );
    } else {
        let _ = writeln!(
            out,
            "traces that survive every turn never progress: {}",
            describe_pairs(pg, c, c, &power)
        );
        let _ = writeln!(out, "no trace progresses infinitely along this lasso");
    }
    Ok(out)
}

/// JSON form of a verdict: `{verdict, lasso, traces}`; `traces` lists the
/// trace pairs of each lasso step.
pub fn verdict_json(pg: &ProofGraph, theory: &Theory, verdict: &Verdict) -> serde_json::Value {
    match verdict {
        Verdict::Pass => serde_json::json!({"verdict": "PASS", "lasso": null, "traces": []}),
        Verdict::Fail(lasso) => {
            let tg = TraceGraph::new(pg, theory);
            let mut walk: Vec<usize> = lasso.stem.iter().chain(&lasso.cycle).copied().collect();
            walk.push(lasso.cycle[0]);
            let traces: Vec<serde_json::Value> = walk
                .windows(2)
                .map(|w| {
                    let rel = tg.relation_to(w[0], w[1]).cloned().unwrap_or_default();
                    let atom = |n: usize, i: usize| pg.node(n).sequent.antecedent.get(i).expect("index").to_string();
                    let pairs: Vec<serde_json::Value> = rel
                        .pairs()
                        .map(|(a, b, p)| serde_json::json!({"from": atom(w[0], a), "to": atom(w[1], b), "progress": p}))
                        .collect();
                    serde_json::json!({"from": pg.node(w[0]).id, "to": pg.node(w[1]).id, "pairs": pairs})
                })
                .collect();
            serde_json::json!({"verdict": "FAIL", "lasso": lasso.ids(pg), "traces": traces})
        }
    }
}
