use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::syntax::{Sequent, Theory};

use super::rules::{expected_premises, RuleInstance};
use super::KernelError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NodeKind {
    Inference {
        rule: RuleInstance,
        premises: Vec<usize>,
    },
    /// A leaf standing for its companion's subproof.
    Bud {
        companion: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofNode {
    pub id: u64,
    pub sequent: Sequent,
    pub kind: NodeKind,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("node index {0} out of range")]
    BadIndex(usize),
    #[error("node id {0} used twice")]
    DuplicateId(u64),
    #[error("bud {bud} does not carry the sequent of its companion {companion}")]
    BudSequentMismatch { bud: u64, companion: u64 },
    #[error("the proof has no nodes")]
    Empty,
}

/// A finite rooted graph of sequents: inference nodes with ordered premise
/// edges, and buds pointing back to companion nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofGraph {
    nodes: Vec<ProofNode>,
    root: usize,
}

impl ProofGraph {
    pub fn new(nodes: Vec<ProofNode>, root: usize) -> Result<Self, GraphError> {
        if nodes.is_empty() {
            return Err(GraphError::Empty);
        }
        if root >= nodes.len() {
            return Err(GraphError::BadIndex(root));
        }
        let mut ids = BTreeMap::new();
        for n in &nodes {
            if ids.insert(n.id, ()).is_some() {
                return Err(GraphError::DuplicateId(n.id));
            }
        }
        for n in &nodes {
            match &n.kind {
                NodeKind::Inference { premises, .. } => {
                    if let Some(&bad) = premises.iter().find(|&&p| p >= nodes.len()) {
                        return Err(GraphError::BadIndex(bad));
                    }
                }
                NodeKind::Bud { companion } => {
                    let c = nodes.get(*companion).ok_or(GraphError::BadIndex(*companion))?;
                    if c.sequent != n.sequent {
                        return Err(GraphError::BudSequentMismatch {
                            bud: n.id,
                            companion: c.id,
                        });
                    }
                }
            }
        }
        Ok(ProofGraph { nodes, root })
    }

    pub fn nodes(&self) -> &[ProofNode] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &ProofNode {
        &self.nodes[i]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn index_of(&self, id: u64) -> Option<usize> {
        self.nodes.iter().position(|n| n.id == id)
    }

    /// Successors in the path graph: premises, or the companion of a bud.
    pub fn successors(&self, i: usize) -> Vec<usize> {
        match &self.nodes[i].kind {
            NodeKind::Inference { premises, .. } => premises.clone(),
            NodeKind::Bud { companion } => vec![*companion],
        }
    }

    pub fn is_bud(&self, i: usize) -> bool {
        matches!(self.nodes[i].kind, NodeKind::Bud { .. })
    }

    /// Number of bud back-edges.
    pub fn bud_count(&self) -> usize {
        (0..self.len()).filter(|&i| self.is_bud(i)).count()
    }

    /// Companion indices in ascending order.
    pub fn companions(&self) -> Vec<usize> {
        let mut cs: Vec<usize> = self
            .nodes
            .iter()
            .filter_map(|n| match n.kind {
                NodeKind::Bud { companion } => Some(companion),
                _ => None,
            })
            .collect();
        cs.sort_unstable();
        cs.dedup();
        cs
    }

    pub fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.len()];
        let mut stack = vec![self.root];
        seen[self.root] = true;
        while let Some(v) = stack.pop() {
            for w in self.successors(v) {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum ViolationKind {
    BadParameters,
    FreshnessViolation,
    NoSuchProductionRule,
    SideCondition,
    PremiseMismatch,
    BudSequentMismatch,
    CompanionIsBud,
    Unreachable,
    PremiseCycle,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// One entry of a local-check report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub node: u64,
    pub rule: String,
    pub violation: ViolationKind,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "node {} ({}): {}: {}",
            self.node, self.rule, self.violation, self.detail
        )
    }
}

fn kernel_violation(e: &KernelError) -> ViolationKind {
    match e {
        KernelError::BadParameters(_) => ViolationKind::BadParameters,
        KernelError::FreshnessViolation(_) => ViolationKind::FreshnessViolation,
        KernelError::NoSuchProductionRule { .. } => ViolationKind::NoSuchProductionRule,
        KernelError::SideCondition(_) => ViolationKind::SideCondition,
    }
}

/// Finds a cycle that uses premise edges only (buds excluded); such cycles
/// are not allowed, back-edges must go through buds.
fn premise_cycle_nodes(pg: &ProofGraph) -> Vec<usize> {
    let n = pg.len();
    // 0 = unvisited, 1 = on stack, 2 = done
    let mut state = vec![0u8; n];
    let mut on_cycle = vec![false; n];
    fn visit(v: usize, pg: &ProofGraph, state: &mut [u8], stack: &mut Vec<usize>, on_cycle: &mut [bool]) {
        state[v] = 1;
        stack.push(v);
        if let NodeKind::Inference { premises, .. } = &pg.node(v).kind {
            for &w in premises {
                if state[w] == 1 {
                    let from = stack.iter().position(|&x| x == w).expect("on stack");
                    for &x in &stack[from..] {
                        on_cycle[x] = true;
                    }
                } else if state[w] == 0 {
                    visit(w, pg, state, stack, on_cycle);
                }
            }
        }
        stack.pop();
        state[v] = 2;
    }
    for v in 0..n {
        if state[v] == 0 {
            visit(v, pg, &mut state, &mut Vec::new(), &mut on_cycle);
        }
    }
    (0..n).filter(|&v| on_cycle[v]).collect()
}

/// Checks every rule instance against its premises, every bud against its
/// companion, reachability from the root, and the absence of premise-only
/// cycles. The report is sorted by node id; an empty report means the graph
/// is a regular pre-proof.
pub fn check_local(pg: &ProofGraph, theory: &Theory) -> Vec<Violation> {
    let mut report = Vec::new();
    let reach = pg.reachable();
    for (i, node) in pg.nodes().iter().enumerate() {
        match &node.kind {
            NodeKind::Inference { rule, premises } => {
                let actual: Vec<Sequent> = premises.iter().map(|&p| pg.node(p).sequent.clone()).collect();
                match expected_premises(theory, &node.sequent, rule, &actual) {
                    Err(e) => report.push(Violation {
                        node: node.id,
                        rule: rule.name(),
                        violation: kernel_violation(&e),
                        detail: e.to_string(),
                    }),
                    Ok(expected) => {
                        if expected.len() != actual.len() {
                            report.push(Violation {
                                node: node.id,
                                rule: rule.name(),
                                violation: ViolationKind::PremiseMismatch,
                                detail: format!("expected {} premise(s), found {}", expected.len(), actual.len()),
                            });
                        } else {
                            for (k, (e, a)) in expected.iter().zip(&actual).enumerate() {
                                if e != a {
                                    report.push(Violation {
                                        node: node.id,
                                        rule: rule.name(),
                                        violation: ViolationKind::PremiseMismatch,
                                        detail: format!("premise {}: expected `{e}`, found `{a}`", k + 1),
                                    });
                                }
                            }
                        }
                    }
                }
            }
            NodeKind::Bud { companion } => {
                let c = pg.node(*companion);
                if c.sequent != node.sequent {
                    report.push(Violation {
                        node: node.id,
                        rule: "Bud".into(),
                        violation: ViolationKind::BudSequentMismatch,
                        detail: format!("companion {} has `{}`", c.id, c.sequent),
                    });
                }
                if pg.is_bud(*companion) {
                    report.push(Violation {
                        node: node.id,
                        rule: "Bud".into(),
                        violation: ViolationKind::CompanionIsBud,
                        detail: format!("companion {} is itself a bud", c.id),
                    });
                }
            }
        }
        if !reach[i] {
            report.push(Violation {
                node: node.id,
                rule: rule_name(node),
                violation: ViolationKind::Unreachable,
                detail: "not reachable from the root".into(),
            });
        }
    }
    for v in premise_cycle_nodes(pg) {
        let node = pg.node(v);
        report.push(Violation {
            node: node.id,
            rule: rule_name(node),
            violation: ViolationKind::PremiseCycle,
            detail: "lies on a cycle of premise edges that avoids buds".into(),
        });
    }
    report.sort_by_key(|v| (v.node, v.violation));
    report
}

fn rule_name(node: &ProofNode) -> String {
    match &node.kind {
        NodeKind::Inference { rule, .. } => rule.name(),
        NodeKind::Bud { .. } => "Bud".into(),
    }
}

/// A finite tree obtained by unfolding a proof graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnfoldedTree {
    /// Index of the graph node this tree node copies.
    pub node: usize,
    pub children: Vec<UnfoldedTree>,
}

impl UnfoldedTree {
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(UnfoldedTree::size).sum::<usize>()
    }

    pub fn height(&self) -> usize {
        self.children.iter().map(|c| 1 + c.height()).max().unwrap_or(0)
    }

    /// Number of nodes that are buds of the graph (leaves left unexpanded).
    pub fn open_buds(&self, pg: &ProofGraph) -> usize {
        let here = usize::from(pg.is_bud(self.node) && self.children.is_empty());
        here + self.children.iter().map(|c| c.open_buds(pg)).sum::<usize>()
    }
}

/// Unfolds `pg` from the root, replacing a bud by a copy of its companion's
/// subtree at most `depth` times along each branch. With `depth = 0` the
/// result is the graph read as a tree with buds as leaves.
pub fn unfold_tree(pg: &ProofGraph, depth: usize) -> UnfoldedTree {
    fn go(pg: &ProofGraph, i: usize, budget: usize) -> UnfoldedTree {
        match &pg.node(i).kind {
            NodeKind::Inference { premises, .. } => UnfoldedTree {
                node: i,
                children: premises.iter().map(|&p| go(pg, p, budget)).collect(),
            },
            NodeKind::Bud { companion } => {
                if budget == 0 {
                    UnfoldedTree {
                        node: i,
                        children: vec![],
                    }
                } else {
                    UnfoldedTree {
                        node: i,
                        children: vec![go(pg, *companion, budget - 1)],
                    }
                }
            }
        }
    }
    go(pg, pg.root(), depth)
}
