//! Rule instances of the cyclic sequent calculus, proof graphs with
//! bud/companion back-edges, and local correctness checking.

mod graph;
mod rules;

use thiserror::Error;

pub use graph::{
    check_local, unfold_tree, GraphError, NodeKind, ProofGraph, ProofNode, UnfoldedTree, Violation, ViolationKind,
};
pub use rules::{case_premises, case_rules, eq_related, expected_premises, PropRule, RuleInstance};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("{0}")]
    BadParameters(String),
    #[error("{0}")]
    FreshnessViolation(String),
    #[error("no production rule {rule} for `{pred}`")]
    NoSuchProductionRule { pred: String, rule: usize },
    #[error("{0}")]
    SideCondition(String),
}
