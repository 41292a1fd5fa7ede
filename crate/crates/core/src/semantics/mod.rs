//! Finite structures, Tarskian evaluation, the operator `φ` and its least
//! fixpoint, syntactic unfoldings `P^(k)`, and sequent validity.

mod eval;
mod fixpoint;
mod structure;
mod unfold;

use thiserror::Error;

pub use eval::{assignments, eval_closed, eval_formula, eval_term, sequent_counterexample, sequent_valid, Assignment};
pub use fixpoint::{
    apply_phi, check_standard, compute_lfp, compute_lfp_naive, iteration_bound, kleene_stages, standardize, Lfp,
};
pub use structure::{all_tuples, FiniteStructure, FuncTable, PredFamily, Relation, Tuple};
pub use unfold::{argument_vars, check_unfold_equivalence, unfold_formula, UnfoldViolation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("symbol `{0}` has no interpretation")]
    UnknownSymbol(String),
    #[error("name constant c_{0} has no interpretation")]
    UnnamedConstant(usize),
    #[error("no table for `{0}`")]
    TableIncomplete(String),
    #[error("value of `{0}` lies outside the universe")]
    OutOfUniverse(String),
    #[error("tuple of wrong length in the table of `{0}`")]
    ArityMismatch(String),
    #[error("the universe is empty")]
    EmptyUniverse,
}
