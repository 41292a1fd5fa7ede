//! Abstract syntax: terms, formulas, sequents, signatures and production rules.

mod formula;
mod sequent;
mod signature;
mod term;

pub use formula::Formula;
pub use sequent::{FormulaSet, Sequent};
pub use signature::{is_name_constant, Atom, ProductionRule, Signature, SymbolKind, Theory};
pub use term::{fresh_name, Substitution, Term};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("symbol `{0}` declared twice")]
    DuplicateSymbol(String),
    #[error("`{0}` is reserved for name constants")]
    ReservedName(String),
    #[error("function `{0}` must have arity at least 1")]
    NullaryFunction(String),
    #[error("undeclared symbol `{0}`")]
    UndeclaredSymbol(String),
    #[error("`{symbol}` expects {expected} argument(s), found {found}")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("`{0}` is not an inductive predicate")]
    NotInductive(String),
    #[error("production rule `{0}` mentions a name constant")]
    NameInRule(String),
    #[error("empty succedent needs a closed term but the signature has no constant")]
    NoClosedTerm,
}
