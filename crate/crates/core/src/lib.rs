//! First-order logic with inductive definitions.
//!
//! The crate covers finite-model semantics with least-fixpoint inductive
//! predicates, term models over name-extended signatures, an arithmetical
//! coding of the inductive layer with bounded witness search, and a checker
//! for cyclic sequent-calculus proofs including the global trace condition.

pub mod coding;
pub mod gen;
pub mod kernel;
pub mod parser;
pub mod semantics;
pub mod syntax;
pub mod termmodel;
pub mod trace;
pub mod translate;

pub use syntax::{Formula, Sequent, Signature, Substitution, Term, Theory};
