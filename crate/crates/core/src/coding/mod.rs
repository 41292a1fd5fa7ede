//! Arithmetical coding of the inductive layer: codes for syntax, the coded
//! operator `φ̃`, the stage formula `W`, witness search for `P̃_i`, and the
//! truth-clause checker for valuations `f`.

mod code;
mod stage;
mod truth;

use thiserror::Error;

use crate::semantics::SemanticsError;

pub use code::{
    decode, decode_formula, decode_term, decode_tuple, encode_formula, encode_term, encode_tuple, pair, proj, seq,
    seq_len, seq_member, unpair, unseq, Code, Decoded,
};
pub use stage::{
    apply_phi_tilde, check_code_correspondence, eval_w, search_p_tilde, stage_code, CodeFamily, CodeMismatch,
    CodedLayer, OrdinaryOracle, StageWitness,
};
pub use truth::{
    check_i_clauses, derive_truth_assignment, rebuild_from_truth, Clause, ClauseViolation, IReport, QuantifierCheck,
    TruthAssignment,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodingError {
    #[error("invalid code: {0}")]
    InvalidCode(String),
    #[error("`{0}` is not an inductive predicate")]
    UnknownPredicate(String),
    #[error("term `{0}` lies outside the term universe")]
    OutsideUniverse(String),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}
