//! Readers and printers for the external formats: `.folid` signature files,
//! formula and sequent strings, `.model` JSON structures and `.proof` graphs.

mod formula;
mod lexer;
mod model;
mod proof;
mod signature;

use std::fmt;

use thiserror::Error;

pub use formula::{parse_formula, parse_sequent, parse_substitution, parse_term};
pub use model::{parse_structure, print_structure};
pub use proof::{parse_proof, print_proof};
pub use signature::{parse_signature, print_signature};

/// A region of an input text. Lines and columns are 1-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceSpan {
    pub file: String,
    pub line: usize,
    pub column: usize,
    pub length: usize,
}

impl SourceSpan {
    pub fn start(file: impl Into<String>) -> Self {
        SourceSpan {
            file: file.into(),
            line: 1,
            column: 1,
            length: 1,
        }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.column)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    ArityMismatch,
    UndeclaredSymbol,
    DuplicateSymbol,
    NotInductive,
    TableIncomplete,
    OutOfUniverse,
    UnknownRule,
    DanglingPremise,
    BudSequentMismatch,
    DuplicateNode,
}

impl ParseErrorKind {
    pub fn name(self) -> &'static str {
        match self {
            ParseErrorKind::Syntax => "SyntaxError",
            ParseErrorKind::ArityMismatch => "ArityMismatch",
            ParseErrorKind::UndeclaredSymbol => "UndeclaredSymbol",
            ParseErrorKind::DuplicateSymbol => "DuplicateSymbol",
            ParseErrorKind::NotInductive => "NotInductive",
            ParseErrorKind::TableIncomplete => "TableIncomplete",
            ParseErrorKind::OutOfUniverse => "OutOfUniverse",
            ParseErrorKind::UnknownRule => "UnknownRule",
            ParseErrorKind::DanglingPremise => "DanglingPremise",
            ParseErrorKind::BudSequentMismatch => "BudSequentMismatch",
            ParseErrorKind::DuplicateNode => "DuplicateNode",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{span}: {}: {message}", kind.name())]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub span: SourceSpan,
    pub message: String,
}

impl ParseError {
    pub fn new(kind: ParseErrorKind, span: SourceSpan, message: impl Into<String>) -> Self {
        ParseError {
            kind,
            span,
            message: message.into(),
        }
    }

    /// Replaces the file name recorded in the span.
    pub fn with_file(mut self, file: impl Into<String>) -> Self {
        self.span.file = file.into();
        self
    }
}

pub(crate) const INPUT: &str = "<input>";

/// Span of the first occurrence of `needle` in `text`, or of the first
/// character when it does not occur.
pub(crate) fn locate(text: &str, needle: &str) -> SourceSpan {
    let Some(offset) = text.find(needle) else {
        return SourceSpan::start(INPUT);
    };
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    SourceSpan {
        file: INPUT.into(),
        line,
        column,
        length: needle.chars().count().max(1),
    }
}
