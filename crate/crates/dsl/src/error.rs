use std::collections::BTreeSet;

use itree_core::error::ConstructionError;
use serde::Serialize;
use thiserror::Error;

use crate::lexer::Span;

/// The first syntax error in a model, with the tokens that would have been
/// accepted in its place.
#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: u32,
    pub col: u32,
    pub message: String,
    pub expected: BTreeSet<String>,
}

impl ParseError {
    pub(crate) fn lexical(at: Span, message: String) -> Self {
        ParseError {
            line: at.line,
            col: at.col,
            message,
            expected: BTreeSet::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ElabError {
    #[error("{0}: {1} `{2}` is defined twice")]
    Duplicate(Span, &'static str, String),
    #[error("{0}: unknown {1} `{2}`")]
    Unknown(Span, &'static str, String),
    #[error("constant {0} has no value; bind it in the model or with --const {0}=VALUE")]
    UnboundConstant(String),
    #[error("{0}: type error: {1}")]
    Type(Span, String),
    #[error("unguarded recursion: {}", .0.join(" -> "))]
    UnguardedRecursion(Vec<String>),
    #[error("{0}: cannot assign to `{1}`: {2}")]
    ReadOnly(Span, String, &'static str),
    #[error("{0}: `{1}` expects {2} argument(s), got {3}")]
    Arity(Span, String, usize, usize),
    #[error("{0}: input on `{1}` needs an explicit value set, its type is not finite")]
    InfiniteInput(Span, String),
    #[error("{0}: both sides of a parallel composition assign `{1}`")]
    SharedWrite(Span, String),
    #[error("{0}: {1}")]
    Construction(Span, ConstructionError),
    #[error("{0}: constant expression: {1}")]
    Constant(Span, String),
    #[error("unknown target `{0}`")]
    UnknownTarget(String),
    #[error("cannot parse value for {0}: {1}")]
    BadBinding(String, String),
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("syntax error at {0}")]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Elab(#[from] ElabError),
}
