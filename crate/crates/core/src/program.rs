//! Structured imperative programs.
//!
//! A [`Program`] keeps sequencing, conditionals and loops visible so that
//! verification can find loop heads and check annotations there. Anything
//! else (assignments, communication, parallel blocks) is an atomic state
//! transformer. Annotations do not change the meaning of a program.

use std::sync::Arc;

use crate::circus::{cond, skip_h};
use crate::combinators::{kcomp, while_loop, Expr, HTree};
use crate::itree::{Data, Event};

pub struct LoopAnnotation<S> {
    pub invariant: Option<Expr<S, bool>>,
    /// Must be non-negative on entry to each iteration and strictly smaller
    /// after it.
    pub variant: Option<Expr<S, i64>>,
    /// Source text of the invariant, for messages.
    pub invariant_text: String,
    pub variant_text: String,
}

impl<S> Clone for LoopAnnotation<S> {
    fn clone(&self) -> Self {
        LoopAnnotation {
            invariant: self.invariant.clone(),
            variant: self.variant.clone(),
            invariant_text: self.invariant_text.clone(),
            variant_text: self.variant_text.clone(),
        }
    }
}

impl<S> LoopAnnotation<S> {
    pub fn invariant(inv: Expr<S, bool>, text: impl Into<String>) -> Self {
        LoopAnnotation {
            invariant: Some(inv),
            variant: None,
            invariant_text: text.into(),
            variant_text: String::new(),
        }
    }

    pub fn with_variant(mut self, variant: Expr<S, i64>, text: impl Into<String>) -> Self {
        self.variant = Some(variant);
        self.variant_text = text.into();
        self
    }
}

pub enum Program<E, S> {
    Atomic(HTree<E, S>),
    Seq(Vec<Program<E, S>>),
    Cond {
        cond: Expr<S, bool>,
        then: Box<Program<E, S>>,
        otherwise: Box<Program<E, S>>,
    },
    While {
        label: String,
        cond: Expr<S, bool>,
        body: Box<Program<E, S>>,
        annotation: Option<LoopAnnotation<S>>,
    },
}

impl<E, S> Clone for Program<E, S> {
    fn clone(&self) -> Self {
        match self {
            Program::Atomic(h) => Program::Atomic(Arc::clone(h)),
            Program::Seq(ps) => Program::Seq(ps.clone()),
            Program::Cond { cond, then, otherwise } => Program::Cond {
                cond: cond.clone(),
                then: then.clone(),
                otherwise: otherwise.clone(),
            },
            Program::While {
                label,
                cond,
                body,
                annotation,
            } => Program::While {
                label: label.clone(),
                cond: cond.clone(),
                body: body.clone(),
                annotation: annotation.clone(),
            },
        }
    }
}

impl<E: Event, S: Data> Program<E, S> {
    pub fn atomic(h: HTree<E, S>) -> Self {
        Program::Atomic(h)
    }

    pub fn seq(parts: impl IntoIterator<Item = Program<E, S>>) -> Self {
        Program::Seq(parts.into_iter().collect())
    }

    pub fn cond(cond: Expr<S, bool>, then: Program<E, S>, otherwise: Program<E, S>) -> Self {
        Program::Cond {
            cond,
            then: Box::new(then),
            otherwise: Box::new(otherwise),
        }
    }

    pub fn while_loop(label: impl Into<String>, cond: Expr<S, bool>, body: Program<E, S>, annotation: Option<LoopAnnotation<S>>) -> Self {
        Program::While {
            label: label.into(),
            cond,
            body: Box::new(body),
            annotation,
        }
    }

    /// The state transformer this program denotes.
    pub fn to_htree(&self) -> HTree<E, S> {
        match self {
            Program::Atomic(h) => Arc::clone(h),
            Program::Seq(ps) => ps.iter().map(Program::to_htree).reduce(kcomp).unwrap_or_else(skip_h),
            Program::Cond { cond: b, then, otherwise } => cond(then.to_htree(), b.clone(), otherwise.to_htree()),
            Program::While { cond, body, .. } => while_loop(cond.clone(), body.to_htree()),
        }
    }

    pub fn has_annotations(&self) -> bool {
        match self {
            Program::Atomic(_) => false,
            Program::Seq(ps) => ps.iter().any(Program::has_annotations),
            Program::Cond { then, otherwise, .. } => then.has_annotations() || otherwise.has_annotations(),
            Program::While { annotation, body, .. } => annotation.is_some() || body.has_annotations(),
        }
    }
}
