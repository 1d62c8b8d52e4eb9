//! Hoare triples, weakest preconditions and invariant obligations, checked
//! by running programs from every state of a finite state space.
//!
//! Loops are unfolded structurally. At each loop head the annotated
//! invariant is checked, and for total correctness the variant must be
//! non-negative and decrease across the iteration. A loop head state that
//! has been seen before on the same loop entry is not explored again, so
//! loops that cycle through finitely many states are covered exhaustively.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::circus::StateSpace;
use crate::combinators::{ExplorationBudget, Expr, HTree};
use crate::error::VerifyError;
use crate::itree::{Data, Event};
use crate::program::Program;
use crate::semantics::{outcomes, psem, IterationChain};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum Violation {
    Postcondition,
    LoopInvariant { label: String, invariant: String },
    VariantNegative { label: String, variant: String, value: i64 },
    VariantNotDecreasing { label: String, variant: String, before: i64, after: i64 },
    /// No execution from the initial state terminates.
    NoTermination,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample<S, E> {
    pub initial: S,
    /// The final state for postcondition failures, or the loop head state
    /// where an annotation failed.
    pub final_state: Option<S>,
    pub trace: Vec<E>,
    /// Iterations of the loop that was being checked.
    pub chain: Option<IterationChain<E, S>>,
    pub violation: Violation,
}

impl<S: fmt::Debug, E: fmt::Debug> Counterexample<S, E> {
    pub fn message(&self) -> String {
        let at = |s: &Option<S>| s.as_ref().map(|s| format!("{s:?}")).unwrap_or_default();
        match &self.violation {
            Violation::Postcondition => format!("postcondition fails in final state {}", at(&self.final_state)),
            Violation::LoopInvariant { label, invariant } => {
                let iteration = self.chain.as_ref().map_or(0, |c| c.steps.len());
                format!(
                    "invariant `{invariant}` of loop {label} fails after {iteration} iteration(s) in state {}",
                    at(&self.final_state)
                )
            }
            Violation::VariantNegative { label, variant, value } => {
                format!("variant `{variant}` of loop {label} is {value} at an iteration start")
            }
            Violation::VariantNotDecreasing {
                label,
                variant,
                before,
                after,
            } => format!("variant `{variant}` of loop {label} went from {before} to {after}"),
            Violation::NoTermination => format!("no execution from {:?} terminates", self.initial),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InconclusiveReason {
    /// Silent-step fuel, iteration or trace bounds were reached.
    Fuel,
    /// The node budget was exhausted.
    Space,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "camelCase")]
pub enum HoareVerdict<S, E> {
    Holds { states_checked: usize },
    Counterexample(Box<Counterexample<S, E>>),
    Inconclusive { reason: InconclusiveReason, states_checked: usize },
}

impl<S, E> HoareVerdict<S, E> {
    pub fn holds(&self) -> bool {
        matches!(self, HoareVerdict::Holds { .. })
    }

    pub fn counterexample(&self) -> Option<&Counterexample<S, E>> {
        match self {
            HoareVerdict::Counterexample(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_inconclusive(&self) -> bool {
        matches!(self, HoareVerdict::Inconclusive { .. })
    }
}

/// A loop annotation failure, before the initial state is attached.
struct Failed<E, S> {
    at: S,
    trace: Vec<E>,
    chain: IterationChain<E, S>,
    violation: Violation,
}

struct Walk<E, S> {
    outcomes: Vec<(Vec<E>, S)>,
    open: Option<InconclusiveReason>,
}

struct Walker<'a> {
    budget: &'a ExplorationBudget,
    variants: bool,
}

impl Walker<'_> {
    fn walk<E: Event, S: Data + Ord>(&self, prog: &Program<E, S>, s: S) -> Result<Walk<E, S>, Box<Failed<E, S>>> {
        match prog {
            Program::Atomic(h) => {
                let r = outcomes(&h(s), self.budget);
                Ok(Walk {
                    outcomes: r.items,
                    open: (!r.exhaustive).then_some(InconclusiveReason::Fuel),
                })
            }
            Program::Seq(parts) => {
                let mut current = vec![(Vec::new(), s)];
                let mut open = None;
                for part in parts {
                    let mut next = Vec::new();
                    let mut seen = BTreeSet::new();
                    for (tr, st) in current {
                        let w = self.walk(part, st)?;
                        open = open.or(w.open);
                        for (t2, s2) in w.outcomes {
                            let mut t = tr.clone();
                            t.extend(t2);
                            if seen.insert((t.clone(), s2.clone())) {
                                next.push((t, s2));
                            }
                        }
                    }
                    if next.len() > self.budget.max_nodes {
                        return Ok(Walk {
                            outcomes: next,
                            open: Some(InconclusiveReason::Space),
                        });
                    }
                    current = next;
                }
                Ok(Walk { outcomes: current, open })
            }
            Program::Cond { cond, then, otherwise } => {
                if cond(&s) {
                    self.walk(then, s)
                } else {
                    self.walk(otherwise, s)
                }
            }
            Program::While {
                label,
                cond,
                body,
                annotation,
            } => {
                let mut out = Vec::new();
                let mut open = None;
                let mut visited: BTreeSet<S> = BTreeSet::new();
                let mut pending = vec![(IterationChain { steps: Vec::new() }, Vec::new(), s)];
                while let Some((chain, trace, head)) = pending.pop() {
                    if let Some(ann) = annotation {
                        if ann.invariant.as_ref().is_some_and(|inv| !inv(&head)) {
                            return Err(Box::new(Failed {
                                at: head,
                                trace,
                                chain,
                                violation: Violation::LoopInvariant {
                                    label: label.clone(),
                                    invariant: ann.invariant_text.clone(),
                                },
                            }));
                        }
                    }
                    if !cond(&head) {
                        out.push((trace, head));
                        continue;
                    }
                    if !visited.insert(head.clone()) {
                        // Revisiting a head state adds no new outcomes.
                        continue;
                    }
                    if visited.len() > self.budget.max_nodes {
                        open = Some(InconclusiveReason::Space);
                        continue;
                    }
                    let variant = annotation.as_ref().and_then(|a| a.variant.clone().map(|v| (v, a.variant_text.clone())));
                    let before = match (&variant, self.variants) {
                        (Some((v, text)), true) => {
                            let value = v(&head);
                            if value < 0 {
                                return Err(Box::new(Failed {
                                    at: head,
                                    trace,
                                    chain,
                                    violation: Violation::VariantNegative {
                                        label: label.clone(),
                                        variant: text.clone(),
                                        value,
                                    },
                                }));
                            }
                            Some(value)
                        }
                        _ => None,
                    };
                    let w = self.walk(body, head.clone())?;
                    open = open.or(w.open);
                    for (tr, next) in w.outcomes.into_iter().rev() {
                        let mut c = chain.clone();
                        c.steps.push((tr.clone(), next.clone()));
                        let mut t = trace.clone();
                        t.extend(tr);
                        if let (Some(before), Some((v, text))) = (before, &variant) {
                            let after = v(&next);
                            if after >= before {
                                return Err(Box::new(Failed {
                                    at: next,
                                    trace: t,
                                    chain: c,
                                    violation: Violation::VariantNotDecreasing {
                                        label: label.clone(),
                                        variant: text.clone(),
                                        before,
                                        after,
                                    },
                                }));
                            }
                        }
                        pending.push((c, t, next));
                    }
                }
                Ok(Walk { outcomes: out, open })
            }
        }
    }
}

enum PerState<S, E> {
    Fine,
    Violation(Box<Counterexample<S, E>>),
    Open(InconclusiveReason),
    Error(VerifyError),
}

fn check_state<E: Event, S: Data + Ord>(
    prog: &Program<E, S>,
    s: S,
    post: &Expr<S, bool>,
    space: &StateSpace<S>,
    budget: &ExplorationBudget,
    total: bool,
) -> PerState<S, E> {
    let walker = Walker {
        budget,
        variants: total,
    };
    let walk = match walker.walk(prog, s.clone()) {
        Ok(w) => w,
        Err(f) => {
            return PerState::Violation(Box::new(Counterexample {
                initial: s,
                final_state: Some(f.at),
                trace: f.trace,
                chain: Some(f.chain),
                violation: f.violation,
            }))
        }
    };
    for (_, t) in &walk.outcomes {
        if !space.in_domain(t) {
            return PerState::Error(VerifyError::OutsideDomain(format!("{t:?}")));
        }
    }
    if let Some((trace, t)) = walk.outcomes.iter().find(|(_, t)| !post(t)) {
        return PerState::Violation(Box::new(Counterexample {
            initial: s,
            final_state: Some(t.clone()),
            trace: trace.clone(),
            chain: None,
            violation: Violation::Postcondition,
        }));
    }
    if let Some(reason) = walk.open {
        return PerState::Open(reason);
    }
    if total && walk.outcomes.is_empty() {
        return PerState::Violation(Box::new(Counterexample {
            initial: s,
            final_state: None,
            trace: Vec::new(),
            chain: None,
            violation: Violation::NoTermination,
        }));
    }
    PerState::Fine
}

fn hoare<E: Event, S: Data + Ord>(
    pre: &Expr<S, bool>,
    prog: &Program<E, S>,
    post: &Expr<S, bool>,
    space: &StateSpace<S>,
    budget: &ExplorationBudget,
    total: bool,
) -> Result<HoareVerdict<S, E>, VerifyError> {
    let initial: Vec<S> = space.states().iter().filter(|s| pre(s)).cloned().collect();
    let checked = initial.len();
    let inner = budget.sequential();
    let results = budget
        .strategy
        .map(initial, |s| check_state(prog, s, post, space, &inner, total));
    let mut open = None;
    for r in results {
        match r {
            PerState::Fine => {}
            PerState::Violation(c) => return Ok(HoareVerdict::Counterexample(c)),
            PerState::Error(e) => return Err(e),
            PerState::Open(reason) => {
                open.get_or_insert(reason);
            }
        }
    }
    Ok(match open {
        Some(reason) => HoareVerdict::Inconclusive {
            reason,
            states_checked: checked,
        },
        None => HoareVerdict::Holds { states_checked: checked },
    })
}

/// `{pre} prog {post}`: every terminating run from a `pre` state ends in a
/// `post` state, and annotated loop invariants hold at every loop head.
pub fn hoare_partial<E: Event, S: Data + Ord>(
    pre: &Expr<S, bool>,
    prog: &Program<E, S>,
    post: &Expr<S, bool>,
    space: &StateSpace<S>,
    budget: &ExplorationBudget,
) -> Result<HoareVerdict<S, E>, VerifyError> {
    hoare(pre, prog, post, space, budget, false)
}

/// Partial correctness, plus: some run from each `pre` state terminates, and
/// annotated variants are non-negative and strictly decrease.
pub fn hoare_total<E: Event, S: Data + Ord>(
    pre: &Expr<S, bool>,
    prog: &Program<E, S>,
    post: &Expr<S, bool>,
    space: &StateSpace<S>,
    budget: &ExplorationBudget,
) -> Result<HoareVerdict<S, E>, VerifyError> {
    hoare(pre, prog, post, space, budget, true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PreconditionMode {
    /// Some final state satisfies the postcondition.
    Wp,
    /// Every final state satisfies the postcondition.
    Wlp,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PreconditionSet<S> {
    pub states: Vec<S>,
    pub exhaustive: bool,
}

pub fn weakest_precondition<E: Event, S: Data + Ord>(
    mode: PreconditionMode,
    prog: &HTree<E, S>,
    post: &Expr<S, bool>,
    space: &StateSpace<S>,
    budget: &ExplorationBudget,
) -> PreconditionSet<S> {
    let rel = psem(prog, space, budget);
    let states = space
        .states()
        .iter()
        .filter(|s| {
            let finals = rel.image(s);
            match mode {
                PreconditionMode::Wp => finals.iter().any(|t| post(t)),
                PreconditionMode::Wlp => finals.iter().all(|t| post(t)),
            }
        })
        .cloned()
        .collect();
    PreconditionSet {
        states,
        exhaustive: rel.exhaustive,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ObligationKind {
    /// `{true} C {inv}`
    Establishes,
    /// `{inv} C {inv}`
    Preserves,
}

pub fn invariant_check<E: Event, S: Data + Ord>(
    kind: ObligationKind,
    target: &Program<E, S>,
    inv: &Expr<S, bool>,
    space: &StateSpace<S>,
    budget: &ExplorationBudget,
) -> Result<HoareVerdict<S, E>, VerifyError> {
    let pre: Expr<S, bool> = match kind {
        ObligationKind::Establishes => std::sync::Arc::new(|_| true),
        ObligationKind::Preserves => inv.clone(),
    };
    hoare_partial(&pre, target, inv, space, budget)
}
