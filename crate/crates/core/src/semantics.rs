//! Bounded semantics: big-step transitions, return values, traces, failures
//! and divergences, divergence freedom, weak bisimulation, and the relational
//! reading of state transformers.
//!
//! Every exploration is breadth-first over visible events, stripping at most
//! `tau_fuel` silent steps between two events. Reports say whether the
//! exploration was exhaustive; a report that is not exhaustive is a lower
//! bound.

use std::collections::{BTreeSet, HashSet, VecDeque};

use serde::Serialize;

use crate::bisim::{menu_difference, BisimVerdict, Observation};
use crate::circus::StateSpace;
use crate::combinators::{Expr, ExplorationBudget, HTree};
use crate::error::SemanticsError;
use crate::itree::{settle, Data, Event, ITree, SettleOutcome, Settled};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(untagged)]
pub enum TickedEvent<E, R> {
    Ev(E),
    Tick(R),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExplorationReport<T> {
    pub items: Vec<T>,
    pub exhaustive: bool,
    /// Nodes left unexplored: cut by the trace bound or node budget, or
    /// still silent when fuel ran out or a silent cycle was found.
    pub frontier: usize,
}

struct Level<E, R> {
    trace: Vec<E>,
    tree: ITree<E, R>,
}

struct Explored<T> {
    items: Vec<T>,
    exhaustive: bool,
    frontier: usize,
}

/// Breadth-first exploration shared by the reports below. `visit` sees each
/// node after stabilisation and returns the items it contributes.
fn explore<E, R, T, V>(p: &ITree<E, R>, budget: &ExplorationBudget, visit: V) -> Result<Explored<T>, SemanticsError>
where
    E: Event,
    R: Data,
    T: Send,
    V: Fn(&[E], &Settled<E, R>) -> Result<Vec<T>, SemanticsError> + Send + Sync,
{
    let mut level = vec![Level {
        trace: Vec::new(),
        tree: p.clone(),
    }];
    let mut items = Vec::new();
    let mut frontier = 0;
    let mut visited = 0usize;

    while !level.is_empty() {
        visited += level.len();
        let results = budget.strategy.map(level, |node| {
            let settled = settle(&node.tree, budget.tau_fuel);
            let out = visit(&node.trace, &settled);
            let mut children = Vec::new();
            let mut cut = settled.outcome != SettleOutcome::Stable;
            if let (SettleOutcome::Stable, ITree::Vis(menu)) = (settled.outcome, &settled.tree) {
                if node.trace.len() < budget.max_trace_len {
                    for (e, next) in menu.iter() {
                        let mut trace = node.trace.clone();
                        trace.push(e.clone());
                        children.push(Level {
                            trace,
                            tree: next.force().clone(),
                        });
                    }
                } else if !menu.is_empty() {
                    cut = true;
                }
            }
            (out, children, cut)
        });
        let mut next = Vec::new();
        for (out, children, cut) in results {
            items.extend(out?);
            next.extend(children);
            frontier += usize::from(cut);
        }
        if visited + next.len() > budget.max_nodes {
            frontier += next.len();
            break;
        }
        level = next;
    }
    Ok(Explored {
        exhaustive: frontier == 0,
        items,
        frontier,
    })
}

fn infallible<T>(r: Result<T, SemanticsError>) -> T {
    match r {
        Ok(t) => t,
        Err(e) => unreachable!("visitor cannot fail: {e}"),
    }
}

/// Pairs `(trace, residual)` for every trace explored, starting with
/// `([], p)`. Residuals are taken after silent steps are stripped.
pub fn transitions<E: Event, R: Data>(p: &ITree<E, R>, budget: &ExplorationBudget) -> ExplorationReport<(Vec<E>, ITree<E, R>)> {
    let ex = infallible(explore(p, budget, |trace, s| Ok(vec![(trace.to_vec(), s.tree.clone())])));
    ExplorationReport {
        items: ex.items,
        exhaustive: ex.exhaustive,
        frontier: ex.frontier,
    }
}

/// Terminating runs as `(trace, value)` pairs, in breadth-first order.
pub fn outcomes<E: Event, R: Data>(p: &ITree<E, R>, budget: &ExplorationBudget) -> ExplorationReport<(Vec<E>, R)> {
    let ex = infallible(explore(p, budget, |trace, s| {
        Ok(match &s.tree {
            ITree::Ret(x) if s.is_stable() => vec![(trace.to_vec(), x.clone())],
            _ => Vec::new(),
        })
    }));
    ExplorationReport {
        items: ex.items,
        exhaustive: ex.exhaustive,
        frontier: ex.frontier,
    }
}

/// The values `p` can return, sorted.
pub fn retvals<E: Event, R: Data + Ord>(p: &ITree<E, R>, budget: &ExplorationBudget) -> ExplorationReport<R> {
    let o = outcomes(p, budget);
    let set: BTreeSet<R> = o.items.into_iter().map(|(_, r)| r).collect();
    ExplorationReport {
        items: set.into_iter().collect(),
        exhaustive: o.exhaustive,
        frontier: o.frontier,
    }
}

/// Which termination events a stable node refuses.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum TickRefusal<R> {
    All,
    AllExcept(R),
}

/// A maximal refusal: everything in `events`, and the ticks described by
/// `ticks`. Every subset is refused too.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Refusal<E, R> {
    pub events: BTreeSet<E>,
    pub ticks: TickRefusal<R>,
}

impl<E: Ord, R: PartialEq> Refusal<E, R> {
    pub fn refuses(&self, x: &TickedEvent<E, R>) -> bool {
        match x {
            TickedEvent::Ev(e) => self.events.contains(e),
            TickedEvent::Tick(r) => match &self.ticks {
                TickRefusal::All => true,
                TickRefusal::AllExcept(v) => v != r,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Failure<E, R> {
    pub trace: Vec<TickedEvent<E, R>>,
    pub refusal: Refusal<E, R>,
}

/// Bounded traces, failures and divergences of a process.
#[derive(Clone, Debug, Serialize)]
pub struct FdReport<E, R> {
    pub traces: Vec<Vec<TickedEvent<E, R>>>,
    /// One maximal refusal per stable node.
    pub failures: Vec<Failure<E, R>>,
    /// Minimal divergent traces; every extension diverges too.
    pub divergences: Vec<Vec<E>>,
    pub exhaustive: bool,
    pub frontier: usize,
    pub tau_fuel: usize,
    pub max_trace_len: usize,
}

impl<E: Event, R: Data + Ord> FdReport<E, R> {
    pub fn has_trace(&self, trace: &[TickedEvent<E, R>]) -> bool {
        self.traces.binary_search_by(|t| t.as_slice().cmp(trace)).is_ok()
    }

    pub fn is_divergence(&self, trace: &[E]) -> bool {
        self.divergences.iter().any(|d| trace.starts_with(d))
    }

    /// Whether `(trace, refusal)` is a failure, using subset closure of the
    /// stored maximal refusals. Divergent traces refuse everything.
    pub fn is_failure(&self, trace: &[TickedEvent<E, R>], refusal: &[TickedEvent<E, R>]) -> bool {
        let visible: Option<Vec<E>> = trace
            .iter()
            .map(|x| match x {
                TickedEvent::Ev(e) => Some(e.clone()),
                TickedEvent::Tick(_) => None,
            })
            .collect();
        if visible.is_some_and(|v| self.is_divergence(&v)) {
            return true;
        }
        self.failures
            .iter()
            .filter(|f| f.trace == trace)
            .any(|f| refusal.iter().all(|x| f.refusal.refuses(x)))
    }

    pub fn refusals_at(&self, trace: &[TickedEvent<E, R>]) -> Vec<&Refusal<E, R>> {
        self.failures.iter().filter(|f| f.trace == trace).map(|f| &f.refusal).collect()
    }
}

enum FdItem<E, R> {
    Trace(Vec<TickedEvent<E, R>>),
    Failure(Failure<E, R>),
    Divergence(Vec<E>),
}

/// Traces, failures and divergences of `p` over `alphabet`.
pub fn failures_divergences<E: Event, R: Data + Ord>(
    p: &ITree<E, R>,
    alphabet: &BTreeSet<E>,
    budget: &ExplorationBudget,
) -> Result<FdReport<E, R>, SemanticsError> {
    let ex = explore(p, budget, |trace, s| {
        let ticked: Vec<TickedEvent<E, R>> = trace.iter().cloned().map(TickedEvent::Ev).collect();
        let mut out = vec![FdItem::Trace(ticked.clone())];
        if !s.is_stable() {
            out.push(FdItem::Divergence(trace.to_vec()));
            return Ok(out);
        }
        match &s.tree {
            ITree::Ret(x) => {
                let mut done = ticked.clone();
                done.push(TickedEvent::Tick(x.clone()));
                out.push(FdItem::Failure(Failure {
                    trace: ticked,
                    refusal: Refusal {
                        events: alphabet.clone(),
                        ticks: TickRefusal::AllExcept(x.clone()),
                    },
                }));
                out.push(FdItem::Trace(done.clone()));
                out.push(FdItem::Failure(Failure {
                    trace: done,
                    refusal: Refusal {
                        events: alphabet.clone(),
                        ticks: TickRefusal::All,
                    },
                }));
            }
            ITree::Vis(menu) => {
                if let Some(e) = menu.keys().find(|e| !alphabet.contains(e)) {
                    return Err(SemanticsError::OutsideAlphabet(format!("{e:?}")));
                }
                out.push(FdItem::Failure(Failure {
                    trace: ticked,
                    refusal: Refusal {
                        events: alphabet.iter().filter(|e| !menu.contains_key(e)).cloned().collect(),
                        ticks: TickRefusal::All,
                    },
                }));
            }
            ITree::Sil(_) => unreachable!("stable node"),
        }
        Ok(out)
    })?;

    let mut traces = BTreeSet::new();
    let mut failures = BTreeSet::new();
    let mut divergences = BTreeSet::new();
    for item in ex.items {
        match item {
            FdItem::Trace(t) => {
                traces.insert(t);
            }
            FdItem::Failure(f) => {
                failures.insert(f);
            }
            FdItem::Divergence(d) => {
                divergences.insert(d);
            }
        }
    }
    Ok(FdReport {
        traces: traces.into_iter().collect(),
        failures: failures.into_iter().collect(),
        divergences: divergences.into_iter().collect(),
        exhaustive: ex.exhaustive,
        frontier: ex.frontier,
        tau_fuel: budget.tau_fuel,
        max_trace_len: budget.max_trace_len,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "camelCase")]
pub enum DivFreeVerdict<E> {
    Holds {
        nodes: usize,
    },
    /// A node reached by `trace` did not settle. `certain` is set when its
    /// silent chain was seen to loop back on itself.
    PossiblyDivergent {
        trace: Vec<E>,
        certain: bool,
    },
    Inconclusive {
        frontier: usize,
    },
}

/// Checks that every reachable node settles. Continuations already visited
/// (by cell identity) are not explored again, so finite cyclic systems such
/// as `run` are covered exhaustively.
pub fn div_free<E: Event, R: Data>(p: &ITree<E, R>, budget: &ExplorationBudget) -> DivFreeVerdict<E> {
    let mut seen: HashSet<usize> = HashSet::new();
    let mut level = vec![Level {
        trace: Vec::new(),
        tree: p.clone(),
    }];
    let mut frontier = 0;
    let mut nodes = 0;
    while !level.is_empty() {
        nodes += level.len();
        let results = budget.strategy.map(level, |node| {
            let settled = settle(&node.tree, budget.tau_fuel);
            let mut children = Vec::new();
            let mut cut = false;
            if let (SettleOutcome::Stable, ITree::Vis(menu)) = (settled.outcome, &settled.tree) {
                if node.trace.len() < budget.max_trace_len {
                    children = menu.iter().map(|(e, l)| (e.clone(), l.clone())).collect();
                } else {
                    cut = !menu.is_empty();
                }
            }
            (node.trace, settled.outcome, children, cut)
        });
        let mut next = Vec::new();
        for (trace, outcome, children, cut) in results {
            if outcome != SettleOutcome::Stable {
                return DivFreeVerdict::PossiblyDivergent {
                    trace,
                    certain: outcome == SettleOutcome::Cycle,
                };
            }
            if cut {
                // A cut node whose successors were all seen before is closed.
                frontier += 1;
            }
            for (e, l) in children {
                if seen.insert(l.id()) {
                    let mut t = trace.clone();
                    t.push(e);
                    next.push(Level {
                        trace: t,
                        tree: l.force().clone(),
                    });
                }
            }
        }
        if nodes + next.len() > budget.max_nodes {
            return DivFreeVerdict::Inconclusive {
                frontier: frontier + next.len(),
            };
        }
        level = next;
    }
    if frontier == 0 {
        DivFreeVerdict::Holds { nodes }
    } else {
        DivFreeVerdict::Inconclusive { frontier }
    }
}

/// Weak bisimulation up to `max_trace_len` events: silent steps are stripped
/// on both sides before comparing.
pub fn weak_bisim<E: Event, R: Data>(p: &ITree<E, R>, q: &ITree<E, R>, budget: &ExplorationBudget) -> BisimVerdict<E> {
    let mut queue = VecDeque::new();
    queue.push_back((p.clone(), q.clone(), Vec::<E>::new()));
    let mut open: Option<Vec<E>> = None;
    let mut visited = 0usize;
    let depth = budget.max_trace_len;

    while let Some((p, q, trace)) = queue.pop_front() {
        visited += 1;
        let (sp, sq) = (settle(&p, budget.tau_fuel), settle(&q, budget.tau_fuel));
        let unsure = |s: &Settled<E, R>| s.outcome == SettleOutcome::OutOfFuel;
        if unsure(&sp) || unsure(&sq) {
            open.get_or_insert(trace);
            continue;
        }
        let (dp, dq) = (!sp.is_stable(), !sq.is_stable());
        if dp && dq {
            continue;
        }
        if dp != dq {
            return BisimVerdict::Distinguished {
                witness: trace,
                observation: Observation::Divergence { left_diverges: dp },
            };
        }
        match (&sp.tree, &sq.tree) {
            (ITree::Ret(x), ITree::Ret(y)) => {
                if x != y {
                    return BisimVerdict::Distinguished {
                        witness: trace,
                        observation: Observation::Returns {
                            left: format!("{x:?}"),
                            right: format!("{y:?}"),
                        },
                    };
                }
            }
            (ITree::Vis(f), ITree::Vis(g)) => {
                if let Some(observation) = menu_difference(f, g) {
                    return BisimVerdict::Distinguished { witness: trace, observation };
                }
                if trace.len() < depth {
                    for ((e, p1), (_, q1)) in f.iter().zip(g.iter()) {
                        let mut t = trace.clone();
                        t.push(e.clone());
                        queue.push_back((p1.force().clone(), q1.force().clone(), t));
                    }
                }
            }
            (a, b) => {
                return BisimVerdict::Distinguished {
                    witness: trace,
                    observation: Observation::Shape {
                        left: a.kind(),
                        right: b.kind(),
                    },
                }
            }
        }
        if visited > budget.max_nodes {
            open.get_or_insert_with(Vec::new);
            break;
        }
    }
    match open {
        Some(trace) => BisimVerdict::Inconclusive {
            depth,
            tau_fuel: budget.tau_fuel,
            trace,
        },
        None => BisimVerdict::Equivalent { depth_checked: depth },
    }
}

/// A relation between initial and final states.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Relation<S: Ord> {
    pub pairs: BTreeSet<(S, S)>,
    pub exhaustive: bool,
    /// Initial states whose exploration was cut short.
    pub open: Vec<S>,
}

impl<S: Data + Ord> Relation<S> {
    pub fn image(&self, s: &S) -> Vec<&S> {
        self.pairs.iter().filter(|(a, _)| a == s).map(|(_, b)| b).collect()
    }

    pub fn contains(&self, s: &S, t: &S) -> bool {
        self.pairs.contains(&(s.clone(), t.clone()))
    }

    pub fn is_open(&self, s: &S) -> bool {
        self.open.contains(s)
    }
}

/// The initial/final state pairs of `k` over every state in `space`.
pub fn psem<E: Event, S: Data + Ord>(k: &HTree<E, S>, space: &StateSpace<S>, budget: &ExplorationBudget) -> Relation<S> {
    let inner = budget.sequential();
    let per_state = budget.strategy.map(space.states().to_vec(), |s| {
        let r = retvals(&k(s.clone()), &inner);
        (s, r)
    });
    let mut pairs = BTreeSet::new();
    let mut open = Vec::new();
    for (s, r) in per_state {
        if !r.exhaustive {
            open.push(s.clone());
        }
        for t in r.items {
            pairs.insert((s.clone(), t));
        }
    }
    Relation {
        exhaustive: open.is_empty(),
        pairs,
        open,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "camelCase")]
pub enum RefinementVerdict<S> {
    Holds { pairs_checked: usize },
    /// `initial` can reach `final_state` in the implementation but not in
    /// the specification.
    Counterexample { initial: S, final_state: S },
    Inconclusive { open: Vec<S> },
}

/// `spec ⊑ imp`: every behaviour of `imp` is allowed by `spec`.
pub fn refines<E: Event, S: Data + Ord>(
    spec: &HTree<E, S>,
    imp: &HTree<E, S>,
    space: &StateSpace<S>,
    budget: &ExplorationBudget,
) -> RefinementVerdict<S> {
    let rs = psem(spec, space, budget);
    refines_relation(|s, t| (rs.contains(s, t), !rs.is_open(s)), imp, space, budget)
}

/// Refinement of a relational specification given as a predicate on
/// `(initial, final)`.
pub fn refines_spec<E: Event, S: Data + Ord>(
    spec: Expr<(S, S), bool>,
    imp: &HTree<E, S>,
    space: &StateSpace<S>,
    budget: &ExplorationBudget,
) -> RefinementVerdict<S> {
    refines_relation(|s, t| (spec(&(s.clone(), t.clone())), true), imp, space, budget)
}

// `allowed` answers (pair allowed, answer is final).
fn refines_relation<E: Event, S: Data + Ord>(
    allowed: impl Fn(&S, &S) -> (bool, bool),
    imp: &HTree<E, S>,
    space: &StateSpace<S>,
    budget: &ExplorationBudget,
) -> RefinementVerdict<S> {
    let ri = psem(imp, space, budget);
    let mut open = ri.open.clone();
    for (s, t) in &ri.pairs {
        match allowed(s, t) {
            (true, _) => {}
            (false, true) => {
                return RefinementVerdict::Counterexample {
                    initial: s.clone(),
                    final_state: t.clone(),
                }
            }
            (false, false) => {
                if !open.contains(s) {
                    open.push(s.clone());
                }
            }
        }
    }
    if open.is_empty() {
        RefinementVerdict::Holds {
            pairs_checked: ri.pairs.len(),
        }
    } else {
        RefinementVerdict::Inconclusive { open }
    }
}

/// The iterations of one terminating loop run: the trace and state after
/// each pass through the body.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IterationChain<E, S> {
    pub steps: Vec<(Vec<E>, S)>,
}

impl<E: Clone, S: Clone> IterationChain<E, S> {
    pub fn trace(&self) -> Vec<E> {
        self.steps.iter().flat_map(|(t, _)| t.iter().cloned()).collect()
    }

    pub fn last_state(&self) -> Option<&S> {
        self.steps.last().map(|(_, s)| s)
    }
}

/// Decomposes the terminating runs of `while cond do body` from `s` into
/// iteration chains. At most `tau_fuel` iterations and `max_trace_len`
/// events are followed.
pub fn iteration_chains<E: Event, S: Data>(
    cond: &Expr<S, bool>,
    body: &HTree<E, S>,
    s: S,
    budget: &ExplorationBudget,
) -> ExplorationReport<IterationChain<E, S>> {
    let mut done = Vec::new();
    let mut frontier = 0;
    let mut pending = vec![(IterationChain { steps: Vec::new() }, s)];
    while let Some((chain, head)) = pending.pop() {
        if !cond(&head) {
            done.push(chain);
            continue;
        }
        if chain.steps.len() >= budget.tau_fuel {
            frontier += 1;
            continue;
        }
        let used = chain.steps.iter().map(|(t, _)| t.len()).sum::<usize>();
        let rest = budget.sequential().with_trace_len(budget.max_trace_len.saturating_sub(used));
        let runs = outcomes(&body(head), &rest);
        frontier += runs.frontier;
        for (tr, next) in runs.items.into_iter().rev() {
            let mut c = chain.clone();
            c.steps.push((tr, next.clone()));
            pending.push((c, next));
        }
    }
    ExplorationReport {
        exhaustive: frontier == 0,
        items: done,
        frontier,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinators::{diverge, iterate, run, while_loop};
    use crate::csp::{event, extchoice, hide, prefix, skip};
    use crate::emap::EventSet;
    use std::sync::Arc;

    fn budget(len: usize) -> ExplorationBudget {
        ExplorationBudget::default().with_trace_len(len)
    }

    fn ev(e: char) -> TickedEvent<char, ()> {
        TickedEvent::Ev(e)
    }

    #[test]
    fn stop_has_single_transition() {
        let r = transitions::<char, ()>(&ITree::stop(), &budget(3));
        assert_eq!(r.items.len(), 1);
        assert!(r.items[0].0.is_empty());
        assert!(r.exhaustive);
    }

    #[test]
    fn retvals_of_stop_and_div() {
        let r = retvals::<char, i32>(&ITree::stop(), &budget(3));
        assert!(r.items.is_empty() && r.exhaustive);
        let r = retvals::<char, i32>(&ITree::sil(diverge), &budget(3));
        assert!(r.items.is_empty() && !r.exhaustive);
        let chain = {
            fn fresh(n: u64) -> ITree<char, i32> {
                ITree::sil(move || fresh(n + 1))
            }
            fresh(0)
        };
        assert!(!retvals(&chain, &budget(3)).exhaustive);
    }

    #[test]
    fn worked_failures_example() {
        // a → c → skip □ b → div
        let p = extchoice(prefix('a', prefix('c', skip())), prefix('b', diverge()));
        let alphabet: BTreeSet<char> = ['a', 'b', 'c'].into();
        let fd = failures_divergences(&p, &alphabet, &budget(5)).unwrap();
        let tick = TickedEvent::Tick(());
        assert!(fd.is_failure(&[], &[ev('c')]));
        assert!(fd.is_failure(&[ev('a')], &[ev('a'), ev('b')]));
        assert!(fd.is_failure(&[ev('a'), ev('c'), tick.clone()], &[ev('a'), ev('b'), ev('c')]));
        assert!(!fd.is_failure(&[], &[ev('a')]));
        assert_eq!(fd.divergences, vec![vec!['b']]);
        assert!(fd.is_divergence(&['b', 'a']));
        assert!(fd.has_trace(&[ev('a'), ev('c'), tick]));
    }

    #[test]
    fn alphabet_violation_names_event() {
        let p = prefix('z', skip());
        let err = failures_divergences(&p, &BTreeSet::from(['a']), &budget(2)).unwrap_err();
        assert_eq!(err, SemanticsError::OutsideAlphabet("'z'".into()));
    }

    #[test]
    fn div_free_examples() {
        let r: ITree<char, ()> = run(['a']);
        assert!(matches!(div_free(&r, &budget(2)), DivFreeVerdict::Holds { .. }));
        let d: ITree<char, ()> = diverge();
        assert_eq!(
            div_free(&d, &budget(2)),
            DivFreeVerdict::PossiblyDivergent {
                trace: vec![],
                certain: true
            }
        );
        let h = hide(iterate(event('e')), EventSet::finite(['e']));
        assert!(matches!(div_free(&h, &budget(2)), DivFreeVerdict::PossiblyDivergent { ref trace, .. } if trace.is_empty()));
    }

    #[test]
    fn weak_bisim_absorbs_taus() {
        let p = prefix('a', ITree::<char, ()>::tau(skip()));
        let q = prefix('a', skip());
        assert!(weak_bisim(&p, &q, &budget(3)).is_equivalent());
        let r = prefix('b', skip());
        assert!(weak_bisim(&p, &r, &budget(3)).is_distinguished());
    }

    #[test]
    fn chains_decompose_loop_runs() {
        let cond: Expr<i64, bool> = Arc::new(|s| *s < 3);
        let body: HTree<char, i64> = Arc::new(|s| ITree::Ret(s + 1));
        let report = iteration_chains(&cond, &body, 0, &ExplorationBudget::default());
        assert_eq!(report.items.len(), 1);
        let states: Vec<i64> = report.items[0].steps.iter().map(|(_, s)| *s).collect();
        assert_eq!(states, vec![1, 2, 3]);
        let w = while_loop(cond, body);
        assert_eq!(retvals(&w(0), &ExplorationBudget::default()).items, vec![3]);
    }
}
