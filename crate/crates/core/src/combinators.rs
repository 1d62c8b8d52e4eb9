//! Sequencing, iteration and bounded execution.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::emap::EventMap;
use crate::itree::{settle, Data, Event, ITree, Lazy, SettleOutcome};
use crate::par::Strategy;

/// A function from inputs to trees: a continuation, or a program when
/// input and output types coincide.
pub type KTree<E, A, B> = Arc<dyn Fn(A) -> ITree<E, B> + Send + Sync>;

/// A state transformer: a continuation from states to state-returning trees.
pub type HTree<E, S> = KTree<E, S, S>;

/// A state-dependent value.
pub type Expr<S, V> = Arc<dyn Fn(&S) -> V + Send + Sync>;

pub fn ktree<E, A, B>(f: impl Fn(A) -> ITree<E, B> + Send + Sync + 'static) -> KTree<E, A, B> {
    Arc::new(f)
}

pub fn expr<S, V>(f: impl Fn(&S) -> V + Send + Sync + 'static) -> Expr<S, V> {
    Arc::new(f)
}

pub fn ret<E: Event, R: Data>(value: R) -> ITree<E, R> {
    ITree::Ret(value)
}

/// Runs `tree`, passing each returned value to `k`.
pub fn bind<E: Event, A: Data, B: Data>(tree: ITree<E, A>, k: KTree<E, A, B>) -> ITree<E, B> {
    match tree {
        ITree::Ret(a) => k(a),
        ITree::Sil(next) => ITree::Sil(Lazy::new(move || bind(next.force().clone(), k))),
        ITree::Vis(menu) => ITree::Vis(menu.map(|_, next| {
            let next = next.clone();
            let k = k.clone();
            Lazy::new(move || bind(next.force().clone(), k))
        })),
    }
}

/// Kleisli composition: `p` then `q`.
pub fn kcomp<E: Event, A: Data, B: Data, C: Data>(p: KTree<E, A, B>, q: KTree<E, B, C>) -> KTree<E, A, C> {
    Arc::new(move |a| bind(p(a), q.clone()))
}

struct WhileLoop<E, S> {
    cond: Expr<S, bool>,
    body: HTree<E, S>,
}

impl<E: Event, S: Data> WhileLoop<E, S> {
    fn step(self: &Arc<Self>, s: S) -> ITree<E, S> {
        if (self.cond)(&s) {
            let me = Arc::clone(self);
            ITree::Sil(Lazy::new(move || {
                let again = Arc::clone(&me);
                bind((me.body)(s), Arc::new(move |s2| again.step(s2)))
            }))
        } else {
            ITree::Ret(s)
        }
    }
}

/// `while cond do body`. Every iteration that starts is preceded by one
/// silent step, so a loop with an empty body diverges rather than spinning
/// forever without output.
pub fn while_loop<E: Event, S: Data>(cond: Expr<S, bool>, body: HTree<E, S>) -> HTree<E, S> {
    let w = Arc::new(WhileLoop { cond, body });
    Arc::new(move |s| w.step(s))
}

/// Repeats `body` forever.
pub fn loop_forever<E: Event, S: Data>(body: HTree<E, S>) -> HTree<E, S> {
    while_loop(Arc::new(|_| true), body)
}

/// Repeats a unit-returning tree forever.
pub fn iterate<E: Event>(tree: ITree<E, ()>) -> ITree<E, ()> {
    loop_forever(Arc::new(move |_| tree.clone()))(())
}

/// Silent steps forever.
pub fn diverge<E: Event, R: Data>() -> ITree<E, R> {
    Lazy::tie(ITree::Sil)
}

/// Offers every event in `events` forever.
pub fn run<E: Event, R: Data>(events: impl IntoIterator<Item = E>) -> ITree<E, R> {
    let events: Vec<E> = events.into_iter().collect();
    Lazy::tie(move |me| ITree::Vis(EventMap::from_keys(events, |_| me.clone())))
}

/// Removes up to `n` leading silent steps.
pub fn un_sils<E: Event, R: Data>(n: usize, tree: &ITree<E, R>) -> ITree<E, R> {
    let mut current = tree.clone();
    for _ in 0..n {
        match current {
            ITree::Sil(next) => current = next.force().clone(),
            other => return other,
        }
    }
    current
}

/// Limits on how far semantic exploration may go.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExplorationBudget {
    /// Silent steps allowed between two visible events.
    pub tau_fuel: usize,
    /// Longest visible trace explored.
    pub max_trace_len: usize,
    /// Cap on the number of nodes visited.
    pub max_nodes: usize,
    pub strategy: Strategy,
}

impl Default for ExplorationBudget {
    fn default() -> Self {
        ExplorationBudget {
            tau_fuel: 20,
            max_trace_len: 8,
            max_nodes: 200_000,
            strategy: Strategy::default(),
        }
    }
}

impl ExplorationBudget {
    /// Defaults for running a process to completion.
    pub fn execution() -> Self {
        ExplorationBudget {
            tau_fuel: 10_000,
            ..Self::default()
        }
    }

    pub fn with_tau_fuel(mut self, tau_fuel: usize) -> Self {
        self.tau_fuel = tau_fuel;
        self
    }

    pub fn with_trace_len(mut self, max_trace_len: usize) -> Self {
        self.max_trace_len = max_trace_len;
        self
    }

    pub fn with_max_nodes(mut self, max_nodes: usize) -> Self {
        self.max_nodes = max_nodes;
        self
    }

    pub fn with_strategy(mut self, strategy: Strategy) -> Self {
        self.strategy = strategy;
        self
    }

    /// The same limits, run sequentially. Used for work nested inside an
    /// already parallel loop.
    pub(crate) fn sequential(mut self) -> Self {
        self.strategy = Strategy::Sequential;
        self
    }
}

#[derive(Clone, Debug)]
pub enum ExecResult<E, R> {
    Terminated { value: R, taus: usize },
    Deadlock { taus: usize },
    Menu { events: Vec<E>, taus: usize },
    /// Fuel ran out; `residual` resumes where execution stopped.
    Timeout { residual: ITree<E, R>, taus: usize },
}

impl<E, R> ExecResult<E, R> {
    pub fn taus(&self) -> usize {
        match self {
            ExecResult::Terminated { taus, .. }
            | ExecResult::Deadlock { taus }
            | ExecResult::Menu { taus, .. }
            | ExecResult::Timeout { taus, .. } => *taus,
        }
    }
}

/// Strips silent steps until the tree is stable or `tau_fuel` is spent.
pub fn execute<E: Event, R: Data>(tree: &ITree<E, R>, tau_fuel: usize) -> ExecResult<E, R> {
    let settled = settle(tree, tau_fuel);
    let taus = settled.taus;
    match (settled.outcome, settled.tree) {
        (SettleOutcome::Stable, ITree::Ret(value)) => ExecResult::Terminated { value, taus },
        (SettleOutcome::Stable, ITree::Vis(menu)) if menu.is_empty() => ExecResult::Deadlock { taus },
        (SettleOutcome::Stable, ITree::Vis(menu)) => ExecResult::Menu {
            events: menu.keys().cloned().collect(),
            taus,
        },
        (_, residual) => ExecResult::Timeout { residual, taus },
    }
}
