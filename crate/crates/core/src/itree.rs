//! The interaction tree value and its lazily demanded children.
//!
//! An [`ITree`] is one of three nodes: a return value, a silent step, or a
//! finite menu of visible events. Children are held in [`Lazy`] cells so that
//! infinite trees (divergence, reactive loops) can be described without
//! evaluating them. Cells memoize their first demand.

use std::collections::HashSet;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::emap::EventMap;

/// Events label visible transitions. The total order fixes menu order.
pub trait Event: Clone + Ord + fmt::Debug + Send + Sync + 'static {}
impl<T> Event for T where T: Clone + Ord + fmt::Debug + Send + Sync + 'static {}

/// Values returned by terminating trees.
pub trait Data: Clone + PartialEq + fmt::Debug + Send + Sync + 'static {}
impl<T> Data for T where T: Clone + PartialEq + fmt::Debug + Send + Sync + 'static {}

pub enum ITree<E, R> {
    Ret(R),
    Sil(Lazy<E, R>),
    Vis(EventMap<E, Lazy<E, R>>),
}

/// Constructor tag of a node, used in mismatch reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Ret,
    Sil,
    Vis,
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NodeKind::Ret => "Ret",
            NodeKind::Sil => "Sil",
            NodeKind::Vis => "Vis",
        })
    }
}

impl<E: Clone, R: Clone> Clone for ITree<E, R> {
    fn clone(&self) -> Self {
        match self {
            ITree::Ret(r) => ITree::Ret(r.clone()),
            ITree::Sil(l) => ITree::Sil(l.clone()),
            ITree::Vis(m) => ITree::Vis(m.clone()),
        }
    }
}

impl<E: Event, R: Data> ITree<E, R> {
    pub fn ret(value: R) -> Self {
        ITree::Ret(value)
    }

    /// A silent step whose successor is computed on demand.
    pub fn sil(next: impl FnOnce() -> ITree<E, R> + Send + 'static) -> Self {
        ITree::Sil(Lazy::new(next))
    }

    /// A silent step in front of an already built tree.
    pub fn tau(next: ITree<E, R>) -> Self {
        ITree::Sil(Lazy::ready(next))
    }

    /// `n` silent steps in front of `tree`.
    pub fn taus(n: usize, tree: ITree<E, R>) -> Self {
        (0..n).fold(tree, |t, _| ITree::tau(t))
    }

    pub fn vis(choices: EventMap<E, Lazy<E, R>>) -> Self {
        ITree::Vis(choices)
    }

    /// The deadlocked tree: a menu offering nothing.
    pub fn stop() -> Self {
        ITree::Vis(EventMap::empty())
    }

    pub fn kind(&self) -> NodeKind {
        match self {
            ITree::Ret(_) => NodeKind::Ret,
            ITree::Sil(_) => NodeKind::Sil,
            ITree::Vis(_) => NodeKind::Vis,
        }
    }

    pub fn is_ret(&self) -> bool {
        matches!(self, ITree::Ret(_))
    }

    pub fn is_sil(&self) -> bool {
        matches!(self, ITree::Sil(_))
    }

    pub fn is_vis(&self) -> bool {
        matches!(self, ITree::Vis(_))
    }

    /// Stable trees are not silent steps.
    pub fn is_stable(&self) -> bool {
        !self.is_sil()
    }

    pub fn is_stop(&self) -> bool {
        matches!(self, ITree::Vis(m) if m.is_empty())
    }

    /// Events offered by a `Vis` node, in event order.
    pub fn menu(&self) -> Option<Vec<E>> {
        match self {
            ITree::Vis(m) => Some(m.keys().cloned().collect()),
            _ => None,
        }
    }

    /// Follows `event` from a `Vis` node.
    pub fn after(&self, event: &E) -> Option<ITree<E, R>> {
        match self {
            ITree::Vis(m) => m.get(event).map(|l| l.force().clone()),
            _ => None,
        }
    }
}

impl<E: fmt::Debug, R: fmt::Debug> fmt::Debug for ITree<E, R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ITree::Ret(r) => write!(f, "Ret({r:?})"),
            ITree::Sil(_) => f.write_str("Sil(..)"),
            ITree::Vis(m) => {
                f.write_str("Vis")?;
                f.debug_set().entries(m.keys()).finish()
            }
        }
    }
}

type Thunk<E, R> = Box<dyn FnOnce() -> ITree<E, R> + Send>;

struct Cell<E, R> {
    value: OnceLock<ITree<E, R>>,
    thunk: Mutex<Option<Thunk<E, R>>>,
}

/// A deferred, memoized subtree.
///
/// Demanding a cell twice returns the same tree. Cells are shared by cloning
/// and are safe to force from several threads.
pub struct Lazy<E, R>(Arc<Cell<E, R>>);

impl<E, R> Clone for Lazy<E, R> {
    fn clone(&self) -> Self {
        Lazy(Arc::clone(&self.0))
    }
}

impl<E, R> Lazy<E, R> {
    pub fn new(thunk: impl FnOnce() -> ITree<E, R> + Send + 'static) -> Self {
        Lazy(Arc::new(Cell {
            value: OnceLock::new(),
            thunk: Mutex::new(Some(Box::new(thunk))),
        }))
    }

    pub fn ready(tree: ITree<E, R>) -> Self {
        let value = OnceLock::new();
        let _ = value.set(tree);
        Lazy(Arc::new(Cell {
            value,
            thunk: Mutex::new(None),
        }))
    }

    /// Builds a tree that refers to itself through the cell handed to
    /// `build`. Used for the cyclic trees `div` and `run`, whose revisits can
    /// then be recognised by cell identity.
    ///
    /// The cycle is never reclaimed.
    pub fn tie(build: impl FnOnce(Lazy<E, R>) -> ITree<E, R>) -> ITree<E, R>
    where
        E: Clone,
        R: Clone,
    {
        let cell = Lazy(Arc::new(Cell {
            value: OnceLock::new(),
            thunk: Mutex::new(None),
        }));
        let tree = build(cell.clone());
        let _ = cell.0.value.set(tree.clone());
        tree
    }

    pub fn force(&self) -> &ITree<E, R> {
        self.0.value.get_or_init(|| {
            let thunk = self
                .0
                .thunk
                .lock()
                .expect("lazy cell poisoned")
                .take()
                .expect("lazy tree demanded before it was tied");
            thunk()
        })
    }

    pub fn is_forced(&self) -> bool {
        self.0.value.get().is_some()
    }

    /// Address of the shared cell; equal ids mean the same subtree.
    pub fn id(&self) -> usize {
        Arc::as_ptr(&self.0) as *const () as usize
    }

    fn release_into(self, pending: &mut Vec<ITree<E, R>>) {
        if let Ok(mut cell) = Arc::try_unwrap(self.0) {
            if let Some(tree) = cell.value.take() {
                pending.push(tree);
            }
        }
    }
}

// Long memoized silent chains would otherwise be dropped recursively.
impl<E, R> Drop for Cell<E, R> {
    fn drop(&mut self) {
        let Some(tree) = self.value.take() else {
            return;
        };
        let mut pending = vec![tree];
        while let Some(tree) = pending.pop() {
            match tree {
                ITree::Ret(_) => {}
                ITree::Sil(lazy) => lazy.release_into(&mut pending),
                ITree::Vis(map) => {
                    if let Some(entries) = map.try_into_entries() {
                        for (_, lazy) in entries {
                            lazy.release_into(&mut pending);
                        }
                    }
                }
            }
        }
    }
}

/// Strips up to `fuel` leading silent steps. Returns the residual and the
/// number of steps taken. Stops early on a stable node, or when a silent step
/// revisits a cell already seen in the chain (a certain divergence).
pub fn settle<E: Event, R: Data>(tree: &ITree<E, R>, fuel: usize) -> Settled<E, R> {
    let mut current = tree.clone();
    let mut taus = 0;
    let mut seen: HashSet<usize> = HashSet::new();
    loop {
        match &current {
            ITree::Sil(lazy) => {
                if !seen.insert(lazy.id()) {
                    return Settled {
                        tree: current,
                        taus,
                        outcome: SettleOutcome::Cycle,
                    };
                }
                if taus == fuel {
                    return Settled {
                        tree: current,
                        taus,
                        outcome: SettleOutcome::OutOfFuel,
                    };
                }
                let next = lazy.force().clone();
                current = next;
                taus += 1;
            }
            _ => {
                return Settled {
                    tree: current,
                    taus,
                    outcome: SettleOutcome::Stable,
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SettleOutcome {
    Stable,
    /// Fuel ran out on an unstable node; divergence is possible.
    OutOfFuel,
    /// The silent chain loops back on itself; the tree is `div`.
    Cycle,
}

#[derive(Clone, Debug)]
pub struct Settled<E, R> {
    pub tree: ITree<E, R>,
    pub taus: usize,
    pub outcome: SettleOutcome,
}

impl<E, R> Settled<E, R> {
    pub fn is_stable(&self) -> bool {
        self.outcome == SettleOutcome::Stable
    }
}
