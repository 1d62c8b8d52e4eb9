//! CSP operators: prefixes, guards, external choice, parallel composition
//! and hiding.

use crate::combinators::{bind, ktree};
use crate::emap::{merge, EventMap, EventSet, Merged};
use crate::itree::{Data, Event, ITree, Lazy};
use crate::prism::Prism;

/// Offers `c.v` for each `v` in `values` and returns the chosen value.
pub fn inp<E: Event, V: Data>(c: &Prism<V, E>, values: impl IntoIterator<Item = V>) -> ITree<E, V> {
    ITree::Vis(c.lift(values, |v| Lazy::ready(ITree::Ret(v))))
}

pub fn outp<E: Event, V: Data>(c: &Prism<V, E>, value: V) -> ITree<E, ()> {
    ITree::Vis(EventMap::singleton(c.build(value), Lazy::ready(ITree::Ret(()))))
}

/// A single synchronisation on a unit-valued channel.
pub fn sync<E: Event>(c: &Prism<(), E>) -> ITree<E, ()> {
    outp(c, ())
}

/// The event `e` alone, without a channel.
pub fn event<E: Event>(e: E) -> ITree<E, ()> {
    ITree::Vis(EventMap::singleton(e, Lazy::ready(ITree::Ret(()))))
}

pub fn guard<E: Event>(b: bool) -> ITree<E, ()> {
    if b {
        ITree::Ret(())
    } else {
        ITree::stop()
    }
}

pub fn skip<E: Event>() -> ITree<E, ()> {
    ITree::Ret(())
}

/// `e → p`.
pub fn prefix<E: Event, R: Data>(e: E, p: ITree<E, R>) -> ITree<E, R> {
    ITree::Vis(EventMap::singleton(e, Lazy::ready(p)))
}

/// `e → p` with `p` built on demand.
pub fn prefix_lazy<E: Event, R: Data>(e: E, p: impl FnOnce() -> ITree<E, R> + Send + 'static) -> ITree<E, R> {
    ITree::Vis(EventMap::singleton(e, Lazy::new(p)))
}

/// `c?x:values → k(x)`.
pub fn input_prefix<E: Event, V: Data, R: Data>(
    c: &Prism<V, E>,
    values: impl IntoIterator<Item = V>,
    k: impl Fn(V) -> ITree<E, R> + Send + Sync + 'static,
) -> ITree<E, R> {
    bind(inp(c, values), ktree(k))
}

/// `c!v → p`.
pub fn output_prefix<E: Event, V: Data, R: Data>(c: &Prism<V, E>, value: V, p: ITree<E, R>) -> ITree<E, R> {
    prefix(c.build(value), p)
}

/// External choice. Silent steps on either side are taken first; an event
/// offered by both sides is withdrawn.
pub fn extchoice<E: Event, R: Data>(p: ITree<E, R>, q: ITree<E, R>) -> ITree<E, R> {
    match (p, q) {
        (ITree::Vis(f), ITree::Vis(g)) => ITree::Vis(f.symmetric_difference(&g)),
        (ITree::Sil(p1), q) => ITree::Sil(Lazy::new(move || extchoice(p1.force().clone(), q))),
        (p, ITree::Sil(q1)) => ITree::Sil(Lazy::new(move || extchoice(p, q1.force().clone()))),
        (ITree::Ret(x), ITree::Vis(_)) => ITree::Ret(x),
        (ITree::Vis(_), ITree::Ret(y)) => ITree::Ret(y),
        (ITree::Ret(x), ITree::Ret(y)) => {
            if x == y {
                ITree::Ret(x)
            } else {
                ITree::stop()
            }
        }
    }
}

/// Right-nested choice over any number of branches; `stop` when empty.
pub fn extchoice_all<E: Event, R: Data>(branches: impl IntoIterator<Item = ITree<E, R>>) -> ITree<E, R> {
    let mut branches: Vec<ITree<E, R>> = branches.into_iter().collect();
    let Some(mut acc) = branches.pop() else {
        return ITree::stop();
    };
    while let Some(b) = branches.pop() {
        acc = extchoice(b, acc);
    }
    acc
}

/// Generalised parallel composition synchronising on `sync`, returning both
/// results.
pub fn gpar<E: Event, A: Data, B: Data>(p: ITree<E, A>, sync: EventSet<E>, q: ITree<E, B>) -> ITree<E, (A, B)> {
    match (p, q) {
        (ITree::Vis(f), ITree::Vis(g)) => {
            let f_tree = ITree::Vis(f.clone());
            let g_tree = ITree::Vis(g.clone());
            let lifted_f = f.map(|_, l| Either::L(l.clone()));
            let lifted_g = g.map(|_, l| Either::R(l.clone()));
            let merged = merge(&sync, &lifted_f, &lifted_g);
            ITree::Vis(merged.map(|_, tag| {
                let sync = sync.clone();
                match tag.clone() {
                    Merged::Left(Either::L(p1)) => {
                        let g_tree = g_tree.clone();
                        Lazy::new(move || gpar(p1.force().clone(), sync, g_tree))
                    }
                    Merged::Right(Either::R(q1)) => {
                        let f_tree = f_tree.clone();
                        Lazy::new(move || gpar(f_tree, sync, q1.force().clone()))
                    }
                    Merged::Both(Either::L(p1), Either::R(q1)) => {
                        Lazy::new(move || gpar(p1.force().clone(), sync, q1.force().clone()))
                    }
                    _ => unreachable!("merge keeps sides apart"),
                }
            }))
        }
        (ITree::Sil(p1), q) => ITree::Sil(Lazy::new(move || gpar(p1.force().clone(), sync, q))),
        (p, ITree::Sil(q1)) => ITree::Sil(Lazy::new(move || gpar(p, sync, q1.force().clone()))),
        (ITree::Ret(x), ITree::Ret(y)) => ITree::Ret((x, y)),
        (ITree::Ret(x), ITree::Vis(g)) => ITree::Vis(g.map(|_, q1| {
            let (x, q1, sync) = (x.clone(), q1.clone(), sync.clone());
            Lazy::new(move || gpar(ITree::Ret(x), sync, q1.force().clone()))
        })),
        (ITree::Vis(f), ITree::Ret(y)) => ITree::Vis(f.map(|_, p1| {
            let (y, p1, sync) = (y.clone(), p1.clone(), sync.clone());
            Lazy::new(move || gpar(p1.force().clone(), sync, ITree::Ret(y)))
        })),
    }
}

// Continuations of the two sides have different result types, so they are
// tagged before merging.
#[derive(Clone)]
enum Either<L, R> {
    L(L),
    R(R),
}

/// Parallel composition discarding both results.
pub fn par<E: Event, A: Data, B: Data>(p: ITree<E, A>, sync: EventSet<E>, q: ITree<E, B>) -> ITree<E, ()> {
    bind(gpar(p, sync, q), ktree(|_| ITree::Ret(())))
}

pub fn interleave<E: Event, A: Data, B: Data>(p: ITree<E, A>, q: ITree<E, B>) -> ITree<E, ()> {
    par(p, EventSet::empty(), q)
}

/// Hides the events of `hidden`. A menu with exactly one hidden event takes
/// it silently; with two or more it deadlocks.
pub fn hide<E: Event, R: Data>(p: ITree<E, R>, hidden: EventSet<E>) -> ITree<E, R> {
    match p {
        ITree::Ret(x) => ITree::Ret(x),
        ITree::Sil(p1) => ITree::Sil(Lazy::new(move || hide(p1.force().clone(), hidden))),
        ITree::Vis(f) => {
            let mut enabled = f.iter().filter(|(e, _)| hidden.contains(e));
            match (enabled.next(), enabled.next()) {
                (None, _) => ITree::Vis(f.map(|_, p1| {
                    let (p1, hidden) = (p1.clone(), hidden.clone());
                    Lazy::new(move || hide(p1.force().clone(), hidden))
                })),
                (Some((_, p1)), None) => {
                    let p1 = p1.clone();
                    ITree::Sil(Lazy::new(move || hide(p1.force().clone(), hidden)))
                }
                _ => ITree::stop(),
            }
        }
    }
}

/// Hides the sets one after another, so earlier sets take priority when
/// several hidden events are enabled at once.
pub fn hide_seq<E: Event, R: Data>(p: ITree<E, R>, priority: impl IntoIterator<Item = EventSet<E>>) -> ITree<E, R> {
    priority.into_iter().fold(p, hide)
}
