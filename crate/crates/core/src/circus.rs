//! State: lenses, substitutions and state spaces, and the imperative and
//! Circus operators over state transformers.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::combinators::{bind, diverge, kcomp, ktree, Expr, HTree, KTree};
use crate::csp::{extchoice, gpar, guard, inp, outp};
use crate::emap::{EventMap, EventSet};
use crate::error::ConstructionError;
use crate::itree::{Data, Event, ITree, Lazy};
use crate::prism::Prism;

/// A view of a region of the state.
///
/// `footprint` names the primitive variables the lens touches. Two lenses
/// with disjoint, non-empty footprints are treated as independent.
pub struct Lens<V, S> {
    name: Arc<str>,
    footprint: Arc<BTreeSet<String>>,
    get: Arc<dyn Fn(&S) -> V + Send + Sync>,
    put: Arc<dyn Fn(&S, V) -> S + Send + Sync>,
}

impl<V, S> Clone for Lens<V, S> {
    fn clone(&self) -> Self {
        Lens {
            name: Arc::clone(&self.name),
            footprint: Arc::clone(&self.footprint),
            get: Arc::clone(&self.get),
            put: Arc::clone(&self.put),
        }
    }
}

impl<V, S> fmt::Debug for Lens<V, S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Lens({})", self.name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LensLaw {
    PutGet(String),
    GetPut(String),
    PutPut(String),
    PutsCommute(String),
    CrossGet(String),
}

impl<V: Data, S: Data> Lens<V, S> {
    pub fn new(
        name: impl Into<String>,
        get: impl Fn(&S) -> V + Send + Sync + 'static,
        put: impl Fn(&S, V) -> S + Send + Sync + 'static,
    ) -> Self {
        let name: String = name.into();
        Lens {
            footprint: Arc::new(BTreeSet::from([name.clone()])),
            name: name.into(),
            get: Arc::new(get),
            put: Arc::new(put),
        }
    }

    /// Replaces the footprint, for lenses that span several variables.
    pub fn with_footprint(mut self, vars: impl IntoIterator<Item = String>) -> Self {
        self.footprint = Arc::new(vars.into_iter().collect());
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn footprint(&self) -> &BTreeSet<String> {
        &self.footprint
    }

    pub fn get(&self, s: &S) -> V {
        (self.get)(s)
    }

    pub fn put(&self, s: &S, v: V) -> S {
        (self.put)(s, v)
    }

    /// Declared independence: both footprints non-empty and disjoint.
    pub fn independent<W>(&self, other: &Lens<W, S>) -> bool {
        !self.footprint.is_empty() && !other.footprint.is_empty() && self.footprint.is_disjoint(&other.footprint)
    }

    /// Copies the region this lens views from `source` into `target`.
    pub fn override_from(&self, target: &S, source: &S) -> S {
        self.put(target, self.get(source))
    }

    /// Checks the three well-behavedness laws on samples.
    pub fn check_laws(&self, states: &[S], values: &[V]) -> Result<(), LensLaw> {
        for s in states {
            if &self.put(s, self.get(s)) != s {
                return Err(LensLaw::GetPut(format!("{s:?}")));
            }
            for v in values {
                let t = self.put(s, v.clone());
                if &self.get(&t) != v {
                    return Err(LensLaw::PutGet(format!("{s:?} <- {v:?}")));
                }
                for w in values {
                    if self.put(&t, w.clone()) != self.put(s, w.clone()) {
                        return Err(LensLaw::PutPut(format!("{s:?} <- {v:?}, {w:?}")));
                    }
                }
            }
        }
        Ok(())
    }

    /// Spot-checks that this lens and `other` behave independently.
    pub fn check_independence<W: Data>(&self, other: &Lens<W, S>, states: &[S], mine: &[V], theirs: &[W]) -> Result<(), LensLaw> {
        for s in states {
            for v in mine {
                for w in theirs {
                    let a = other.put(&self.put(s, v.clone()), w.clone());
                    let b = self.put(&other.put(s, w.clone()), v.clone());
                    if a != b {
                        return Err(LensLaw::PutsCommute(format!("{s:?}")));
                    }
                }
                let t = self.put(s, v.clone());
                if other.get(&t) != other.get(s) {
                    return Err(LensLaw::CrossGet(format!("{s:?} <- {v:?}")));
                }
            }
        }
        Ok(())
    }
}

type Maplet<S> = Arc<dyn Fn(&S, S) -> S + Send + Sync>;

/// A simultaneous state update built from maplets `[x₁ ↝ e₁, …]`. Each
/// expression reads the state before the update.
pub struct Subst<S> {
    maplets: Vec<Maplet<S>>,
    targets: Vec<BTreeSet<String>>,
}

impl<S> Clone for Subst<S> {
    fn clone(&self) -> Self {
        Subst {
            maplets: self.maplets.clone(),
            targets: self.targets.clone(),
        }
    }
}

impl<S: Data> Default for Subst<S> {
    fn default() -> Self {
        Self::identity()
    }
}

impl<S: Data> Subst<S> {
    pub fn identity() -> Self {
        Subst {
            maplets: Vec::new(),
            targets: Vec::new(),
        }
    }

    /// Adds `x ↝ e`. The target must be independent of every earlier one.
    pub fn with<V: Data>(mut self, x: &Lens<V, S>, e: Expr<S, V>) -> Result<Self, ConstructionError> {
        if self.targets.iter().any(|t| !t.is_disjoint(x.footprint()) || t.is_empty()) || x.footprint().is_empty() {
            return Err(ConstructionError::OverlappingAssignment(x.name().to_string()));
        }
        let x = x.clone();
        self.targets.push(x.footprint().clone());
        self.maplets.push(Arc::new(move |before: &S, acc: S| x.put(&acc, e(before))));
        Ok(self)
    }

    /// An arbitrary update function, for updates that are not maplets.
    pub fn from_fn(f: impl Fn(&S) -> S + Send + Sync + 'static) -> Self {
        Subst {
            maplets: vec![Arc::new(move |before: &S, _acc: S| f(before))],
            targets: vec![BTreeSet::new()],
        }
    }

    pub fn apply(&self, s: &S) -> S {
        self.maplets.iter().fold(s.clone(), |acc, m| m(s, acc))
    }

    /// `other ∘ self`: apply `self`, then `other`.
    pub fn then(&self, other: &Subst<S>) -> Subst<S> {
        let (a, b) = (self.clone(), other.clone());
        Subst::from_fn(move |s| b.apply(&a.apply(s)))
    }
}

/// A finite enumeration of states, with an optional invariant and an
/// optional domain test for rejecting states that leave the space.
pub struct StateSpace<S> {
    states: Vec<S>,
    invariant: Option<Expr<S, bool>>,
    domain: Option<Expr<S, bool>>,
}

impl<S> Clone for StateSpace<S>
where
    S: Clone,
{
    fn clone(&self) -> Self {
        StateSpace {
            states: self.states.clone(),
            invariant: self.invariant.clone(),
            domain: self.domain.clone(),
        }
    }
}

impl<S: Data + Ord> StateSpace<S> {
    /// Keeps the first occurrence of each state.
    pub fn new(states: impl IntoIterator<Item = S>) -> Self {
        let mut seen = BTreeSet::new();
        let states = states.into_iter().filter(|s| seen.insert(s.clone())).collect();
        StateSpace {
            states,
            invariant: None,
            domain: None,
        }
    }

    pub fn with_invariant(mut self, inv: Expr<S, bool>) -> Self {
        self.invariant = Some(inv);
        self
    }

    pub fn with_domain(mut self, domain: Expr<S, bool>) -> Self {
        self.domain = Some(domain);
        self
    }

    pub fn states(&self) -> &[S] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn holds_invariant(&self, s: &S) -> bool {
        self.invariant.as_ref().is_none_or(|inv| inv(s))
    }

    pub fn in_domain(&self, s: &S) -> bool {
        self.domain.as_ref().is_none_or(|d| d(s))
    }

    /// States satisfying the invariant.
    pub fn restricted(&self) -> StateSpace<S> {
        StateSpace {
            states: self.states.iter().filter(|s| self.holds_invariant(s)).cloned().collect(),
            invariant: self.invariant.clone(),
            domain: self.domain.clone(),
        }
    }
}

pub fn assigns<E: Event, S: Data>(sigma: Subst<S>) -> HTree<E, S> {
    Arc::new(move |s| ITree::Ret(sigma.apply(&s)))
}

pub fn assign<E: Event, S: Data, V: Data>(x: &Lens<V, S>, e: Expr<S, V>) -> HTree<E, S> {
    let x = x.clone();
    Arc::new(move |s| {
        let v = e(&s);
        ITree::Ret(x.put(&s, v))
    })
}

pub fn skip_h<E: Event, S: Data>() -> HTree<E, S> {
    Arc::new(ITree::Ret)
}

pub fn stop_h<E: Event, S: Data>() -> HTree<E, S> {
    Arc::new(|_| ITree::stop())
}

pub fn div_h<E: Event, S: Data>() -> HTree<E, S> {
    Arc::new(|_| diverge())
}

pub fn seq<E: Event, S: Data>(p: HTree<E, S>, q: HTree<E, S>) -> HTree<E, S> {
    kcomp(p, q)
}

pub fn cond<E: Event, S: Data>(then: HTree<E, S>, b: Expr<S, bool>, otherwise: HTree<E, S>) -> HTree<E, S> {
    Arc::new(move |s| if b(&s) { then(s) } else { otherwise(s) })
}

/// `⦃b⦄`: continue when `b` holds, deadlock otherwise.
pub fn test<E: Event, S: Data>(b: Expr<S, bool>) -> HTree<E, S> {
    cond(skip_h(), b, stop_h())
}

/// Nondeterministic choice over `indices`, resolved by the environment
/// through the `nd` channel.
pub fn ndet_choice<E: Event, S: Data>(
    nd: &Prism<usize, E>,
    indices: impl IntoIterator<Item = usize>,
    k: impl Fn(usize) -> HTree<E, S> + Send + Sync + 'static,
) -> HTree<E, S> {
    let nd = nd.clone();
    let indices: Vec<usize> = indices.into_iter().collect();
    let k = Arc::new(k);
    Arc::new(move |s: S| {
        let k = Arc::clone(&k);
        ITree::Vis(nd.lift(indices.iter().copied(), |i| {
            let (k, s) = (Arc::clone(&k), s.clone());
            Lazy::new(move || k(i)(s))
        }))
    })
}

/// `C₁ ⊓ C₂`, offered as `nd.0` and `nd.1`.
pub fn sqcap<E: Event, S: Data>(nd: &Prism<usize, E>, c1: HTree<E, S>, c2: HTree<E, S>) -> HTree<E, S> {
    ndet_choice(nd, [0, 1], move |i| if i == 0 { c1.clone() } else { c2.clone() })
}

/// `c?v:A(s) → k(v)`.
pub fn c_prefix_in<E: Event, S: Data, V: Data>(
    c: &Prism<V, E>,
    values: Expr<S, Vec<V>>,
    k: impl Fn(V) -> HTree<E, S> + Send + Sync + 'static,
) -> HTree<E, S> {
    let c = c.clone();
    let k = Arc::new(k);
    Arc::new(move |s: S| {
        let k = Arc::clone(&k);
        bind(inp(&c, values(&s)), ktree(move |v| k(v)(s.clone())))
    })
}

/// `c!e(s) → k`.
pub fn c_prefix_out<E: Event, S: Data, V: Data>(c: &Prism<V, E>, e: Expr<S, V>, k: HTree<E, S>) -> HTree<E, S> {
    let c = c.clone();
    Arc::new(move |s: S| {
        let k = k.clone();
        let v = e(&s);
        bind(outp(&c, v), ktree(move |_| k(s.clone())))
    })
}

/// A single event `e(s)` followed by `k`.
pub fn c_event<E: Event, S: Data>(e: Expr<S, E>, k: HTree<E, S>) -> HTree<E, S> {
    Arc::new(move |s: S| {
        let ev = e(&s);
        let k = k.clone();
        ITree::Vis(EventMap::singleton(ev, Lazy::new(move || k(s))))
    })
}

pub fn c_extchoice<E: Event, S: Data>(p: HTree<E, S>, q: HTree<E, S>) -> HTree<E, S> {
    Arc::new(move |s: S| extchoice(p(s.clone()), q(s)))
}

pub fn c_guard<E: Event, S: Data>(b: Expr<S, bool>, p: HTree<E, S>) -> HTree<E, S> {
    Arc::new(move |s: S| {
        let p = p.clone();
        bind(guard(b(&s)), ktree(move |_| p(s.clone())))
    })
}

/// Parallel composition of state transformers. Each side runs on a copy of
/// the state; afterwards the region named by `ns1` is taken from the left
/// result and the region named by `ns2` from the right.
pub fn frame_par<E: Event, S: Data, V1: Data, V2: Data>(
    p: HTree<E, S>,
    ns1: &Lens<V1, S>,
    sync: EventSet<E>,
    ns2: &Lens<V2, S>,
    q: HTree<E, S>,
) -> Result<HTree<E, S>, ConstructionError> {
    if !ns1.independent(ns2) {
        return Err(ConstructionError::DependentLenses(ns1.name().to_string(), ns2.name().to_string()));
    }
    let (ns1, ns2) = (ns1.clone(), ns2.clone());
    Ok(Arc::new(move |s: S| {
        let (ns1, ns2) = (ns1.clone(), ns2.clone());
        let base = s.clone();
        let k: KTree<E, (S, S), S> = ktree(move |(s1, s2): (S, S)| {
            let merged = ns1.override_from(&base, &s1);
            ITree::Ret(ns2.override_from(&merged, &s2))
        });
        bind(gpar(p(s.clone()), sync.clone(), q(s)), k)
    }))
}
