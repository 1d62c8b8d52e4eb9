//! Finite maps from events to continuations, and event sets.
//!
//! A map is a sorted association list with unique keys. Override and
//! restriction are linear merges over the sorted entries.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::error::ConstructionError;

pub struct EventMap<E, T> {
    entries: Arc<Vec<(E, T)>>,
}

impl<E, T> Clone for EventMap<E, T> {
    fn clone(&self) -> Self {
        EventMap {
            entries: Arc::clone(&self.entries),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Restrict {
    Keep,
    Drop,
}

impl<E, T> EventMap<E, T> {
    pub fn empty() -> Self {
        EventMap {
            entries: Arc::new(Vec::new()),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&E, &T)> {
        self.entries.iter().map(|(e, t)| (e, t))
    }

    pub fn keys(&self) -> impl Iterator<Item = &E> {
        self.entries.iter().map(|(e, _)| e)
    }

    pub fn values(&self) -> impl Iterator<Item = &T> {
        self.entries.iter().map(|(_, t)| t)
    }

    pub fn get(&self, event: &E) -> Option<&T>
    where
        E: Ord,
    {
        self.entries
            .binary_search_by(|(k, _)| k.cmp(event))
            .ok()
            .map(|i| &self.entries[i].1)
    }

    pub fn contains_key(&self, event: &E) -> bool
    where
        E: Ord,
    {
        self.get(event).is_some()
    }

    /// Takes the entries out if this is the only handle on them.
    pub(crate) fn try_into_entries(self) -> Option<Vec<(E, T)>> {
        Arc::try_unwrap(self.entries).ok()
    }

    fn from_sorted(entries: Vec<(E, T)>) -> Self {
        EventMap {
            entries: Arc::new(entries),
        }
    }
}

impl<E: Ord + Clone + fmt::Debug, T: Clone> EventMap<E, T> {
    pub fn singleton(event: E, value: T) -> Self {
        Self::from_sorted(vec![(event, value)])
    }

    /// Builds a map from unordered entries. Repeated events are rejected.
    pub fn from_entries(mut entries: Vec<(E, T)>) -> Result<Self, ConstructionError> {
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        if let Some(w) = entries.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(ConstructionError::DuplicateEvent(format!("{:?}", w[0].0)));
        }
        Ok(Self::from_sorted(entries))
    }

    /// One entry per distinct key; later repeats of a key are ignored.
    pub fn from_keys(keys: impl IntoIterator<Item = E>, mut value: impl FnMut(&E) -> T) -> Self {
        let keys: BTreeSet<E> = keys.into_iter().collect();
        Self::from_sorted(
            keys.into_iter()
                .map(|k| {
                    let v = value(&k);
                    (k, v)
                })
                .collect(),
        )
    }

    /// Right-biased union: entries of `other` win on shared keys.
    pub fn override_with(&self, other: &Self) -> Self {
        let (a, b) = (&*self.entries, &*other.entries);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push(b[j].clone());
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Self::from_sorted(out)
    }

    /// Keeps or drops the entries whose key is in `set`.
    pub fn restrict(&self, mode: Restrict, set: &EventSet<E>) -> Self {
        self.restrict_by(mode, |e| set.contains(e))
    }

    pub fn restrict_by(&self, mode: Restrict, mut member: impl FnMut(&E) -> bool) -> Self {
        let keep = |e: &E, member: &mut dyn FnMut(&E) -> bool| match mode {
            Restrict::Keep => member(e),
            Restrict::Drop => !member(e),
        };
        Self::from_sorted(
            self.entries
                .iter()
                .filter(|(e, _)| keep(e, &mut member))
                .cloned()
                .collect(),
        )
    }

    pub fn map<U>(&self, mut f: impl FnMut(&E, &T) -> U) -> EventMap<E, U> {
        EventMap::from_sorted(self.entries.iter().map(|(e, t)| (e.clone(), f(e, t))).collect())
    }

    /// Entries whose key occurs in exactly one of the two maps.
    pub fn symmetric_difference(&self, other: &Self) -> Self {
        self.restrict_by(Restrict::Drop, |e| other.contains_key(e))
            .override_with(&other.restrict_by(Restrict::Drop, |e| self.contains_key(e)))
    }

    pub fn key_set(&self) -> BTreeSet<E> {
        self.keys().cloned().collect()
    }
}

impl<E: fmt::Debug, T: fmt::Debug> fmt::Debug for EventMap<E, T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.iter()).finish()
    }
}

/// Where an event falls when two menus are combined under a synchronisation
/// set.
#[derive(Clone, Debug)]
pub enum Merged<T> {
    Left(T),
    Right(T),
    Both(T, T),
}

/// Combines two menus for parallel composition. Events outside `sync` are
/// taken by whichever side offers them alone; events in `sync` need both.
/// Unsynchronised events offered by both sides are dropped.
pub fn merge<E, T>(sync: &EventSet<E>, left: &EventMap<E, T>, right: &EventMap<E, T>) -> EventMap<E, Merged<T>>
where
    E: Ord + Clone + fmt::Debug,
    T: Clone,
{
    let (a, b) = (&*left.entries, &*right.entries);
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let ord = match (a.get(i), b.get(j)) {
            (Some(x), Some(y)) => x.0.cmp(&y.0),
            (Some(_), None) => std::cmp::Ordering::Less,
            _ => std::cmp::Ordering::Greater,
        };
        match ord {
            std::cmp::Ordering::Less => {
                let (e, t) = &a[i];
                if !sync.contains(e) {
                    out.push((e.clone(), Merged::Left(t.clone())));
                }
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                let (e, t) = &b[j];
                if !sync.contains(e) {
                    out.push((e.clone(), Merged::Right(t.clone())));
                }
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                let (e, t) = &a[i];
                if sync.contains(e) {
                    out.push((e.clone(), Merged::Both(t.clone(), b[j].1.clone())));
                }
                i += 1;
                j += 1;
            }
        }
    }
    EventMap::from_sorted(out)
}

/// A set of events used for synchronisation and hiding.
///
/// Either an explicit finite set or a membership test, so that a whole
/// channel can be named without enumerating its values.
pub struct EventSet<E>(Arc<SetRepr<E>>);

enum SetRepr<E> {
    Finite(BTreeSet<E>),
    Predicate {
        test: Box<dyn Fn(&E) -> bool + Send + Sync>,
        label: String,
    },
    Union(EventSet<E>, EventSet<E>),
}

impl<E> Clone for EventSet<E> {
    fn clone(&self) -> Self {
        EventSet(Arc::clone(&self.0))
    }
}

impl<E: Ord> EventSet<E> {
    pub fn empty() -> Self {
        EventSet(Arc::new(SetRepr::Finite(BTreeSet::new())))
    }

    pub fn finite(events: impl IntoIterator<Item = E>) -> Self {
        EventSet(Arc::new(SetRepr::Finite(events.into_iter().collect())))
    }

    pub fn predicate(label: impl Into<String>, test: impl Fn(&E) -> bool + Send + Sync + 'static) -> Self {
        EventSet(Arc::new(SetRepr::Predicate {
            test: Box::new(test),
            label: label.into(),
        }))
    }

    pub fn union(&self, other: &Self) -> Self {
        EventSet(Arc::new(SetRepr::Union(self.clone(), other.clone())))
    }

    pub fn contains(&self, event: &E) -> bool {
        match &*self.0 {
            SetRepr::Finite(s) => s.contains(event),
            SetRepr::Predicate { test, .. } => test(event),
            SetRepr::Union(a, b) => a.contains(event) || b.contains(event),
        }
    }

    pub fn is_empty_finite(&self) -> bool {
        matches!(&*self.0, SetRepr::Finite(s) if s.is_empty())
    }
}

impl<E: fmt::Debug> fmt::Debug for EventSet<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.0 {
            SetRepr::Finite(s) => f.debug_set().entries(s).finish(),
            SetRepr::Predicate { label, .. } => write!(f, "{{{label}}}"),
            SetRepr::Union(a, b) => write!(f, "{a:?} ∪ {b:?}"),
        }
    }
}

impl<E: Ord> FromIterator<E> for EventSet<E> {
    fn from_iter<I: IntoIterator<Item = E>>(iter: I) -> Self {
        EventSet::finite(iter)
    }
}
