//! Channels as prisms into the event type.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::emap::EventMap;
use crate::itree::{Data, Event};

/// Builds events of one channel from values, and recognises them again.
pub struct Prism<V, E> {
    name: Arc<str>,
    build: Arc<dyn Fn(V) -> E + Send + Sync>,
    matcher: Arc<dyn Fn(&E) -> Option<V> + Send + Sync>,
}

impl<V, E> Clone for Prism<V, E> {
    fn clone(&self) -> Self {
        Prism {
            name: Arc::clone(&self.name),
            build: Arc::clone(&self.build),
            matcher: Arc::clone(&self.matcher),
        }
    }
}

impl<V, E> fmt::Debug for Prism<V, E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Prism({})", self.name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PrismLaw {
    /// `match(build v) = Some v` failed for the value.
    BuildMatch(String),
    /// `match e = Some v` but `build v != e`.
    MatchBuild(String),
}

impl<V: Data, E: Event> Prism<V, E> {
    pub fn new(
        name: impl Into<Arc<str>>,
        build: impl Fn(V) -> E + Send + Sync + 'static,
        matcher: impl Fn(&E) -> Option<V> + Send + Sync + 'static,
    ) -> Self {
        Prism {
            name: name.into(),
            build: Arc::new(build),
            matcher: Arc::new(matcher),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn build(&self, value: V) -> E {
        (self.build)(value)
    }

    pub fn matches(&self, event: &E) -> Option<V> {
        (self.matcher)(event)
    }

    pub fn owns(&self, event: &E) -> bool {
        self.matches(event).is_some()
    }

    /// The menu `{build v ↦ k v | v ∈ values}`.
    pub fn lift<T: Clone>(&self, values: impl IntoIterator<Item = V>, mut k: impl FnMut(V) -> T) -> EventMap<E, T> {
        let mut seen = BTreeSet::new();
        let mut entries = Vec::new();
        for v in values {
            let e = self.build(v.clone());
            if seen.insert(e.clone()) {
                entries.push((e, k(v)));
            }
        }
        EventMap::from_entries(entries).expect("keys are deduplicated")
    }

    /// Checks both prism laws on the given samples.
    pub fn check_laws(&self, values: &[V], events: &[E]) -> Result<(), PrismLaw> {
        for v in values {
            if self.matches(&self.build(v.clone())).as_ref() != Some(v) {
                return Err(PrismLaw::BuildMatch(format!("{v:?}")));
            }
        }
        for e in events {
            if let Some(v) = self.matches(e) {
                if &self.build(v) != e {
                    return Err(PrismLaw::MatchBuild(format!("{e:?}")));
                }
            }
        }
        Ok(())
    }
}
