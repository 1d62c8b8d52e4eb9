//! Depth-bounded strong bisimulation.

use std::collections::VecDeque;

use serde::Serialize;

use crate::itree::{Data, Event, ITree, NodeKind};

/// What told two trees apart at the end of a witness trace.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum Observation<E> {
    /// Different node constructors.
    Shape { left: NodeKind, right: NodeKind },
    /// Both returned, with different values (rendered with `Debug`).
    Returns { left: String, right: String },
    /// Different menus.
    Menu { only_left: Vec<E>, only_right: Vec<E> },
    /// One side diverges, the other settles.
    Divergence { left_diverges: bool },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "camelCase")]
pub enum BisimVerdict<E> {
    Equivalent {
        depth_checked: usize,
    },
    Distinguished {
        witness: Vec<E>,
        observation: Observation<E>,
    },
    /// No difference found, but some silent chain outlasted the fuel.
    Inconclusive {
        depth: usize,
        tau_fuel: usize,
        trace: Vec<E>,
    },
}

impl<E> BisimVerdict<E> {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, BisimVerdict::Equivalent { .. })
    }

    pub fn is_distinguished(&self) -> bool {
        matches!(self, BisimVerdict::Distinguished { .. })
    }

    pub fn is_inconclusive(&self) -> bool {
        matches!(self, BisimVerdict::Inconclusive { .. })
    }
}

pub(crate) fn menu_difference<E: Event, A, B>(
    f: &crate::emap::EventMap<E, A>,
    g: &crate::emap::EventMap<E, B>,
) -> Option<Observation<E>> {
    let only_left: Vec<E> = f.keys().filter(|e| !g.contains_key(e)).cloned().collect();
    let only_right: Vec<E> = g.keys().filter(|e| !f.contains_key(e)).cloned().collect();
    if only_left.is_empty() && only_right.is_empty() {
        None
    } else {
        Some(Observation::Menu { only_left, only_right })
    }
}

/// Compares `p` and `q` node by node up to `depth` visible events. Silent
/// steps must be matched one for one; a pair of silent chains longer than
/// `tau_fuel` leaves the comparison open. A mismatch found anywhere wins over
/// an open branch, and the reported witness is a shortest one.
pub fn bounded_bisim<E: Event, R: Data>(p: &ITree<E, R>, q: &ITree<E, R>, depth: usize, tau_fuel: usize) -> BisimVerdict<E> {
    let mut queue: VecDeque<(ITree<E, R>, ITree<E, R>, Vec<E>)> = VecDeque::new();
    queue.push_back((p.clone(), q.clone(), Vec::new()));
    let mut open: Option<Vec<E>> = None;

    while let Some((mut p, mut q, trace)) = queue.pop_front() {
        let mut taus = 0;
        loop {
            match (&p, &q) {
                (ITree::Sil(p1), ITree::Sil(q1)) => {
                    if taus == tau_fuel {
                        if open.is_none() {
                            open = Some(trace.clone());
                        }
                        break;
                    }
                    let (np, nq) = (p1.force().clone(), q1.force().clone());
                    p = np;
                    q = nq;
                    taus += 1;
                }
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
                    break;
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
                    break;
                }
                _ => {
                    return BisimVerdict::Distinguished {
                        witness: trace,
                        observation: Observation::Shape {
                            left: p.kind(),
                            right: q.kind(),
                        },
                    }
                }
            }
        }
    }

    match open {
        Some(trace) => BisimVerdict::Inconclusive { depth, tau_fuel, trace },
        None => BisimVerdict::Equivalent { depth_checked: depth },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinators::diverge;
    use crate::csp::{event, prefix};

    #[test]
    fn equal_returns() {
        let v = bounded_bisim::<u8, i32>(&ITree::Ret(5), &ITree::Ret(5), 1, 0);
        assert_eq!(v, BisimVerdict::Equivalent { depth_checked: 1 });
    }

    #[test]
    fn different_returns() {
        let v = bounded_bisim::<u8, i32>(&ITree::Ret(1), &ITree::Ret(2), 1, 0);
        assert!(v.is_distinguished());
    }

    #[test]
    fn div_never_settles() {
        for (k, f) in [(0, 0), (3, 10), (10, 100)] {
            let v = bounded_bisim::<u8, ()>(&diverge(), &diverge(), k, f);
            assert!(v.is_inconclusive(), "{k} {f}: {v:?}");
        }
    }

    #[test]
    fn witness_is_shortest() {
        let p = prefix('a', prefix('b', event('c')));
        let q = prefix('a', prefix('b', event('d')));
        match bounded_bisim(&p, &q, 5, 0) {
            BisimVerdict::Distinguished { witness, observation } => {
                assert_eq!(witness, vec!['a', 'b']);
                assert_eq!(
                    observation,
                    Observation::Menu {
                        only_left: vec!['c'],
                        only_right: vec!['d']
                    }
                );
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn silent_steps_are_counted_strongly() {
        let p: ITree<u8, i32> = ITree::tau(ITree::Ret(1));
        let q: ITree<u8, i32> = ITree::Ret(1);
        assert!(bounded_bisim(&p, &q, 1, 5).is_distinguished());
    }
}
