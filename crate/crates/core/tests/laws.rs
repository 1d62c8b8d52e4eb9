//! Algebraic laws of the tree monad and the CSP operators, as properties
//! over random finite trees.

use proptest::prelude::*;

use itree_core::combinators::{bind, diverge, iterate, kcomp, ktree, un_sils};
use itree_core::csp::{event, extchoice, hide, interleave, par, skip};
use itree_core::itree::settle;
use itree_core::semantics::{div_free, weak_bisim, DivFreeVerdict};
use itree_core::{bounded_bisim, EventMap, EventSet, ExplorationBudget, ITree, KTree, Lazy};

type T = ITree<u8, u8>;

fn tree() -> impl Strategy<Value = T> {
    let leaf = prop_oneof![(0u8..3).prop_map(ITree::Ret), Just(ITree::stop())];
    leaf.prop_recursive(6, 64, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(ITree::tau),
            proptest::collection::btree_map(0u8..4, inner, 1..4).prop_map(|m| {
                ITree::vis(EventMap::from_entries(m.into_iter().map(|(e, t)| (e, Lazy::ready(t))).collect()).unwrap())
            }),
        ]
    })
}

fn unit_tree() -> impl Strategy<Value = ITree<u8, ()>> {
    tree().prop_map(|t| bind(t, ktree(|_| ITree::Ret(()))))
}

// Continuations are drawn as lookup tables, since closures cannot be shown
// when a case fails.
fn table() -> impl Strategy<Value = Vec<T>> {
    proptest::collection::vec(tree(), 3)
}

fn kont(table: Vec<T>) -> KTree<u8, u8, u8> {
    ktree(move |x: u8| table[x as usize % 3].clone())
}

fn same<R: itree_core::Data>(p: &ITree<u8, R>, q: &ITree<u8, R>) -> Result<(), TestCaseError> {
    let v = bounded_bisim(p, q, 32, 64);
    prop_assert!(v.is_equivalent(), "{:?}", v);
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn monad_laws(p in tree(), k in table(), h in table(), x in 0u8..3) {
        let (k, h) = (kont(k), kont(h));
        same(&bind(ITree::Ret(x), k.clone()), &k(x))?;
        same(&bind(p.clone(), ktree(ITree::Ret)), &p)?;
        same(&bind(bind(p.clone(), k.clone()), h.clone()), &bind(p.clone(), kcomp(k, h)))?;
    }

    #[test]
    fn choice_laws(p in tree(), q in tree()) {
        same(&extchoice(p.clone(), q.clone()), &extchoice(q.clone(), p.clone()))?;
        same(&extchoice(p.clone(), ITree::stop()), &p)?;
        same(&extchoice(ITree::tau(p.clone()), q.clone()), &ITree::tau(extchoice(p.clone(), q)))?;
        let d = extchoice(p, diverge());
        prop_assert!(!bounded_bisim(&d, &diverge(), 32, 64).is_distinguished());
        prop_assert!(!settle(&d, 500).is_stable());
    }

    #[test]
    fn parallel_laws(p in unit_tree(), q in unit_tree(), sync in proptest::collection::btree_set(0u8..4, 0..4)) {
        let sync = EventSet::finite(sync);
        same(&par(p.clone(), sync.clone(), q.clone()), &par(q.clone(), sync, p.clone()))?;
        same(&interleave(p.clone(), q.clone()), &interleave(q, p.clone()))?;
        same(&interleave(skip(), p.clone()), &par(p.clone(), EventSet::empty(), skip()))?;
        let d = par(diverge::<u8, ()>(), EventSet::empty(), p);
        prop_assert!(!settle(&d, 500).is_stable());
    }

    #[test]
    fn hiding_nothing_changes_nothing(p in tree()) {
        same(&hide(p.clone(), EventSet::empty()), &p)?;
    }

    #[test]
    fn silent_steps_are_weakly_invisible(p in tree(), n in 0usize..4) {
        let budget = ExplorationBudget::default().with_trace_len(6);
        let padded = ITree::taus(n, p.clone());
        prop_assert!(weak_bisim(&padded, &p, &budget).is_equivalent());
        same(&un_sils(n, &padded), &p)?;
    }
}

#[test]
fn skip_is_the_unit_of_interleaving() {
    let p: ITree<char, ()> = bind(event('a'), ktree(|()| event('b')));
    let v = bounded_bisim(&interleave(skip(), p.clone()), &p, 8, 8);
    assert!(v.is_equivalent(), "{v:?}");
}

#[test]
fn hiding_an_iterated_event_diverges() {
    let p = hide(iterate(event('e')), EventSet::finite(['e']));
    assert!(!settle(&p, 1000).is_stable());
    match div_free(&p, &ExplorationBudget::default()) {
        DivFreeVerdict::PossiblyDivergent { trace, .. } => assert!(trace.is_empty()),
        other => panic!("{other:?}"),
    }
}
