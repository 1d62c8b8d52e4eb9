//! The sequential and data-parallel strategies must compute the same
//! reports.

use std::collections::BTreeSet;

use proptest::prelude::*;

use itree_core::circus::{assigns, cond, sqcap, StateSpace, Subst};
use itree_core::combinators::{bind, expr, ktree, while_loop};
use itree_core::csp::{extchoice, hide, par};
use itree_core::semantics::{failures_divergences, psem, transitions};
use itree_core::{EventMap, EventSet, ExplorationBudget, HTree, ITree, Lazy, Prism, Strategy as Exec};

type T = ITree<u8, u8>;

fn tree() -> impl Strategy<Value = T> {
    let leaf = prop_oneof![(0u8..3).prop_map(ITree::Ret), Just(ITree::stop())];
    leaf.prop_recursive(5, 48, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(ITree::tau),
            proptest::collection::btree_map(0u8..4, inner.clone(), 1..4).prop_map(|m| {
                ITree::vis(EventMap::from_entries(m.into_iter().map(|(e, t)| (e, Lazy::ready(t))).collect()).unwrap())
            }),
            (inner.clone(), inner.clone()).prop_map(|(p, q)| extchoice(p, q)),
            (inner.clone(), inner.clone()).prop_map(|(p, q)| bind(par(p, EventSet::finite([1u8]), q), ktree(|()| ITree::Ret(0)))),
            inner.prop_map(|p| hide(p, EventSet::finite([0u8]))),
        ]
    })
}

fn budgets() -> (ExplorationBudget, ExplorationBudget) {
    let b = ExplorationBudget::default().with_trace_len(5);
    (b.with_strategy(Exec::Sequential), b.with_strategy(Exec::Parallel))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn transitions_agree(p in tree()) {
        let (seq, parl) = budgets();
        let a = transitions(&p, &seq);
        let b = transitions(&p, &parl);
        let traces = |r: &itree_core::semantics::ExplorationReport<(Vec<u8>, T)>| r.items.iter().map(|(t, _)| t.clone()).collect::<Vec<_>>();
        prop_assert_eq!(traces(&a), traces(&b));
        prop_assert_eq!((a.exhaustive, a.frontier), (b.exhaustive, b.frontier));
    }

    #[test]
    fn failures_divergences_agree(p in tree()) {
        let (seq, parl) = budgets();
        let sigma: BTreeSet<u8> = (0..4).collect();
        let a = failures_divergences(&p, &sigma, &seq).unwrap();
        let b = failures_divergences(&p, &sigma, &parl).unwrap();
        prop_assert_eq!(a.traces, b.traces);
        prop_assert_eq!(a.failures, b.failures);
        prop_assert_eq!(a.divergences, b.divergences);
    }
}

#[test]
fn relations_agree() {
    let nd: Prism<usize, u8> = Prism::new("nd", |i| i as u8, |e| Some(*e as usize));
    let step: HTree<u8, i64> = sqcap(
        &nd,
        assigns(Subst::from_fn(|x: &i64| x + 1)),
        cond(assigns(Subst::from_fn(|x: &i64| x + 3)), expr(|x: &i64| x % 2 == 0), assigns(Subst::from_fn(|x: &i64| x + 2))),
    );
    let prog = while_loop(expr(|x: &i64| *x < 10), step);
    let space = StateSpace::new(0..16i64);
    let (seq, parl) = budgets();
    let (seq, parl) = (seq.with_trace_len(12), parl.with_trace_len(12));
    let a = psem(&prog, &space, &seq);
    let b = psem(&prog, &space, &parl);
    assert!(a.exhaustive);
    assert_eq!(a, b);
}
