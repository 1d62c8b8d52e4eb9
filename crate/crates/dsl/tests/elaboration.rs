use std::collections::BTreeMap;

use itree_core::combinators::{execute, ExecResult, ExplorationBudget};
use itree_core::error::ConstructionError;
use itree_core::semantics::transitions;
use itree_core::Value;
use itree_dsl::{load, parse_binding, ElabError, ModelError};

fn elab_error(src: &str) -> ElabError {
    match load(src, &BTreeMap::new()) {
        Err(ModelError::Elab(e)) => e,
        Err(other) => panic!("expected an elaboration error, got {other}"),
        Ok(_) => panic!("expected an elaboration error"),
    }
}

fn menu(src: &str, target: &str) -> Vec<String> {
    let defs = load(src, &BTreeMap::new()).unwrap();
    match execute(&defs.target(target, &[]).unwrap(), 1000) {
        ExecResult::Menu { events, .. } => events.iter().map(|e| e.label()).collect(),
        other => panic!("{other:?}"),
    }
}

#[test]
fn guarded_recursion_is_accepted() {
    assert_eq!(menu("channel a\nprocess P = a -> P", "P"), ["a"]);
}

#[test]
fn unguarded_recursion_is_rejected_with_its_cycle() {
    let err = elab_error("channel a\nprocess P = P [] a -> skip");
    assert_eq!(err, ElabError::UnguardedRecursion(vec!["P".into(), "P".into()]));
    let err = elab_error("channel a\nprocess P = Q\nprocess Q = skip; P");
    assert_eq!(err, ElabError::UnguardedRecursion(vec!["P".into(), "Q".into(), "P".into()]));
    // A loop body counts as guarded.
    load("channel a\nprocess P = while true do P od", &BTreeMap::new()).unwrap();
}

#[test]
fn unbound_constants_are_named() {
    let err = elab_error("const N\nchannel c : {0..N}");
    assert_eq!(err, ElabError::UnboundConstant("N".into()));
    let mut b = BTreeMap::new();
    b.insert("N".to_string(), Value::Int(1));
    load("const N\nchannel c : {0..N}", &b).unwrap();
}

#[test]
fn unknown_names_are_reported() {
    assert!(matches!(elab_error("process P = c -> skip"), ElabError::Unknown(_, "channel", _)));
    assert!(matches!(elab_error("process P = Q"), ElabError::Unknown(_, "process", _)));
    assert!(matches!(elab_error("channel c : int\nprocess P = c!y -> skip"), ElabError::Unknown(..)));
}

#[test]
fn type_and_arity_errors() {
    assert!(matches!(elab_error("channel c : bool\nprocess P = c!1 -> skip"), ElabError::Type(..)));
    assert!(matches!(elab_error("process P = x := 1; x := true"), ElabError::Type(..)));
    assert!(matches!(elab_error("process P = 1 & skip"), ElabError::Type(..)));
    assert!(matches!(elab_error("process Q(n : int) = skip\nprocess P = Q"), ElabError::Arity(..)));
}

#[test]
fn read_only_names_cannot_be_assigned() {
    assert!(matches!(elab_error("process P(n : int) = n := 1"), ElabError::ReadOnly(..)));
    assert!(matches!(elab_error("channel c : {0,1}\nprocess P = c?x -> x := 1"), ElabError::ReadOnly(..)));
}

#[test]
fn infinite_inputs_need_a_set() {
    assert!(matches!(elab_error("channel c : int\nprocess P = c?x -> skip"), ElabError::InfiniteInput(..)));
    assert_eq!(menu("channel c : int\nprocess P = c?x : {5, 7} -> skip", "P"), ["c.5", "c.7"]);
}

#[test]
fn parallel_sides_cannot_share_a_variable() {
    let err = elab_error("channel a, b\nprocess P = (a -> x := 1) ||| (b -> x := 2)");
    assert!(matches!(err, ElabError::SharedWrite(_, ref v) if v == "x"));
}

#[test]
fn internal_choice_needs_an_nd_channel() {
    let err = elab_error("channel a, b\nprocess P = a -> skip |~| b -> skip");
    assert!(matches!(err, ElabError::Construction(_, ConstructionError::MissingNdChannel)));
    let src = "channel a, b\nchannel nd : {0, 1}\nprocess P = a -> skip |~| b -> skip";
    assert_eq!(menu(src, "P"), ["nd.0", "nd.1"]);
}

#[test]
fn parallel_merges_each_sides_writes() {
    let src = "channel a, b\nchannel out : int . int\n\
               process P = ((a -> x := 1) || {} (b -> y := 2)); out!x!y -> skip";
    let defs = load(src, &BTreeMap::new()).unwrap();
    let report = transitions(&defs.target("P", &[]).unwrap(), &ExplorationBudget::default().with_trace_len(3));
    let traces: Vec<String> = report
        .items
        .iter()
        .map(|(t, _)| t.iter().map(|e| e.label()).collect::<Vec<_>>().join(" "))
        .collect();
    assert!(traces.contains(&"a b out.1.2".to_string()), "{traces:?}");
    assert!(traces.contains(&"b a out.1.2".to_string()), "{traces:?}");
}

#[test]
fn calls_leave_the_caller_state_alone() {
    let src = "channel show : int\nprocess Q = x := 9\nprocess P = x := 1; Q; show!x -> skip";
    assert_eq!(menu(src, "P"), ["show.1"]);
}

#[test]
fn replicated_operators() {
    let src = "const N = 2\nchannel c : {0..N}\nprocess P = [] i : {0..N} @ c.i -> skip";
    assert_eq!(menu(src, "P"), ["c.0", "c.1", "c.2"]);
    let src = "channel c : {0..2}\nprocess P = ||| i : {0, 2} @ c.i -> c.i -> skip";
    assert_eq!(menu(src, "P"), ["c.0", "c.2"]);
}

#[test]
fn hiding_by_payload_prefix() {
    let src = "channel c : {0..1} . {0..1}\nprocess P = (c.0.1 -> c.1.1 -> stop) \\ {c.0}";
    assert_eq!(menu(src, "P"), ["c.1.1"]);
}

#[test]
fn bindings_are_expressions() {
    assert_eq!(parse_binding("VAL", "{1, 0}").unwrap(), Value::Set([Value::Int(0), Value::Int(1)].into()));
    assert_eq!(parse_binding("N", "2 * 3").unwrap(), Value::Int(6));
    assert!(matches!(parse_binding("N", "2 +"), Err(ElabError::BadBinding(..))));
    assert!(matches!(parse_binding("N", "M"), Err(ElabError::BadBinding(..))));
}
