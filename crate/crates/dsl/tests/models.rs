use std::collections::BTreeMap;

use itree_core::combinators::{execute, ExecResult, ExplorationBudget};
use itree_core::itree::settle;
use itree_core::zmachine::CheckMode;
use itree_core::{Comm, Value};
use itree_dsl::builtin::{builtin, BUILTINS};
use itree_dsl::{load, parse_model, print_model, Definitions, ElabError, ModelError, TargetKind};

fn model(name: &str) -> Definitions {
    load(builtin(name).unwrap().source, &BTreeMap::new()).unwrap()
}

fn labels(events: &[Comm]) -> Vec<String> {
    events.iter().map(Comm::label).collect()
}

fn menu(defs: &Definitions, target: &str, args: &[Value], path: &[&str]) -> Vec<String> {
    let mut tree = defs.target(target, args).unwrap();
    for step in path {
        let stable = settle(&tree, 1000).tree;
        let events = stable.menu().unwrap_or_else(|| panic!("no menu before {step}"));
        let e = events.iter().find(|e| e.label() == *step).unwrap_or_else(|| panic!("{step} not offered"));
        tree = stable.after(e).unwrap();
    }
    match execute(&tree, 1000) {
        ExecResult::Menu { events, .. } => labels(&events),
        other => panic!("{other:?}"),
    }
}

#[test]
fn every_builtin_parses_prints_and_reparses() {
    for b in BUILTINS {
        let ast = parse_model(b.source).unwrap_or_else(|e| panic!("{}: {e}", b.name));
        let printed = print_model(&ast);
        assert_eq!(parse_model(&printed).unwrap(), ast, "{}", b.name);
        load(b.source, &BTreeMap::new()).unwrap_or_else(|e| panic!("{}: {e}", b.name));
    }
}

#[test]
fn buffer_offers_inputs_and_state() {
    let defs = model("buffer");
    let m = menu(&defs, "buffer", &[Value::List(vec![])], &[]);
    assert_eq!(m, ["Input.0", "Input.1", "Input.2", "Input.3", "State.[]"]);
    let m = menu(&defs, "buffer", &[Value::List(vec![])], &["Input.1", "Input.2"]);
    assert_eq!(m, ["Input.0", "Input.1", "Input.2", "Input.3", "Output.1", "State.[1,2]"]);
    let m = menu(&defs, "BufferCircus", &[], &["Input.3", "Output.3"]);
    assert_eq!(m, ["Input.0", "Input.1", "Input.2", "Input.3", "State.[]"]);
}

#[test]
fn reverse_executes_to_the_reversed_list() {
    let defs = model("reverse");
    let tree = defs.target("reverse", &[Value::ints([1, 2, 3])]).unwrap();
    let ExecResult::Terminated { value, .. } = execute(&tree, 10_000) else {
        panic!("reverse did not terminate");
    };
    assert_eq!(value.get("ys"), Some(&Value::ints([3, 2, 1])));
    assert_eq!(value.get("i"), Some(&Value::Int(3)));
}

#[test]
fn reverse_assertions_hold_on_forty_lists() {
    let defs = model("reverse");
    for a in defs.assertions() {
        assert_eq!(a.states().len(), 40);
        let verdict = defs.check_assertion(a, &ExplorationBudget::default()).unwrap();
        assert!(verdict.holds(), "{}: {verdict:?}", a.name);
    }
}

#[test]
fn ring_behaves_as_a_fifo() {
    let defs = model("ring");
    assert_eq!(menu(&defs, "Ring", &[], &[]), ["input.0", "input.1"]);
    let m = menu(&defs, "Ring", &[], &["input.1", "input.0"]);
    assert_eq!(m, ["input.0", "input.1", "output.1"]);
    let m = menu(&defs, "Ring", &[], &["input.1", "input.0", "output.1"]);
    assert_eq!(m, ["input.0", "input.1", "output.0"]);
    let full = menu(&defs, "Ring", &[], &["input.1", "input.0", "input.1"]);
    assert_eq!(full, ["output.1"]);
}

#[test]
fn bounded_buffer_obligations_hold() {
    let defs = model("bounded_buffer");
    assert_eq!(defs.targets(), [("BoundedBuffer".to_string(), TargetKind::Zmachine)]);
    let m = defs.machine("BoundedBuffer").unwrap();
    for mode in [CheckMode::Exhaustive, CheckMode::Reachable] {
        let results = m.check(mode, &ExplorationBudget::default()).unwrap();
        assert_eq!(results.len(), 4);
        assert!(results.iter().all(|r| r.verdict.holds()), "{mode:?}");
    }
    assert_eq!(menu(&defs, "BoundedBuffer", &[], &[]), ["Input.0", "Input.1", "Size.0"]);
    assert_eq!(
        menu(&defs, "BoundedBuffer", &[], &["Input.1"]),
        ["Input.0", "Input.1", "Output.1", "Size.1"]
    );
}

#[test]
fn bindings_override_constants() {
    let src = builtin("bounded_buffer").unwrap().source;
    let mut b = BTreeMap::new();
    b.insert("MAX_SIZE".to_string(), Value::Int(1));
    let defs = load(src, &b).unwrap();
    assert_eq!(menu(&defs, "BoundedBuffer", &[], &["Input.0"]), ["Output.0", "Size.1"]);
    b.insert("NOPE".to_string(), Value::Int(1));
    assert!(matches!(load(src, &b), Err(ModelError::Elab(ElabError::Unknown(_, "constant", _)))));
}

#[test]
fn explored_events_stay_within_the_declared_channels() {
    let budget = ExplorationBudget::default().with_trace_len(4);
    for (name, target, args) in [
        ("buffer", "buffer", vec![Value::List(vec![])]),
        ("ring", "Ring", vec![]),
        ("bounded_buffer", "BoundedBuffer", vec![]),
    ] {
        let defs = model(name);
        let channels = defs.channels();
        let report = itree_core::semantics::transitions(&defs.target(target, &args).unwrap(), &budget);
        for (trace, _) in &report.items {
            for e in trace {
                assert!(channels.contains(&e.channel), "{name}: stray event {}", e.label());
            }
        }
    }
}

#[test]
fn ring_of_a_hundred_cells_answers_quickly() {
    let mut b = BTreeMap::new();
    b.insert("maxbuf".to_string(), Value::Int(99));
    let defs = load(builtin("ring").unwrap().source, &b).unwrap();
    let start = std::time::Instant::now();
    let m = menu(&defs, "Ring", &[], &["input.1", "input.0", "output.1"]);
    assert_eq!(m, ["input.0", "input.1", "output.0"]);
    eprintln!("100 cells, four menus: {:?}", start.elapsed());
}
