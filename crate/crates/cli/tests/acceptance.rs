//! End-to-end acceptance checks. Runs without the libtest harness so each
//! criterion prints one line whether it passes or not.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use itree_cli::{Animation, PromptView, StartRequest};
use itree_core::circus::{assigns, c_guard, cond, div_h, seq, skip_h, sqcap, stop_h, test, StateSpace, Subst};
use itree_core::combinators::{bind, diverge, expr, iterate, ktree, while_loop};
use itree_core::csp::{event, extchoice, hide, interleave, par, prefix, skip};
use itree_core::itree::settle;
use itree_core::semantics::{div_free, failures_divergences, psem, refines_spec, DivFreeVerdict, RefinementVerdict, Relation, TickedEvent};
use itree_core::zmachine::CheckMode;
use itree_core::{bounded_bisim, Comm, EventMap, EventSet, ExplorationBudget, HTree, ITree, KTree, Lazy, Prism, Store, Value};
use itree_dsl::builtin::builtin;
use itree_dsl::{load, Definitions};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<Duration, String> {
    let took = start.elapsed();
    ensure(took < limit, || format!("took {took:?}, limit {limit:?}"))?;
    Ok(took)
}

fn model(name: &str, consts: &[(&str, &str)]) -> Definitions {
    let bindings: BTreeMap<String, Value> = consts
        .iter()
        .map(|(k, v)| (k.to_string(), itree_dsl::parse_binding(k, v).unwrap()))
        .collect();
    load(builtin(name).unwrap().source, &bindings).unwrap()
}

// ---- random finite trees ----

type T = ITree<u8, u8>;

fn random_tree(rng: &mut ChaCha8Rng, depth: usize, alphabet: u8) -> T {
    let roll = if depth == 0 { rng.gen_range(0..3) } else { rng.gen_range(0..10) };
    match roll {
        0 | 1 => ITree::Ret(rng.gen_range(0..3)),
        2 => ITree::stop(),
        3 | 4 => ITree::tau(random_tree(rng, depth - 1, alphabet)),
        _ => {
            let mut events: Vec<u8> = (0..alphabet).collect();
            events.shuffle(rng);
            let n = rng.gen_range(1..=3.min(alphabet as usize));
            let entries = events[..n]
                .iter()
                .map(|&e| (e, Lazy::ready(random_tree(rng, depth - 1, alphabet))))
                .collect();
            ITree::vis(EventMap::from_entries(entries).unwrap())
        }
    }
}

fn random_k(rng: &mut ChaCha8Rng, alphabet: u8) -> KTree<u8, u8, u8> {
    let table: Vec<T> = (0..3).map(|_| random_tree(rng, 2, alphabet)).collect();
    ktree(move |x: u8| table[x as usize % 3].clone())
}

fn stable(rng: &mut ChaCha8Rng, alphabet: u8) -> T {
    loop {
        let t = random_tree(rng, 6, alphabet);
        if !t.is_sil() {
            return t;
        }
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x17ee);
    let (depth, fuel) = (24, 64);
    let same = |law: &str, p: &T, q: &T| -> Result<(), String> {
        let v = bounded_bisim(p, q, depth, fuel);
        ensure(v.is_equivalent(), || format!("{law}: {v:?}"))
    };
    let trees = 1000;
    for _ in 0..trees {
        let alphabet = rng.gen_range(1..=4);
        let p = random_tree(&mut rng, 6, alphabet);
        let q = random_tree(&mut rng, 6, alphabet);
        let (k, h) = (random_k(&mut rng, alphabet), random_k(&mut rng, alphabet));
        let x = rng.gen_range(0..3);

        same("left unit", &bind(ITree::Ret(x), k.clone()), &k(x))?;
        same("right unit", &bind(p.clone(), ktree(ITree::Ret)), &p)?;
        let (k2, h2) = (k.clone(), h.clone());
        same(
            "associativity",
            &bind(bind(p.clone(), k.clone()), h.clone()),
            &bind(p.clone(), ktree(move |a| bind(k2(a), h2.clone()))),
        )?;

        same("commutativity", &extchoice(p.clone(), q.clone()), &extchoice(q.clone(), p.clone()))?;
        same("stop unit", &extchoice(p.clone(), ITree::stop()), &p)?;
        same("stop unit (left)", &extchoice(ITree::stop(), p.clone()), &p)?;

        // div absorbs: no difference is ever observed, and neither side
        // settles within the fuel.
        for d in [extchoice(diverge(), p.clone()), extchoice(p.clone(), diverge())] {
            let v = bounded_bisim(&d, &diverge(), depth, fuel);
            ensure(!v.is_distinguished(), || format!("div annihilator: {v:?}"))?;
            ensure(!settle(&d, 200).is_stable(), || "div annihilator: choice with div settled".into())?;
        }

        same(
            "tau extraction (left)",
            &extchoice(ITree::tau(p.clone()), q.clone()),
            &ITree::tau(extchoice(p.clone(), q.clone())),
        )?;
        let s = stable(&mut rng, alphabet);
        same(
            "tau extraction (right)",
            &extchoice(s.clone(), ITree::tau(q.clone())),
            &ITree::tau(extchoice(s.clone(), q.clone())),
        )?;

        if let ITree::Vis(menu) = &s {
            let k3 = k.clone();
            let distributed = ITree::Vis(menu.map(|_, next| Lazy::ready(bind(next.force().clone(), k3.clone()))));
            same("vis distributes over bind", &bind(s.clone(), k.clone()), &distributed)?;
        }
    }
    let took = within(start, Duration::from_secs(30))?;
    Ok(format!("{trees} tree pairs, 11 laws each, {took:.2?}"))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let defs = model("reverse", &[]);
    let tree = defs.target("reverse", &[Value::ints([1, 2, 3])]).map_err(|e| e.to_string())?;
    let s = match itree_core::combinators::execute(&tree, 10_000) {
        itree_core::ExecResult::Terminated { value, .. } => value,
        other => return Err(format!("did not terminate: {other:?}")),
    };
    ensure(s.get("ys") == Some(&Value::ints([3, 2, 1])), || format!("ys wrong in {s}"))?;
    ensure(s.get("i") == Some(&Value::Int(3)), || format!("i wrong in {s}"))?;
    let took = within(start, Duration::from_secs(1))?;
    Ok(format!("{s}, {took:.2?}"))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let defs = model("reverse", &[]);
    let budget = ExplorationBudget::default();
    let mut checked = Vec::new();
    for name in ["reverse_partial", "reverse_total"] {
        let a = defs.assertions().iter().find(|a| a.name == name).ok_or(format!("no assertion {name}"))?;
        ensure(a.states().len() == 40, || format!("{name}: {} cases, wanted 40", a.states().len()))?;
        let v = defs.check_assertion(a, &budget).map_err(|e| e.to_string())?;
        ensure(v.holds(), || format!("{name}: {v:?}"))?;
        checked.push(format!("{name} holds"));
    }
    let took = within(start, Duration::from_secs(5))?;
    Ok(format!("{} over 40 lists, {took:.2?}", checked.join(", ")))
}

fn criterion_4() -> Outcome {
    let p: ITree<char, ()> = extchoice(prefix('a', prefix('c', skip())), prefix('b', diverge()));
    let alphabet: BTreeSet<char> = ['a', 'b', 'c'].into();
    let budget = ExplorationBudget::default().with_tau_fuel(20);
    let fd = failures_divergences(&p, &alphabet, &budget).map_err(|e| e.to_string())?;
    let ev = |s: &str| -> Vec<TickedEvent<char, ()>> { s.chars().map(TickedEvent::Ev).collect() };
    let tick = |s: &str| {
        let mut t = ev(s);
        t.push(TickedEvent::Tick(()));
        t
    };
    ensure(fd.is_failure(&ev(""), &ev("c")), || "([], {c}) missing".into())?;
    ensure(fd.is_failure(&ev("a"), &ev("ab")), || "([a], {a,b}) missing".into())?;
    ensure(fd.is_failure(&tick("ac"), &ev("abc")), || "([a,c,tick], {a,b,c}) missing".into())?;
    ensure(fd.is_divergence(&['b']), || "divergence [b] missing".into())?;
    ensure(!fd.is_failure(&ev(""), &ev("a")), || "([], {a}) should not be a failure".into())?;

    let hidden = hide(iterate(event('e')), EventSet::finite(['e']));
    match div_free(&hidden, &budget) {
        DivFreeVerdict::PossiblyDivergent { trace, .. } if trace.is_empty() => {}
        other => return Err(format!("hide(iterate(e), {{e}}) gave {other:?}")),
    }
    Ok("3 failures, divergence [b], hidden loop PossiblyDivergent([])".into())
}

fn labels(view: &PromptView) -> Vec<String> {
    match view {
        PromptView::Menu { events, .. } => events.iter().map(|e| e.label.clone()).collect(),
        other => panic!("expected a menu, got {other:?}"),
    }
}

fn criterion_5() -> Outcome {
    let req = StartRequest {
        model: Some("buffer".into()),
        target: "buffer".into(),
        args: vec!["[]".into()],
        ..Default::default()
    };
    let mut anim = Animation::start(&req, false).map_err(|e| e.message)?;
    let first = labels(&anim.prompt());
    let want: Vec<String> = ["Input.0", "Input.1", "Input.2", "Input.3", "State.[]"].map(String::from).into();
    ensure(first.iter().collect::<BTreeSet<_>>() == want.iter().collect(), || format!("initial menu {first:?}"))?;

    anim.choose_label("Input.1").map_err(|e| e.message)?;
    let view = anim.choose_label("Input.2").map_err(|e| e.message)?;
    ensure(labels(&view).contains(&"State.[1,2]".to_string()), || format!("menu {:?}", labels(&view)))?;

    let before = anim.prompt();
    let err = anim.choose_label("Output.0").err().ok_or("Output.0 was accepted")?;
    ensure(err.code == "rejected", || format!("code {}", err.code))?;
    let err = anim.choose(99).err().ok_or("entry 99 was accepted")?;
    ensure(err.code == "rejected", || format!("code {}", err.code))?;
    ensure(anim.prompt() == before, || "state changed after a rejected choice".into())?;
    ensure(anim.trace() == ["Input.1", "Input.2"], || format!("trace {:?}", anim.trace()))?;
    Ok("menu {Input.0..3, State.[]}, State.[1,2] after 1, 2, disabled choices rejected".into())
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let consts = [("MAX_SIZE", "2"), ("VAL", "{0, 1}")];
    let defs = model("bounded_buffer", &consts);
    let budget = ExplorationBudget::default();
    let results = defs
        .machine("BoundedBuffer")
        .unwrap()
        .check(CheckMode::Exhaustive, &budget)
        .map_err(|e| e.to_string())?;
    ensure(results.len() == 4, || format!("{} obligations", results.len()))?;
    for r in &results {
        ensure(r.verdict.holds() && r.space_complete, || format!("{}: {:?}", r.obligation.name, r.verdict))?;
    }

    let src = builtin("bounded_buffer").unwrap().source;
    let good = "update sz := sz + 1, buf := buf ++ [v]";
    ensure(src.contains(good), || "mutation site not found".into())?;
    let mutated = src.replace(good, "update buf := buf ++ [v]");
    let bindings = consts.iter().map(|(k, v)| (k.to_string(), itree_dsl::parse_binding(k, v).unwrap())).collect();
    let bad = load(&mutated, &bindings).map_err(|e| e.to_string())?;
    let results = bad.machine("BoundedBuffer").unwrap().check(CheckMode::Exhaustive, &budget).map_err(|e| e.to_string())?;
    let input = results.iter().find(|r| r.obligation.name == "Input_correct").ok_or("no Input_correct")?;
    let cex = input.verdict.counterexample().ok_or_else(|| format!("mutant gave {:?}", input.verdict))?;
    let took = within(start, Duration::from_secs(2))?;
    Ok(format!("4 obligations hold; mutant refuted ({}), {took:.2?}", cex.message()))
}

// Breadth-first trace sets, written against the raw tree shape so they do
// not share code with the library's own exploration.
fn bfs_traces(tree: &ITree<Comm, Store>, depth: usize, fuel: usize) -> Result<BTreeSet<Vec<String>>, String> {
    let mut out = BTreeSet::new();
    let mut queue = VecDeque::from([(Vec::<String>::new(), tree.clone())]);
    while let Some((trace, mut t)) = queue.pop_front() {
        let mut taus = 0;
        while let ITree::Sil(next) = t {
            taus += 1;
            if taus > fuel {
                return Err(format!("no stable node after {trace:?}"));
            }
            t = next.force().clone();
        }
        out.insert(trace.clone());
        if let ITree::Vis(menu) = &t {
            if trace.len() < depth {
                for (e, k) in menu.iter() {
                    let mut tr = trace.clone();
                    tr.push(e.label().to_lowercase());
                    queue.push_back((tr, k.force().clone()));
                }
            }
        }
    }
    Ok(out)
}

fn fifo_traces(capacity: usize, values: &[i64], depth: usize) -> BTreeSet<Vec<String>> {
    let mut out = BTreeSet::new();
    let mut stack = vec![(Vec::<String>::new(), VecDeque::<i64>::new())];
    while let Some((trace, q)) = stack.pop() {
        out.insert(trace.clone());
        if trace.len() == depth {
            continue;
        }
        if q.len() < capacity {
            for &v in values {
                let (mut t, mut q) = (trace.clone(), q.clone());
                t.push(format!("input.{v}"));
                q.push_back(v);
                stack.push((t, q));
            }
        }
        if let Some(&v) = q.front() {
            let (mut t, mut q) = (trace.clone(), q.clone());
            t.push(format!("output.{v}"));
            q.pop_front();
            stack.push((t, q));
        }
    }
    out
}

fn criterion_7() -> Outcome {
    let (depth, fuel) = (6, 200);
    let ring = model("ring", &[("maxbuf", "3"), ("VAL", "{0, 1}")]);
    let ring_tree = ring.target("Ring", &[]).map_err(|e| e.to_string())?;
    let ring_traces = bfs_traces(&ring_tree, depth, fuel)?;

    let buffer = model("bounded_buffer", &[("MAX_SIZE", "3"), ("VAL", "{0, 1}")]);
    let mut machine = buffer.machine("BoundedBuffer").unwrap().clone();
    machine.operations.retain(|op| matches!(op.channel.name(), "Input" | "Output"));
    let machine_traces = bfs_traces(&machine.process(), depth, fuel)?;

    let fifo = fifo_traces(3, &[0, 1], depth);
    ensure(ring_traces == machine_traces, || {
        let extra: Vec<_> = ring_traces.symmetric_difference(&machine_traces).take(3).collect();
        format!("ring and machine differ, e.g. {extra:?}")
    })?;
    ensure(ring_traces == fifo, || "ring differs from a 3-place FIFO".into())?;

    let big = model("ring", &[("maxbuf", "99"), ("VAL", "{0, 1}")]);
    let mut t = big.target("Ring", &[]).map_err(|e| e.to_string())?;
    let mut slowest = Duration::ZERO;
    for step in ["input.0", "input.1", "output.0", "input.1", "output.1"] {
        let start = Instant::now();
        let s = settle(&t, 10_000);
        let menu = s.tree.menu().ok_or("100-cell ring did not offer a menu")?;
        slowest = slowest.max(within(start, Duration::from_secs(1))?);
        let e = menu.iter().find(|e| e.label() == step).ok_or_else(|| format!("{step} not offered"))?;
        t = s.tree.after(e).unwrap();
    }
    Ok(format!(
        "{} traces agree (ring, machine, FIFO); 100-cell ring slowest menu {slowest:.2?}",
        ring_traces.len()
    ))
}

// ---- random process corpus ----

type P = ITree<char, ()>;
const SIGMA: [char; 4] = ['a', 'b', 'c', 'd'];

fn some_events(rng: &mut ChaCha8Rng) -> EventSet<char> {
    EventSet::finite(SIGMA.iter().copied().filter(|_| rng.gen_bool(0.4)))
}

fn random_process(rng: &mut ChaCha8Rng, depth: usize) -> P {
    let roll = if depth == 0 { rng.gen_range(0..3) } else { rng.gen_range(0..12) };
    let sub = |rng: &mut ChaCha8Rng| random_process(rng, depth - 1);
    match roll {
        0 => skip(),
        1 => ITree::stop(),
        2 => prefix(*SIGMA.choose(rng).unwrap(), skip()),
        3 | 4 => prefix(*SIGMA.choose(rng).unwrap(), sub(rng)),
        5 => extchoice(sub(rng), sub(rng)),
        6 => bind(sub(rng), {
            let next = sub(rng);
            ktree(move |()| next.clone())
        }),
        7 => interleave(sub(rng), sub(rng)),
        8 => {
            let sync = some_events(rng);
            par(sub(rng), sync, sub(rng))
        }
        9 => {
            let hidden = some_events(rng);
            hide(sub(rng), hidden)
        }
        10 => iterate(prefix(*SIGMA.choose(rng).unwrap(), skip())),
        _ if rng.gen_bool(0.3) => ITree::tau(diverge()),
        _ => ITree::tau(sub(rng)),
    }
}

fn healthy(p: &P, budget: &ExplorationBudget) -> Result<(), String> {
    let alphabet: BTreeSet<char> = SIGMA.into();
    let fd = failures_divergences(p, &alphabet, budget).map_err(|e| e.to_string())?;
    let visible = |t: &[TickedEvent<char, ()>]| -> Option<Vec<char>> {
        t.iter()
            .map(|x| match x {
                TickedEvent::Ev(e) => Some(*e),
                TickedEvent::Tick(_) => None,
            })
            .collect()
    };
    let sigma: Vec<TickedEvent<char, ()>> = SIGMA.map(TickedEvent::Ev).into();
    for t in &fd.traces {
        for n in 0..t.len() {
            ensure(fd.has_trace(&t[..n]), || format!("prefix of {t:?} missing"))?;
        }
        if let Some(TickedEvent::Tick(())) = t.last() {
            ensure(fd.is_failure(&t[..t.len() - 1], &sigma), || format!("{t:?} ends but does not refuse all"))?;
        }
    }
    for f in &fd.failures {
        ensure(fd.has_trace(&f.trace), || format!("failure trace {:?} is not a trace", f.trace))?;
        let Some(vis) = visible(&f.trace) else { continue };
        if vis.len() >= budget.max_trace_len || fd.is_divergence(&vis) {
            continue;
        }
        for &a in &SIGMA {
            let mut next = f.trace.clone();
            next.push(TickedEvent::Ev(a));
            let refused = f.refusal.events.contains(&a);
            // Impossible events are refused; possible ones never are.
            ensure(fd.has_trace(&next) || refused, || format!("{a} impossible after {vis:?} yet not refused"))?;
            ensure(!(fd.has_trace(&next) && refused), || format!("{a} both accepted and refused after {vis:?}"))?;
        }
    }
    for d in &fd.divergences {
        let ticked: Vec<_> = d.iter().copied().map(TickedEvent::Ev).collect();
        ensure(fd.has_trace(&ticked), || format!("divergence {d:?} is not a trace"))?;
        for &a in &SIGMA {
            let mut longer = d.clone();
            longer.push(a);
            ensure(fd.is_divergence(&longer), || format!("extension of divergence {d:?} not divergent"))?;
            ensure(fd.is_failure(&ticked, &sigma), || format!("divergence {d:?} does not refuse all"))?;
        }
    }
    Ok(())
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5e3a);
    let budget = ExplorationBudget::default().with_trace_len(5).with_tau_fuel(20);
    let (mut divergent, mut traces) = (0, 0);
    for i in 0..50 {
        // Redraw small divergence-free processes; they exercise little.
        let (p, fd) = loop {
            let p = random_process(&mut rng, 4);
            let fd = failures_divergences(&p, &SIGMA.into(), &budget).map_err(|e| e.to_string())?;
            if fd.traces.len() >= 6 || !fd.divergences.is_empty() {
                break (p, fd);
            }
        };
        healthy(&p, &budget).map_err(|e| format!("process {i}: {e}"))?;
        divergent += usize::from(!fd.divergences.is_empty());
        traces += fd.traces.len();
    }
    Ok(format!("50 processes, {traces} traces, {divergent} with divergences"))
}

type C = HTree<u8, i64>;

fn compose(r: &Relation<i64>, q: &Relation<i64>) -> BTreeSet<(i64, i64)> {
    let mut out = BTreeSet::new();
    for (a, b) in &r.pairs {
        for c in q.image(b) {
            out.insert((*a, *c));
        }
    }
    out
}

fn criterion_9() -> Outcome {
    let space = StateSpace::new(0..6i64);
    let budget = ExplorationBudget::default().with_trace_len(12).with_tau_fuel(50);
    let nd: Prism<usize, u8> = Prism::new("nd", |i| i as u8, |e| Some(*e as usize));
    let sem = |c: &C| {
        let r = psem(c, &space, &budget);
        assert!(r.exhaustive, "open relation");
        r
    };
    let inc: C = assigns(Subst::from_fn(|x: &i64| (x + 1) % 6));
    let dbl: C = assigns(Subst::from_fn(|x: &i64| (x * 2) % 6));
    let even = expr(|x: &i64| x % 2 == 0);
    let programs: Vec<(&str, C)> = vec![
        ("inc", inc.clone()),
        ("dbl", dbl.clone()),
        ("skip", skip_h()),
        ("inc or dbl", sqcap(&nd, inc.clone(), dbl.clone())),
        ("if even then inc else dbl", cond(inc.clone(), even.clone(), dbl.clone())),
        ("guarded dbl", c_guard(even.clone(), dbl.clone())),
    ];

    for (_, c) in [("inc", &inc), ("dbl", &dbl)] {
        let r = sem(c);
        let want: BTreeSet<(i64, i64)> = (0..6).map(|s| (s, match c(s) { ITree::Ret(t) => t, _ => unreachable!() })).collect();
        ensure(r.pairs == want, || "assignment is not its substitution".into())?;
    }
    ensure(sem(&stop_h()).pairs.is_empty(), || "stop has behaviour".into())?;
    ensure(psem(&div_h::<u8, i64>(), &space, &budget).pairs.is_empty(), || "div has behaviour".into())?;

    for (pn, p) in &programs {
        let rp = sem(p);
        for (qn, q) in &programs {
            let rq = sem(q);
            ensure(sem(&seq(p.clone(), q.clone())).pairs == compose(&rp, &rq), || format!("{pn} ; {qn}"))?;
            let union: BTreeSet<_> = rp.pairs.union(&rq.pairs).cloned().collect();
            ensure(sem(&sqcap(&nd, p.clone(), q.clone())).pairs == union, || format!("{pn} |~| {qn}"))?;
            let branch: BTreeSet<_> = (0..6)
                .flat_map(|s| {
                    let r = if s % 2 == 0 { &rp } else { &rq };
                    r.image(&s).into_iter().map(move |t| (s, *t)).collect::<Vec<_>>()
                })
                .collect();
            ensure(sem(&cond(p.clone(), even.clone(), q.clone())).pairs == branch, || format!("if {pn} else {qn}"))?;
        }
    }

    // while B do C od = (test B ; C)* ; test not B, with the star computed as
    // a reflexive-transitive closure.
    let below = expr(|x: &i64| *x < 4);
    let bodies: Vec<C> = vec![
        assigns(Subst::from_fn(|x: &i64| x + 1)),
        sqcap(&nd, assigns(Subst::from_fn(|x: &i64| x + 1)), assigns(Subst::from_fn(|x: &i64| x + 2))),
    ];
    for body in bodies {
        let step = compose(&sem(&test(below.clone())), &sem(&body));
        let mut star: BTreeSet<(i64, i64)> = (0..8).map(|s| (s, s)).collect();
        loop {
            let more: BTreeSet<_> = star
                .iter()
                .flat_map(|(a, b)| step.iter().filter(move |(c, _)| c == b).map(move |(_, d)| (*a, *d)))
                .collect();
            let before = star.len();
            star.extend(more);
            if star.len() == before {
                break;
            }
        }
        let want: BTreeSet<_> = star.into_iter().filter(|(a, b)| *a < 6 && *b >= 4).collect();
        let got = sem(&while_loop(below.clone(), body)).pairs;
        ensure(got == want, || format!("loop relation {got:?} vs {want:?}"))?;
    }

    let spec = expr(|(s, t): &(i64, i64)| t > s);
    let imp: C = assigns(Subst::from_fn(|x: &i64| x + 1));
    match refines_spec(spec, &imp, &space, &budget) {
        RefinementVerdict::Holds { pairs_checked } => Ok(format!("equations hold on 6 states; x' > x refined by x := x + 1 ({pairs_checked} pairs)")),
        other => Err(format!("refinement: {other:?}")),
    }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("monad and choice laws", criterion_1),
        ("reverse executes", criterion_2),
        ("reverse Hoare triples", criterion_3),
        ("failures and divergences", criterion_4),
        ("buffer animation", criterion_5),
        ("bounded buffer obligations", criterion_6),
        ("ring buffer equivalence", criterion_7),
        ("semantic healthiness", criterion_8),
        ("predicative semantics", criterion_9),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let id = format!("criterion {} {name}", i + 1);
        if !filter.is_empty() && !filter.iter().any(|f| id.contains(f.as_str())) {
            continue;
        }
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match result {
            Ok(detail) => println!("{id}: PASS ({detail})"),
            Err(why) => {
                failed += 1;
                println!("{id}: FAIL ({why})");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
