//! Z-Machines: a state schema, an initialisation and a set of guarded
//! operations, run as a reactive loop and checked against their invariants.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::sync::Arc;

use serde::Serialize;

use crate::circus::StateSpace;
use crate::combinators::{kcomp, loop_forever, ExplorationBudget, HTree};
use crate::csp::extchoice_all;
use crate::emap::EventMap;
use crate::error::MachineError;
use crate::itree::{ITree, Lazy};
use crate::program::Program;
use crate::value::{Channel, Comm, Schema, Store, Value};
use crate::verify::{invariant_check, HoareVerdict, ObligationKind};

pub type StoreFn<T> = Arc<dyn Fn(&Store) -> T + Send + Sync>;
pub type ParamFn<T> = Arc<dyn Fn(&Store, &[Value]) -> T + Send + Sync>;

#[derive(Clone)]
pub struct ZParam {
    pub name: String,
    /// The values the parameter may take in a given state.
    pub values: StoreFn<Vec<Value>>,
}

#[derive(Clone)]
pub struct ZOperation {
    pub name: String,
    pub channel: Channel,
    pub params: Vec<ZParam>,
    /// Conjuncts of the precondition, each with its source text.
    pub pre: Vec<(String, ParamFn<bool>)>,
    pub update: ParamFn<Store>,
}

impl ZOperation {
    fn payload(params: &[Value]) -> Value {
        match params {
            [] => Value::Unit,
            [v] => v.clone(),
            vs => Value::Tuple(vs.to_vec()),
        }
    }

    /// Parameter tuples allowed in `s`, in order.
    pub fn enabled(&self, s: &Store) -> Vec<Vec<Value>> {
        let mut combos: Vec<Vec<Value>> = vec![Vec::new()];
        for p in &self.params {
            let values: BTreeSet<Value> = (p.values)(s).into_iter().collect();
            combos = combos
                .into_iter()
                .flat_map(|c| {
                    values.iter().map(move |v| {
                        let mut c = c.clone();
                        c.push(v.clone());
                        c
                    })
                })
                .collect();
        }
        combos.retain(|c| self.pre.iter().all(|(_, p)| p(s, c)));
        combos
    }

    /// `Op?x⃗ ∈ A⃗ | P(x⃗) → σ(x⃗)`: offers one event per enabled parameter
    /// tuple and then applies the update.
    pub fn semantics(&self) -> HTree<Comm, Store> {
        let op = self.clone();
        Arc::new(move |s: Store| {
            let entries = op
                .enabled(&s)
                .into_iter()
                .map(|c| {
                    let event = op.channel.event(Self::payload(&c));
                    let (update, s) = (op.update.clone(), s.clone());
                    (event, Lazy::new(move || ITree::Ret(update(&s, &c))))
                })
                .collect();
            ITree::Vis(EventMap::from_entries(entries).expect("distinct parameter tuples give distinct events"))
        })
    }
}

#[derive(Clone)]
pub struct ZMachine {
    pub name: String,
    pub schema: Arc<Schema>,
    /// Finite domain of each field, where declared.
    pub domains: Vec<Option<Vec<Value>>>,
    pub invariants: Vec<(String, StoreFn<bool>)>,
    pub init: StoreFn<Store>,
    pub operations: Vec<ZOperation>,
    /// Abstract constants and their bindings.
    pub constants: Vec<(String, Option<Value>)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProofObligation {
    pub name: String,
    pub kind: ObligationKind,
    /// Index into the machine's operations, for `Preserves`.
    pub operation: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckMode {
    /// Every invariant-satisfying state in the product of the field domains.
    Exhaustive,
    /// States reachable from initialisation.
    Reachable,
}

#[derive(Clone, Debug, Serialize)]
pub struct ObligationResult {
    pub obligation: ProofObligation,
    pub verdict: HoareVerdict<Store, Comm>,
    /// Whether the state space itself was fully enumerated.
    pub space_complete: bool,
}

impl ZMachine {
    pub fn invariant(&self) -> StoreFn<bool> {
        let invs = self.invariants.clone();
        Arc::new(move |s| invs.iter().all(|(_, i)| i(s)))
    }

    /// The store before initialisation: every field `()`.
    pub fn blank(&self) -> Store {
        Store::blank(Arc::clone(&self.schema))
    }

    pub fn initial_state(&self) -> Store {
        (self.init)(&self.blank())
    }

    pub fn body(&self) -> HTree<Comm, Store> {
        let ops: Vec<HTree<Comm, Store>> = self.operations.iter().map(ZOperation::semantics).collect();
        Arc::new(move |s: Store| extchoice_all(ops.iter().map(|op| op(s.clone()))))
    }

    /// Initialise, then repeatedly offer the choice of all operations.
    pub fn semantics(&self) -> HTree<Comm, Store> {
        let init = self.init.clone();
        kcomp(Arc::new(move |s: Store| ITree::Ret(init(&s))), loop_forever(self.body()))
    }

    pub fn process(&self) -> ITree<Comm, Store> {
        self.semantics()(self.blank())
    }

    pub fn obligations(&self) -> Vec<ProofObligation> {
        let mut out = vec![ProofObligation {
            name: "Init_correct".into(),
            kind: ObligationKind::Establishes,
            operation: None,
        }];
        out.extend(self.operations.iter().enumerate().map(|(i, op)| ProofObligation {
            name: format!("{}_correct", op.name),
            kind: ObligationKind::Preserves,
            operation: Some(i),
        }));
        out
    }

    fn unbound(&self) -> Result<(), MachineError> {
        match self.constants.iter().find(|(_, v)| v.is_none()) {
            Some((name, _)) => Err(MachineError::UnboundConstant(name.clone())),
            None => Ok(()),
        }
    }

    /// The product of the declared field domains.
    pub fn product_space(&self) -> Result<Vec<Store>, MachineError> {
        let domains = self
            .domains
            .iter()
            .zip(&self.schema.fields)
            .map(|(d, f)| d.clone().ok_or_else(|| MachineError::UnboundedVariable(f.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Store::enumerate(&self.schema, &domains))
    }

    /// States reachable from initialisation, breadth first. The flag is false
    /// when `max_nodes` cut the search.
    pub fn reachable(&self, max_nodes: usize) -> (Vec<Store>, bool) {
        let start = self.initial_state();
        let mut seen = BTreeSet::from([start.clone()]);
        let mut order = vec![start.clone()];
        let mut queue = VecDeque::from([start]);
        while let Some(s) = queue.pop_front() {
            for op in &self.operations {
                for c in op.enabled(&s) {
                    let t = (op.update)(&s, &c);
                    if seen.insert(t.clone()) {
                        if seen.len() > max_nodes {
                            return (order, false);
                        }
                        order.push(t.clone());
                        queue.push_back(t);
                    }
                }
            }
        }
        (order, true)
    }

    /// The operation as a one-shot program: offer, then update.
    pub fn operation_program(&self, index: usize) -> Program<Comm, Store> {
        Program::atomic(self.operations[index].semantics())
    }

    pub fn check(&self, mode: CheckMode, budget: &ExplorationBudget) -> Result<Vec<ObligationResult>, MachineError> {
        self.unbound()?;
        let inv = self.invariant();
        let inv_expr: crate::combinators::Expr<Store, bool> = {
            let inv = inv.clone();
            Arc::new(move |s: &Store| inv(s))
        };
        let (init_states, op_states, complete) = match mode {
            CheckMode::Exhaustive => {
                let all = self.product_space()?;
                let good: Vec<Store> = all.iter().filter(|s| inv(s)).cloned().collect();
                (all, good, true)
            }
            CheckMode::Reachable => {
                let (reach, complete) = self.reachable(budget.max_nodes);
                let good = reach.iter().filter(|s| inv(s)).cloned().collect();
                (vec![self.blank()], good, complete)
            }
        };
        let init = self.init.clone();
        let init_prog: Program<Comm, Store> = Program::atomic(Arc::new(move |s: Store| ITree::Ret(init(&s))));
        let init_space = StateSpace::new(init_states);
        let op_space = StateSpace::new(op_states);

        let obligations = self.obligations();
        let verdicts = budget.strategy.map(obligations.clone(), |po| match po.operation {
            None => invariant_check(ObligationKind::Establishes, &init_prog, &inv_expr, &init_space, &budget.sequential()),
            Some(i) => invariant_check(
                ObligationKind::Preserves,
                &self.operation_program(i),
                &inv_expr,
                &op_space,
                &budget.sequential(),
            ),
        });
        obligations
            .into_iter()
            .zip(verdicts)
            .map(|(obligation, v)| {
                Ok(ObligationResult {
                    obligation,
                    verdict: v?,
                    space_complete: complete,
                })
            })
            .collect()
    }

    pub fn constants(&self) -> BTreeMap<String, Option<Value>> {
        self.constants.iter().cloned().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinators::execute;
    use crate::combinators::ExecResult;

    /// The bounded buffer over `VAL = {0,1}`, built by hand.
    fn buffer(max: i64, broken_input: bool) -> ZMachine {
        let schema = Schema::new("Buffer", ["sz", "buf"]);
        let vals = [Value::Int(0), Value::Int(1)];
        let mut lists = vec![Value::List(vec![])];
        let mut frontier = lists.clone();
        for _ in 0..max {
            frontier = frontier
                .iter()
                .flat_map(|l| {
                    vals.iter().map(move |v| {
                        let mut l = l.as_list().unwrap().to_vec();
                        l.push(v.clone());
                        Value::List(l)
                    })
                })
                .collect();
            lists.extend(frontier.clone());
        }
        let sz = |s: &Store| s.at(0).as_int().unwrap();
        let buf = |s: &Store| s.at(1).as_list().unwrap().to_vec();
        let input_chan = Channel::operation(0, "Input");
        let output_chan = Channel::operation(1, "Output");
        ZMachine {
            name: "Buffer".into(),
            schema: schema.clone(),
            domains: vec![Some((0..=max + 1).map(Value::Int).collect()), Some(lists)],
            invariants: vec![
                ("sz = length buf".into(), Arc::new(move |s| sz(s) == buf(s).len() as i64)),
                ("sz <= MAX".into(), Arc::new(move |s| sz(s) <= max)),
            ],
            init: Arc::new(|s| s.set(0, Value::Int(0)).set(1, Value::List(vec![]))),
            operations: vec![
                ZOperation {
                    name: "Input".into(),
                    channel: input_chan,
                    params: vec![ZParam {
                        name: "v".into(),
                        values: Arc::new(move |_| vals.to_vec()),
                    }],
                    pre: vec![("sz < MAX".into(), Arc::new(move |s, _| sz(s) < max))],
                    update: Arc::new(move |s, p| {
                        let mut b = buf(s);
                        b.push(p[0].clone());
                        let s = s.set(1, Value::List(b));
                        if broken_input {
                            s
                        } else {
                            s.set(0, Value::Int(sz(&s) + 1))
                        }
                    }),
                },
                ZOperation {
                    name: "Output".into(),
                    channel: output_chan,
                    params: vec![ZParam {
                        name: "v".into(),
                        values: Arc::new(|_| vec![Value::Int(0), Value::Int(1)]),
                    }],
                    pre: vec![
                        ("sz > 0".into(), Arc::new(move |s, _| sz(s) > 0)),
                        ("v = hd buf".into(), Arc::new(move |s, p| buf(s).first() == Some(&p[0]))),
                    ],
                    update: Arc::new(move |s, _| s.set(0, Value::Int(sz(s) - 1)).set(1, Value::List(buf(s)[1..].to_vec()))),
                },
            ],
            constants: vec![("MAX".into(), Some(Value::Int(max)))],
        }
    }

    #[test]
    fn menu_after_init_and_input() {
        let m = buffer(2, false);
        let p = crate::itree::settle(&m.process(), 100).tree;
        let ExecResult::Menu { events, .. } = execute(&p, 100) else {
            panic!()
        };
        let labels: Vec<String> = events.iter().map(|e| e.to_string()).collect();
        assert_eq!(labels, vec!["Input.0", "Input.1"]);
        let after = p.after(&events[1]).unwrap();
        let ExecResult::Menu { events, .. } = execute(&after, 100) else {
            panic!()
        };
        let labels: Vec<String> = events.iter().map(|e| e.to_string()).collect();
        assert_eq!(labels, vec!["Input.0", "Input.1", "Output.1"]);
    }

    #[test]
    fn obligations_hold_in_both_modes() {
        let m = buffer(2, false);
        for mode in [CheckMode::Exhaustive, CheckMode::Reachable] {
            let results = m.check(mode, &ExplorationBudget::default()).unwrap();
            assert_eq!(results.len(), 3);
            for r in results {
                assert!(r.verdict.holds(), "{mode:?} {}: {:?}", r.obligation.name, r.verdict);
            }
        }
    }

    #[test]
    fn broken_input_is_caught() {
        let m = buffer(2, true);
        let results = m.check(CheckMode::Exhaustive, &ExplorationBudget::default()).unwrap();
        let input = results.iter().find(|r| r.obligation.name == "Input_correct").unwrap();
        assert!(input.verdict.counterexample().is_some());
    }

    #[test]
    fn unbound_constant_is_named() {
        let mut m = buffer(2, false);
        m.constants.push(("VAL".into(), None));
        let err = m.check(CheckMode::Reachable, &ExplorationBudget::default()).unwrap_err();
        assert_eq!(err, MachineError::UnboundConstant("VAL".into()));
    }
}
