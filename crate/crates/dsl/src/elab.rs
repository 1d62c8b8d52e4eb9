//! Elaboration of a parsed model into executable definitions: processes
//! become state transformers over their own store, machines become
//! [`ZMachine`]s, and assertions become Hoare checks.
//!
//! A process's store holds its parameters (read-only) followed by every
//! variable it assigns. A process reference runs the callee on a fresh store
//! and leaves the caller's store untouched.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::{Arc, OnceLock};

use itree_core::circus::{c_extchoice, c_guard, div_h, skip_h, sqcap, stop_h, StateSpace};
use itree_core::combinators::{bind, ktree, ExplorationBudget, HTree};
use itree_core::csp::{extchoice_all, gpar, hide, par};
use itree_core::emap::{EventMap, EventSet};
use itree_core::error::{ConstructionError, VerifyError};
use itree_core::itree::{ITree, Lazy};
use itree_core::program::{LoopAnnotation, Program};
use itree_core::value::{Channel, Comm, Schema, Store, Value};
use itree_core::verify::{hoare_partial, hoare_total, HoareVerdict};
use itree_core::zmachine::{StoreFn, ZMachine, ZOperation, ZParam};
use itree_core::Prism;

use crate::ast::{self, Correctness, Item, OpBody, ProcKind, Span};
use crate::error::ElabError;
use crate::expr::{compile, eval_const, int, resolve_type, truth, CExpr, Scope, Ty, TypeInfo};
use crate::printer::print_expr;

#[derive(Clone, Debug)]
pub struct ChanInfo {
    pub channel: Channel,
    pub components: Vec<TypeInfo>,
}

impl ChanInfo {
    /// Every event on the channel, when all components are finite.
    pub fn events(&self) -> Option<Vec<Comm>> {
        let mut combos: Vec<Vec<Value>> = vec![Vec::new()];
        for c in &self.components {
            let dom = c.domain.as_ref()?;
            combos = combos
                .into_iter()
                .flat_map(|p| {
                    dom.iter().map(move |v| {
                        let mut q = p.clone();
                        q.push(v.clone());
                        q
                    })
                })
                .collect();
        }
        Some(combos.into_iter().map(|vs| self.channel.event(payload(vs))).collect())
    }
}

fn payload(mut vs: Vec<Value>) -> Value {
    match vs.len() {
        0 => Value::Unit,
        1 => vs.pop().unwrap(),
        _ => Value::Tuple(vs),
    }
}

type Locals = Arc<Vec<Value>>;

enum InputSet {
    Expr(CExpr),
    Domain(Arc<Vec<Value>>),
}

enum CField {
    Out(CExpr),
    In(InputSet),
}

#[derive(Clone)]
struct CEvSet {
    patterns: Vec<(Channel, usize, Vec<CExpr>)>,
    label: String,
}

impl CEvSet {
    fn at(&self, s: &Store, l: &[Value]) -> EventSet<Comm> {
        let pats: Vec<(Channel, usize, Vec<Value>)> = self
            .patterns
            .iter()
            .map(|(c, arity, fs)| (c.clone(), *arity, fs.iter().map(|f| f(s, l)).collect()))
            .collect();
        EventSet::predicate(self.label.clone(), move |e: &Comm| {
            pats.iter().any(|(c, arity, vals)| {
                if e.channel != *c {
                    return false;
                }
                match (&e.value, arity) {
                    (_, _) if vals.is_empty() => true,
                    (Value::Tuple(vs), n) if *n > 1 => vs.starts_with(vals),
                    (v, _) => vals.len() == 1 && vals[0] == *v,
                }
            })
        })
    }
}

enum CProc {
    Skip,
    Stop,
    Div,
    Prefix {
        channel: Channel,
        fields: Vec<CField>,
        body: Arc<CProc>,
    },
    Guard(CExpr, Arc<CProc>),
    Ext(Arc<CProc>, Arc<CProc>),
    Int(Arc<CProc>, Arc<CProc>),
    Par {
        left: Arc<CProc>,
        sync: CEvSet,
        right: Arc<CProc>,
        left_writes: Vec<usize>,
        right_writes: Vec<usize>,
    },
    Hide(Arc<CProc>, CEvSet),
    Seq(Arc<CProc>, Arc<CProc>),
    Assign(usize, CExpr),
    If(CExpr, Arc<CProc>, Arc<CProc>),
    While {
        label: String,
        cond: CExpr,
        invariant: Option<(CExpr, String)>,
        variant: Option<(CExpr, String)>,
        body: Arc<CProc>,
    },
    Call {
        name: String,
        args: Vec<CExpr>,
    },
    RepExt(CExpr, Arc<CProc>),
    RepInter(CExpr, Arc<CProc>),
}

impl CProc {
    fn writes(&self, out: &mut BTreeSet<usize>) {
        match self {
            CProc::Assign(i, _) => {
                out.insert(*i);
            }
            CProc::Prefix { body, .. }
            | CProc::Guard(_, body)
            | CProc::Hide(body, _)
            | CProc::While { body, .. }
            | CProc::RepExt(_, body)
            | CProc::RepInter(_, body) => body.writes(out),
            CProc::Ext(a, b) | CProc::Int(a, b) | CProc::Seq(a, b) | CProc::If(_, a, b) => {
                a.writes(out);
                b.writes(out);
            }
            CProc::Par { left, right, .. } => {
                left.writes(out);
                right.writes(out);
            }
            CProc::Skip | CProc::Stop | CProc::Div | CProc::Call { .. } => {}
        }
    }
}

pub struct ProcInfo {
    pub name: String,
    pub schema: Arc<Schema>,
    pub params: Vec<(String, TypeInfo)>,
    pub field_types: Vec<Ty>,
    body: Arc<CProc>,
}

struct Runtime {
    procs: OnceLock<BTreeMap<String, Arc<ProcInfo>>>,
    nd: Option<Prism<usize, Comm>>,
}

impl Runtime {
    fn proc(&self, name: &str) -> &Arc<ProcInfo> {
        &self.procs.get().expect("process table is filled before use")[name]
    }

    fn instantiate(self: &Arc<Self>, name: &str, args: Vec<Value>) -> ITree<Comm, Store> {
        let info = self.proc(name);
        let store = fresh_store(info, args);
        htree(self, &info.body, &Arc::new(Vec::new()))(store)
    }
}

fn fresh_store(info: &ProcInfo, args: Vec<Value>) -> Store {
    let mut values = args;
    values.resize(info.schema.fields.len(), Value::Unit);
    Store::new(Arc::clone(&info.schema), values)
}

fn program(rt: &Arc<Runtime>, p: &Arc<CProc>, locals: &Locals) -> Program<Comm, Store> {
    match &**p {
        CProc::Seq(a, b) => {
            let mut parts = Vec::new();
            for part in [program(rt, a, locals), program(rt, b, locals)] {
                match part {
                    Program::Seq(ps) => parts.extend(ps),
                    other => parts.push(other),
                }
            }
            Program::seq(parts)
        }
        CProc::If(c, a, b) => Program::cond(bool_expr(c, locals), program(rt, a, locals), program(rt, b, locals)),
        CProc::While {
            label,
            cond,
            invariant,
            variant,
            body,
        } => {
            let annotation = invariant.as_ref().map(|(i, text)| {
                let ann = LoopAnnotation::invariant(bool_expr(i, locals), text.clone());
                match variant {
                    Some((v, vt)) => {
                        let (v, l) = (v.clone(), locals.clone());
                        ann.with_variant(Arc::new(move |s: &Store| int(&v(s, &l))), vt.clone())
                    }
                    None => ann,
                }
            });
            let annotation = annotation.or_else(|| {
                variant.as_ref().map(|(v, vt)| {
                    let (v, l) = (v.clone(), locals.clone());
                    let always: itree_core::Expr<Store, bool> = Arc::new(|_| true);
                    LoopAnnotation::invariant(always, "true").with_variant(Arc::new(move |s: &Store| int(&v(s, &l))), vt.clone())
                })
            });
            Program::while_loop(label.clone(), bool_expr(cond, locals), program(rt, body, locals), annotation)
        }
        _ => Program::atomic(htree(rt, p, locals)),
    }
}

fn bool_expr(e: &CExpr, locals: &Locals) -> itree_core::Expr<Store, bool> {
    let (e, l) = (e.clone(), locals.clone());
    Arc::new(move |s: &Store| truth(&e(s, &l)))
}

fn with_locals(locals: &Locals, extra: impl IntoIterator<Item = Value>) -> Locals {
    let mut l = (**locals).clone();
    l.extend(extra);
    Arc::new(l)
}

fn keep_store(tree: ITree<Comm, impl itree_core::Data>, s: Store) -> ITree<Comm, Store> {
    bind(tree, ktree(move |_| ITree::Ret(s.clone())))
}

fn htree(rt: &Arc<Runtime>, p: &Arc<CProc>, locals: &Locals) -> HTree<Comm, Store> {
    let (rt, p, l) = (Arc::clone(rt), Arc::clone(p), Arc::clone(locals));
    match &*p {
        CProc::Skip => skip_h(),
        CProc::Stop => stop_h(),
        CProc::Div => div_h(),
        CProc::Seq(..) | CProc::If(..) | CProc::While { .. } => program(&rt, &p, &l).to_htree(),
        CProc::Assign(i, e) => {
            let (i, e) = (*i, e.clone());
            Arc::new(move |s: Store| {
                let v = e(&s, &l);
                ITree::Ret(s.set(i, v))
            })
        }
        CProc::Guard(c, body) => c_guard(bool_expr(c, &l), htree(&rt, body, &l)),
        CProc::Ext(a, b) => c_extchoice(htree(&rt, a, &l), htree(&rt, b, &l)),
        CProc::Int(a, b) => {
            let nd = rt.nd.as_ref().expect("checked during elaboration");
            sqcap(nd, htree(&rt, a, &l), htree(&rt, b, &l))
        }
        CProc::Prefix { .. } => Arc::new(move |s: Store| prefix_tree(&rt, &p, &l, s)),
        CProc::Hide(body, set) => {
            let (h, set) = (htree(&rt, body, &l), set.clone());
            Arc::new(move |s: Store| {
                let hidden = set.at(&s, &l);
                hide(h(s), hidden)
            })
        }
        CProc::Par {
            left,
            sync,
            right,
            left_writes,
            right_writes,
        } => {
            let (a, b, sync) = (htree(&rt, left, &l), htree(&rt, right, &l), sync.clone());
            let (lw, rw) = (left_writes.clone(), right_writes.clone());
            Arc::new(move |s: Store| {
                let set = sync.at(&s, &l);
                let (lw, rw, base) = (lw.clone(), rw.clone(), s.clone());
                bind(
                    gpar(a(s.clone()), set, b(s)),
                    ktree(move |(s1, s2): (Store, Store)| {
                        let mut out = base.clone();
                        for &i in &lw {
                            out = out.set(i, s1.at(i).clone());
                        }
                        for &i in &rw {
                            out = out.set(i, s2.at(i).clone());
                        }
                        ITree::Ret(out)
                    }),
                )
            })
        }
        CProc::Call { name, args } => {
            let (name, args) = (name.clone(), args.clone());
            Arc::new(move |s: Store| {
                let vals: Vec<Value> = args.iter().map(|a| a(&s, &l)).collect();
                keep_store(rt.instantiate(&name, vals), s)
            })
        }
        CProc::RepExt(set, body) => {
            let (set, body) = (set.clone(), Arc::clone(body));
            Arc::new(move |s: Store| {
                let vals = set(&s, &l).elements().unwrap_or_default();
                extchoice_all(vals.into_iter().map(|v| htree(&rt, &body, &with_locals(&l, [v]))(s.clone())))
            })
        }
        CProc::RepInter(set, body) => {
            let (set, body) = (set.clone(), Arc::clone(body));
            Arc::new(move |s: Store| {
                let vals = set(&s, &l).elements().unwrap_or_default();
                let trees: Vec<ITree<Comm, ()>> = vals
                    .into_iter()
                    .map(|v| keep_store(htree(&rt, &body, &with_locals(&l, [v]))(s.clone()), s.clone()))
                    .map(|t| bind(t, ktree(|_| ITree::Ret(()))))
                    .collect();
                keep_store(interleave_balanced(trees), s)
            })
        }
    }
}

// Balanced nesting keeps the depth of the composition logarithmic in the
// number of components, which matters for large indexed interleavings.
fn interleave_balanced(mut trees: Vec<ITree<Comm, ()>>) -> ITree<Comm, ()> {
    match trees.len() {
        0 => ITree::Ret(()),
        1 => trees.pop().unwrap(),
        n => {
            let right = trees.split_off(n / 2);
            par(interleave_balanced(trees), EventSet::empty(), interleave_balanced(right))
        }
    }
}

fn prefix_tree(rt: &Arc<Runtime>, p: &Arc<CProc>, l: &Locals, s: Store) -> ITree<Comm, Store> {
    let CProc::Prefix { channel, fields, body } = &**p else {
        unreachable!()
    };
    // Each combination is (payload components, input values).
    let mut combos: Vec<(Vec<Value>, Vec<Value>)> = vec![(Vec::new(), Vec::new())];
    for f in fields {
        match f {
            CField::Out(e) => {
                let v = e(&s, l);
                for c in &mut combos {
                    c.0.push(v.clone());
                }
            }
            CField::In(set) => {
                let vals: BTreeSet<Value> = match set {
                    InputSet::Expr(e) => e(&s, l).elements().unwrap_or_default().into_iter().collect(),
                    InputSet::Domain(d) => d.iter().cloned().collect(),
                };
                combos = combos
                    .into_iter()
                    .flat_map(|(p, i)| {
                        vals.iter().map(move |v| {
                            let (mut p, mut i) = (p.clone(), i.clone());
                            p.push(v.clone());
                            i.push(v.clone());
                            (p, i)
                        })
                    })
                    .collect();
            }
        }
    }
    let entries = combos
        .into_iter()
        .map(|(parts, inputs)| {
            let (rt, body, l, s) = (Arc::clone(rt), Arc::clone(body), Arc::clone(l), s.clone());
            let next = Lazy::new(move || htree(&rt, &body, &with_locals(&l, inputs))(s));
            (channel.event(payload(parts)), next)
        })
        .collect();
    ITree::Vis(EventMap::from_entries(entries).expect("distinct inputs give distinct events"))
}

/// An elaborated `assert`.
pub struct Assertion {
    pub name: String,
    pub correctness: Correctness,
    pub target: String,
    pub text: String,
    pre: itree_core::Expr<Store, bool>,
    post: itree_core::Expr<Store, bool>,
    states: Vec<Store>,
}

/// Executable definitions for every item of a model.
pub struct Definitions {
    rt: Arc<Runtime>,
    constants: Vec<(String, Option<Value>)>,
    channels: BTreeMap<String, ChanInfo>,
    op_channels: Vec<Channel>,
    machines: BTreeMap<String, ZMachine>,
    assertions: Vec<Assertion>,
    order: Vec<(String, TargetKind)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TargetKind {
    Process,
    Zmachine,
}

impl Definitions {
    pub fn constants(&self) -> &[(String, Option<Value>)] {
        &self.constants
    }

    /// Animation targets in declaration order.
    pub fn targets(&self) -> &[(String, TargetKind)] {
        &self.order
    }

    pub fn channel(&self, name: &str) -> Option<&ChanInfo> {
        self.channels.get(name)
    }

    /// Declared channels, then channels generated for machine operations.
    pub fn channels(&self) -> Vec<Channel> {
        let mut out: Vec<Channel> = self.channels.values().map(|c| c.channel.clone()).collect();
        out.extend(self.op_channels.iter().cloned());
        out.sort();
        out
    }

    pub fn process(&self, name: &str) -> Option<&Arc<ProcInfo>> {
        self.rt.procs.get().and_then(|m| m.get(name))
    }

    pub fn machine(&self, name: &str) -> Option<&ZMachine> {
        self.machines.get(name)
    }

    pub fn machines(&self) -> impl Iterator<Item = &ZMachine> {
        self.order.iter().filter_map(|(n, _)| self.machines.get(n))
    }

    pub fn assertions(&self) -> &[Assertion] {
        &self.assertions
    }

    fn check_args(&self, info: &ProcInfo, args: &[Value]) -> Result<(), ElabError> {
        if args.len() != info.params.len() {
            return Err(ElabError::Arity(Span::default(), info.name.clone(), info.params.len(), args.len()));
        }
        for ((pname, t), v) in info.params.iter().zip(args) {
            if t.ty.unify(&Ty::of_value(v)).is_none() {
                return Err(ElabError::Type(Span::default(), format!("argument `{pname}` should be {}, found {v}", t.ty)));
            }
        }
        Ok(())
    }

    /// The store a process starts in when called with `args`.
    pub fn initial_store(&self, name: &str, args: &[Value]) -> Result<Store, ElabError> {
        if let Some(m) = self.machines.get(name) {
            return Ok(m.blank());
        }
        let info = self.process(name).ok_or_else(|| ElabError::UnknownTarget(name.into()))?;
        self.check_args(info, args)?;
        Ok(fresh_store(info, args.to_vec()))
    }

    /// The process body as a structured program over its store.
    pub fn program(&self, name: &str) -> Result<Program<Comm, Store>, ElabError> {
        let info = self.process(name).ok_or_else(|| ElabError::UnknownTarget(name.into()))?;
        Ok(program(&self.rt, &info.body, &Arc::new(Vec::new())))
    }

    /// The tree of a process called with `args`, or of a machine.
    pub fn target(&self, name: &str, args: &[Value]) -> Result<ITree<Comm, Store>, ElabError> {
        if let Some(m) = self.machines.get(name) {
            if !args.is_empty() {
                return Err(ElabError::Arity(Span::default(), name.into(), 0, args.len()));
            }
            return Ok(m.process());
        }
        let store = self.initial_store(name, args)?;
        Ok(self.program(name)?.to_htree()(store))
    }

    pub fn check_assertion(&self, a: &Assertion, budget: &ExplorationBudget) -> Result<HoareVerdict<Store, Comm>, VerifyError> {
        let prog = self.program(&a.target).expect("assertion targets are checked during elaboration");
        let space = StateSpace::new(a.states.iter().cloned());
        match a.correctness {
            Correctness::Partial => hoare_partial(&a.pre, &prog, &a.post, &space, budget),
            Correctness::Total => hoare_total(&a.pre, &prog, &a.post, &space, budget),
        }
    }
}

impl Assertion {
    pub fn states(&self) -> &[Store] {
        &self.states
    }
}

struct Elaborator {
    consts: BTreeMap<String, Option<Value>>,
    channels: BTreeMap<String, ChanInfo>,
    arities: BTreeMap<String, Vec<Ty>>,
    has_nd: bool,
}

struct ProcCtx<'e> {
    el: &'e Elaborator,
    proc_name: String,
    n_params: usize,
    fields: Vec<(String, Ty)>,
    locals: Vec<(String, Ty)>,
}

impl ProcCtx<'_> {
    fn scope(&self) -> Scope<'_> {
        Scope {
            consts: &self.el.consts,
            fields: self.fields.clone(),
            locals: self.locals.clone(),
        }
    }

    fn expr(&self, e: &ast::Expr) -> Result<(CExpr, Ty), ElabError> {
        compile(&self.scope(), e)
    }

    fn typed(&self, e: &ast::Expr, want: &Ty, what: &str) -> Result<CExpr, ElabError> {
        let (f, t) = self.expr(e)?;
        want.unify(&t)
            .ok_or_else(|| ElabError::Type(e.span, format!("{what} should be {want}, found {t}")))?;
        Ok(f)
    }

    fn channel(&self, name: &str, at: Span) -> Result<ChanInfo, ElabError> {
        self.el
            .channels
            .get(name)
            .cloned()
            .ok_or_else(|| ElabError::Unknown(at, "channel", name.into()))
    }

    fn event_set(&self, pats: &[ast::EventPattern], at: Span) -> Result<CEvSet, ElabError> {
        let mut patterns = Vec::new();
        for p in pats {
            let info = self.channel(&p.channel, at)?;
            if p.fields.len() > info.components.len() {
                return Err(ElabError::Type(
                    at,
                    format!("channel `{}` carries {} value(s), pattern gives {}", p.channel, info.components.len(), p.fields.len()),
                ));
            }
            let fs = p
                .fields
                .iter()
                .zip(&info.components)
                .map(|(f, c)| self.typed(f, &c.ty, "event set value"))
                .collect::<Result<Vec<_>, _>>()?;
            patterns.push((info.channel.clone(), info.components.len(), fs));
        }
        let label = {
            let parts: Vec<String> = pats
                .iter()
                .map(|p| {
                    let mut s = p.channel.clone();
                    for f in &p.fields {
                        s.push('.');
                        s.push_str(&print_expr(f));
                    }
                    s
                })
                .collect();
            format!("{{{}}}", parts.join(", "))
        };
        Ok(CEvSet { patterns, label })
    }

    fn with_local<T>(&mut self, name: &str, ty: Ty, f: impl FnOnce(&mut Self) -> Result<T, ElabError>) -> Result<T, ElabError> {
        self.locals.push((name.to_string(), ty));
        let r = f(self);
        self.locals.pop();
        r
    }

    fn proc(&mut self, p: &ast::Proc) -> Result<Arc<CProc>, ElabError> {
        let at = p.span;
        Ok(Arc::new(match &p.kind {
            ProcKind::Skip => CProc::Skip,
            ProcKind::Stop => CProc::Stop,
            ProcKind::Div => CProc::Div,
            ProcKind::Prefix { comm, body } => {
                let info = self.channel(&comm.channel, at)?;
                if comm.fields.len() != info.components.len() {
                    return Err(ElabError::Type(
                        at,
                        format!(
                            "channel `{}` carries {} value(s), communication gives {}",
                            comm.channel,
                            info.components.len(),
                            comm.fields.len()
                        ),
                    ));
                }
                let mut fields = Vec::new();
                let mut inputs = Vec::new();
                for (f, comp) in comm.fields.iter().zip(&info.components) {
                    match f {
                        ast::CommField::Dot { value } | ast::CommField::Out { value } => {
                            fields.push(CField::Out(self.typed(value, &comp.ty, "communicated value")?));
                        }
                        ast::CommField::In { var, set } => {
                            let source = match set {
                                Some(e) => {
                                    InputSet::Expr(self.typed(e, &Ty::Set(Box::new(comp.ty.clone())), "input set").or_else(|_| {
                                        self.typed(e, &Ty::List(Box::new(comp.ty.clone())), "input set")
                                    })?)
                                }
                                None => match &comp.domain {
                                    Some(d) => InputSet::Domain(Arc::new(d.clone())),
                                    None => return Err(ElabError::InfiniteInput(at, comm.channel.clone())),
                                },
                            };
                            fields.push(CField::In(source));
                            inputs.push((var.clone(), comp.ty.clone()));
                        }
                    }
                }
                let depth = self.locals.len();
                self.locals.extend(inputs);
                let body = self.proc(body);
                self.locals.truncate(depth);
                CProc::Prefix {
                    channel: info.channel.clone(),
                    fields,
                    body: body?,
                }
            }
            ProcKind::Guard { cond, body } => CProc::Guard(self.typed(cond, &Ty::Bool, "guard")?, self.proc(body)?),
            ProcKind::ExtChoice { left, right } => CProc::Ext(self.proc(left)?, self.proc(right)?),
            ProcKind::IntChoice { left, right } => {
                if !self.el.has_nd {
                    return Err(ElabError::Construction(at, ConstructionError::MissingNdChannel));
                }
                CProc::Int(self.proc(left)?, self.proc(right)?)
            }
            ProcKind::Par { left, sync, right } => self.parallel(left, Some(sync), right, at)?,
            ProcKind::Interleave { left, right } => self.parallel(left, None, right, at)?,
            ProcKind::Hide { body, hidden } => CProc::Hide(self.proc(body)?, self.event_set(hidden, at)?),
            ProcKind::Seq { first, second } => CProc::Seq(self.proc(first)?, self.proc(second)?),
            ProcKind::Assign { var, value } => {
                if self.locals.iter().any(|(n, _)| n == var) {
                    return Err(ElabError::ReadOnly(at, var.clone(), "it is bound by an input or replicator"));
                }
                let i = self
                    .fields
                    .iter()
                    .position(|(n, _)| n == var)
                    .expect("assigned names are collected as fields");
                if i < self.n_params {
                    return Err(ElabError::ReadOnly(at, var.clone(), "process parameters are read-only"));
                }
                let (f, t) = self.expr(value)?;
                let merged = self.fields[i].1.unify(&t).ok_or_else(|| {
                    ElabError::Type(at, format!("`{var}` holds {}, assigned {t}", self.fields[i].1))
                })?;
                self.fields[i].1 = merged;
                CProc::Assign(i, f)
            }
            ProcKind::If { cond, then, otherwise } => {
                CProc::If(self.typed(cond, &Ty::Bool, "condition")?, self.proc(then)?, self.proc(otherwise)?)
            }
            ProcKind::While {
                cond,
                invariant,
                variant,
                body,
            } => {
                let cond = self.typed(cond, &Ty::Bool, "loop condition")?;
                let invariant = match invariant {
                    Some(i) => Some((self.typed(i, &Ty::Bool, "invariant")?, print_expr(i))),
                    None => None,
                };
                let variant = match variant {
                    Some(v) => Some((self.typed(v, &Ty::Int, "variant")?, print_expr(v))),
                    None => None,
                };
                CProc::While {
                    label: format!("{} at {}", self.proc_name, at),
                    cond,
                    invariant,
                    variant,
                    body: self.proc(body)?,
                }
            }
            ProcKind::Call { name, args } => {
                let Some(param_tys) = self.el.arities.get(name) else {
                    return Err(ElabError::Unknown(at, "process", name.clone()));
                };
                if param_tys.len() != args.len() {
                    return Err(ElabError::Arity(at, name.clone(), param_tys.len(), args.len()));
                }
                let args = args
                    .iter()
                    .zip(param_tys.clone())
                    .map(|(a, t)| self.typed(a, &t, "argument"))
                    .collect::<Result<Vec<_>, _>>()?;
                CProc::Call { name: name.clone(), args }
            }
            ProcKind::RepExtChoice { var, set, body } | ProcKind::RepInterleave { var, set, body } => {
                let (s, t) = self.expr(set)?;
                let elem = match t {
                    Ty::Set(e) | Ty::List(e) => *e,
                    Ty::Any => Ty::Any,
                    other => return Err(ElabError::Type(at, format!("replicator ranges over a set, found {other}"))),
                };
                let b = self.with_local(var, elem, |c| c.proc(body))?;
                if let ProcKind::RepExtChoice { .. } = p.kind {
                    CProc::RepExt(s, b)
                } else {
                    let mut w = BTreeSet::new();
                    b.writes(&mut w);
                    if let Some(&i) = w.iter().next() {
                        return Err(ElabError::SharedWrite(at, self.fields[i].0.clone()));
                    }
                    CProc::RepInter(s, b)
                }
            }
        }))
    }

    fn parallel(&mut self, left: &ast::Proc, sync: Option<&[ast::EventPattern]>, right: &ast::Proc, at: Span) -> Result<CProc, ElabError> {
        let l = self.proc(left)?;
        let r = self.proc(right)?;
        let sync = match sync {
            Some(s) => self.event_set(s, at)?,
            None => CEvSet {
                patterns: Vec::new(),
                label: "{}".into(),
            },
        };
        let (mut lw, mut rw) = (BTreeSet::new(), BTreeSet::new());
        l.writes(&mut lw);
        r.writes(&mut rw);
        if let Some(&i) = lw.intersection(&rw).next() {
            return Err(ElabError::SharedWrite(at, self.fields[i].0.clone()));
        }
        Ok(CProc::Par {
            left: l,
            sync,
            right: r,
            left_writes: lw.into_iter().collect(),
            right_writes: rw.into_iter().collect(),
        })
    }
}

fn assigned_vars(p: &ast::Proc, out: &mut Vec<String>) {
    let mut visit = |q: &ast::Proc| assigned_vars(q, out);
    match &p.kind {
        ProcKind::Assign { var, .. } => {
            if !out.contains(var) {
                out.push(var.clone());
            }
        }
        ProcKind::Prefix { body, .. }
        | ProcKind::Guard { body, .. }
        | ProcKind::Hide { body, .. }
        | ProcKind::While { body, .. }
        | ProcKind::RepExtChoice { body, .. }
        | ProcKind::RepInterleave { body, .. } => visit(body),
        ProcKind::ExtChoice { left, right }
        | ProcKind::IntChoice { left, right }
        | ProcKind::Par { left, right, .. }
        | ProcKind::Interleave { left, right } => {
            visit(left);
            visit(right);
        }
        ProcKind::Seq { first, second } => {
            visit(first);
            visit(second);
        }
        ProcKind::If { then, otherwise, .. } => {
            visit(then);
            visit(otherwise);
        }
        ProcKind::Skip | ProcKind::Stop | ProcKind::Div | ProcKind::Call { .. } => {}
    }
}

/// References reachable without passing a prefix or entering a loop body.
fn unguarded_refs(p: &ast::Proc, out: &mut BTreeSet<String>) {
    match &p.kind {
        ProcKind::Call { name, .. } => {
            out.insert(name.clone());
        }
        ProcKind::Prefix { .. } | ProcKind::While { .. } => {}
        ProcKind::Guard { body, .. }
        | ProcKind::Hide { body, .. }
        | ProcKind::RepExtChoice { body, .. }
        | ProcKind::RepInterleave { body, .. } => unguarded_refs(body, out),
        ProcKind::ExtChoice { left, right }
        | ProcKind::IntChoice { left, right }
        | ProcKind::Par { left, right, .. }
        | ProcKind::Interleave { left, right } => {
            unguarded_refs(left, out);
            unguarded_refs(right, out);
        }
        ProcKind::Seq { first, second } => {
            unguarded_refs(first, out);
            unguarded_refs(second, out);
        }
        ProcKind::If { then, otherwise, .. } => {
            unguarded_refs(then, out);
            unguarded_refs(otherwise, out);
        }
        ProcKind::Skip | ProcKind::Stop | ProcKind::Div | ProcKind::Assign { .. } => {}
    }
}

fn check_guardedness(model: &ast::Model) -> Result<(), ElabError> {
    let mut graph: BTreeMap<&str, BTreeSet<String>> = BTreeMap::new();
    for item in &model.items {
        if let Item::Process(p) = item {
            let mut refs = BTreeSet::new();
            unguarded_refs(&p.body, &mut refs);
            graph.insert(&p.name, refs);
        }
    }
    // Depth-first search for a cycle, keeping the current path.
    fn visit<'a>(
        n: &'a str,
        graph: &'a BTreeMap<&'a str, BTreeSet<String>>,
        path: &mut Vec<&'a str>,
        done: &mut BTreeSet<&'a str>,
    ) -> Option<Vec<String>> {
        if let Some(i) = path.iter().position(|p| *p == n) {
            let mut cycle: Vec<String> = path[i..].iter().map(|s| s.to_string()).collect();
            cycle.push(n.to_string());
            return Some(cycle);
        }
        if done.contains(n) {
            return None;
        }
        path.push(n);
        for m in graph.get(n).into_iter().flatten() {
            if let Some((k, _)) = graph.get_key_value(m.as_str()) {
                if let Some(c) = visit(k, graph, path, done) {
                    return Some(c);
                }
            }
        }
        path.pop();
        done.insert(n);
        None
    }
    let mut done = BTreeSet::new();
    for n in graph.keys() {
        if let Some(cycle) = visit(n, &graph, &mut Vec::new(), &mut done) {
            return Err(ElabError::UnguardedRecursion(cycle));
        }
    }
    Ok(())
}

/// Elaborates `model`. `bindings` give values for constants, overriding any
/// value in the model; every constant that is used must end up bound.
pub fn elaborate(model: &ast::Model, bindings: &BTreeMap<String, Value>) -> Result<Definitions, ElabError> {
    check_guardedness(model)?;
    let mut el = Elaborator {
        consts: BTreeMap::new(),
        channels: BTreeMap::new(),
        arities: BTreeMap::new(),
        has_nd: false,
    };
    let mut constants = Vec::new();
    for item in &model.items {
        if let Item::Const(c) = item {
            let v = match (bindings.get(&c.name), &c.value) {
                (Some(v), _) => Some(v.clone()),
                (None, Some(e)) => Some(eval_const(&el.consts, e)?),
                (None, None) => None,
            };
            el.consts.insert(c.name.clone(), v.clone());
            constants.push((c.name.clone(), v));
        }
    }
    if let Some(unknown) = bindings.keys().find(|k| !el.consts.contains_key(*k)) {
        return Err(ElabError::Unknown(Span::default(), "constant", unknown.clone()));
    }
    let mut next_id = 0u32;
    for item in &model.items {
        if let Item::Channel(c) = item {
            let components = c.payload.iter().map(|t| resolve_type(&el.consts, t, c.span)).collect::<Result<Vec<_>, _>>()?;
            for n in &c.names {
                let info = ChanInfo {
                    channel: Channel::new(next_id, n.as_str()),
                    components: components.clone(),
                };
                next_id += 1;
                el.channels.insert(n.clone(), info);
            }
        }
    }
    let nd = el.channels.get("nd").map(|info| {
        let (b, m) = (info.channel.clone(), info.channel.clone());
        Prism::new(
            "nd",
            move |i: usize| b.event(Value::Int(i as i64)),
            move |e: &Comm| (e.channel == m).then(|| e.value.as_int().map(|i| i as usize)).flatten(),
        )
    });
    el.has_nd = nd.is_some();

    // Parameter types first, so references can be checked in any order.
    let mut param_infos: BTreeMap<String, Vec<(String, TypeInfo)>> = BTreeMap::new();
    for item in &model.items {
        if let Item::Process(p) = item {
            let ps = p
                .params
                .iter()
                .map(|q| Ok((q.name.clone(), resolve_type(&el.consts, &q.ty, q.span)?)))
                .collect::<Result<Vec<_>, ElabError>>()?;
            el.arities.insert(p.name.clone(), ps.iter().map(|(_, t)| t.ty.clone()).collect());
            param_infos.insert(p.name.clone(), ps);
        }
    }

    let mut procs = BTreeMap::new();
    let mut order = Vec::new();
    for item in &model.items {
        if let Item::Process(p) = item {
            let params = param_infos.remove(&p.name).unwrap();
            let mut vars = Vec::new();
            assigned_vars(&p.body, &mut vars);
            let mut fields: Vec<(String, Ty)> = params.iter().map(|(n, t)| (n.clone(), t.ty.clone())).collect();
            for v in vars {
                if !fields.iter().any(|(n, _)| *n == v) {
                    fields.push((v, Ty::Any));
                }
            }
            let mut ctx = ProcCtx {
                el: &el,
                proc_name: p.name.clone(),
                n_params: params.len(),
                fields,
                locals: Vec::new(),
            };
            let body = ctx.proc(&p.body)?;
            let schema = Schema::new(p.name.clone(), ctx.fields.iter().map(|(n, _)| n.clone()));
            let field_types = ctx.fields.iter().map(|(_, t)| t.clone()).collect();
            procs.insert(
                p.name.clone(),
                Arc::new(ProcInfo {
                    name: p.name.clone(),
                    schema,
                    params,
                    field_types,
                    body,
                }),
            );
            order.push((p.name.clone(), TargetKind::Process));
        }
    }

    let mut machines = BTreeMap::new();
    let mut op_channels = Vec::new();
    for item in &model.items {
        if let Item::Zmachine(m) = item {
            let zm = machine(&el, m, &constants, &mut next_id, &mut op_channels)?;
            machines.insert(m.name.clone(), zm);
            order.push((m.name.clone(), TargetKind::Zmachine));
        }
    }

    let mut assertions = Vec::new();
    for item in &model.items {
        if let Item::Assert(a) = item {
            assertions.push(assertion(&el, a, &procs)?);
        }
    }

    let rt = Arc::new(Runtime {
        procs: OnceLock::new(),
        nd,
    });
    let _ = rt.procs.set(procs);
    Ok(Definitions {
        rt,
        constants,
        channels: el.channels,
        op_channels,
        machines,
        assertions,
        order,
    })
}

fn assertion(el: &Elaborator, a: &ast::AssertDecl, procs: &BTreeMap<String, Arc<ProcInfo>>) -> Result<Assertion, ElabError> {
    let info = procs
        .get(&a.target)
        .ok_or_else(|| ElabError::Unknown(a.span, "process", a.target.clone()))?;
    let scope = Scope {
        consts: &el.consts,
        fields: info.schema.fields.iter().cloned().zip(info.field_types.iter().cloned()).collect(),
        locals: Vec::new(),
    };
    let cond = |e: &ast::Expr| -> Result<itree_core::Expr<Store, bool>, ElabError> {
        let (f, t) = compile(&scope, e)?;
        Ty::Bool
            .unify(&t)
            .ok_or_else(|| ElabError::Type(e.span, format!("condition should be bool, found {t}")))?;
        Ok(Arc::new(move |s: &Store| truth(&f(s, &[]))))
    };
    let (pre, post) = (cond(&a.pre)?, cond(&a.post)?);
    let mut domains: Vec<Vec<Value>> = vec![vec![Value::Unit]; info.schema.fields.len()];
    for p in &a.over {
        let i = info
            .schema
            .index(&p.name)
            .ok_or_else(|| ElabError::Unknown(p.span, "variable", p.name.clone()))?;
        let t = resolve_type(&el.consts, &p.ty, p.span)?;
        domains[i] = t
            .domain
            .ok_or_else(|| ElabError::Type(p.span, format!("`{}` needs a finite type to range over", p.name)))?;
    }
    let item = Item::Assert(a.clone());
    Ok(Assertion {
        name: a.name.clone(),
        correctness: a.correctness,
        target: a.target.clone(),
        text: crate::printer::print_item(&item),
        pre,
        post,
        states: Store::enumerate(&info.schema, &domains),
    })
}

fn machine(
    el: &Elaborator,
    m: &ast::MachineDecl,
    constants: &[(String, Option<Value>)],
    next_id: &mut u32,
    op_channels: &mut Vec<Channel>,
) -> Result<ZMachine, ElabError> {
    let types = m
        .state
        .iter()
        .map(|p| resolve_type(&el.consts, &p.ty, p.span))
        .collect::<Result<Vec<_>, _>>()?;
    let schema = Schema::new(m.name.clone(), m.state.iter().map(|p| p.name.clone()));
    let fields: Vec<(String, Ty)> = m.state.iter().map(|p| p.name.clone()).zip(types.iter().map(|t| t.ty.clone())).collect();
    let scope = |locals: Vec<(String, Ty)>| Scope {
        consts: &el.consts,
        fields: fields.clone(),
        locals,
    };
    let typed = |sc: &Scope, e: &ast::Expr, want: &Ty, what: &str| -> Result<CExpr, ElabError> {
        let (f, t) = compile(sc, e)?;
        want.unify(&t)
            .ok_or_else(|| ElabError::Type(e.span, format!("{what} should be {want}, found {t}")))?;
        Ok(f)
    };
    let updates = |sc: &Scope, asg: &[ast::Assignment]| -> Result<Vec<(usize, CExpr)>, ElabError> {
        let mut seen = BTreeSet::new();
        asg.iter()
            .map(|a| {
                let i = schema
                    .index(&a.var)
                    .ok_or_else(|| ElabError::Unknown(a.span, "state variable", a.var.clone()))?;
                if !seen.insert(i) {
                    return Err(ElabError::Construction(a.span, ConstructionError::OverlappingAssignment(a.var.clone())));
                }
                Ok((i, typed(sc, &a.value, &fields[i].1, &format!("value for `{}`", a.var))?))
            })
            .collect()
    };
    let apply = |ups: Vec<(usize, CExpr)>| -> Arc<dyn Fn(&Store, &[Value]) -> Store + Send + Sync> {
        Arc::new(move |s: &Store, l: &[Value]| {
            let vals: Vec<(usize, Value)> = ups.iter().map(|(i, f)| (*i, f(s, l))).collect();
            vals.into_iter().fold(s.clone(), |acc, (i, v)| acc.set(i, v))
        })
    };

    let invariants = m
        .invariant
        .iter()
        .map(|e| {
            let f = typed(&scope(Vec::new()), e, &Ty::Bool, "invariant")?;
            let g: StoreFn<bool> = Arc::new(move |s: &Store| truth(&f(s, &[])));
            Ok((print_expr(e), g))
        })
        .collect::<Result<Vec<_>, ElabError>>()?;
    let init_update = apply(updates(&scope(Vec::new()), &m.init)?);
    let init: StoreFn<Store> = Arc::new(move |s: &Store| init_update(s, &[]));

    let mut operations = Vec::new();
    for op in &m.operations {
        let channel = match el.channels.get(&op.name) {
            Some(c) => c.channel.clone(),
            None => {
                let c = Channel::operation(*next_id, op.name.as_str());
                *next_id += 1;
                op_channels.push(c.clone());
                c
            }
        };
        let zop = match &op.body {
            OpBody::Emit { value } => {
                let (f, _) = compile(&scope(Vec::new()), value)?;
                ZOperation {
                    name: op.name.clone(),
                    channel,
                    params: vec![ZParam {
                        name: "value".into(),
                        values: Arc::new(move |s: &Store| vec![f(s, &[])]),
                    }],
                    pre: Vec::new(),
                    update: Arc::new(|s: &Store, _: &[Value]| s.clone()),
                }
            }
            OpBody::Full { params, pre, update } => {
                let mut locals = Vec::new();
                let mut zparams = Vec::new();
                for p in params {
                    let (f, t) = compile(&scope(Vec::new()), &p.set)?;
                    let elem = match t {
                        Ty::Set(e) | Ty::List(e) => *e,
                        Ty::Any => Ty::Any,
                        other => return Err(ElabError::Type(p.span, format!("parameter set should be a set, found {other}"))),
                    };
                    zparams.push(ZParam {
                        name: p.name.clone(),
                        values: Arc::new(move |s: &Store| f(s, &[]).elements().unwrap_or_default()),
                    });
                    locals.push((p.name.clone(), elem));
                }
                let sc = scope(locals);
                let pre = pre
                    .iter()
                    .map(|e| {
                        let f = typed(&sc, e, &Ty::Bool, "precondition")?;
                        let g: itree_core::zmachine::ParamFn<bool> = Arc::new(move |s: &Store, l: &[Value]| truth(&f(s, l)));
                        Ok((print_expr(e), g))
                    })
                    .collect::<Result<Vec<_>, ElabError>>()?;
                ZOperation {
                    name: op.name.clone(),
                    channel,
                    params: zparams,
                    pre,
                    update: apply(updates(&sc, update)?),
                }
            }
        };
        operations.push(zop);
    }
    Ok(ZMachine {
        name: m.name.clone(),
        schema,
        domains: types.into_iter().map(|t| t.domain).collect(),
        invariants,
        init,
        operations,
        constants: constants.to_vec(),
    })
}

/// Reads a constant value written as an expression, e.g. `{0, 1}` or `3`.
pub fn parse_binding(name: &str, text: &str) -> Result<Value, ElabError> {
    let e = crate::parser::parse_expr(text).map_err(|err| ElabError::BadBinding(name.into(), err.to_string()))?;
    eval_const(&BTreeMap::new(), &e).map_err(|err| ElabError::BadBinding(name.into(), err.to_string()))
}
