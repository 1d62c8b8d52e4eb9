//! Type checking and compilation of expressions to closures over a store and
//! the values of bound names (inputs, replicator variables, operation
//! parameters).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use itree_core::value::{Schema, Store, Value};

use crate::ast::{BinOp, Expr, ExprKind, Span, TypeExpr, UnOp};
use crate::error::ElabError;

pub type CExpr = Arc<dyn Fn(&Store, &[Value]) -> Value + Send + Sync>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Ty {
    /// Not yet known; agrees with everything.
    Any,
    Unit,
    Int,
    Bool,
    List(Box<Ty>),
    Set(Box<Ty>),
    Tuple(Vec<Ty>),
}

impl fmt::Display for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ty::Any => f.write_str("?"),
            Ty::Unit => f.write_str("unit"),
            Ty::Int => f.write_str("int"),
            Ty::Bool => f.write_str("bool"),
            Ty::List(t) => write!(f, "{t} list"),
            Ty::Set(t) => write!(f, "{t} set"),
            Ty::Tuple(ts) => {
                let parts: Vec<String> = ts.iter().map(|t| t.to_string()).collect();
                write!(f, "({})", parts.join(", "))
            }
        }
    }
}

impl Ty {
    pub fn unify(&self, other: &Ty) -> Option<Ty> {
        match (self, other) {
            (Ty::Any, t) | (t, Ty::Any) => Some(t.clone()),
            (Ty::List(a), Ty::List(b)) => a.unify(b).map(|t| Ty::List(Box::new(t))),
            (Ty::Set(a), Ty::Set(b)) => a.unify(b).map(|t| Ty::Set(Box::new(t))),
            (Ty::Tuple(a), Ty::Tuple(b)) if a.len() == b.len() => {
                a.iter().zip(b).map(|(x, y)| x.unify(y)).collect::<Option<Vec<_>>>().map(Ty::Tuple)
            }
            (a, b) if a == b => Some(a.clone()),
            _ => None,
        }
    }

    pub fn of_value(v: &Value) -> Ty {
        let elems = |vs: &mut dyn Iterator<Item = &Value>| vs.fold(Ty::Any, |t, v| t.unify(&Ty::of_value(v)).unwrap_or(Ty::Any));
        match v {
            Value::Unit => Ty::Unit,
            Value::Bool(_) => Ty::Bool,
            Value::Int(_) => Ty::Int,
            Value::List(vs) => Ty::List(Box::new(elems(&mut vs.iter()))),
            Value::Set(vs) => Ty::Set(Box::new(elems(&mut vs.iter()))),
            Value::Tuple(vs) => Ty::Tuple(vs.iter().map(Ty::of_value).collect()),
        }
    }

    /// Element type of a list or set.
    fn element(&self) -> Option<Ty> {
        match self {
            Ty::Any => Some(Ty::Any),
            Ty::List(t) | Ty::Set(t) => Some((**t).clone()),
            _ => None,
        }
    }
}

/// A resolved type: its shape and, when finite, every value in it.
#[derive(Clone, Debug)]
pub struct TypeInfo {
    pub ty: Ty,
    pub domain: Option<Vec<Value>>,
}

/// Names visible to an expression.
pub struct Scope<'a> {
    pub consts: &'a BTreeMap<String, Option<Value>>,
    pub fields: Vec<(String, Ty)>,
    pub locals: Vec<(String, Ty)>,
}

pub enum Resolved {
    Local(usize, Ty),
    Field(usize, Ty),
    Const(Value),
}

impl<'a> Scope<'a> {
    pub fn constants(consts: &'a BTreeMap<String, Option<Value>>) -> Self {
        Scope {
            consts,
            fields: Vec::new(),
            locals: Vec::new(),
        }
    }

    pub fn resolve(&self, name: &str, at: Span) -> Result<Resolved, ElabError> {
        if let Some(i) = self.locals.iter().rposition(|(n, _)| n == name) {
            return Ok(Resolved::Local(i, self.locals[i].1.clone()));
        }
        if let Some(i) = self.fields.iter().position(|(n, _)| n == name) {
            return Ok(Resolved::Field(i, self.fields[i].1.clone()));
        }
        match self.consts.get(name) {
            Some(Some(v)) => Ok(Resolved::Const(v.clone())),
            Some(None) => Err(ElabError::UnboundConstant(name.to_string())),
            None => Err(ElabError::Unknown(at, "name", name.to_string())),
        }
    }
}

fn type_err(at: Span, msg: impl Into<String>) -> ElabError {
    ElabError::Type(at, msg.into())
}

fn expect(at: Span, want: &Ty, got: &Ty, what: &str) -> Result<Ty, ElabError> {
    want.unify(got).ok_or_else(|| type_err(at, format!("{what} should be {want}, found {got}")))
}

pub fn int(v: &Value) -> i64 {
    v.as_int().unwrap_or(0)
}

pub fn truth(v: &Value) -> bool {
    v.as_bool().unwrap_or(false)
}

fn items(v: &Value) -> Vec<Value> {
    v.elements().unwrap_or_default()
}

/// Lists over `alphabet` of length at most `n`, shortest first.
pub fn sequences(alphabet: &[Value], n: usize) -> Vec<Value> {
    let mut out = vec![Vec::new()];
    let mut layer: Vec<Vec<Value>> = vec![Vec::new()];
    for _ in 0..n {
        layer = layer
            .iter()
            .flat_map(|p| {
                alphabet.iter().map(move |a| {
                    let mut q = p.clone();
                    q.push(a.clone());
                    q
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out.into_iter().map(Value::List).collect()
}

/// Built-in functions: name, arity.
pub const BUILTINS: &[(&str, usize)] = &[
    ("length", 1),
    ("card", 1),
    ("head", 1),
    ("tail", 1),
    ("last", 1),
    ("take", 2),
    ("drop", 2),
    ("rev", 1),
    ("elems", 1),
    ("seqs", 2),
    ("min", 2),
    ("max", 2),
];

// Partial functions are made total: `head []` and out-of-range indexing give
// `()`, `tail []` is `[]`, and division by zero gives 0.
fn apply_builtin(name: &str, args: &[Value]) -> Value {
    let list = |v: &Value| v.as_list().map(<[Value]>::to_vec).unwrap_or_default();
    match name {
        "length" | "card" => Value::Int(items(&args[0]).len() as i64),
        "head" => list(&args[0]).first().cloned().unwrap_or(Value::Unit),
        "last" => list(&args[0]).last().cloned().unwrap_or(Value::Unit),
        "tail" => Value::List(list(&args[0]).into_iter().skip(1).collect()),
        "take" => Value::List(list(&args[1]).into_iter().take(int(&args[0]).max(0) as usize).collect()),
        "drop" => Value::List(list(&args[1]).into_iter().skip(int(&args[0]).max(0) as usize).collect()),
        "rev" => Value::List(list(&args[0]).into_iter().rev().collect()),
        "elems" => Value::Set(items(&args[0]).into_iter().collect()),
        "seqs" => Value::Set(sequences(&items(&args[0]), int(&args[1]).max(0) as usize).into_iter().collect()),
        "min" => Value::Int(int(&args[0]).min(int(&args[1]))),
        "max" => Value::Int(int(&args[0]).max(int(&args[1]))),
        _ => unreachable!("checked builtin {name}"),
    }
}

fn builtin_type(name: &str, at: Span, args: &[Ty]) -> Result<Ty, ElabError> {
    let coll = |t: &Ty| t.element().ok_or_else(|| type_err(at, format!("`{name}` needs a list or set, found {t}")));
    let list = |t: &Ty| expect(at, &Ty::List(Box::new(Ty::Any)), t, &format!("argument of `{name}`"));
    match name {
        "length" | "card" => coll(&args[0]).map(|_| Ty::Int),
        "head" | "last" => list(&args[0]).and_then(|t| coll(&t)),
        "tail" | "rev" => list(&args[0]),
        "take" | "drop" => {
            expect(at, &Ty::Int, &args[0], &format!("count of `{name}`"))?;
            list(&args[1])
        }
        "elems" => coll(&args[0]).map(|t| Ty::Set(Box::new(t))),
        "seqs" => {
            let t = coll(&args[0])?;
            expect(at, &Ty::Int, &args[1], "length bound of `seqs`")?;
            Ok(Ty::Set(Box::new(Ty::List(Box::new(t)))))
        }
        "min" | "max" => {
            expect(at, &Ty::Int, &args[0], "argument")?;
            expect(at, &Ty::Int, &args[1], "argument").map(|_| Ty::Int)
        }
        _ => unreachable!(),
    }
}

fn constant(v: Value) -> CExpr {
    Arc::new(move |_, _| v.clone())
}

pub fn compile(scope: &Scope, e: &Expr) -> Result<(CExpr, Ty), ElabError> {
    let at = e.span;
    Ok(match &e.kind {
        ExprKind::Int { value } => (constant(Value::Int(*value)), Ty::Int),
        ExprKind::Bool { value } => (constant(Value::Bool(*value)), Ty::Bool),
        ExprKind::Var { name } => match scope.resolve(name, at)? {
            Resolved::Local(i, t) => (Arc::new(move |_, l: &[Value]| l[i].clone()), t),
            Resolved::Field(i, t) => (Arc::new(move |s: &Store, _: &[Value]| s.at(i).clone()), t),
            Resolved::Const(v) => {
                let t = Ty::of_value(&v);
                (constant(v), t)
            }
        },
        ExprKind::Unary { op, arg } => {
            let (a, t) = compile(scope, arg)?;
            match op {
                UnOp::Not => {
                    expect(at, &Ty::Bool, &t, "operand of `not`")?;
                    (Arc::new(move |s, l| Value::Bool(!truth(&a(s, l)))), Ty::Bool)
                }
                UnOp::Neg => {
                    expect(at, &Ty::Int, &t, "operand of `-`")?;
                    (Arc::new(move |s, l| Value::Int(int(&a(s, l)).wrapping_neg())), Ty::Int)
                }
            }
        }
        ExprKind::Binary { op, left, right } => binary(scope, *op, left, right, at)?,
        ExprKind::Call { func, args } => {
            let Some(&(_, arity)) = BUILTINS.iter().find(|(n, _)| n == func) else {
                return Err(ElabError::Unknown(at, "function", func.clone()));
            };
            if args.len() != arity {
                return Err(ElabError::Arity(at, func.clone(), arity, args.len()));
            }
            let compiled = args.iter().map(|a| compile(scope, a)).collect::<Result<Vec<_>, _>>()?;
            let tys: Vec<Ty> = compiled.iter().map(|(_, t)| t.clone()).collect();
            let t = builtin_type(func, at, &tys)?;
            let fs: Vec<CExpr> = compiled.into_iter().map(|(f, _)| f).collect();
            let name = func.clone();
            (
                Arc::new(move |s, l| {
                    let vs: Vec<Value> = fs.iter().map(|f| f(s, l)).collect();
                    apply_builtin(&name, &vs)
                }),
                t,
            )
        }
        ExprKind::Index { list, index } => {
            let (xs, lt) = compile(scope, list)?;
            let (i, it) = compile(scope, index)?;
            let lt = expect(at, &Ty::List(Box::new(Ty::Any)), &lt, "indexed value")?;
            expect(at, &Ty::Int, &it, "index")?;
            (
                Arc::new(move |s, l| {
                    let n = int(&i(s, l));
                    xs(s, l)
                        .as_list()
                        .and_then(|vs| usize::try_from(n).ok().and_then(|n| vs.get(n).cloned()))
                        .unwrap_or(Value::Unit)
                }),
                lt.element().unwrap_or(Ty::Any),
            )
        }
        ExprKind::List { elems } | ExprKind::Set { elems } | ExprKind::Tuple { elems } => {
            let compiled = elems.iter().map(|a| compile(scope, a)).collect::<Result<Vec<_>, _>>()?;
            let tys: Vec<Ty> = compiled.iter().map(|(_, t)| t.clone()).collect();
            let fs: Vec<CExpr> = compiled.into_iter().map(|(f, _)| f).collect();
            let eval = move |s: &Store, l: &[Value]| fs.iter().map(|f| f(s, l)).collect::<Vec<Value>>();
            if let ExprKind::Tuple { .. } = e.kind {
                (Arc::new(move |s, l| Value::Tuple(eval(s, l))), Ty::Tuple(tys))
            } else {
                let mut elem = Ty::Any;
                for t in &tys {
                    elem = expect(at, &elem, t, "element")?;
                }
                if let ExprKind::List { .. } = e.kind {
                    (Arc::new(move |s, l| Value::List(eval(s, l))), Ty::List(Box::new(elem)))
                } else {
                    (Arc::new(move |s, l| Value::Set(eval(s, l).into_iter().collect())), Ty::Set(Box::new(elem)))
                }
            }
        }
        ExprKind::Range { lo, hi } => {
            let (a, at_) = compile(scope, lo)?;
            let (b, bt) = compile(scope, hi)?;
            expect(at, &Ty::Int, &at_, "range bound")?;
            expect(at, &Ty::Int, &bt, "range bound")?;
            (
                Arc::new(move |s, l| Value::Set((int(&a(s, l))..=int(&b(s, l))).map(Value::Int).collect())),
                Ty::Set(Box::new(Ty::Int)),
            )
        }
    })
}

fn binary(scope: &Scope, op: BinOp, left: &Expr, right: &Expr, at: Span) -> Result<(CExpr, Ty), ElabError> {
    let (a, lt) = compile(scope, left)?;
    let (b, rt) = compile(scope, right)?;
    let sym = op.symbol();
    let arith = |f: fn(i64, i64) -> i64| -> Result<(CExpr, Ty), ElabError> {
        expect(at, &Ty::Int, &lt, &format!("left operand of `{sym}`"))?;
        expect(at, &Ty::Int, &rt, &format!("right operand of `{sym}`"))?;
        let (a, b) = (a.clone(), b.clone());
        Ok((Arc::new(move |s, l| Value::Int(f(int(&a(s, l)), int(&b(s, l))))), Ty::Int))
    };
    let order = |f: fn(&Value, &Value) -> bool| -> Result<(CExpr, Ty), ElabError> {
        expect(at, &Ty::Int, &lt, &format!("left operand of `{sym}`"))?;
        expect(at, &Ty::Int, &rt, &format!("right operand of `{sym}`"))?;
        let (a, b) = (a.clone(), b.clone());
        Ok((Arc::new(move |s, l| Value::Bool(f(&a(s, l), &b(s, l)))), Ty::Bool))
    };
    match op {
        BinOp::Add => arith(i64::wrapping_add),
        BinOp::Sub => arith(i64::wrapping_sub),
        BinOp::Mul => arith(i64::wrapping_mul),
        BinOp::Div => arith(|x, y| if y == 0 { 0 } else { x.div_euclid(y) }),
        BinOp::Mod => arith(|x, y| if y == 0 { 0 } else { x.rem_euclid(y) }),
        BinOp::Lt => order(|x, y| int(x) < int(y)),
        BinOp::Le => order(|x, y| int(x) <= int(y)),
        BinOp::Gt => order(|x, y| int(x) > int(y)),
        BinOp::Ge => order(|x, y| int(x) >= int(y)),
        BinOp::Eq | BinOp::Ne => {
            lt.unify(&rt)
                .ok_or_else(|| type_err(at, format!("cannot compare {lt} with {rt}")))?;
            let eq = op == BinOp::Eq;
            Ok((Arc::new(move |s, l| Value::Bool((a(s, l) == b(s, l)) == eq)), Ty::Bool))
        }
        BinOp::And | BinOp::Or => {
            expect(at, &Ty::Bool, &lt, &format!("left operand of `{sym}`"))?;
            expect(at, &Ty::Bool, &rt, &format!("right operand of `{sym}`"))?;
            let f: CExpr = if op == BinOp::And {
                Arc::new(move |s, l| Value::Bool(truth(&a(s, l)) && truth(&b(s, l))))
            } else {
                Arc::new(move |s, l| Value::Bool(truth(&a(s, l)) || truth(&b(s, l))))
            };
            Ok((f, Ty::Bool))
        }
        BinOp::In => {
            let elem = rt
                .element()
                .ok_or_else(|| type_err(at, format!("right operand of `in` should be a set or list, found {rt}")))?;
            expect(at, &elem, &lt, "member")?;
            Ok((Arc::new(move |s, l| Value::Bool(items(&b(s, l)).contains(&a(s, l)))), Ty::Bool))
        }
        BinOp::Concat => {
            let t = lt.unify(&rt).ok_or_else(|| type_err(at, format!("cannot join {lt} with {rt}")))?;
            match t {
                Ty::List(_) | Ty::Any => Ok((
                    Arc::new(move |s, l| {
                        let mut xs = items(&a(s, l));
                        xs.extend(items(&b(s, l)));
                        Value::List(xs)
                    }),
                    t,
                )),
                Ty::Set(_) => Ok((
                    Arc::new(move |s, l| {
                        let mut xs: BTreeSet<Value> = items(&a(s, l)).into_iter().collect();
                        xs.extend(items(&b(s, l)));
                        Value::Set(xs)
                    }),
                    t,
                )),
                other => Err(type_err(at, format!("`++` joins lists or sets, found {other}"))),
            }
        }
    }
}

fn empty_store() -> Store {
    Store::new(Schema::new("", Vec::<String>::new()), Vec::new())
}

/// Evaluates an expression that may mention only constants.
pub fn eval_const(consts: &BTreeMap<String, Option<Value>>, e: &Expr) -> Result<Value, ElabError> {
    let (f, _) = compile(&Scope::constants(consts), e).map_err(|err| match err {
        ElabError::Unknown(at, _, n) => ElabError::Constant(at, format!("`{n}` is not a constant")),
        other => other,
    })?;
    Ok(f(&empty_store(), &[]))
}

pub fn resolve_type(consts: &BTreeMap<String, Option<Value>>, t: &TypeExpr, at: Span) -> Result<TypeInfo, ElabError> {
    let finite = |vals: Vec<Value>| {
        let ty = vals.iter().fold(Ty::Any, |t, v| t.unify(&Ty::of_value(v)).unwrap_or(t));
        let set: BTreeSet<Value> = vals.into_iter().collect();
        TypeInfo {
            ty,
            domain: Some(set.into_iter().collect()),
        }
    };
    Ok(match t {
        TypeExpr::Int => TypeInfo { ty: Ty::Int, domain: None },
        TypeExpr::Bool => TypeInfo {
            ty: Ty::Bool,
            domain: Some(vec![Value::Bool(false), Value::Bool(true)]),
        },
        TypeExpr::Named { name } => match consts.get(name) {
            Some(Some(v)) => match v.elements() {
                Some(vals) => finite(vals),
                None => return Err(type_err(at, format!("constant `{name}` is not a set and cannot be used as a type"))),
            },
            Some(None) => return Err(ElabError::UnboundConstant(name.clone())),
            None => return Err(ElabError::Unknown(at, "type", name.clone())),
        },
        TypeExpr::Enum { values } => finite(values.iter().map(|e| eval_const(consts, e)).collect::<Result<_, _>>()?),
        TypeExpr::Range { lo, hi } => {
            let (lo, hi) = (int(&eval_const(consts, lo)?), int(&eval_const(consts, hi)?));
            TypeInfo {
                ty: Ty::Int,
                domain: Some((lo..=hi).map(Value::Int).collect()),
            }
        }
        TypeExpr::List { elem, max_len } => {
            let inner = resolve_type(consts, elem, at)?;
            let bound = max_len.as_ref().map(|n| eval_const(consts, n)).transpose()?;
            let domain = match (&inner.domain, bound) {
                (Some(d), Some(n)) => Some(sequences(d, int(&n).max(0) as usize)),
                _ => None,
            };
            TypeInfo {
                ty: Ty::List(Box::new(inner.ty)),
                domain,
            }
        }
    })
}
