//! Dynamically typed values, channels and stores, as used by models loaded
//! at run time.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::circus::Lens;
use crate::prism::Prism;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(untagged)]
pub enum Value {
    Unit,
    Bool(bool),
    Int(i64),
    List(Vec<Value>),
    Set(BTreeSet<Value>),
    Tuple(Vec<Value>),
}

impl Value {
    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Int(i) => Some(*i),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Value]> {
        match self {
            Value::List(l) => Some(l),
            _ => None,
        }
    }

    pub fn ints(xs: impl IntoIterator<Item = i64>) -> Value {
        Value::List(xs.into_iter().map(Value::Int).collect())
    }

    /// Elements of a list or set, in order.
    pub fn elements(&self) -> Option<Vec<Value>> {
        match self {
            Value::List(l) => Some(l.clone()),
            Value::Set(s) => Some(s.iter().cloned().collect()),
            _ => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn join(f: &mut fmt::Formatter<'_>, items: impl Iterator<Item = impl fmt::Display>) -> fmt::Result {
            for (i, v) in items.enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{v}")?;
            }
            Ok(())
        }
        match self {
            Value::Unit => f.write_str("()"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Int(i) => write!(f, "{i}"),
            Value::List(l) => {
                f.write_str("[")?;
                join(f, l.iter())?;
                f.write_str("]")
            }
            Value::Set(s) => {
                f.write_str("{")?;
                join(f, s.iter())?;
                f.write_str("}")
            }
            Value::Tuple(t) => {
                f.write_str("(")?;
                join(f, t.iter())?;
                f.write_str(")")
            }
        }
    }
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<i64> for Value {
    fn from(i: i64) -> Self {
        Value::Int(i)
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Bool(b)
    }
}

/// A named channel. Channels compare by declaration index, which fixes the
/// order of events on a menu.
#[derive(Clone)]
pub struct Channel {
    id: u32,
    name: Arc<str>,
    operation: bool,
}

impl Channel {
    pub fn new(id: u32, name: impl Into<Arc<str>>) -> Self {
        Channel {
            id,
            name: name.into(),
            operation: false,
        }
    }

    /// A channel carrying the parameters of a machine operation. Tuple
    /// payloads render as `Op(v1,v2)` rather than `Op.v1.v2`.
    pub fn operation(id: u32, name: impl Into<Arc<str>>) -> Self {
        Channel {
            operation: true,
            ..Channel::new(id, name)
        }
    }

    pub fn id(&self) -> u32 {
        self.id
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn event(&self, value: Value) -> Comm {
        Comm {
            channel: self.clone(),
            value,
        }
    }

    pub fn prism(&self) -> Prism<Value, Comm> {
        let (c, m) = (self.clone(), self.clone());
        Prism::new(
            self.name.clone(),
            move |v| c.event(v),
            move |e: &Comm| (e.channel == m).then(|| e.value.clone()),
        )
    }
}

impl PartialEq for Channel {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
    }
}

impl Eq for Channel {}

impl PartialOrd for Channel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Channel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.id.cmp(&other.id)
    }
}

impl fmt::Debug for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// A communication `c.v` on a channel.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Comm {
    pub channel: Channel,
    pub value: Value,
}

impl Comm {
    pub fn label(&self) -> String {
        self.to_string()
    }
}

/// `c` for unit payloads, `c.v` otherwise; tuples are written `c.a.b`, or
/// `Op(a,b)` on operation channels.
impl fmt::Display for Comm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.channel.name())?;
        match &self.value {
            Value::Unit => Ok(()),
            Value::Tuple(vs) if self.channel.operation => write!(f, "{}", Value::Tuple(vs.clone())),
            Value::Tuple(vs) if !vs.is_empty() => vs.iter().try_for_each(|v| write!(f, ".{v}")),
            v => write!(f, ".{v}"),
        }
    }
}

impl Serialize for Comm {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl fmt::Debug for Comm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, PartialEq, Eq)]
pub struct Schema {
    pub name: String,
    pub fields: Vec<String>,
}

impl Schema {
    pub fn new(name: impl Into<String>, fields: impl IntoIterator<Item = impl Into<String>>) -> Arc<Self> {
        Arc::new(Schema {
            name: name.into(),
            fields: fields.into_iter().map(Into::into).collect(),
        })
    }

    pub fn index(&self, field: &str) -> Option<usize> {
        self.fields.iter().position(|f| f == field)
    }
}

/// A record of named values. Stores compare by their values only.
#[derive(Clone)]
pub struct Store {
    schema: Arc<Schema>,
    values: Arc<Vec<Value>>,
}

impl Store {
    pub fn new(schema: Arc<Schema>, values: Vec<Value>) -> Self {
        assert_eq!(schema.fields.len(), values.len(), "store arity");
        Store {
            schema,
            values: Arc::new(values),
        }
    }

    /// Every field set to `()`.
    pub fn blank(schema: Arc<Schema>) -> Self {
        let n = schema.fields.len();
        Store::new(schema, vec![Value::Unit; n])
    }

    pub fn schema(&self) -> &Arc<Schema> {
        &self.schema
    }

    pub fn values(&self) -> &[Value] {
        &self.values
    }

    pub fn get(&self, field: &str) -> Option<&Value> {
        self.schema.index(field).map(|i| &self.values[i])
    }

    pub fn at(&self, index: usize) -> &Value {
        &self.values[index]
    }

    pub fn set(&self, index: usize, value: Value) -> Store {
        let mut values = (*self.values).clone();
        values[index] = value;
        Store {
            schema: Arc::clone(&self.schema),
            values: Arc::new(values),
        }
    }

    pub fn field_lens(schema: &Arc<Schema>, index: usize) -> Lens<Value, Store> {
        Lens::new(schema.fields[index].clone(), move |s: &Store| s.at(index).clone(), move |s: &Store, v| s.set(index, v))
    }

    /// A lens over several fields at once, viewed as a tuple.
    pub fn region_lens(schema: &Arc<Schema>, indices: Vec<usize>) -> Lens<Value, Store> {
        let names: Vec<String> = indices.iter().map(|&i| schema.fields[i].clone()).collect();
        let (gi, pi) = (indices.clone(), indices);
        Lens::new(
            format!("{{{}}}", names.join(",")),
            move |s: &Store| Value::Tuple(gi.iter().map(|&i| s.at(i).clone()).collect()),
            move |s: &Store, v| match v {
                Value::Tuple(vs) => {
                    let mut values = (*s.values).clone();
                    for (&i, v) in pi.iter().zip(vs) {
                        values[i] = v;
                    }
                    Store::new(Arc::clone(&s.schema), values)
                }
                _ => s.clone(),
            },
        )
        .with_footprint(names)
    }

    /// All stores whose fields range over the given domains.
    pub fn enumerate(schema: &Arc<Schema>, domains: &[Vec<Value>]) -> Vec<Store> {
        let mut out = vec![Vec::new()];
        for dom in domains {
            let mut next = Vec::with_capacity(out.len() * dom.len());
            for prefix in &out {
                for v in dom {
                    let mut p: Vec<Value> = prefix.clone();
                    p.push(v.clone());
                    next.push(p);
                }
            }
            out = next;
        }
        out.into_iter().map(|vs| Store::new(Arc::clone(schema), vs)).collect()
    }
}

impl PartialEq for Store {
    fn eq(&self, other: &Self) -> bool {
        self.values == other.values
    }
}

impl Eq for Store {}

impl PartialOrd for Store {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Store {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.values.cmp(&other.values)
    }
}

impl std::hash::Hash for Store {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.values.hash(state);
    }
}

impl fmt::Display for Store {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (k, v)) in self.schema.fields.iter().zip(self.values.iter()).enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k} = {v}")?;
        }
        Ok(())
    }
}

/// Serialised as a map from field names to values.
impl Serialize for Store {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = serializer.serialize_map(Some(self.values.len()))?;
        for (k, v) in self.schema.fields.iter().zip(self.values.iter()) {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

impl fmt::Debug for Store {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{self}}}")
    }
}
