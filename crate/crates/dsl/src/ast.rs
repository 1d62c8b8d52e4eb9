//! Syntax trees for `.itm` models. Every node carries the position it was
//! parsed from; positions take no part in equality.

use serde::Serialize;

pub use crate::lexer::Span;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Model {
    pub items: Vec<Item>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "item", rename_all = "lowercase")]
pub enum Item {
    Channel(ChannelDecl),
    Const(ConstDecl),
    Process(ProcessDecl),
    Zmachine(MachineDecl),
    Assert(AssertDecl),
}

impl Item {
    pub fn span(&self) -> Span {
        match self {
            Item::Channel(c) => c.span,
            Item::Const(c) => c.span,
            Item::Process(p) => p.span,
            Item::Zmachine(m) => m.span,
            Item::Assert(a) => a.span,
        }
    }
}

/// `channel a, b : T1 . T2`; no type means a plain synchronisation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChannelDecl {
    pub names: Vec<String>,
    pub payload: Vec<TypeExpr>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstDecl {
    pub name: String,
    pub value: Option<Expr>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Param {
    pub name: String,
    pub ty: TypeExpr,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProcessDecl {
    pub name: String,
    pub params: Vec<Param>,
    pub body: Proc,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Assignment {
    pub var: String,
    pub value: Expr,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OpParam {
    pub name: String,
    pub set: Expr,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "form", rename_all = "lowercase")]
pub enum OpBody {
    Full {
        params: Vec<OpParam>,
        pre: Vec<Expr>,
        update: Vec<Assignment>,
    },
    /// Offers the value of the expression and leaves the state alone.
    Emit { value: Expr },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OperationDecl {
    pub name: String,
    pub body: OpBody,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MachineDecl {
    pub name: String,
    pub state: Vec<Param>,
    pub invariant: Vec<Expr>,
    pub init: Vec<Assignment>,
    pub operations: Vec<OperationDecl>,
    pub span: Span,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Correctness {
    Partial,
    Total,
}

/// `assert N = hoare total {P} target {Q} over x : T, ...`
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AssertDecl {
    pub name: String,
    pub correctness: Correctness,
    pub pre: Expr,
    pub target: String,
    pub post: Expr,
    pub over: Vec<Param>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum TypeExpr {
    Int,
    Bool,
    /// A constant naming a finite set.
    Named { name: String },
    Enum { values: Vec<Expr> },
    Range { lo: Expr, hi: Expr },
    /// Lists of the element type, optionally of bounded length.
    List { elem: Box<TypeExpr>, max_len: Option<Expr> },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum UnOp {
    Not,
    Neg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BinOp {
    Or,
    And,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    In,
    Concat,
    Add,
    Sub,
    Mul,
    Div,
    Mod,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Or => "or",
            BinOp::And => "and",
            BinOp::Eq => "=",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::In => "in",
            BinOp::Concat => "++",
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "div",
            BinOp::Mod => "mod",
        }
    }

    /// Binding strength; higher binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Or => 1,
            BinOp::And => 2,
            BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge | BinOp::In => 4,
            BinOp::Concat => 5,
            BinOp::Add | BinOp::Sub => 6,
            BinOp::Mul | BinOp::Div | BinOp::Mod => 7,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "expr", rename_all = "lowercase")]
pub enum ExprKind {
    Int { value: i64 },
    Bool { value: bool },
    Var { name: String },
    Unary { op: UnOp, arg: Box<Expr> },
    Binary { op: BinOp, left: Box<Expr>, right: Box<Expr> },
    Call { func: String, args: Vec<Expr> },
    Index { list: Box<Expr>, index: Box<Expr> },
    List { elems: Vec<Expr> },
    Set { elems: Vec<Expr> },
    Range { lo: Box<Expr>, hi: Box<Expr> },
    Tuple { elems: Vec<Expr> },
}

impl Expr {
    pub fn new(kind: ExprKind, span: Span) -> Self {
        Expr { kind, span }
    }

    pub fn precedence(&self) -> u8 {
        match &self.kind {
            ExprKind::Binary { op, .. } => op.precedence(),
            ExprKind::Unary { op: UnOp::Not, .. } => 3,
            ExprKind::Unary { op: UnOp::Neg, .. } => 8,
            _ => 9,
        }
    }
}

/// One component of a communication.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "field", rename_all = "lowercase")]
pub enum CommField {
    /// `.e`
    Dot { value: Expr },
    /// `!e`
    Out { value: Expr },
    /// `?x` or `?x : S`
    In { var: String, set: Option<Expr> },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Comm {
    pub channel: String,
    pub fields: Vec<CommField>,
}

/// `c` or `c.e1.e2`: a whole channel, or the events whose payload starts
/// with the given values.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EventPattern {
    pub channel: String,
    pub fields: Vec<Expr>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Proc {
    pub kind: ProcKind,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "proc", rename_all = "lowercase")]
pub enum ProcKind {
    Skip,
    Stop,
    Div,
    Prefix { comm: Comm, body: Box<Proc> },
    Guard { cond: Expr, body: Box<Proc> },
    ExtChoice { left: Box<Proc>, right: Box<Proc> },
    IntChoice { left: Box<Proc>, right: Box<Proc> },
    Par { left: Box<Proc>, sync: Vec<EventPattern>, right: Box<Proc> },
    Interleave { left: Box<Proc>, right: Box<Proc> },
    Hide { body: Box<Proc>, hidden: Vec<EventPattern> },
    Seq { first: Box<Proc>, second: Box<Proc> },
    Assign { var: String, value: Expr },
    If { cond: Expr, then: Box<Proc>, otherwise: Box<Proc> },
    While {
        cond: Expr,
        invariant: Option<Expr>,
        variant: Option<Expr>,
        body: Box<Proc>,
    },
    Call { name: String, args: Vec<Expr> },
    /// `[] x : S @ P`
    RepExtChoice { var: String, set: Expr, body: Box<Proc> },
    /// `||| x : S @ P`
    RepInterleave { var: String, set: Expr, body: Box<Proc> },
}

impl Proc {
    pub fn new(kind: ProcKind, span: Span) -> Self {
        Proc { kind, span }
    }

    /// Binding strength; higher binds tighter.
    pub fn precedence(&self) -> u8 {
        match &self.kind {
            ProcKind::Seq { .. } => 1,
            ProcKind::ExtChoice { .. } | ProcKind::IntChoice { .. } => 2,
            ProcKind::Par { .. } | ProcKind::Interleave { .. } => 3,
            ProcKind::Hide { .. } => 4,
            ProcKind::Prefix { .. }
            | ProcKind::Guard { .. }
            | ProcKind::If { .. }
            | ProcKind::RepExtChoice { .. }
            | ProcKind::RepInterleave { .. } => 5,
            _ => 6,
        }
    }
}
