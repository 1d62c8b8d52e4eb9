//! Recursive-descent parser. Alternatives that cannot be told apart by one
//! token (a guard `e & P` against a process) are tried and rewound; the
//! error reported is the one reached furthest into the input.

use std::collections::{BTreeMap, BTreeSet};

use crate::ast::*;
use crate::error::ParseError;
use crate::lexer::{lex, Tok, Token};

struct Fail;

type PResult<T> = Result<T, Fail>;

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    furthest: usize,
    expected: BTreeSet<String>,
    message: Option<String>,
}

pub fn parse_model(src: &str) -> Result<Model, ParseError> {
    let mut p = Parser::new(src)?;
    let mut items = Vec::new();
    while *p.peek() != Tok::Eof {
        match p.item() {
            Ok(item) => items.push(item),
            Err(Fail) => return Err(p.error()),
        }
    }
    let model = Model { items };
    check_duplicates(&model)?;
    Ok(model)
}

pub fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser::new(src)?;
    p.whole(Parser::expr)
}

pub fn parse_proc(src: &str) -> Result<Proc, ParseError> {
    let mut p = Parser::new(src)?;
    p.whole(Parser::proc)
}

fn check_duplicates(model: &Model) -> Result<(), ParseError> {
    let mut seen: BTreeMap<(&str, String), Span> = BTreeMap::new();
    let mut dup = |category: &'static str, name: &str, at: Span| -> Result<(), ParseError> {
        // Processes and machines share a namespace: both are animation targets.
        let key = match category {
            "zmachine" => "process",
            c => c,
        };
        if seen.insert((key, name.to_string()), at).is_some() {
            return Err(ParseError::lexical(at, format!("{category} `{name}` is defined twice")));
        }
        Ok(())
    };
    for item in &model.items {
        match item {
            Item::Channel(c) => {
                for n in &c.names {
                    dup("channel", n, c.span)?;
                }
            }
            Item::Const(c) => dup("const", &c.name, c.span)?,
            Item::Process(p) => dup("process", &p.name, p.span)?,
            Item::Zmachine(m) => {
                dup("zmachine", &m.name, m.span)?;
                let mut ops = BTreeSet::new();
                for op in &m.operations {
                    if !ops.insert(&op.name) {
                        return Err(ParseError::lexical(op.span, format!("operation `{}` is defined twice", op.name)));
                    }
                }
            }
            Item::Assert(a) => dup("assert", &a.name, a.span)?,
        }
    }
    Ok(())
}

impl Parser {
    fn new(src: &str) -> Result<Self, ParseError> {
        Ok(Parser {
            toks: lex(src)?,
            pos: 0,
            furthest: 0,
            expected: BTreeSet::new(),
            message: None,
        })
    }

    fn whole<T>(&mut self, f: fn(&mut Self) -> PResult<T>) -> Result<T, ParseError> {
        let r = f(self).and_then(|v| {
            if *self.peek() == Tok::Eof {
                Ok(v)
            } else {
                self.expect("end of input");
                Err(Fail)
            }
        });
        r.map_err(|Fail| self.error())
    }

    fn error(&self) -> ParseError {
        let at = &self.toks[self.furthest.min(self.toks.len() - 1)];
        let message = self.message.clone().unwrap_or_else(|| {
            let wanted: Vec<&str> = self.expected.iter().map(String::as_str).collect();
            format!("unexpected {}, expected {}", at.tok, wanted.join(", "))
        });
        ParseError {
            line: at.span.line,
            col: at.span.col,
            message,
            expected: self.expected.clone(),
        }
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        &self.toks[(self.pos + n).min(self.toks.len() - 1)].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, what: impl Into<String>) {
        if self.pos > self.furthest {
            self.furthest = self.pos;
            self.expected.clear();
            self.message = None;
        }
        if self.pos == self.furthest {
            self.expected.insert(what.into());
        }
    }

    fn eat_sym(&mut self, s: &'static str) -> bool {
        if *self.peek() == Tok::Sym(s) {
            self.bump();
            true
        } else {
            self.expect(format!("`{s}`"));
            false
        }
    }

    fn eat_kw(&mut self, k: &'static str) -> bool {
        if *self.peek() == Tok::Kw(k) {
            self.bump();
            true
        } else {
            self.expect(format!("`{k}`"));
            false
        }
    }

    fn sym(&mut self, s: &'static str) -> PResult<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            Err(Fail)
        }
    }

    fn kw(&mut self, k: &'static str) -> PResult<()> {
        if self.eat_kw(k) {
            Ok(())
        } else {
            Err(Fail)
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => {
                self.expect("identifier");
                Err(Fail)
            }
        }
    }

    fn comma_list<T>(&mut self, mut f: impl FnMut(&mut Self) -> PResult<T>) -> PResult<Vec<T>> {
        let mut out = vec![f(self)?];
        while self.eat_sym(",") {
            out.push(f(self)?);
        }
        Ok(out)
    }

    // Items

    fn item(&mut self) -> PResult<Item> {
        let span = self.span();
        match self.peek() {
            Tok::Kw("channel") => {
                self.bump();
                let names = self.comma_list(Self::ident)?;
                let mut payload = Vec::new();
                if self.eat_sym(":") {
                    payload.push(self.ty()?);
                    while self.eat_sym(".") {
                        payload.push(self.ty()?);
                    }
                }
                Ok(Item::Channel(ChannelDecl { names, payload, span }))
            }
            Tok::Kw("const") => {
                self.bump();
                let name = self.ident()?;
                let value = if self.eat_sym("=") { Some(self.expr()?) } else { None };
                Ok(Item::Const(ConstDecl { name, value, span }))
            }
            Tok::Kw("process") => {
                self.bump();
                let name = self.ident()?;
                let mut params = Vec::new();
                if self.eat_sym("(") && !self.eat_sym(")") {
                    params = self.comma_list(Self::param)?;
                    self.sym(")")?;
                }
                self.sym("=")?;
                let body = self.proc()?;
                Ok(Item::Process(ProcessDecl { name, params, body, span }))
            }
            Tok::Kw("zmachine") => self.machine().map(Item::Zmachine),
            Tok::Kw("assert") => self.assertion().map(Item::Assert),
            _ => {
                for k in ["channel", "const", "process", "zmachine", "assert"] {
                    self.expect(format!("`{k}`"));
                }
                Err(Fail)
            }
        }
    }

    fn param(&mut self) -> PResult<Param> {
        let span = self.span();
        let name = self.ident()?;
        self.sym(":")?;
        let ty = self.ty()?;
        Ok(Param { name, ty, span })
    }

    fn assignment(&mut self) -> PResult<Assignment> {
        let span = self.span();
        let var = self.ident()?;
        self.sym(":=")?;
        let value = self.expr()?;
        Ok(Assignment { var, value, span })
    }

    fn braced<T>(&mut self, f: impl FnMut(&mut Self) -> PResult<T>) -> PResult<Vec<T>> {
        self.sym("{")?;
        if self.eat_sym("}") {
            return Ok(Vec::new());
        }
        let items = self.comma_list(f)?;
        self.sym("}")?;
        Ok(items)
    }

    fn machine(&mut self) -> PResult<MachineDecl> {
        let span = self.span();
        self.kw("zmachine")?;
        let name = self.ident()?;
        self.kw("state")?;
        let state = self.braced(Self::param)?;
        let invariant = if self.eat_kw("invariant") { self.braced(Self::expr)? } else { Vec::new() };
        let init = if self.eat_kw("init") { self.braced(Self::assignment)? } else { Vec::new() };
        self.kw("operations")?;
        self.sym("{")?;
        let mut operations = Vec::new();
        while !self.eat_sym("}") {
            operations.push(self.operation()?);
        }
        Ok(MachineDecl {
            name,
            state,
            invariant,
            init,
            operations,
            span,
        })
    }

    fn operation(&mut self) -> PResult<OperationDecl> {
        let span = self.span();
        let name = self.ident()?;
        if self.eat_kw("emit") {
            let value = self.expr()?;
            return Ok(OperationDecl {
                name,
                body: OpBody::Emit { value },
                span,
            });
        }
        let mut params = Vec::new();
        if self.eat_kw("params") {
            params = self.comma_list(|p| {
                let span = p.span();
                let name = p.ident()?;
                p.kw("in")?;
                let set = p.expr()?;
                Ok(OpParam { name, set, span })
            })?;
        }
        let pre = if self.eat_kw("pre") { self.comma_list(Self::expr)? } else { Vec::new() };
        let update = if self.eat_kw("update") { self.comma_list(Self::assignment)? } else { Vec::new() };
        Ok(OperationDecl {
            name,
            body: OpBody::Full { params, pre, update },
            span,
        })
    }

    fn assertion(&mut self) -> PResult<AssertDecl> {
        let span = self.span();
        self.kw("assert")?;
        let name = self.ident()?;
        self.sym("=")?;
        self.kw("hoare")?;
        let correctness = if self.eat_kw("partial") {
            Correctness::Partial
        } else {
            self.kw("total")?;
            Correctness::Total
        };
        self.sym("{")?;
        let pre = self.expr()?;
        self.sym("}")?;
        let target = self.ident()?;
        self.sym("{")?;
        let post = self.expr()?;
        self.sym("}")?;
        let over = if self.eat_kw("over") { self.comma_list(Self::param)? } else { Vec::new() };
        Ok(AssertDecl {
            name,
            correctness,
            pre,
            target,
            post,
            over,
            span,
        })
    }

    // Types

    fn ty(&mut self) -> PResult<TypeExpr> {
        let mut t = match self.peek().clone() {
            Tok::Kw("int") => {
                self.bump();
                TypeExpr::Int
            }
            Tok::Kw("bool") => {
                self.bump();
                TypeExpr::Bool
            }
            Tok::Ident(name) => {
                self.bump();
                TypeExpr::Named { name }
            }
            Tok::Sym("{") => {
                self.bump();
                if self.eat_sym("}") {
                    TypeExpr::Enum { values: Vec::new() }
                } else {
                    let first = self.expr()?;
                    if self.eat_sym("..") {
                        let hi = self.expr()?;
                        self.sym("}")?;
                        TypeExpr::Range { lo: first, hi }
                    } else {
                        let mut values = vec![first];
                        while self.eat_sym(",") {
                            values.push(self.expr()?);
                        }
                        self.sym("}")?;
                        TypeExpr::Enum { values }
                    }
                }
            }
            _ => {
                for w in ["`int`", "`bool`", "`{`", "identifier"] {
                    self.expect(w);
                }
                return Err(Fail);
            }
        };
        while self.eat_kw("list") {
            let max_len = if self.eat_sym("[") {
                let n = self.expr()?;
                self.sym("]")?;
                Some(n)
            } else {
                None
            };
            t = TypeExpr::List { elem: Box::new(t), max_len };
        }
        Ok(t)
    }

    // Expressions

    fn expr(&mut self) -> PResult<Expr> {
        self.binary_left(1)
    }

    fn binary_left(&mut self, level: u8) -> PResult<Expr> {
        match level {
            1 | 2 => {
                let (kw, op) = if level == 1 { ("or", BinOp::Or) } else { ("and", BinOp::And) };
                let mut left = self.binary_left(level + 1)?;
                while self.eat_kw(kw) {
                    let right = self.binary_left(level + 1)?;
                    left = bin(op, left, right);
                }
                Ok(left)
            }
            3 => {
                let span = self.span();
                if self.eat_kw("not") {
                    let arg = self.binary_left(3)?;
                    return Ok(Expr::new(
                        ExprKind::Unary {
                            op: UnOp::Not,
                            arg: Box::new(arg),
                        },
                        span,
                    ));
                }
                self.comparison()
            }
            _ => unreachable!(),
        }
    }

    fn comparison(&mut self) -> PResult<Expr> {
        let left = self.concat()?;
        let op = match self.peek() {
            Tok::Sym("=") => BinOp::Eq,
            Tok::Sym("!=") => BinOp::Ne,
            Tok::Sym("<") => BinOp::Lt,
            Tok::Sym("<=") => BinOp::Le,
            Tok::Sym(">") => BinOp::Gt,
            Tok::Sym(">=") => BinOp::Ge,
            Tok::Kw("in") => BinOp::In,
            _ => {
                for w in ["`=`", "`!=`", "`<`", "`<=`", "`>`", "`>=`", "`in`"] {
                    self.expect(w);
                }
                return Ok(left);
            }
        };
        self.bump();
        let right = self.concat()?;
        Ok(bin(op, left, right))
    }

    fn concat(&mut self) -> PResult<Expr> {
        let left = self.additive()?;
        if self.eat_sym("++") {
            let right = self.concat()?;
            return Ok(bin(BinOp::Concat, left, right));
        }
        Ok(left)
    }

    fn additive(&mut self) -> PResult<Expr> {
        let mut left = self.multiplicative()?;
        loop {
            let op = if self.eat_sym("+") {
                BinOp::Add
            } else if self.eat_sym("-") {
                BinOp::Sub
            } else {
                return Ok(left);
            };
            let right = self.multiplicative()?;
            left = bin(op, left, right);
        }
    }

    fn multiplicative(&mut self) -> PResult<Expr> {
        let mut left = self.unary()?;
        loop {
            let op = if self.eat_sym("*") {
                BinOp::Mul
            } else if self.eat_kw("div") {
                BinOp::Div
            } else if self.eat_kw("mod") {
                BinOp::Mod
            } else {
                return Ok(left);
            };
            let right = self.unary()?;
            left = bin(op, left, right);
        }
    }

    fn unary(&mut self) -> PResult<Expr> {
        let span = self.span();
        if self.eat_sym("-") {
            let arg = self.unary()?;
            return Ok(Expr::new(
                ExprKind::Unary {
                    op: UnOp::Neg,
                    arg: Box::new(arg),
                },
                span,
            ));
        }
        self.postfix()
    }

    fn postfix(&mut self) -> PResult<Expr> {
        let mut e = self.atom()?;
        while self.eat_sym("[") {
            let index = self.expr()?;
            self.sym("]")?;
            let span = e.span;
            e = Expr::new(
                ExprKind::Index {
                    list: Box::new(e),
                    index: Box::new(index),
                },
                span,
            );
        }
        Ok(e)
    }

    fn atom(&mut self) -> PResult<Expr> {
        let span = self.span();
        let kind = match self.peek().clone() {
            Tok::Int(value) => {
                self.bump();
                ExprKind::Int { value }
            }
            Tok::Kw("true") => {
                self.bump();
                ExprKind::Bool { value: true }
            }
            Tok::Kw("false") => {
                self.bump();
                ExprKind::Bool { value: false }
            }
            Tok::Ident(name) => {
                self.bump();
                if self.eat_sym("(") {
                    let args = if self.eat_sym(")") {
                        Vec::new()
                    } else {
                        let a = self.comma_list(Self::expr)?;
                        self.sym(")")?;
                        a
                    };
                    ExprKind::Call { func: name, args }
                } else {
                    ExprKind::Var { name }
                }
            }
            Tok::Sym("(") => {
                self.bump();
                let mut elems = self.comma_list(Self::expr)?;
                self.sym(")")?;
                if elems.len() == 1 {
                    return Ok(elems.pop().unwrap());
                }
                ExprKind::Tuple { elems }
            }
            // The lexer reads `[]` as one token; in an expression it is the
            // empty list.
            Tok::Sym("[]") => {
                self.bump();
                ExprKind::List { elems: Vec::new() }
            }
            Tok::Sym("[") => {
                self.bump();
                let elems = if self.eat_sym("]") {
                    Vec::new()
                } else {
                    let e = self.comma_list(Self::expr)?;
                    self.sym("]")?;
                    e
                };
                ExprKind::List { elems }
            }
            Tok::Sym("{") => {
                self.bump();
                if self.eat_sym("}") {
                    ExprKind::Set { elems: Vec::new() }
                } else {
                    let first = self.expr()?;
                    if self.eat_sym("..") {
                        let hi = self.expr()?;
                        self.sym("}")?;
                        ExprKind::Range {
                            lo: Box::new(first),
                            hi: Box::new(hi),
                        }
                    } else {
                        let mut elems = vec![first];
                        while self.eat_sym(",") {
                            elems.push(self.expr()?);
                        }
                        self.sym("}")?;
                        ExprKind::Set { elems }
                    }
                }
            }
            _ => {
                self.expect("expression");
                return Err(Fail);
            }
        };
        Ok(Expr::new(kind, span))
    }

    // Processes

    fn proc(&mut self) -> PResult<Proc> {
        let mut left = self.choice()?;
        while self.eat_sym(";") {
            let right = self.choice()?;
            let span = left.span;
            left = Proc::new(
                ProcKind::Seq {
                    first: Box::new(left),
                    second: Box::new(right),
                },
                span,
            );
        }
        Ok(left)
    }

    fn choice(&mut self) -> PResult<Proc> {
        let mut left = self.par()?;
        loop {
            let external = if self.eat_sym("[]") {
                true
            } else if self.eat_sym("|~|") {
                false
            } else {
                return Ok(left);
            };
            let right = self.par()?;
            let span = left.span;
            let (left_b, right_b) = (Box::new(left), Box::new(right));
            let kind = if external {
                ProcKind::ExtChoice {
                    left: left_b,
                    right: right_b,
                }
            } else {
                ProcKind::IntChoice {
                    left: left_b,
                    right: right_b,
                }
            };
            left = Proc::new(kind, span);
        }
    }

    fn par(&mut self) -> PResult<Proc> {
        let mut left = self.hide()?;
        loop {
            let span = left.span;
            if self.eat_sym("|||") {
                let right = self.hide()?;
                left = Proc::new(
                    ProcKind::Interleave {
                        left: Box::new(left),
                        right: Box::new(right),
                    },
                    span,
                );
            } else if self.eat_sym("||") {
                let sync = self.event_set()?;
                let right = self.hide()?;
                left = Proc::new(
                    ProcKind::Par {
                        left: Box::new(left),
                        sync,
                        right: Box::new(right),
                    },
                    span,
                );
            } else {
                return Ok(left);
            }
        }
    }

    fn hide(&mut self) -> PResult<Proc> {
        let mut body = self.prefix()?;
        while self.eat_sym("\\") {
            let hidden = self.event_set()?;
            let span = body.span;
            body = Proc::new(
                ProcKind::Hide {
                    body: Box::new(body),
                    hidden,
                },
                span,
            );
        }
        Ok(body)
    }

    fn event_set(&mut self) -> PResult<Vec<EventPattern>> {
        self.braced(|p| {
            let channel = p.ident()?;
            let mut fields = Vec::new();
            while p.eat_sym(".") {
                fields.push(p.postfix()?);
            }
            Ok(EventPattern { channel, fields })
        })
    }

    fn prefix(&mut self) -> PResult<Proc> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Sym(op @ ("[]" | "|||")) => {
                self.bump();
                let var = self.ident()?;
                self.sym(":")?;
                let set = self.expr()?;
                self.sym("@")?;
                let body = Box::new(self.prefix()?);
                let kind = if op == "[]" {
                    ProcKind::RepExtChoice { var, set, body }
                } else {
                    ProcKind::RepInterleave { var, set, body }
                };
                return Ok(Proc::new(kind, span));
            }
            Tok::Kw("if") => {
                self.bump();
                let cond = self.expr()?;
                self.kw("then")?;
                let then = Box::new(self.proc()?);
                self.kw("else")?;
                let otherwise = Box::new(self.prefix()?);
                return Ok(Proc::new(ProcKind::If { cond, then, otherwise }, span));
            }
            Tok::Ident(channel) if matches!(self.peek_at(1), Tok::Sym("!" | "?" | "." | "->")) => {
                self.bump();
                let comm = self.comm_fields(channel)?;
                self.sym("->")?;
                let body = Box::new(self.prefix()?);
                return Ok(Proc::new(ProcKind::Prefix { comm, body }, span));
            }
            Tok::Ident(_) if *self.peek_at(1) == Tok::Sym(":=") => return self.atom_proc(),
            _ => {}
        }
        let start = self.pos;
        if let Ok(cond) = self.expr() {
            if self.eat_sym("&") {
                let body = Box::new(self.prefix()?);
                return Ok(Proc::new(ProcKind::Guard { cond, body }, span));
            }
        }
        self.pos = start;
        self.atom_proc()
    }

    fn comm_fields(&mut self, channel: String) -> PResult<Comm> {
        let mut fields = Vec::new();
        loop {
            if self.eat_sym(".") {
                fields.push(CommField::Dot { value: self.postfix()? });
            } else if self.eat_sym("!") {
                fields.push(CommField::Out { value: self.postfix()? });
            } else if self.eat_sym("?") {
                let var = self.ident()?;
                let set = if self.eat_sym(":") { Some(self.postfix()?) } else { None };
                fields.push(CommField::In { var, set });
            } else {
                return Ok(Comm { channel, fields });
            }
        }
    }

    fn atom_proc(&mut self) -> PResult<Proc> {
        let span = self.span();
        let kind = match self.peek().clone() {
            Tok::Kw("skip") => {
                self.bump();
                ProcKind::Skip
            }
            Tok::Kw("stop") => {
                self.bump();
                ProcKind::Stop
            }
            Tok::Kw("div") => {
                self.bump();
                ProcKind::Div
            }
            Tok::Kw("while") => {
                self.bump();
                let cond = self.expr()?;
                let invariant = if self.eat_kw("invariant") { Some(self.expr()?) } else { None };
                let variant = if self.eat_kw("variant") { Some(self.expr()?) } else { None };
                self.kw("do")?;
                let body = Box::new(self.proc()?);
                self.kw("od")?;
                ProcKind::While {
                    cond,
                    invariant,
                    variant,
                    body,
                }
            }
            Tok::Sym("(") => {
                self.bump();
                let p = self.proc()?;
                self.sym(")")?;
                return Ok(p);
            }
            Tok::Ident(name) => {
                self.bump();
                if self.eat_sym(":=") {
                    let value = self.expr()?;
                    ProcKind::Assign { var: name, value }
                } else if self.eat_sym("(") {
                    let args = if self.eat_sym(")") {
                        Vec::new()
                    } else {
                        let a = self.comma_list(Self::expr)?;
                        self.sym(")")?;
                        a
                    };
                    ProcKind::Call { name, args }
                } else {
                    ProcKind::Call { name, args: Vec::new() }
                }
            }
            _ => {
                for w in ["process", "`skip`", "`stop`", "`div`", "`while`", "`if`", "`(`", "identifier"] {
                    self.expect(w);
                }
                return Err(Fail);
            }
        };
        Ok(Proc::new(kind, span))
    }
}

fn bin(op: BinOp, left: Expr, right: Expr) -> Expr {
    let span = left.span;
    Expr::new(
        ExprKind::Binary {
            op,
            left: Box::new(left),
            right: Box::new(right),
        },
        span,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_of_process_operators() {
        let p = parse_proc("a -> skip [] b -> skip ; c -> skip").unwrap();
        let ProcKind::Seq { first, .. } = p.kind else { panic!() };
        assert!(matches!(first.kind, ProcKind::ExtChoice { .. }));
    }

    #[test]
    fn guard_versus_reference() {
        let g = parse_proc("length(buf) > 0 & Output!(head(buf)) -> skip").unwrap();
        assert!(matches!(g.kind, ProcKind::Guard { .. }));
        let c = parse_proc("Cell(i)").unwrap();
        assert!(matches!(c.kind, ProcKind::Call { .. }));
    }

    #[test]
    fn empty_list_versus_choice() {
        let p = parse_proc("buf := [] [] stop").unwrap();
        let ProcKind::ExtChoice { left, .. } = p.kind else { panic!() };
        assert!(matches!(left.kind, ProcKind::Assign { .. }));
    }

    #[test]
    fn unbalanced_loop_points_at_the_end() {
        let e = parse_proc("while true do a -> skip").unwrap_err();
        assert_eq!((e.line, e.col), (1, 24));
        assert!(e.expected.contains("`od`"), "{:?}", e.expected);
    }

    #[test]
    fn comparison_does_not_chain() {
        assert!(parse_expr("1 < 2 < 3").is_err());
        assert!(parse_expr("(1 < 2) = true").is_ok());
    }

    #[test]
    fn duplicate_definitions() {
        let e = parse_model("channel a\nchannel a").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(e.message.contains("twice"));
    }
}
