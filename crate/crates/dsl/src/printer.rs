//! Canonical printer. Parentheses are inserted only where precedence needs
//! them, so parsing the output gives back the same tree.

use std::fmt::Write;

use crate::ast::*;

pub fn print_model(m: &Model) -> String {
    let items: Vec<String> = m.items.iter().map(print_item).collect();
    let mut out = items.join("\n\n");
    out.push('\n');
    out
}

pub fn print_item(item: &Item) -> String {
    match item {
        Item::Channel(c) => {
            let mut s = format!("channel {}", c.names.join(", "));
            if !c.payload.is_empty() {
                let parts: Vec<String> = c.payload.iter().map(print_type).collect();
                write!(s, " : {}", parts.join(" . ")).unwrap();
            }
            s
        }
        Item::Const(c) => match &c.value {
            Some(v) => format!("const {} = {}", c.name, print_expr(v)),
            None => format!("const {}", c.name),
        },
        Item::Process(p) => {
            let params = if p.params.is_empty() {
                String::new()
            } else {
                format!("({})", params(&p.params))
            };
            format!("process {}{} =\n  {}", p.name, params, print_proc(&p.body))
        }
        Item::Zmachine(m) => print_machine(m),
        Item::Assert(a) => {
            let kind = match a.correctness {
                Correctness::Partial => "partial",
                Correctness::Total => "total",
            };
            let mut s = format!(
                "assert {} = hoare {} {{{}}} {} {{{}}}",
                a.name,
                kind,
                print_expr(&a.pre),
                a.target,
                print_expr(&a.post)
            );
            if !a.over.is_empty() {
                write!(s, " over {}", params(&a.over)).unwrap();
            }
            s
        }
    }
}

fn params(ps: &[Param]) -> String {
    let parts: Vec<String> = ps.iter().map(|p| format!("{} : {}", p.name, print_type(&p.ty))).collect();
    parts.join(", ")
}

fn assignments(asg: &[Assignment]) -> String {
    let parts: Vec<String> = asg.iter().map(|a| format!("{} := {}", a.var, print_expr(&a.value))).collect();
    parts.join(", ")
}

fn exprs(es: &[Expr]) -> String {
    let parts: Vec<String> = es.iter().map(print_expr).collect();
    parts.join(", ")
}

fn print_machine(m: &MachineDecl) -> String {
    let mut s = format!("zmachine {}\n  state {{ {} }}\n", m.name, params(&m.state));
    if !m.invariant.is_empty() {
        writeln!(s, "  invariant {{ {} }}", exprs(&m.invariant)).unwrap();
    }
    if !m.init.is_empty() {
        writeln!(s, "  init {{ {} }}", assignments(&m.init)).unwrap();
    }
    s.push_str("  operations {\n");
    for op in &m.operations {
        write!(s, "    {}", op.name).unwrap();
        match &op.body {
            OpBody::Emit { value } => write!(s, " emit {}", print_expr(value)).unwrap(),
            OpBody::Full { params, pre, update } => {
                if !params.is_empty() {
                    let ps: Vec<String> = params.iter().map(|p| format!("{} in {}", p.name, print_expr(&p.set))).collect();
                    write!(s, " params {}", ps.join(", ")).unwrap();
                }
                if !pre.is_empty() {
                    write!(s, " pre {}", exprs(pre)).unwrap();
                }
                if !update.is_empty() {
                    write!(s, " update {}", assignments(update)).unwrap();
                }
            }
        }
        s.push('\n');
    }
    s.push_str("  }");
    s
}

pub fn print_type(t: &TypeExpr) -> String {
    match t {
        TypeExpr::Int => "int".into(),
        TypeExpr::Bool => "bool".into(),
        TypeExpr::Named { name } => name.clone(),
        TypeExpr::Enum { values } => format!("{{{}}}", exprs(values)),
        TypeExpr::Range { lo, hi } => format!("{{{}..{}}}", print_expr(lo), print_expr(hi)),
        TypeExpr::List { elem, max_len } => {
            let mut s = format!("{} list", print_type(elem));
            if let Some(n) = max_len {
                write!(s, "[{}]", print_expr(n)).unwrap();
            }
            s
        }
    }
}

pub fn print_expr(e: &Expr) -> String {
    match &e.kind {
        ExprKind::Int { value } => value.to_string(),
        ExprKind::Bool { value } => value.to_string(),
        ExprKind::Var { name } => name.clone(),
        ExprKind::Unary { op: UnOp::Not, arg } => format!("not {}", expr_at(arg, 3)),
        ExprKind::Unary { op: UnOp::Neg, arg } => format!("-{}", expr_at(arg, 8)),
        ExprKind::Binary { op, left, right } => {
            let p = op.precedence();
            let (lp, rp) = match op {
                BinOp::Concat => (p + 1, p),
                _ if p == 4 => (p + 1, p + 1),
                _ => (p, p + 1),
            };
            format!("{} {} {}", expr_at(left, lp), op.symbol(), expr_at(right, rp))
        }
        ExprKind::Call { func, args } => format!("{func}({})", exprs(args)),
        ExprKind::Index { list, index } => format!("{}[{}]", expr_at(list, 9), print_expr(index)),
        ExprKind::List { elems } => format!("[{}]", exprs(elems)),
        ExprKind::Set { elems } => format!("{{{}}}", exprs(elems)),
        ExprKind::Range { lo, hi } => format!("{{{}..{}}}", print_expr(lo), print_expr(hi)),
        ExprKind::Tuple { elems } => format!("({})", exprs(elems)),
    }
}

fn expr_at(e: &Expr, min: u8) -> String {
    let s = print_expr(e);
    if e.precedence() < min {
        format!("({s})")
    } else {
        s
    }
}

fn event_set(set: &[EventPattern]) -> String {
    let parts: Vec<String> = set
        .iter()
        .map(|p| {
            let mut s = p.channel.clone();
            for f in &p.fields {
                write!(s, ".{}", expr_at(f, 9)).unwrap();
            }
            s
        })
        .collect();
    format!("{{{}}}", parts.join(", "))
}

fn comm(c: &Comm) -> String {
    let mut s = c.channel.clone();
    for f in &c.fields {
        match f {
            CommField::Dot { value } => write!(s, ".{}", expr_at(value, 9)),
            CommField::Out { value } => write!(s, "!{}", expr_at(value, 9)),
            CommField::In { var, set: None } => write!(s, "?{var}"),
            CommField::In { var, set: Some(set) } => write!(s, "?{var} : {}", expr_at(set, 9)),
        }
        .unwrap();
    }
    s
}

pub fn print_proc(p: &Proc) -> String {
    match &p.kind {
        ProcKind::Skip => "skip".into(),
        ProcKind::Stop => "stop".into(),
        ProcKind::Div => "div".into(),
        ProcKind::Prefix { comm: c, body } => format!("{} -> {}", comm(c), proc_at(body, 5)),
        ProcKind::Guard { cond, body } => {
            let mut c = print_expr(cond);
            // A leading `[]` would read as a replicated choice.
            if c.starts_with("[]") {
                c = format!("({c})");
            }
            format!("{c} & {}", proc_at(body, 5))
        }
        ProcKind::ExtChoice { left, right } => format!("{} [] {}", proc_at(left, 2), proc_at(right, 3)),
        ProcKind::IntChoice { left, right } => format!("{} |~| {}", proc_at(left, 2), proc_at(right, 3)),
        ProcKind::Par { left, sync, right } => {
            format!("{} || {} {}", proc_at(left, 3), event_set(sync), proc_at(right, 4))
        }
        ProcKind::Interleave { left, right } => format!("{} ||| {}", proc_at(left, 3), proc_at(right, 4)),
        ProcKind::Hide { body, hidden } => format!("{} \\ {}", proc_at(body, 4), event_set(hidden)),
        ProcKind::Seq { first, second } => format!("{}; {}", proc_at(first, 1), proc_at(second, 2)),
        ProcKind::Assign { var, value } => format!("{var} := {}", print_expr(value)),
        ProcKind::If { cond, then, otherwise } => {
            format!("if {} then {} else {}", print_expr(cond), print_proc(then), proc_at(otherwise, 5))
        }
        ProcKind::While {
            cond,
            invariant,
            variant,
            body,
        } => {
            let mut s = format!("while {}", print_expr(cond));
            if let Some(i) = invariant {
                write!(s, " invariant {}", print_expr(i)).unwrap();
            }
            if let Some(v) = variant {
                write!(s, " variant {}", print_expr(v)).unwrap();
            }
            write!(s, " do {} od", print_proc(body)).unwrap();
            s
        }
        ProcKind::Call { name, args } if args.is_empty() => name.clone(),
        ProcKind::Call { name, args } => format!("{name}({})", exprs(args)),
        ProcKind::RepExtChoice { var, set, body } => {
            format!("[] {var} : {} @ {}", print_expr(set), proc_at(body, 5))
        }
        ProcKind::RepInterleave { var, set, body } => {
            format!("||| {var} : {} @ {}", print_expr(set), proc_at(body, 5))
        }
    }
}

fn proc_at(p: &Proc, min: u8) -> String {
    let s = print_proc(p);
    if p.precedence() < min {
        format!("({s})")
    } else {
        s
    }
}
