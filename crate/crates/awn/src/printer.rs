//! Pretty-printing back to the surface syntax accepted by the parser.

use std::fmt::Write;

use crate::eval::eval;
use crate::syntax::{
    Expr, Formula, NetworkExpression, NodeExpression, ParallelProcess, PartialNetwork, Proc,
    ProcId, ProcessDefinition, Program,
};
use crate::value::{show_set, Value};

pub fn print_expr(e: &Expr) -> String {
    let mut s = String::new();
    write_expr(&mut s, e, false);
    s
}

fn write_list(out: &mut String, items: &[Expr]) {
    for (i, a) in items.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write_expr(out, a, false);
    }
}

fn is_arith(e: &Expr) -> bool {
    matches!(e, Expr::App(op, args) if (&**op == "+" || &**op == "-") && args.len() == 2)
}

fn write_expr(out: &mut String, e: &Expr, as_rhs: bool) {
    match e {
        Expr::Var(v) => out.push_str(v),
        Expr::Const(c) => {
            let _ = write!(out, "{c}");
        }
        Expr::App(op, args) if is_arith(e) => {
            if as_rhs {
                out.push('(');
            }
            write_expr(out, &args[0], false);
            let _ = write!(out, " {op} ");
            write_expr(out, &args[1], true);
            if as_rhs {
                out.push(')');
            }
        }
        Expr::App(op, args) if args.is_empty() => out.push_str(op),
        Expr::App(name, args) | Expr::Ctor(name, args) => {
            out.push_str(name);
            out.push('(');
            write_list(out, args);
            out.push(')');
        }
        Expr::Tuple(items) => {
            out.push('(');
            write_list(out, items);
            out.push(')');
        }
        Expr::Set(items) => {
            out.push('{');
            write_list(out, items);
            out.push('}');
        }
        Expr::Seq(items) => {
            out.push('[');
            write_list(out, items);
            out.push(']');
        }
        Expr::Map(pairs) => {
            if pairs.is_empty() {
                out.push_str("{|->}");
                return;
            }
            out.push('{');
            for (i, (k, v)) in pairs.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_expr(out, k, false);
                out.push_str(" |-> ");
                write_expr(out, v, false);
            }
            out.push('}');
        }
    }
}

pub fn print_formula(f: &Formula) -> String {
    let mut s = String::new();
    write_formula(&mut s, f, 0);
    s
}

// precedence levels: 0 implication, 1 disjunction, 2 conjunction, 3 unary
fn write_formula(out: &mut String, f: &Formula, level: u8) {
    let (own, paren) = match f {
        Formula::Implies(..) => (0, level > 0),
        Formula::Or(..) => (1, level > 1),
        Formula::And(..) => (2, level > 2),
        _ => (3, false),
    };
    if paren {
        out.push('(');
    }
    match f {
        Formula::True => out.push_str("true"),
        Formula::False => out.push_str("false"),
        Formula::Rel(op, a, b) => {
            write_expr(out, a, false);
            let _ = write!(out, " {} ", op.symbol());
            write_expr(out, b, false);
        }
        Formula::Holds(e) => write_expr(out, e, false),
        Formula::Not(g) => {
            out.push('!');
            write_formula(out, g, 3);
        }
        Formula::And(a, b) => {
            write_formula(out, a, own);
            out.push_str(" && ");
            write_formula(out, b, own + 1);
        }
        Formula::Or(a, b) => {
            write_formula(out, a, own);
            out.push_str(" || ");
            write_formula(out, b, own + 1);
        }
        Formula::Implies(a, b) => {
            write_formula(out, a, 1);
            out.push_str(" -> ");
            write_formula(out, b, 0);
        }
    }
    if paren {
        out.push(')');
    }
}

/// Renders a sequential process term.
pub fn print_proc(program: &Program, id: ProcId) -> String {
    let mut s = String::new();
    write_proc(&mut s, program, id, false);
    s
}

fn write_proc(out: &mut String, program: &Program, id: ProcId, as_prefix: bool) {
    let node = program.proc(id);
    if let Proc::Choice(a, b) = node {
        if as_prefix {
            out.push('(');
        }
        write_proc(out, program, *a, false);
        out.push_str(" + ");
        write_proc(out, program, *b, true);
        if as_prefix {
            out.push(')');
        }
        return;
    }
    match node {
        Proc::Choice(..) => unreachable!(),
        Proc::Call { name, args } => {
            out.push_str(name);
            out.push('(');
            write_list(out, args);
            out.push(')');
        }
        Proc::Guard { cond, then } => {
            out.push('[');
            write_formula(out, cond, 0);
            out.push_str("] ");
            write_proc(out, program, *then, true);
        }
        Proc::Assign { var, expr, then } => {
            let _ = write!(out, "[[{var} := ");
            write_expr(out, expr, false);
            out.push_str("]] ");
            write_proc(out, program, *then, true);
        }
        Proc::Broadcast { msg, then } | Proc::Send { msg, then } | Proc::Deliver { data: msg, then } => {
            let kw = match node {
                Proc::Broadcast { .. } => "broadcast",
                Proc::Send { .. } => "send",
                _ => "deliver",
            };
            let _ = write!(out, "{kw}(");
            write_expr(out, msg, false);
            out.push_str(").");
            write_proc(out, program, *then, true);
        }
        Proc::Groupcast { dests, msg, then } => {
            out.push_str("groupcast(");
            write_expr(out, dests, false);
            out.push_str(", ");
            write_expr(out, msg, false);
            out.push_str(").");
            write_proc(out, program, *then, true);
        }
        Proc::Unicast { dest, msg, then, otherwise } => {
            out.push_str("unicast(");
            write_expr(out, dest, false);
            out.push_str(", ");
            write_expr(out, msg, false);
            out.push_str(").");
            write_proc(out, program, *then, true);
            out.push_str(" > ");
            write_proc(out, program, *otherwise, true);
        }
        Proc::Receive { var, then } => {
            let _ = write!(out, "receive({var}).");
            write_proc(out, program, *then, true);
        }
    }
}

pub fn print_definition(program: &Program, def: &ProcessDefinition) -> String {
    let params: Vec<String> = def
        .params
        .iter()
        .map(|p| match &p.sort {
            Some(s) if program.sig.var_sort(&p.name) != Some(s) => format!("{} : {}", p.name, s),
            _ => p.name.to_string(),
        })
        .collect();
    format!(
        "def {}({}) = {}",
        def.name,
        params.join(", "),
        print_proc(program, def.body)
    )
}

/// All definitions of a program, one per line, sorted by name.
pub fn print_definitions(program: &Program) -> String {
    program
        .defs()
        .map(|d| print_definition(program, d) + "\n")
        .collect()
}

pub fn print_parallel(program: &Program, p: &ParallelProcess) -> String {
    match p {
        ParallelProcess::Leaf { env, proc } => {
            if env.is_empty() {
                print_proc(program, *proc)
            } else {
                format!("{env}, {}", print_proc(program, *proc))
            }
        }
        ParallelProcess::Par(l, r) => {
            let rhs = print_parallel(program, r);
            if matches!(**r, ParallelProcess::Par(..)) {
                format!("{} <<| ({rhs})", print_parallel(program, l))
            } else {
                format!("{} <<| {rhs}", print_parallel(program, l))
            }
        }
    }
}

fn range_text(range: &std::collections::BTreeSet<Value>) -> String {
    format!("{}", Value::set(range.iter().cloned()))
}

pub fn print_node(program: &Program, n: &NodeExpression) -> String {
    format!(
        "{} : {} : {}",
        n.ip,
        print_parallel(program, &n.process),
        range_text(&n.range)
    )
}

fn print_partial(program: &Program, m: &PartialNetwork) -> String {
    match m {
        PartialNetwork::Node(n) => print_node(program, n),
        PartialNetwork::Par(l, r) => {
            let lhs = print_partial(program, l);
            let lhs = if matches!(**l, PartialNetwork::Par(..)) {
                format!("({lhs})")
            } else {
                lhs
            };
            format!("{lhs} || {}", print_partial(program, r))
        }
    }
}

pub fn print_network(program: &Program, n: &NetworkExpression) -> String {
    match n {
        NetworkExpression::Partial(m) => print_partial(program, m),
        NetworkExpression::Complete(m) => format!("[{}]", print_partial(program, m)),
    }
}

/// Compact rendering of a leaf: calls show their evaluated arguments
/// (`Y(a)`), anything else shows the term.
pub fn show_leaf(program: &Program, env: &crate::valuation::Valuation, proc: ProcId) -> String {
    if let Proc::Call { name, args } = program.proc(proc) {
        let vals: Option<Vec<String>> = args
            .iter()
            .map(|a| eval(&program.sig, env, a).ok().map(|v| v.to_string()))
            .collect();
        if let Some(vals) = vals {
            return format!("{name}({})", vals.join(","));
        }
    }
    print_proc(program, proc)
}

pub fn show_parallel(program: &Program, p: &ParallelProcess) -> String {
    match p {
        ParallelProcess::Leaf { env, proc } => show_leaf(program, env, *proc),
        ParallelProcess::Par(l, r) => {
            format!("({} <<| {})", show_parallel(program, l), show_parallel(program, r))
        }
    }
}

/// `[Y(a) || Y(b)]`-style summary of a network state.
pub fn show_network(program: &Program, n: &NetworkExpression) -> String {
    let parts: Vec<String> = n
        .inner()
        .nodes()
        .iter()
        .map(|node| show_parallel(program, &node.process))
        .collect();
    match n {
        NetworkExpression::Complete(_) => format!("[{}]", parts.join(" || ")),
        NetworkExpression::Partial(_) => parts.join(" || "),
    }
}

/// Renders a node's address, range and leaves for state dumps.
pub fn show_node_state(program: &Program, n: &NodeExpression) -> String {
    let leaves: Vec<String> = n
        .process
        .leaves()
        .into_iter()
        .map(|(env, p)| format!("{} {env}", show_leaf(program, env, p)))
        .collect();
    format!("{} range {} : {}", n.ip, show_set(&n.range), leaves.join(" <<| "))
}
