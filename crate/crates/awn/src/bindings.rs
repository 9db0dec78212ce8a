//! Static check that every data variable occurrence is bound.

use std::collections::BTreeSet;
use std::fmt;

use crate::syntax::{Expr, Proc, ProcId, ProcessDefinition, Program};
use crate::value::Sym;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct UnboundVar {
    pub process: Sym,
    pub var: Sym,
    /// Short description of the construct the occurrence sits in.
    pub context: &'static str,
}

impl fmt::Display for UnboundVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: `{}` is unbound in {}", self.process, self.var, self.context)
    }
}

/// Accepts iff every variable occurrence in the body of `def` is bound by a
/// parameter, an enclosing `receive`, an earlier assignment, or an enclosing
/// guard (which binds its free variables).
pub fn check_bindings(program: &Program, def: &ProcessDefinition) -> Result<(), Vec<UnboundVar>> {
    let bound: BTreeSet<Sym> = def.params.iter().map(|p| p.name.clone()).collect();
    let mut errs = Vec::new();
    walk(program, &def.name, def.body, &bound, &mut errs);
    if errs.is_empty() {
        Ok(())
    } else {
        errs.sort();
        Err(errs)
    }
}

/// Runs [`check_bindings`] over every definition of the program.
pub fn check_program(program: &Program) -> Result<(), Vec<UnboundVar>> {
    let mut all = Vec::new();
    for def in program.defs() {
        if let Err(errs) = check_bindings(program, def) {
            all.extend(errs);
        }
    }
    if all.is_empty() {
        Ok(())
    } else {
        Err(all)
    }
}

fn check_expr(
    process: &Sym,
    e: &Expr,
    bound: &BTreeSet<Sym>,
    context: &'static str,
    errs: &mut Vec<UnboundVar>,
) {
    for v in e.vars() {
        if !bound.contains(&v) {
            errs.push(UnboundVar {
                process: process.clone(),
                var: v,
                context,
            });
        }
    }
}

fn walk(program: &Program, process: &Sym, id: ProcId, bound: &BTreeSet<Sym>, errs: &mut Vec<UnboundVar>) {
    match program.proc(id) {
        Proc::Call { args, .. } => {
            for a in args {
                check_expr(process, a, bound, "a call argument", errs);
            }
        }
        Proc::Guard { cond, then } => {
            let mut inner = bound.clone();
            inner.extend(cond.free_vars());
            walk(program, process, *then, &inner, errs);
        }
        Proc::Assign { var, expr, then } => {
            check_expr(process, expr, bound, "an assignment", errs);
            let mut inner = bound.clone();
            inner.insert(var.clone());
            walk(program, process, *then, &inner, errs);
        }
        Proc::Choice(a, b) => {
            walk(program, process, *a, bound, errs);
            walk(program, process, *b, bound, errs);
        }
        Proc::Broadcast { msg, then } => {
            check_expr(process, msg, bound, "broadcast", errs);
            walk(program, process, *then, bound, errs);
        }
        Proc::Groupcast { dests, msg, then } => {
            check_expr(process, dests, bound, "groupcast", errs);
            check_expr(process, msg, bound, "groupcast", errs);
            walk(program, process, *then, bound, errs);
        }
        Proc::Unicast { dest, msg, then, otherwise } => {
            check_expr(process, dest, bound, "unicast", errs);
            check_expr(process, msg, bound, "unicast", errs);
            walk(program, process, *then, bound, errs);
            walk(program, process, *otherwise, bound, errs);
        }
        Proc::Send { msg, then } => {
            check_expr(process, msg, bound, "send", errs);
            walk(program, process, *then, bound, errs);
        }
        Proc::Deliver { data, then } => {
            check_expr(process, data, bound, "deliver", errs);
            walk(program, process, *then, bound, errs);
        }
        Proc::Receive { var, then } => {
            let mut inner = bound.clone();
            inner.insert(var.clone());
            walk(program, process, *then, &inner, errs);
        }
    }
}
