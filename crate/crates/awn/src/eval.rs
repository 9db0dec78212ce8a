//! Expression evaluation and guard satisfaction.

use std::collections::BTreeSet;
use std::sync::Arc;

use thiserror::Error;

use crate::signature::{OpError, Signature};
use crate::syntax::{Expr, Formula, RelOp};
use crate::valuation::Valuation;
use crate::value::{Sym, Value};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("variable `{0}` is not bound")]
    Unbound(String),
    #[error("unknown operator `{0}`")]
    UnknownOp(String),
    #[error("operator `{op}`: {source}")]
    Op {
        op: String,
        #[source]
        source: OpError,
    },
    #[error("expected a boolean, got {0}")]
    NotBool(String),
    #[error("`{rel}` needs a set on its right, got {got}")]
    NotCollection { rel: &'static str, got: String },
    #[error("guard variable `{0}` has no finite domain to enumerate")]
    UnsupportedGuard(String),
    #[error("process `{0}` is not defined")]
    UnknownProcess(String),
    #[error("process `{name}` expects {expected} arguments, got {got}")]
    Arity { name: String, expected: usize, got: usize },
    #[error("unguarded recursion through `{0}`")]
    UnguardedRecursion(String),
}

pub fn eval(sig: &Signature, env: &Valuation, e: &Expr) -> Result<Value, EvalError> {
    match e {
        Expr::Var(v) => env.get(v).cloned().ok_or_else(|| EvalError::Unbound(v.to_string())),
        Expr::Const(c) => Ok(c.clone()),
        Expr::App(op, args) => {
            let def = sig.op_def(op).ok_or_else(|| EvalError::UnknownOp(op.to_string()))?;
            let vals = args
                .iter()
                .map(|a| eval(sig, env, a))
                .collect::<Result<Vec<_>, _>>()?;
            (def.func)(&vals).map_err(|source| EvalError::Op {
                op: op.to_string(),
                source,
            })
        }
        Expr::Ctor(name, args) => {
            let vals = args
                .iter()
                .map(|a| eval(sig, env, a))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Value::Ctor(name.clone(), Arc::new(vals)))
        }
        Expr::Tuple(items) => Ok(Value::tuple(
            items.iter().map(|a| eval(sig, env, a)).collect::<Result<_, _>>()?,
        )),
        Expr::Set(items) => Ok(Value::set(
            items.iter().map(|a| eval(sig, env, a)).collect::<Result<Vec<_>, _>>()?,
        )),
        Expr::Seq(items) => Ok(Value::seq(
            items.iter().map(|a| eval(sig, env, a)).collect::<Result<_, _>>()?,
        )),
        Expr::Map(pairs) => {
            let mut out = Vec::with_capacity(pairs.len());
            for (k, v) in pairs {
                out.push((eval(sig, env, k)?, eval(sig, env, v)?));
            }
            Ok(Value::map(out))
        }
    }
}

fn member(rel: &'static str, x: &Value, coll: &Value) -> Result<bool, EvalError> {
    match coll {
        Value::Set(s) => Ok(s.contains(x)),
        Value::Map(m) => Ok(m.contains_key(x)),
        Value::Seq(s) => Ok(s.contains(x)),
        other => Err(EvalError::NotCollection {
            rel,
            got: other.to_string(),
        }),
    }
}

/// Truth value of a closed formula. Conjunction, disjunction and implication
/// short-circuit left to right, so `x in akD(rt) && nhop(rt, x) = y` is safe.
pub fn holds(sig: &Signature, env: &Valuation, f: &Formula) -> Result<bool, EvalError> {
    match f {
        Formula::True => Ok(true),
        Formula::False => Ok(false),
        Formula::Rel(op, a, b) => {
            let x = eval(sig, env, a)?;
            let y = eval(sig, env, b)?;
            match op {
                RelOp::Eq => Ok(x == y),
                RelOp::Neq => Ok(x != y),
                RelOp::Lt => Ok(x < y),
                RelOp::Le => Ok(x <= y),
                RelOp::Gt => Ok(x > y),
                RelOp::Ge => Ok(x >= y),
                RelOp::In => member("in", &x, &y),
                RelOp::NotIn => member("notin", &x, &y).map(|b| !b),
            }
        }
        Formula::Holds(e) => {
            let v = eval(sig, env, e)?;
            v.as_bool().ok_or_else(|| EvalError::NotBool(v.to_string()))
        }
        Formula::Not(g) => Ok(!holds(sig, env, g)?),
        Formula::And(a, b) => Ok(holds(sig, env, a)? && holds(sig, env, b)?),
        Formula::Or(a, b) => Ok(holds(sig, env, a)? || holds(sig, env, b)?),
        Formula::Implies(a, b) => Ok(!holds(sig, env, a)? || holds(sig, env, b)?),
    }
}

fn is_closed(env: &Valuation, e: &Expr) -> bool {
    e.vars().iter().all(|v| env.contains(v))
}

/// Matches `value` against `pattern`, binding unbound variables of the pattern.
/// Bound variables and closed sub-expressions must agree with `value`.
fn match_pattern(
    sig: &Signature,
    env: &Valuation,
    pattern: &Expr,
    value: &Value,
) -> Result<Option<Valuation>, EvalError> {
    if is_closed(env, pattern) {
        return Ok((eval(sig, env, pattern)? == *value).then(|| env.clone()));
    }
    match (pattern, value) {
        (Expr::Var(v), _) => Ok(Some(env.updated(v.clone(), value.clone()))),
        (Expr::Ctor(name, args), Value::Ctor(vname, vals)) => {
            if name != vname || args.len() != vals.len() {
                return Ok(None);
            }
            match_all(sig, env, args, vals)
        }
        (Expr::Tuple(args), Value::Tuple(vals)) => {
            if args.len() != vals.len() {
                return Ok(None);
            }
            match_all(sig, env, args, vals)
        }
        (Expr::Ctor(..), _) | (Expr::Tuple(_), _) => Ok(None),
        // Not a pattern shape we can destructure; leave it to enumeration.
        _ => Ok(Some(env.clone())),
    }
}

fn match_all(
    sig: &Signature,
    env: &Valuation,
    args: &[Expr],
    vals: &[Value],
) -> Result<Option<Valuation>, EvalError> {
    let mut cur = env.clone();
    for (a, v) in args.iter().zip(vals) {
        match match_pattern(sig, &cur, a, v)? {
            Some(next) => cur = next,
            None => return Ok(None),
        }
    }
    Ok(Some(cur))
}

/// Candidate partial extensions of `env` obtained by destructuring bound
/// values. May over-approximate; results are filtered afterwards.
fn candidates(sig: &Signature, env: &Valuation, f: &Formula) -> Result<Vec<Valuation>, EvalError> {
    match f {
        Formula::False => Ok(Vec::new()),
        Formula::Rel(RelOp::Eq, a, b) => {
            let (closed, pat) = match (is_closed(env, a), is_closed(env, b)) {
                (true, false) => (a, b),
                (false, true) => (b, a),
                _ => return Ok(vec![env.clone()]),
            };
            let value = match eval(sig, env, closed) {
                Ok(v) => v,
                Err(_) => return Ok(vec![env.clone()]),
            };
            Ok(match_pattern(sig, env, pat, &value)?.into_iter().collect())
        }
        Formula::Rel(RelOp::In, a, b) if !is_closed(env, a) && is_closed(env, b) => {
            let coll = match eval(sig, env, b) {
                Ok(v) => v,
                Err(_) => return Ok(vec![env.clone()]),
            };
            let items: Vec<Value> = match &coll {
                Value::Set(s) => s.iter().cloned().collect(),
                Value::Map(m) => m.keys().cloned().collect(),
                Value::Seq(s) => s.to_vec(),
                _ => return Ok(vec![env.clone()]),
            };
            let mut out = Vec::new();
            for item in &items {
                if let Some(ext) = match_pattern(sig, env, a, item)? {
                    out.push(ext);
                }
            }
            Ok(out)
        }
        Formula::And(a, b) => {
            let mut out = Vec::new();
            for ext in candidates(sig, env, a)? {
                out.extend(candidates(sig, &ext, b)?);
            }
            Ok(out)
        }
        Formula::Or(a, b) => {
            let mut out = candidates(sig, env, a)?;
            out.extend(candidates(sig, env, b)?);
            Ok(out)
        }
        _ => Ok(vec![env.clone()]),
    }
}

/// All extensions of `env` binding exactly the free variables of `f` that
/// `env` leaves unbound, under which `f` holds. Sorted and duplicate-free.
pub fn satisfy(sig: &Signature, env: &Valuation, f: &Formula) -> Result<Vec<Valuation>, EvalError> {
    let free: Vec<Sym> = f
        .free_vars()
        .into_iter()
        .filter(|v| !env.contains(v))
        .collect();
    let mut results = BTreeSet::new();
    for cand in candidates(sig, env, f)? {
        if free.iter().any(|v| cand.get(v).is_some_and(|x| ill_sorted(sig, v, x))) {
            continue;
        }
        let missing: Vec<&Sym> = free.iter().filter(|v| !cand.contains(v)).collect();
        let mut domains = Vec::with_capacity(missing.len());
        for v in &missing {
            let dom = sig
                .var_sort(v)
                .and_then(|s| sig.domain(s))
                .ok_or_else(|| EvalError::UnsupportedGuard(v.to_string()))?;
            domains.push(dom);
        }
        enumerate(&missing, &domains, cand, &mut |full| {
            if holds(sig, &full, f)? {
                results.insert(full);
            }
            Ok(())
        })?;
    }
    Ok(results.into_iter().collect())
}

/// A pattern match bound `var` to a named constant or constructor value of
/// another sort.
fn ill_sorted(sig: &Signature, var: &Sym, value: &Value) -> bool {
    let (Some(want), Value::Atom(_) | Value::Ctor(..)) = (sig.var_sort(var), value) else {
        return false;
    };
    sig.sort_of(value).is_some_and(|got| got != *want)
}

fn enumerate(
    vars: &[&Sym],
    domains: &[Vec<Value>],
    acc: Valuation,
    visit: &mut dyn FnMut(Valuation) -> Result<(), EvalError>,
) -> Result<(), EvalError> {
    match vars.split_first() {
        None => visit(acc),
        Some((v, rest)) => {
            for value in &domains[0] {
                enumerate(rest, &domains[1..], acc.updated((*v).clone(), value.clone()), visit)?;
            }
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::{sym, Sort};

    fn toy_sig() -> Signature {
        let mut sig = Signature::new();
        for a in ["a", "b"] {
            sig.declare_atom(a, &Sort::ip()).unwrap();
        }
        for d in ["d", "e"] {
            sig.declare_atom(d, &Sort::data()).unwrap();
        }
        sig.declare_ctor("mg", vec![Sort::data(), Sort::ip()], Sort::msg()).unwrap();
        sig.declare_var("data", &Sort::data()).unwrap();
        sig.declare_var("dip", &Sort::ip()).unwrap();
        sig.declare_var("m", &Sort::msg()).unwrap();
        sig
    }

    fn mg(d: &str, ip: &str) -> Value {
        Value::ctor("mg", vec![Value::atom(d), Value::atom(ip)])
    }

    fn pattern() -> Formula {
        Formula::eq(Expr::var("m"), Expr::ctor("mg", vec![Expr::var("data"), Expr::var("dip")]))
    }

    #[test]
    fn arithmetic() {
        let sig = Signature::new();
        let env: Valuation = [(sym("hops"), Value::Nat(1))].into_iter().collect();
        let e = Expr::app("+", vec![Expr::var("hops"), Expr::nat(1)]);
        assert_eq!(eval(&sig, &env, &e), Ok(Value::Nat(2)));
        assert_eq!(
            eval(&sig, &Valuation::new(), &Expr::var("hops")),
            Err(EvalError::Unbound("hops".into()))
        );
    }

    #[test]
    fn destructure_message() {
        let sig = toy_sig();
        let env: Valuation = [(sym("ip"), Value::atom("b")), (sym("m"), mg("d", "b"))]
            .into_iter()
            .collect();
        let f = Formula::and(pattern(), Formula::eq(Expr::var("dip"), Expr::var("ip")));
        let got = satisfy(&sig, &env, &f).unwrap();
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].get("data"), Some(&Value::atom("d")));
        assert_eq!(got[0].get("dip"), Some(&Value::atom("b")));

        let env2 = env.updated(sym("ip"), Value::atom("a"));
        let f2 = Formula::and(pattern(), Formula::neq(Expr::var("dip"), Expr::var("ip")));
        let got = satisfy(&sig, &env2, &f2).unwrap();
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].get("dip"), Some(&Value::atom("b")));
        assert!(satisfy(&sig, &env, &f2).unwrap().is_empty());
    }

    #[test]
    fn false_has_no_extensions() {
        let sig = toy_sig();
        assert!(satisfy(&sig, &Valuation::new(), &Formula::False).unwrap().is_empty());
        assert_eq!(satisfy(&sig, &Valuation::new(), &Formula::True).unwrap(), vec![Valuation::new()]);
    }

    #[test]
    fn enumeration_of_free_vars() {
        let sig = toy_sig();
        // dip is constrained only by a disequality: enumerate the IP domain
        let f = Formula::neq(Expr::var("dip"), Expr::atom("a"));
        let got = satisfy(&sig, &Valuation::new(), &f).unwrap();
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].get("dip"), Some(&Value::atom("b")));
        // a disjunction still binds every free variable
        let g = Formula::or(
            Formula::eq(Expr::var("dip"), Expr::atom("a")),
            Formula::eq(Expr::var("data"), Expr::atom("d")),
        );
        let got = satisfy(&sig, &Valuation::new(), &g).unwrap();
        assert!(got.iter().all(|x| x.len() == 2));
        // (a, d), (a, e), (b, d)
        assert_eq!(got.len(), 3);
    }

    #[test]
    fn no_domain_is_reported() {
        let sig = toy_sig();
        let f = Formula::neq(Expr::var("m"), Expr::ctor("mg", vec![Expr::atom("d"), Expr::atom("a")]));
        assert_eq!(
            satisfy(&sig, &Valuation::new(), &f),
            Err(EvalError::UnsupportedGuard("m".into()))
        );
    }
}
