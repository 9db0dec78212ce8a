//! Sorts, variables, constants, constructors and operators available to terms.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::value::{sym, Sort, Sym, Value};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OpError {
    /// A partial operator applied outside its domain, e.g. `nhop` on a missing destination.
    #[error("undefined at these arguments: {0}")]
    Undefined(String),
    #[error("ill-sorted arguments: {0}")]
    Type(String),
}

pub type OpFn = Arc<dyn Fn(&[Value]) -> Result<Value, OpError> + Send + Sync>;

#[derive(Clone)]
pub struct OpDef {
    pub name: Sym,
    /// `None` for variadic operators.
    pub arity: Option<usize>,
    pub func: OpFn,
}

impl fmt::Debug for OpDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OpDef")
            .field("name", &self.name)
            .field("arity", &self.arity)
            .finish()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CtorDef {
    pub name: Sym,
    pub args: Vec<Sort>,
    pub result: Sort,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignatureError {
    #[error("sort `{0}` is already declared")]
    DuplicateSort(String),
    #[error("unknown sort `{0}`")]
    UnknownSort(String),
    #[error("name `{0}` is already declared")]
    DuplicateName(String),
}

/// The data structure a process library is written against.
#[derive(Clone, Debug)]
pub struct Signature {
    sorts: BTreeSet<Sort>,
    vars: BTreeMap<Sym, Sort>,
    consts: BTreeMap<Sym, (Sort, Value)>,
    ctors: BTreeMap<Sym, CtorDef>,
    ops: BTreeMap<Sym, OpDef>,
}

impl Default for Signature {
    fn default() -> Self {
        Self::new()
    }
}

fn nat_arg(args: &[Value], i: usize) -> Result<u64, OpError> {
    args[i]
        .as_nat()
        .ok_or_else(|| OpError::Type(format!("expected a number, got {}", args[i])))
}

fn set_arg(args: &[Value], i: usize) -> Result<&BTreeSet<Value>, OpError> {
    args[i]
        .as_set()
        .ok_or_else(|| OpError::Type(format!("expected a set, got {}", args[i])))
}

fn seq_arg(args: &[Value], i: usize) -> Result<&[Value], OpError> {
    args[i]
        .as_seq()
        .ok_or_else(|| OpError::Type(format!("expected a sequence, got {}", args[i])))
}

impl Signature {
    /// A signature holding the built-in sorts and the generic operators on
    /// numbers, sets, maps and sequences.
    pub fn new() -> Self {
        let mut sig = Signature {
            sorts: Sort::builtins().into_iter().collect(),
            vars: BTreeMap::new(),
            consts: BTreeMap::new(),
            ctors: BTreeMap::new(),
            ops: BTreeMap::new(),
        };
        sig.op("+", Some(2), |a| Ok(Value::Nat(nat_arg(a, 0)? + nat_arg(a, 1)?)));
        sig.op("-", Some(2), |a| {
            Ok(Value::Nat(nat_arg(a, 0)?.saturating_sub(nat_arg(a, 1)?)))
        });
        sig.op("max", Some(2), |a| Ok(if a[0] >= a[1] { a[0].clone() } else { a[1].clone() }));
        sig.op("min", Some(2), |a| Ok(if a[0] <= a[1] { a[0].clone() } else { a[1].clone() }));
        sig.op("union", Some(2), |a| {
            let mut s = set_arg(a, 0)?.clone();
            s.extend(set_arg(a, 1)?.iter().cloned());
            Ok(Value::Set(Arc::new(s)))
        });
        sig.op("inter", Some(2), |a| {
            let b = set_arg(a, 1)?;
            Ok(Value::set(set_arg(a, 0)?.iter().filter(|x| b.contains(x)).cloned()))
        });
        sig.op("diff", Some(2), |a| {
            let b = set_arg(a, 1)?;
            Ok(Value::set(set_arg(a, 0)?.iter().filter(|x| !b.contains(x)).cloned()))
        });
        sig.op("size", Some(1), |a| match &a[0] {
            Value::Set(s) => Ok(Value::Nat(s.len() as u64)),
            Value::Map(m) => Ok(Value::Nat(m.len() as u64)),
            Value::Seq(s) => Ok(Value::Nat(s.len() as u64)),
            other => Err(OpError::Type(format!("size of {}", other.kind()))),
        });
        sig.op("dom", Some(1), |a| match &a[0] {
            Value::Map(m) => Ok(Value::set(m.keys().cloned())),
            other => Err(OpError::Type(format!("dom of {}", other.kind()))),
        });
        sig.op("head", Some(1), |a| {
            seq_arg(a, 0)?
                .first()
                .cloned()
                .ok_or_else(|| OpError::Undefined("head of empty sequence".into()))
        });
        sig.op("tail", Some(1), |a| {
            let s = seq_arg(a, 0)?;
            if s.is_empty() {
                return Err(OpError::Undefined("tail of empty sequence".into()));
            }
            Ok(Value::seq(s[1..].to_vec()))
        });
        sig.op("append", Some(2), |a| {
            let mut s = seq_arg(a, 0)?.to_vec();
            s.push(a[1].clone());
            Ok(Value::seq(s))
        });
        sig
    }

    pub fn declare_sort(&mut self, name: &str) -> Result<Sort, SignatureError> {
        let sort = Sort::new(name);
        if !self.sorts.insert(sort.clone()) {
            return Err(SignatureError::DuplicateSort(name.into()));
        }
        Ok(sort)
    }

    /// Declares a sort unless it already exists.
    pub fn ensure_sort(&mut self, name: &str) -> Sort {
        let sort = Sort::new(name);
        self.sorts.insert(sort.clone());
        sort
    }

    pub fn has_sort(&self, name: &str) -> bool {
        self.sorts.contains(&Sort::new(name))
    }

    fn check_sort(&self, sort: &Sort) -> Result<(), SignatureError> {
        if self.sorts.contains(sort) {
            Ok(())
        } else {
            Err(SignatureError::UnknownSort(sort.name().into()))
        }
    }

    fn check_fresh(&self, name: &str) -> Result<(), SignatureError> {
        if self.vars.contains_key(name)
            || self.consts.contains_key(name)
            || self.ctors.contains_key(name)
            || self.ops.contains_key(name)
        {
            return Err(SignatureError::DuplicateName(name.into()));
        }
        Ok(())
    }

    pub fn declare_var(&mut self, name: &str, sort: &Sort) -> Result<(), SignatureError> {
        self.check_sort(sort)?;
        self.check_fresh(name)?;
        self.vars.insert(sym(name), sort.clone());
        Ok(())
    }

    /// Declares an atom constant `name` of `sort`. Atoms of a sort form the
    /// finite domain that guards may enumerate.
    pub fn declare_atom(&mut self, name: &str, sort: &Sort) -> Result<Value, SignatureError> {
        self.declare_const(name, sort, Value::atom(name))
    }

    pub fn declare_const(&mut self, name: &str, sort: &Sort, value: Value) -> Result<Value, SignatureError> {
        self.check_sort(sort)?;
        if let Some((existing_sort, existing)) = self.consts.get(name) {
            if existing_sort == sort && *existing == value {
                return Ok(value);
            }
            return Err(SignatureError::DuplicateName(name.into()));
        }
        self.check_fresh(name)?;
        self.consts.insert(sym(name), (sort.clone(), value.clone()));
        Ok(value)
    }

    pub fn declare_ctor(&mut self, name: &str, args: Vec<Sort>, result: Sort) -> Result<(), SignatureError> {
        for s in args.iter().chain(std::iter::once(&result)) {
            self.check_sort(s)?;
        }
        self.check_fresh(name)?;
        self.ctors.insert(sym(name), CtorDef { name: sym(name), args, result });
        Ok(())
    }

    /// Registers (or replaces) an operator implementation.
    pub fn op<F>(&mut self, name: &str, arity: Option<usize>, func: F)
    where
        F: Fn(&[Value]) -> Result<Value, OpError> + Send + Sync + 'static,
    {
        self.ops.insert(
            sym(name),
            OpDef {
                name: sym(name),
                arity,
                func: Arc::new(func),
            },
        );
    }

    pub fn var_sort(&self, name: &str) -> Option<&Sort> {
        self.vars.get(name)
    }

    pub fn constant(&self, name: &str) -> Option<&(Sort, Value)> {
        self.consts.get(name)
    }

    pub fn ctor_def(&self, name: &str) -> Option<&CtorDef> {
        self.ctors.get(name)
    }

    pub fn op_def(&self, name: &str) -> Option<&OpDef> {
        self.ops.get(name)
    }

    pub fn sorts(&self) -> impl Iterator<Item = &Sort> {
        self.sorts.iter()
    }

    /// The finite enumeration domain of a sort: its declared atoms, or
    /// `{false, true}` for BOOL. `None` when the sort is not enumerable.
    pub fn domain(&self, sort: &Sort) -> Option<Vec<Value>> {
        if *sort == Sort::bool() {
            return Some(vec![Value::Bool(false), Value::Bool(true)]);
        }
        let atoms: Vec<Value> = self
            .consts
            .values()
            .filter(|(s, v)| s == sort && matches!(v, Value::Atom(_)))
            .map(|(_, v)| v.clone())
            .collect();
        if atoms.is_empty() {
            None
        } else {
            Some(atoms)
        }
    }

    /// Best-effort sort of a value; atoms and constructor results are looked
    /// up, everything else follows its shape.
    pub fn sort_of(&self, value: &Value) -> Option<Sort> {
        match value {
            Value::Bool(_) => Some(Sort::bool()),
            Value::Nat(_) => Some(Sort::nat()),
            Value::Atom(a) => self.consts.get(a).map(|(s, _)| s.clone()),
            Value::Ctor(name, _) => self.ctors.get(name).map(|c| c.result.clone()),
            Value::Set(items) if items.iter().all(|v| self.sort_of(v) == Some(Sort::ip())) => {
                Some(Sort::set_ip())
            }
            _ => None,
        }
    }
}
