//! Data values, sorts and symbols.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

/// Interned-ish identifier. Cheap to clone, ordered by string content.
pub type Sym = Arc<str>;

pub fn sym(s: &str) -> Sym {
    Arc::from(s)
}

/// The name of a sort (type) in a signature.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sort(pub Sym);

impl Sort {
    pub fn new(name: &str) -> Self {
        Sort(sym(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    pub fn data() -> Self {
        Sort::new("DATA")
    }
    pub fn msg() -> Self {
        Sort::new("MSG")
    }
    pub fn ip() -> Self {
        Sort::new("IP")
    }
    pub fn set_ip() -> Self {
        Sort::new("SET_IP")
    }
    pub fn nat() -> Self {
        Sort::new("NAT")
    }
    pub fn bool() -> Self {
        Sort::new("BOOL")
    }

    pub fn builtins() -> [Sort; 6] {
        [
            Sort::data(),
            Sort::msg(),
            Sort::ip(),
            Sort::set_ip(),
            Sort::nat(),
            Sort::bool(),
        ]
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A finitely representable data value.
///
/// The derived ordering is total and structural; containers are kept in
/// canonical (sorted) form so equal values hash equally.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Bool(bool),
    Nat(u64),
    /// A named constant: an IP address, a data item, a flag such as `kno`.
    Atom(Sym),
    Tuple(Arc<Vec<Value>>),
    /// A constructor application such as `mg(d, b)` or `rrep(...)`.
    Ctor(Sym, Arc<Vec<Value>>),
    Set(Arc<BTreeSet<Value>>),
    Map(Arc<BTreeMap<Value, Value>>),
    Seq(Arc<Vec<Value>>),
}

impl Value {
    pub fn atom(name: &str) -> Value {
        Value::Atom(sym(name))
    }

    pub fn tuple(items: Vec<Value>) -> Value {
        Value::Tuple(Arc::new(items))
    }

    pub fn ctor(name: &str, args: Vec<Value>) -> Value {
        Value::Ctor(sym(name), Arc::new(args))
    }

    pub fn set<I: IntoIterator<Item = Value>>(items: I) -> Value {
        Value::Set(Arc::new(items.into_iter().collect()))
    }

    pub fn empty_set() -> Value {
        Value::Set(Arc::new(BTreeSet::new()))
    }

    pub fn map<I: IntoIterator<Item = (Value, Value)>>(items: I) -> Value {
        Value::Map(Arc::new(items.into_iter().collect()))
    }

    pub fn seq(items: Vec<Value>) -> Value {
        Value::Seq(Arc::new(items))
    }

    pub fn as_nat(&self) -> Option<u64> {
        match self {
            Value::Nat(n) => Some(*n),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Value::Atom(a) => Some(a),
            _ => None,
        }
    }

    pub fn as_set(&self) -> Option<&BTreeSet<Value>> {
        match self {
            Value::Set(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_map(&self) -> Option<&BTreeMap<Value, Value>> {
        match self {
            Value::Map(m) => Some(m),
            _ => None,
        }
    }

    pub fn as_seq(&self) -> Option<&[Value]> {
        match self {
            Value::Seq(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_tuple(&self) -> Option<&[Value]> {
        match self {
            Value::Tuple(t) => Some(t),
            _ => None,
        }
    }

    pub fn as_ctor(&self) -> Option<(&str, &[Value])> {
        match self {
            Value::Ctor(name, args) => Some((name, args)),
            _ => None,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Value::Bool(_) => "bool",
            Value::Nat(_) => "nat",
            Value::Atom(_) => "atom",
            Value::Tuple(_) => "tuple",
            Value::Ctor(..) => "constructor",
            Value::Set(_) => "set",
            Value::Map(_) => "map",
            Value::Seq(_) => "sequence",
        }
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, items: impl IntoIterator<Item = impl fmt::Display>) -> fmt::Result {
    for (i, item) in items.into_iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{item}")?;
    }
    Ok(())
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Nat(n) => write!(f, "{n}"),
            Value::Atom(a) => f.write_str(a),
            Value::Tuple(items) => {
                f.write_str("(")?;
                write_list(f, items.iter())?;
                f.write_str(")")
            }
            Value::Ctor(name, args) => {
                write!(f, "{name}(")?;
                write_list(f, args.iter())?;
                f.write_str(")")
            }
            Value::Set(items) => {
                f.write_str("{")?;
                write_list(f, items.iter())?;
                f.write_str("}")
            }
            Value::Map(entries) => {
                if entries.is_empty() {
                    return f.write_str("{|->}");
                }
                f.write_str("{")?;
                for (i, (k, v)) in entries.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{k}|->{v}")?;
                }
                f.write_str("}")
            }
            Value::Seq(items) => {
                f.write_str("[")?;
                write_list(f, items.iter())?;
                f.write_str("]")
            }
        }
    }
}

/// Renders a set of values the way labels and ranges are printed: `{a,b}`.
pub fn show_set(set: &BTreeSet<Value>) -> String {
    let inner: Vec<String> = set.iter().map(|v| v.to_string()).collect();
    format!("{{{}}}", inner.join(","))
}
