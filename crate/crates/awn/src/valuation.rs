use std::collections::BTreeMap;
use std::fmt;

use crate::value::{Sym, Value};

/// A partial map from data variables to values.
///
/// Looking up an unmapped variable yields `None`; there is no "undefined"
/// value inside the value domain.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Valuation(BTreeMap<Sym, Value>);

impl Valuation {
    pub fn new() -> Self {
        Valuation(BTreeMap::new())
    }

    pub fn get(&self, var: &str) -> Option<&Value> {
        self.0.get(var)
    }

    pub fn contains(&self, var: &str) -> bool {
        self.0.contains_key(var)
    }

    /// `self[var := value]`, leaving every other binding unchanged.
    pub fn updated(&self, var: Sym, value: Value) -> Valuation {
        let mut next = self.clone();
        next.0.insert(var, value);
        next
    }

    pub fn insert(&mut self, var: Sym, value: Value) {
        self.0.insert(var, value);
    }

    pub fn remove(&mut self, var: &str) -> Option<Value> {
        self.0.remove(var)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Sym, &Value)> {
        self.0.iter()
    }

    pub fn vars(&self) -> impl Iterator<Item = &Sym> {
        self.0.keys()
    }

    /// True when `self` agrees with `base` on every variable of `base`.
    pub fn extends(&self, base: &Valuation) -> bool {
        base.iter().all(|(k, v)| self.get(k) == Some(v))
    }
}

impl FromIterator<(Sym, Value)> for Valuation {
    fn from_iter<T: IntoIterator<Item = (Sym, Value)>>(iter: T) -> Self {
        Valuation(iter.into_iter().collect())
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, v)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k} := {v}")?;
        }
        f.write_str("}")
    }
}
