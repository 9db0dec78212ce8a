//! Transition labels of all four layers and the communication function.

use std::collections::BTreeSet;
use std::fmt;

use crate::value::{show_set, Value};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    // sequential and parallel layers
    Broadcast(Value),
    Groupcast(BTreeSet<Value>, Value),
    Unicast(Value, Value),
    NegUnicast(Value),
    Send(Value),
    Deliver(Value),
    Receive(Value),
    Tau,
    // node and network layers
    /// `R:*cast(m)`
    Cast(BTreeSet<Value>, Value),
    /// `H¬K:arrive(m)`
    Arrive(BTreeSet<Value>, BTreeSet<Value>, Value),
    Connect(Value, Value),
    Disconnect(Value, Value),
    /// `ip:deliver(d)`
    NodeDeliver(Value, Value),
    /// `ip:newpkt(d, dip)`
    NewPkt(Value, Value, Value),
}

impl Label {
    pub fn is_tau(&self) -> bool {
        matches!(self, Label::Tau)
    }

    pub fn message(&self) -> Option<&Value> {
        match self {
            Label::Broadcast(m)
            | Label::Groupcast(_, m)
            | Label::Unicast(_, m)
            | Label::Send(m)
            | Label::Receive(m)
            | Label::Cast(_, m)
            | Label::Arrive(_, _, m) => Some(m),
            _ => None,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Broadcast(m) => write!(f, "broadcast({m})"),
            Label::Groupcast(d, m) => write!(f, "groupcast({},{m})", show_set(d)),
            Label::Unicast(d, m) => write!(f, "unicast({d},{m})"),
            Label::NegUnicast(d) => write!(f, "¬unicast({d})"),
            Label::Send(m) => write!(f, "send({m})"),
            Label::Deliver(d) => write!(f, "deliver({d})"),
            Label::Receive(m) => write!(f, "receive({m})"),
            Label::Tau => f.write_str("tau"),
            Label::Cast(r, m) => write!(f, "{}:*cast({m})", show_set(r)),
            Label::Arrive(h, k, m) => write!(f, "{}¬{}:arrive({m})", show_set(h), show_set(k)),
            Label::Connect(a, b) => write!(f, "connect({a},{b})"),
            Label::Disconnect(a, b) => write!(f, "disconnect({a},{b})"),
            Label::NodeDeliver(ip, d) => write!(f, "{ip}:deliver({d})"),
            Label::NewPkt(ip, d, dip) => write!(f, "{ip}:newpkt({d},{dip})"),
        }
    }
}

/// The partial communication function γ. `None` means undefined.
pub fn gamma(a: &Label, b: &Label) -> Option<Label> {
    match (a, b) {
        (Label::Receive(m), Label::Send(n)) if m == n => Some(Label::Tau),
        (Label::Cast(r, m), Label::Arrive(h, k, n)) | (Label::Arrive(h, k, n), Label::Cast(r, m))
            if m == n && h.is_subset(r) && k.is_disjoint(r) =>
        {
            Some(Label::Cast(r.clone(), m.clone()))
        }
        (Label::Arrive(h, k, m), Label::Arrive(h2, k2, n)) if m == n => Some(Label::Arrive(
            h.union(h2).cloned().collect(),
            k.union(k2).cloned().collect(),
            m.clone(),
        )),
        _ => None,
    }
}

/// Who transmitted an encapsulated cast, kept next to its `tau` label so
/// traces can show `a:*cast(m)` and checks can inspect the message.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CastInfo {
    pub sender: Value,
    pub range: BTreeSet<Value>,
    pub msg: Value,
}

impl fmt::Display for CastInfo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:*cast({})", self.sender, self.msg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(items: &[&str]) -> BTreeSet<Value> {
        items.iter().map(|s| Value::atom(s)).collect()
    }

    #[test]
    fn gamma_cases() {
        let m0 = Value::atom("m0");
        assert_eq!(gamma(&Label::Receive(m0.clone()), &Label::Send(m0.clone())), Some(Label::Tau));
        assert_eq!(gamma(&Label::Send(m0.clone()), &Label::Receive(m0.clone())), None);
        let cast = Label::Cast(set(&["b"]), m0.clone());
        let arrive_b = Label::Arrive(set(&["b"]), set(&[]), m0.clone());
        assert_eq!(gamma(&cast, &arrive_b), Some(cast.clone()));
        assert_eq!(gamma(&arrive_b, &cast), Some(cast.clone()));
        let arrive_c = Label::Arrive(set(&["c"]), set(&[]), m0.clone());
        assert_eq!(gamma(&cast, &arrive_c), None);
        let away = Label::Arrive(set(&[]), set(&["c"]), m0.clone());
        assert_eq!(gamma(&cast, &away), Some(cast.clone()));
        let away_b = Label::Arrive(set(&[]), set(&["b"]), m0.clone());
        assert_eq!(gamma(&cast, &away_b), None);
        assert_eq!(
            gamma(&arrive_b, &away),
            Some(Label::Arrive(set(&["b"]), set(&["c"]), m0))
        );
    }

    #[test]
    fn display() {
        let m = Value::ctor("mg", vec![Value::atom("d"), Value::atom("b")]);
        assert_eq!(Label::Cast(set(&["b"]), m.clone()).to_string(), "{b}:*cast(mg(d,b))");
        assert_eq!(Label::Arrive(set(&["a"]), set(&[]), m).to_string(), "{a}¬{}:arrive(mg(d,b))");
        assert_eq!(Label::NodeDeliver(Value::atom("b"), Value::atom("d")).to_string(), "b:deliver(d)");
    }
}
