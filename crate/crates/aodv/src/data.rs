//! Routing tables, the data-packet store and the AODV data operators.
//!
//! Everything the process library manipulates is an ordinary [`Value`]:
//! a routing table is a map `dip ↦ (dip, dsn, dsk, flag, hops, nhip, pre)`,
//! the store is a map `dip ↦ (pflag, [data, ...])`. The typed views here do
//! the work and [`register`] exposes them as signature operators.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use awn::signature::{OpError, Signature};
use awn::{Sort, Value};
use serde::{Deserialize, Serialize};

pub const KNO: &str = "kno";
pub const UNKNO: &str = "unkno";
pub const VAL: &str = "val";
pub const INVAL: &str = "inval";
pub const PEN: &str = "pen";
pub const NONPEN: &str = "nonpen";

/// How `inv` picks the sequence number of an invalidated entry.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InvMode {
    /// `max(old + 1, rsn)`; entries that are already invalid are left alone.
    #[default]
    Paper,
    /// Copy `rsn` unconditionally.
    RfcLiteral,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DataConfig {
    pub inv_mode: InvMode,
    pub intermediate_rrep: bool,
}

impl Default for DataConfig {
    fn default() -> Self {
        DataConfig {
            inv_mode: InvMode::Paper,
            intermediate_rrep: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RouteEntry {
    pub dip: Value,
    pub dsn: u64,
    pub known: bool,
    pub valid: bool,
    pub hops: u64,
    pub nhip: Value,
    pub pre: BTreeSet<Value>,
}

fn type_err(what: &str, got: &Value) -> OpError {
    OpError::Type(format!("expected {what}, got {got}"))
}

fn flag_atom(v: &Value, yes: &str, no: &str) -> Result<bool, OpError> {
    match v.as_atom() {
        Some(a) if a == yes => Ok(true),
        Some(a) if a == no => Ok(false),
        _ => Err(type_err(&format!("{yes} or {no}"), v)),
    }
}

impl RouteEntry {
    pub fn new(dip: Value, dsn: u64, known: bool, valid: bool, hops: u64, nhip: Value) -> Self {
        RouteEntry {
            dip,
            dsn,
            known,
            valid,
            hops,
            nhip,
            pre: BTreeSet::new(),
        }
    }

    pub fn with_pre<I: IntoIterator<Item = Value>>(mut self, pre: I) -> Self {
        self.pre.extend(pre);
        self
    }

    pub fn to_value(&self) -> Value {
        Value::tuple(vec![
            self.dip.clone(),
            Value::Nat(self.dsn),
            Value::atom(if self.known { KNO } else { UNKNO }),
            Value::atom(if self.valid { VAL } else { INVAL }),
            Value::Nat(self.hops),
            self.nhip.clone(),
            Value::set(self.pre.iter().cloned()),
        ])
    }

    pub fn from_value(v: &Value) -> Result<Self, OpError> {
        let t = v.as_tuple().filter(|t| t.len() == 7).ok_or_else(|| type_err("a route", v))?;
        let nat = |x: &Value| x.as_nat().ok_or_else(|| type_err("a number", x));
        Ok(RouteEntry {
            dip: t[0].clone(),
            dsn: nat(&t[1])?,
            known: flag_atom(&t[2], KNO, UNKNO)?,
            valid: flag_atom(&t[3], VAL, INVAL)?,
            hops: nat(&t[4])?,
            nhip: t[5].clone(),
            pre: t[6].as_set().ok_or_else(|| type_err("a set", &t[6]))?.clone(),
        })
    }
}

impl fmt::Display for RouteEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pre: Vec<String> = self.pre.iter().map(|p| p.to_string()).collect();
        write!(
            f,
            "{} {} {} {} {} {} {{{}}}",
            self.dip,
            self.dsn,
            if self.known { KNO } else { UNKNO },
            if self.valid { VAL } else { INVAL },
            self.hops,
            self.nhip,
            pre.join(",")
        )
    }
}

/// At most one entry per destination.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RoutingTable {
    entries: BTreeMap<Value, RouteEntry>,
}

impl RoutingTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Later entries for the same destination replace earlier ones.
    pub fn from_entries<I: IntoIterator<Item = RouteEntry>>(entries: I) -> Self {
        RoutingTable {
            entries: entries.into_iter().map(|e| (e.dip.clone(), e)).collect(),
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = &RouteEntry> {
        self.entries.values()
    }

    pub fn get(&self, dip: &Value) -> Option<&RouteEntry> {
        self.entries.get(dip)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Inserts `r` if its destination is unknown; otherwise `r` replaces the
    /// old entry iff it is fresher, or as fresh and the old one is invalid or
    /// longer. Precursors are merged either way.
    pub fn upd(&self, r: &RouteEntry) -> RoutingTable {
        let mut out = self.clone();
        match out.entries.get_mut(&r.dip) {
            None => {
                out.entries.insert(r.dip.clone(), r.clone());
            }
            Some(old) => {
                if replaces(r, old) {
                    let mut new = r.clone();
                    new.pre.extend(old.pre.iter().cloned());
                    *old = new;
                } else {
                    old.pre.extend(r.pre.iter().cloned());
                }
            }
        }
        out
    }

    /// Marks every destination of `dests` invalid, choosing the new sequence
    /// number per `mode`. Destinations without an entry are ignored.
    pub fn inv(&self, dests: &BTreeMap<Value, u64>, mode: InvMode) -> RoutingTable {
        let mut out = self.clone();
        for (dip, &rsn) in dests {
            let Some(e) = out.entries.get_mut(dip) else { continue };
            match mode {
                InvMode::Paper => {
                    if e.valid {
                        e.dsn = (e.dsn + 1).max(rsn);
                        e.valid = false;
                    }
                }
                InvMode::RfcLiteral => {
                    e.dsn = rsn;
                    e.valid = false;
                }
            }
        }
        out
    }

    /// 0 for an unknown destination.
    pub fn sqn(&self, dip: &Value) -> u64 {
        self.entries.get(dip).map_or(0, |e| e.dsn)
    }

    /// `false` (unknown) for a missing destination.
    pub fn sqnf(&self, dip: &Value) -> bool {
        self.entries.get(dip).is_some_and(|e| e.known)
    }

    pub fn status(&self, dip: &Value) -> Option<bool> {
        self.entries.get(dip).map(|e| e.valid)
    }

    pub fn dhops(&self, dip: &Value) -> Option<u64> {
        self.entries.get(dip).map(|e| e.hops)
    }

    pub fn nhop(&self, dip: &Value) -> Option<&Value> {
        self.entries.get(dip).map(|e| &e.nhip)
    }

    pub fn precs(&self, dip: &Value) -> Option<&BTreeSet<Value>> {
        self.entries.get(dip).map(|e| &e.pre)
    }

    /// Destinations with a valid entry.
    pub fn akd(&self) -> BTreeSet<Value> {
        self.entries.values().filter(|e| e.valid).map(|e| e.dip.clone()).collect()
    }

    /// All destinations with an entry.
    pub fn kd(&self) -> BTreeSet<Value> {
        self.entries.keys().cloned().collect()
    }

    pub fn addprecrt(&self, dip: &Value, npre: &BTreeSet<Value>) -> Option<RoutingTable> {
        let mut out = self.clone();
        out.entries.get_mut(dip)?.pre.extend(npre.iter().cloned());
        Some(out)
    }

    /// Valid routes through `nhip`, each paired with its incremented number.
    pub fn broken_via(&self, nhip: &Value) -> BTreeMap<Value, u64> {
        self.entries
            .values()
            .filter(|e| e.valid && e.nhip == *nhip)
            .map(|e| (e.dip.clone(), e.dsn + 1))
            .collect()
    }

    /// The part of an incoming error report from `sip` this node acts on:
    /// valid routes via `sip`, and in paper mode only where the report is
    /// fresher than the entry.
    pub fn affected(&self, dests: &BTreeMap<Value, u64>, sip: &Value, mode: InvMode) -> BTreeMap<Value, u64> {
        dests
            .iter()
            .filter(|(dip, &rsn)| {
                self.entries.get(*dip).is_some_and(|e| {
                    e.valid && e.nhip == *sip && (mode == InvMode::RfcLiteral || e.dsn < rsn)
                })
            })
            .map(|(d, &n)| (d.clone(), n))
            .collect()
    }

    /// Union of the precursors of the destinations in `dests`.
    pub fn precs_of(&self, dests: &BTreeMap<Value, u64>) -> BTreeSet<Value> {
        dests
            .keys()
            .filter_map(|d| self.entries.get(d))
            .flat_map(|e| e.pre.iter().cloned())
            .collect()
    }

    /// Destinations of `dests` that have precursors, with this table's
    /// current numbers: what an error report forwarded from here carries.
    pub fn report(&self, dests: &BTreeMap<Value, u64>) -> BTreeMap<Value, u64> {
        dests
            .keys()
            .filter_map(|d| self.entries.get(d))
            .filter(|e| !e.pre.is_empty())
            .map(|e| (e.dip.clone(), e.dsn))
            .collect()
    }

    pub fn to_value(&self) -> Value {
        Value::map(self.entries.iter().map(|(k, e)| (k.clone(), e.to_value())))
    }

    pub fn from_value(v: &Value) -> Result<Self, OpError> {
        let m = v.as_map().ok_or_else(|| type_err("a routing table", v))?;
        let mut entries = BTreeMap::new();
        for (k, e) in m.iter() {
            let e = RouteEntry::from_value(e)?;
            if e.dip != *k {
                return Err(type_err(&format!("a route for {k}"), &e.to_value()));
            }
            entries.insert(k.clone(), e);
        }
        Ok(RoutingTable { entries })
    }

    /// One line per entry, `dip dsn dsk flag hops nhip {pre,...}`, by destination.
    pub fn dump(&self) -> String {
        self.entries.values().map(|e| format!("{e}\n")).collect()
    }
}

fn replaces(r: &RouteEntry, old: &RouteEntry) -> bool {
    r.dsn > old.dsn || (r.dsn == old.dsn && (!old.valid || r.hops < old.hops))
}

impl fmt::Display for RoutingTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.dump())
    }
}

// ---- store ----

/// Data queued at the originator, per destination, with a pending-request flag.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Store {
    queues: BTreeMap<Value, (bool, Vec<Value>)>,
}

impl Store {
    pub fn queued(&self) -> BTreeSet<Value> {
        self.queues.keys().cloned().collect()
    }

    pub fn queue(&self, dip: &Value) -> Option<&[Value]> {
        self.queues.get(dip).map(|(_, q)| q.as_slice())
    }

    pub fn pending(&self, dip: &Value) -> Option<bool> {
        self.queues.get(dip).map(|(p, _)| *p)
    }

    pub fn add(&self, data: Value, dip: &Value) -> Store {
        let mut out = self.clone();
        out.queues.entry(dip.clone()).or_insert((false, Vec::new())).1.push(data);
        out
    }

    /// Removes the head of `dip`'s queue; an emptied queue disappears.
    pub fn drop_head(&self, dip: &Value) -> Store {
        let mut out = self.clone();
        if let Some((_, q)) = out.queues.get_mut(dip) {
            if !q.is_empty() {
                q.remove(0);
            }
            if q.is_empty() {
                out.queues.remove(dip);
            }
        }
        out
    }

    pub fn set_pending(&self, dip: &Value, pending: bool) -> Store {
        let mut out = self.clone();
        if let Some(entry) = out.queues.get_mut(dip) {
            entry.0 = pending;
        }
        out
    }

    pub fn to_value(&self) -> Value {
        Value::map(self.queues.iter().map(|(k, (p, q))| {
            (
                k.clone(),
                Value::tuple(vec![Value::atom(if *p { PEN } else { NONPEN }), Value::seq(q.clone())]),
            )
        }))
    }

    pub fn from_value(v: &Value) -> Result<Self, OpError> {
        let m = v.as_map().ok_or_else(|| type_err("a store", v))?;
        let mut queues = BTreeMap::new();
        for (k, e) in m.iter() {
            let t = e.as_tuple().filter(|t| t.len() == 2).ok_or_else(|| type_err("a queue", e))?;
            let p = flag_atom(&t[0], PEN, NONPEN)?;
            let q = t[1].as_seq().ok_or_else(|| type_err("a sequence", &t[1]))?.to_vec();
            queues.insert(k.clone(), (p, q));
        }
        Ok(Store { queues })
    }
}

// ---- operator registration ----

fn table(args: &[Value], i: usize) -> Result<RoutingTable, OpError> {
    RoutingTable::from_value(&args[i])
}

fn store(args: &[Value], i: usize) -> Result<Store, OpError> {
    Store::from_value(&args[i])
}

fn set(args: &[Value], i: usize) -> Result<BTreeSet<Value>, OpError> {
    args[i].as_set().cloned().ok_or_else(|| type_err("a set", &args[i]))
}

fn dests(args: &[Value], i: usize) -> Result<BTreeMap<Value, u64>, OpError> {
    let m = args[i].as_map().ok_or_else(|| type_err("a destination map", &args[i]))?;
    m.iter()
        .map(|(k, v)| Ok((k.clone(), v.as_nat().ok_or_else(|| type_err("a number", v))?)))
        .collect()
}

fn dests_value(d: &BTreeMap<Value, u64>) -> Value {
    Value::map(d.iter().map(|(k, &n)| (k.clone(), Value::Nat(n))))
}

fn undefined(op: &str, dip: &Value) -> OpError {
    OpError::Undefined(format!("{op}: no route to {dip}"))
}

/// Declares the flag constants and every AODV operator on `sig`.
/// `irrep` is a boolean constant holding `cfg.intermediate_rrep`.
pub fn register(sig: &mut Signature, cfg: DataConfig) -> Result<(), awn::signature::SignatureError> {
    for (sort, atoms) in [("SQNK", [KNO, UNKNO]), ("FLAG", [VAL, INVAL]), ("PFLAG", [PEN, NONPEN])] {
        let s = sig.ensure_sort(sort);
        for a in atoms {
            sig.declare_atom(a, &s)?;
        }
    }
    sig.declare_const("irrep", &Sort::bool(), Value::Bool(cfg.intermediate_rrep))?;
    let mode = cfg.inv_mode;

    sig.op("upd", Some(2), |a| {
        Ok(table(a, 0)?.upd(&RouteEntry::from_value(&a[1])?).to_value())
    });
    sig.op("inv", Some(2), move |a| Ok(table(a, 0)?.inv(&dests(a, 1)?, mode).to_value()));
    sig.op("sqn", Some(2), |a| Ok(Value::Nat(table(a, 0)?.sqn(&a[1]))));
    sig.op("sqnf", Some(2), |a| {
        Ok(Value::atom(if table(a, 0)?.sqnf(&a[1]) { KNO } else { UNKNO }))
    });
    sig.op("status", Some(2), |a| {
        let v = table(a, 0)?.status(&a[1]).ok_or_else(|| undefined("status", &a[1]))?;
        Ok(Value::atom(if v { VAL } else { INVAL }))
    });
    sig.op("dhops", Some(2), |a| {
        table(a, 0)?.dhops(&a[1]).map(Value::Nat).ok_or_else(|| undefined("dhops", &a[1]))
    });
    sig.op("nhop", Some(2), |a| {
        table(a, 0)?.nhop(&a[1]).cloned().ok_or_else(|| undefined("nhop", &a[1]))
    });
    sig.op("precs", Some(2), |a| {
        let t = table(a, 0)?;
        let p = t.precs(&a[1]).ok_or_else(|| undefined("precs", &a[1]))?;
        Ok(Value::set(p.iter().cloned()))
    });
    sig.op("akD", Some(1), |a| Ok(Value::set(table(a, 0)?.akd())));
    sig.op("kD", Some(1), |a| Ok(Value::set(table(a, 0)?.kd())));
    sig.op("addprecrt", Some(3), |a| {
        table(a, 0)?
            .addprecrt(&a[1], &set(a, 2)?)
            .map(|t| t.to_value())
            .ok_or_else(|| undefined("addprecrt", &a[1]))
    });
    sig.op("inc", Some(1), |a| {
        a[0].as_nat().map(|n| Value::Nat(n + 1)).ok_or_else(|| type_err("a number", &a[0]))
    });
    sig.op("brk", Some(2), |a| Ok(dests_value(&table(a, 0)?.broken_via(&a[1]))));
    sig.op("affected", Some(3), move |a| {
        Ok(dests_value(&table(a, 0)?.affected(&dests(a, 1)?, &a[2], mode)))
    });
    sig.op("precsof", Some(2), |a| Ok(Value::set(table(a, 0)?.precs_of(&dests(a, 1)?))));
    sig.op("report", Some(2), |a| Ok(dests_value(&table(a, 0)?.report(&dests(a, 1)?))));

    sig.op("qD", Some(1), |a| Ok(Value::set(store(a, 0)?.queued())));
    sig.op("add", Some(3), |a| Ok(store(a, 2)?.add(a[0].clone(), &a[1]).to_value()));
    sig.op("fdata", Some(2), |a| {
        store(a, 0)?
            .queue(&a[1])
            .and_then(|q| q.first().cloned())
            .ok_or_else(|| OpError::Undefined(format!("fdata: nothing queued for {}", a[1])))
    });
    sig.op("drop", Some(2), |a| Ok(store(a, 1)?.drop_head(&a[0]).to_value()));
    sig.op("pending", Some(2), |a| {
        store(a, 0)?
            .pending(&a[1])
            .map(Value::Bool)
            .ok_or_else(|| OpError::Undefined(format!("pending: nothing queued for {}", a[1])))
    });
    sig.op("setP", Some(3), |a| {
        let p = flag_atom(&a[2], PEN, NONPEN)?;
        Ok(store(a, 0)?.set_pending(&a[1], p).to_value())
    });
    // Queued destinations among `dests` go back to "no request pending".
    sig.op("unpend", Some(2), |a| {
        let mut s = store(a, 0)?;
        for d in dests(a, 1)?.keys() {
            s = s.set_pending(d, false);
        }
        Ok(s.to_value())
    });
    // Next request id of `ip`: one more than the largest it has used.
    sig.op("nrreqid", Some(2), |a| {
        let seen = set(a, 0)?;
        let max = seen
            .iter()
            .filter_map(|x| match x.as_tuple() {
                Some([oip, id]) if *oip == a[1] => id.as_nat(),
                _ => None,
            })
            .max()
            .unwrap_or(0);
        Ok(Value::Nat(max + 1))
    });
    Ok(())
}
