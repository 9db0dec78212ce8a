//! Correctness checks over an explored scenario: the route-reply invariant,
//! loop freedom, sequence-number monotonicity, CTL properties, and DOT export.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use awn::ctl::{observable, Pat};
use awn::{check_ctl, parse_ctl, AtomText, Ctl, Label, Lts, NetAtom, TaggedKripke, Value};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::explorer::{Explorer, State};
use crate::model::node_table;
use crate::data::RoutingTable;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub check: String,
    pub message: String,
    /// Labels from the initial state to the offending state or transition.
    pub trace: Vec<String>,
    /// LTS index of the offending state (the source, for a transition).
    pub state: usize,
}

fn trace_to(lts: &Lts<State>, state: usize) -> Vec<String> {
    lts.path_to(state).iter().map(|e| e.display_label()).collect()
}

/// Routing tables of every AODV node of `s`, by address.
pub fn tables(s: &State) -> BTreeMap<Value, RoutingTable> {
    s.net
        .inner()
        .nodes()
        .into_iter()
        .filter_map(|n| Some((n.ip.clone(), node_table(n)?)))
        .collect()
}

fn all_tables(lts: &Lts<State>) -> Vec<BTreeMap<Value, RoutingTable>> {
    lts.states.iter().map(tables).collect()
}

/// Whenever a node `ipc` casts `rrep(hops, dip, dsn, *, ipc)` with
/// `ipc != dip`, its own table has a valid entry for `dip` with exactly that
/// number and hop count.
pub fn rrep_invariant(lts: &Lts<State>) -> Vec<Violation> {
    let mut out = Vec::new();
    for e in &lts.edges {
        let Some(cast) = &e.cast else { continue };
        let Some(("rrep", [hops, dip, dsn, _oip, sip])) = cast.msg.as_ctor() else {
            continue;
        };
        if sip == dip {
            continue;
        }
        let src = &lts.states[e.src];
        let rt = src.net.inner().node(sip).and_then(node_table);
        let entry = rt.as_ref().and_then(|rt| rt.get(dip));
        let ok = entry.is_some_and(|r| {
            r.valid && Some(r.dsn) == dsn.as_nat() && Some(r.hops) == hops.as_nat()
        });
        if !ok {
            let mut trace = trace_to(lts, e.src);
            trace.push(e.display_label());
            out.push(Violation {
                check: "prop1".into(),
                message: format!(
                    "{sip} sent {} but holds {}",
                    cast.msg,
                    entry.map_or("no entry".to_string(), |r| r.to_string())
                ),
                trace,
                state: e.src,
            });
        }
    }
    out
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LoopReport {
    /// Arcs where the next hop is not strictly better.
    pub arc_violations: Vec<Violation>,
    /// States whose routing graph for some destination has a cycle.
    pub cycles: Vec<Violation>,
}

impl LoopReport {
    pub fn ok(&self) -> bool {
        self.arc_violations.is_empty() && self.cycles.is_empty()
    }
}

/// Arcs `ip -> nhip` of the routing graph for `dip`: valid entries, `ip != dip`.
pub fn routing_graph(tables: &BTreeMap<Value, RoutingTable>, dip: &Value) -> BTreeMap<Value, Value> {
    tables
        .iter()
        .filter(|(ip, _)| *ip != dip)
        .filter_map(|(ip, rt)| {
            let e = rt.get(dip)?;
            e.valid.then(|| (ip.clone(), e.nhip.clone()))
        })
        .collect()
}

/// A cycle of a graph with at most one successor per vertex.
fn find_cycle(arcs: &BTreeMap<Value, Value>) -> Option<Vec<Value>> {
    for start in arcs.keys() {
        let mut seen = Vec::new();
        let mut cur = start.clone();
        while let Some(next) = arcs.get(&cur) {
            if let Some(i) = seen.iter().position(|x| *x == cur) {
                return Some(seen[i..].to_vec());
            }
            seen.push(cur.clone());
            cur = next.clone();
        }
    }
    None
}

pub fn loop_freedom(lts: &Lts<State>) -> LoopReport {
    let mut report = LoopReport::default();
    for (i, s) in lts.states.iter().enumerate() {
        let ts = tables(s);
        let dests: BTreeSet<Value> = ts.values().flat_map(|rt| rt.kd()).collect();
        for dip in &dests {
            let arcs = routing_graph(&ts, dip);
            for (ip, nhip) in &arcs {
                if nhip == dip {
                    continue;
                }
                let (Some(mine), Some(theirs)) = (ts[ip].get(dip), ts.get(nhip).and_then(|rt| rt.get(dip))) else {
                    continue;
                };
                if !theirs.valid {
                    continue;
                }
                let better = mine.dsn < theirs.dsn || (mine.dsn == theirs.dsn && mine.hops > theirs.hops);
                if !better {
                    report.arc_violations.push(Violation {
                        check: "loopfree".into(),
                        message: format!("arc {ip}->{nhip} for {dip}: {mine} vs {theirs}"),
                        trace: trace_to(lts, i),
                        state: i,
                    });
                }
            }
            if let Some(cycle) = find_cycle(&arcs) {
                let names: Vec<String> = cycle.iter().map(|v| v.to_string()).collect();
                report.cycles.push(Violation {
                    check: "loopfree".into(),
                    message: format!("routing loop for {dip}: {}", names.join(" -> ")),
                    trace: trace_to(lts, i),
                    state: i,
                });
            }
        }
    }
    report
}

/// Transitions that lower some node's sequence number for some destination.
pub fn monotonicity(lts: &Lts<State>) -> Vec<Violation> {
    let ts = all_tables(lts);
    let mut out = Vec::new();
    for e in &lts.edges {
        for (ip, before) in &ts[e.src] {
            let Some(after) = ts[e.dst].get(ip) else { continue };
            for old in before.entries() {
                let new = after.sqn(&old.dip);
                if new < old.dsn {
                    let mut trace = trace_to(lts, e.src);
                    trace.push(e.display_label());
                    out.push(Violation {
                        check: "monotonic".into(),
                        message: format!("{ip}: sequence number for {} fell from {} to {new}", old.dip, old.dsn),
                        trace,
                        state: e.src,
                    });
                }
            }
        }
    }
    out
}

// ---- CTL ----

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Ip,
    Data,
}

/// Argument kinds of each atom name.
fn signature(name: &str) -> Option<&'static [Kind]> {
    use Kind::*;
    Some(match name {
        "newpkt" => &[Ip, Data, Ip],
        "deliver" => &[Ip, Data],
        "connect" | "disconnect" | "connected" => &[Ip, Ip],
        _ => return None,
    })
}

pub const PACKET_DELIVERY: &str =
    "AG((oip:newpkt(d,dip) && connected(oip,dip)) -> AF(disconnect(*,*) || dip:deliver(d)))";

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CtlOutcome {
    pub formula: String,
    pub holds: bool,
    /// Number of instantiations of the free variables checked.
    pub instances: usize,
    /// The first failing instance, with a path exhibiting the failure.
    pub counterexample: Option<Violation>,
}

struct Instantiation {
    vars: Vec<(String, Kind)>,
}

impl Instantiation {
    /// Identifiers that are not addresses or data items are variables.
    fn new(f: &Ctl<AtomText>, ips: &BTreeSet<String>, data: &BTreeSet<String>) -> Result<Self> {
        let mut vars: Vec<(String, Kind)> = Vec::new();
        for atom in f.atoms() {
            let kinds = signature(&atom.name).ok_or_else(|| Error::Ctl(format!("unknown atom `{}`", atom.name)))?;
            if kinds.len() != atom.args.len() {
                return Err(Error::Ctl(format!("`{atom}` takes {} arguments", kinds.len())));
            }
            for (arg, &kind) in atom.args.iter().zip(kinds) {
                let Some(name) = arg else {
                    if atom.name == "connected" {
                        return Err(Error::Ctl(format!("`{atom}`: connected takes no wildcards")));
                    }
                    continue;
                };
                let known = match kind {
                    Kind::Ip => ips.contains(name),
                    Kind::Data => data.contains(name),
                };
                if known {
                    continue;
                }
                match vars.iter().find(|(v, _)| v == name) {
                    Some((_, k)) if *k != kind => {
                        return Err(Error::Ctl(format!("`{name}` is used both as an address and as data")))
                    }
                    Some(_) => {}
                    None => vars.push((name.clone(), kind)),
                }
            }
        }
        Ok(Instantiation { vars })
    }

    fn assignments(&self, ips: &[Value], data: &[Value]) -> Vec<BTreeMap<String, Value>> {
        let mut out = vec![BTreeMap::new()];
        for (v, k) in &self.vars {
            let dom = match k {
                Kind::Ip => ips,
                Kind::Data => data,
            };
            out = out
                .into_iter()
                .flat_map(|a| {
                    dom.iter().map(move |x| {
                        let mut b = a.clone();
                        b.insert(v.clone(), x.clone());
                        b
                    })
                })
                .collect();
        }
        out
    }
}

fn to_net_atom(a: &AtomText, env: &BTreeMap<String, Value>) -> NetAtom {
    let arg = |i: usize| -> Pat {
        a.args[i]
            .as_ref()
            .map(|n| env.get(n).cloned().unwrap_or_else(|| Value::atom(n)))
    };
    let val = |i: usize| arg(i).expect("checked: no wildcard");
    match a.name.as_str() {
        "newpkt" => NetAtom::NewPkt(arg(0), arg(1), arg(2)),
        "deliver" => NetAtom::Deliver(arg(0), arg(1)),
        "connect" => NetAtom::Connect(arg(0), arg(1)),
        "disconnect" => NetAtom::Disconnect(arg(0), arg(1)),
        _ => NetAtom::Connected(val(0), val(1)),
    }
}

/// Checks the universal closure of `formula` over the scenario's addresses
/// and data items.
pub fn ctl(ex: &Explorer, lts: &Lts<State>, formula: &str) -> Result<CtlOutcome> {
    let f = parse_ctl(formula).map_err(|e| Error::Ctl(e.to_string()))?;
    let ip_names: BTreeSet<String> = ex.scenario.ips().into_iter().collect();
    let data_names: BTreeSet<String> = ex.scenario.data.iter().cloned().collect();
    let inst = Instantiation::new(&f, &ip_names, &data_names)?;
    let ips: Vec<Value> = ip_names.iter().map(|s| Value::atom(s)).collect();
    let data: Vec<Value> = data_names.iter().map(|s| Value::atom(s)).collect();
    let tk = TaggedKripke::new(lts, observable);
    let assignments = inst.assignments(&ips, &data);
    for env in &assignments {
        let g = f
            .map_atoms(&mut |a| Ok::<_, Error>(to_net_atom(a, env)))
            .expect("infallible");
        let verdict = check_ctl(&tk.kripke, &g, &|atom: &NetAtom, k| {
            let (s, tag) = &tk.states[k];
            atom.eval(&lts.states[*s].net, tag.as_ref())
        });
        if let Some(w) = verdict.counterexample {
            let lts_path: Vec<usize> = w.path.iter().map(|&k| tk.states[k].0).collect();
            let mut trace = trace_to(lts, lts_path[0]);
            for pair in w.path.windows(2) {
                trace.push(step_label(lts, &tk, pair[0], pair[1]));
            }
            let last = *lts_path.last().expect("non-empty witness");
            let tail = match w.loop_start {
                Some(i) => format!(", then repeats from step {i}"),
                None if lts.successors()[last].is_empty() => ", ending in a deadlock".to_string(),
                None => String::new(),
            };
            let binding: Vec<String> = env.iter().map(|(k, v)| format!("{k}={v}")).collect();
            return Ok(CtlOutcome {
                formula: formula.to_string(),
                holds: false,
                instances: assignments.len(),
                counterexample: Some(Violation {
                    check: "ctl".into(),
                    message: format!("fails for {}{tail}", binding.join(", ")),
                    trace,
                    state: last,
                }),
            });
        }
    }
    Ok(CtlOutcome {
        formula: formula.to_string(),
        holds: true,
        instances: assignments.len(),
        counterexample: None,
    })
}

/// The label of an LTS transition realising the Kripke step `a -> b`.
fn step_label(lts: &Lts<State>, tk: &TaggedKripke, a: usize, b: usize) -> String {
    let (src, _) = &tk.states[a];
    let (dst, tag) = &tk.states[b];
    lts.edges
        .iter()
        .find(|e| {
            e.src == *src
                && e.dst == *dst
                && match tag {
                    Some(l) => e.label == *l,
                    None => !observable(&e.label),
                }
        })
        .map_or_else(|| "?".into(), |e| e.display_label())
}

// ---- DOT ----

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz rendering of the transition system; tau edges are dashed.
pub fn dot(lts: &Lts<State>) -> String {
    let mut out = String::from("digraph lts {\n  node [shape=circle];\n");
    let _ = writeln!(out, "  init [shape=point];\n  init -> s{};", lts.initial);
    for e in &lts.edges {
        let style = if e.label == Label::Tau && e.cast.is_none() { " style=dashed" } else { "" };
        let _ = writeln!(
            out,
            "  s{} -> s{} [label=\"{}\"{style}];",
            e.src,
            e.dst,
            dot_escape(&e.display_label())
        );
    }
    out.push_str("}\n");
    out
}
