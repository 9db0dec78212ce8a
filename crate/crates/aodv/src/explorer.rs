//! Scenario state spaces: the network, the position in the script and the
//! remaining budget of free link changes.

use std::collections::BTreeSet;
use std::fmt::Write;
use std::time::{Duration, Instant};

use awn::printer::show_network;
use awn::{
    build_lts, parse_network, with_workers, Bounds, ConnectPolicy, Environment, Label, Lts, NetworkExpression,
    PartialNetwork, Program, Semantics, SemanticsOptions, Transition, Value,
};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::DataConfig;
use crate::error::{Error, Result};
use crate::model::{initial_node, load_program, node_sn, node_table, queue_len, Library};
use crate::scenario::{EventKind, LinkChanges, Scenario, Trigger};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct State {
    pub net: NetworkExpression,
    /// Index of the next script event.
    pub pos: usize,
    /// Free link changes left.
    pub budget: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Event {
    pub label: Label,
    pub trigger: Trigger,
}

impl Event {
    fn offer(&self) -> Environment {
        let mut env = Environment::default();
        match &self.label {
            Label::NewPkt(ip, d, dip) => env.newpkts.push((ip.clone(), d.clone(), dip.clone())),
            l => env.topology.push(l.clone()),
        }
        env
    }
}

pub struct Explorer {
    pub scenario: Scenario,
    pub library: Library,
    pub program: Program,
    pub events: Vec<Event>,
    pub init: State,
    opts: SemanticsOptions,
}

pub struct Exploration {
    pub lts: Lts<State>,
    pub elapsed: Duration,
}

impl Exploration {
    /// Exploration stopped early somewhere: a state, depth or value bound was hit.
    pub fn bound_hit(&self) -> bool {
        self.lts.truncated
    }
}

#[derive(Clone, Debug)]
pub struct TraceStep {
    pub label: String,
    pub state: State,
}

fn atom_set<'a>(items: impl IntoIterator<Item = &'a String>) -> BTreeSet<Value> {
    items.into_iter().map(|s| Value::atom(s)).collect()
}

impl Explorer {
    pub fn new(scenario: Scenario) -> Result<Explorer> {
        let library = scenario.library();
        Explorer::with_library(scenario, library)
    }

    pub fn with_library(scenario: Scenario, library: Library) -> Result<Explorer> {
        scenario.validate()?;
        let o = &scenario.options;
        let cfg = DataConfig {
            inv_mode: o.inv_mode,
            intermediate_rrep: o.intermediate_rrep,
        };
        let mut program = load_program(&library, cfg, &scenario.ips(), &scenario.data)?;
        let ranges = scenario.ranges();
        let net = if library.is_aodv() {
            let nodes = scenario
                .nodes
                .iter()
                .map(|n| {
                    initial_node(
                        &program,
                        &Value::atom(&n.ip),
                        atom_set(&ranges[&n.ip]),
                        &scenario.initial_table(n),
                        n.sn.unwrap_or(1),
                    )
                })
                .collect::<std::result::Result<Vec<_>, _>>()?;
            let partial = PartialNetwork::from_nodes(nodes).expect("at least one node");
            NetworkExpression::Complete(partial)
        } else {
            let terms: Vec<String> = scenario
                .nodes
                .iter()
                .map(|n| {
                    let range: Vec<&str> = ranges[&n.ip].iter().map(String::as_str).collect();
                    let process = n.process.as_deref().unwrap_or_default();
                    format!("{} : {} : {{{}}}", n.ip, process, range.join(", "))
                })
                .collect();
            parse_network(&mut program, &format!("[{}]", terms.join(" || "))).map_err(Error::Network)?
        };
        let events = scenario
            .events()
            .into_iter()
            .map(|e| Event {
                label: match e.kind {
                    EventKind::Inject { ip, data, dip } => {
                        Label::NewPkt(Value::atom(&ip), Value::atom(&data), Value::atom(&dip))
                    }
                    EventKind::Connect { a, b } => Label::Connect(Value::atom(&a), Value::atom(&b)),
                    EventKind::Disconnect { a, b } => Label::Disconnect(Value::atom(&a), Value::atom(&b)),
                },
                trigger: e.trigger,
            })
            .collect();
        let opts = SemanticsOptions {
            non_blocking: o.non_blocking,
            symmetric_links: o.symmetric_links,
            connect_policy: ConnectPolicy::Scripted,
            canonical_calls: o.canonical_calls,
        };
        let budget = match o.connect_policy {
            LinkChanges::Scripted => 0,
            LinkChanges::Free => o.topology_budget,
        };
        Ok(Explorer {
            init: State { net, pos: 0, budget },
            scenario,
            library,
            program,
            events,
            opts,
        })
    }

    pub fn semantics(&self) -> Semantics<'_> {
        Semantics::new(&self.program, self.opts)
    }

    /// All transitions of `s` under the script.
    pub fn successors(&self, s: &State) -> std::result::Result<Vec<Transition<State>>, awn::EvalError> {
        let mut opts = self.opts;
        if s.budget > 0 {
            opts.connect_policy = ConnectPolicy::Free;
        }
        let sem = Semantics::new(&self.program, opts);
        let event = self.events.get(s.pos);
        let ts = match event {
            Some(e) if e.trigger == Trigger::Any => sem.step_network(&s.net, &e.offer())?,
            Some(e) => {
                let base = sem.step_network(&s.net, &Environment::default())?;
                let quiet = base
                    .iter()
                    .all(|t| matches!(t.label, Label::Connect(..) | Label::Disconnect(..)));
                if quiet {
                    sem.step_network(&s.net, &e.offer())?
                } else {
                    base
                }
            }
            None => sem.step_network(&s.net, &Environment::default())?,
        };
        Ok(ts
            .into_iter()
            .map(|t| {
                let scripted = event.is_some_and(|e| e.label == t.label);
                let topology = matches!(t.label, Label::Connect(..) | Label::Disconnect(..));
                let state = State {
                    net: t.target,
                    pos: s.pos + usize::from(scripted),
                    budget: s.budget - u32::from(topology && !scripted),
                };
                Transition {
                    label: t.label,
                    target: state,
                    rule: t.rule,
                    cast: t.cast,
                }
            })
            .collect())
    }

    /// Whether `s` is inside the value bounds (sequence numbers, queue lengths).
    pub fn within(&self, s: &State) -> bool {
        let b = &self.scenario.bounds;
        if b.max_sn.is_none() && b.max_queue.is_none() {
            return true;
        }
        s.net.inner().nodes().iter().all(|n| {
            b.max_sn.is_none_or(|m| node_sn(n).is_none_or(|sn| sn <= m))
                && b.max_queue.is_none_or(|m| queue_len(n).is_none_or(|q| q <= m))
        })
    }

    pub fn bounds(&self) -> Bounds {
        Bounds {
            max_states: Some(self.scenario.bounds.max_states),
            max_depth: self.scenario.bounds.max_depth,
        }
    }

    pub fn explore(&self, workers: Option<usize>) -> Result<Exploration> {
        let start = Instant::now();
        let lts = with_workers(workers, || {
            build_lts(self.init.clone(), self.bounds(), |s| self.within(s), |s| self.successors(s))
        })?;
        Ok(Exploration {
            lts,
            elapsed: start.elapsed(),
        })
    }

    /// A random run of at most `max_steps` transitions, reproducible from `seed`.
    pub fn random_trace(&self, seed: u64, max_steps: usize) -> Result<Vec<TraceStep>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut cur = self.init.clone();
        let mut out = Vec::new();
        for _ in 0..max_steps {
            if !self.within(&cur) {
                break;
            }
            let mut ts = self.successors(&cur)?;
            ts.sort_by(|a, b| (&a.label, &a.target).cmp(&(&b.label, &b.target)));
            let Some(t) = ts.choose(&mut rng) else { break };
            out.push(TraceStep {
                label: t.display_label(),
                state: t.target.clone(),
            });
            cur = t.target.clone();
        }
        Ok(out)
    }

    /// Human-readable state: the network term, or for AODV nodes their
    /// sequence numbers, queue lengths and routing tables.
    pub fn describe(&self, s: &State) -> String {
        if !self.library.is_aodv() {
            return show_network(&self.program, &s.net);
        }
        let mut out = String::new();
        for n in s.net.inner().nodes() {
            let _ = writeln!(
                out,
                "{} sn={} queue={}",
                n.ip,
                node_sn(n).map_or("?".into(), |v| v.to_string()),
                queue_len(n).unwrap_or(0)
            );
            if let Some(rt) = node_table(n) {
                for line in rt.dump().lines() {
                    let _ = writeln!(out, "  {line}");
                }
            }
        }
        out
    }
}
