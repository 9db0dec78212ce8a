//! Scenario files: nodes, links, injected packets, a topology script, bounds
//! and options, in TOML.
//!
//! ```toml
//! name = "fig1"
//! data = ["p"]
//!
//! [[nodes]]
//! ip = "s"
//!
//! [topology]
//! links = [["s", "a"], ["a", "d"]]
//!
//! [[inject]]
//! ip = "s"
//! data = "p"
//! dip = "d"
//!
//! [[script]]
//! event = "disconnect"
//! a = "a"
//! b = "d"
//! trigger = "quiescent"
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{InvMode, RouteEntry, RoutingTable};
use crate::model::Library;
use awn::Value;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Toml(#[from] toml::de::Error),
    #[error("scenario: {0}")]
    Invalid(String),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trigger {
    /// The event may happen in any state once it is next in the script.
    #[default]
    Any,
    /// Only in states without internal activity.
    Quiescent,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum EventKind {
    Inject { ip: String, data: String, dip: String },
    Connect { a: String, b: String },
    Disconnect { a: String, b: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScriptEvent {
    #[serde(flatten)]
    pub kind: EventKind,
    #[serde(default)]
    pub trigger: Trigger,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InjectSpec {
    pub ip: String,
    pub data: String,
    pub dip: String,
    #[serde(default)]
    pub trigger: Trigger,
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RouteSpec {
    pub dip: String,
    pub dsn: u64,
    #[serde(default = "yes")]
    pub known: bool,
    #[serde(default = "yes")]
    pub valid: bool,
    pub hops: u64,
    pub nhip: String,
    #[serde(default)]
    pub pre: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeSpec {
    pub ip: String,
    /// Process term for non-AODV libraries, e.g. `X(a; d, b)`.
    pub process: Option<String>,
    pub sn: Option<u64>,
    #[serde(default)]
    pub routes: Vec<RouteSpec>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologySpec {
    /// Two-way links.
    #[serde(default)]
    pub links: Vec<[String; 2]>,
    /// One-way links: the second node is in range of the first.
    #[serde(default)]
    pub arcs: Vec<[String; 2]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsSpec {
    #[serde(default = "BoundsSpec::default_states")]
    pub max_states: usize,
    pub max_depth: Option<usize>,
    /// States where some node's own sequence number exceeds this are not expanded.
    pub max_sn: Option<u64>,
    /// States where some message queue is longer than this are not expanded.
    pub max_queue: Option<usize>,
}

impl BoundsSpec {
    fn default_states() -> usize {
        1_000_000
    }
}

impl Default for BoundsSpec {
    fn default() -> Self {
        BoundsSpec {
            max_states: Self::default_states(),
            max_depth: None,
            max_sn: None,
            max_queue: None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkChanges {
    /// Only the script changes links.
    #[default]
    Scripted,
    /// Any link may change, up to `topology_budget` times.
    Free,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptionsSpec {
    #[serde(default)]
    pub inv_mode: InvMode,
    #[serde(default = "yes")]
    pub intermediate_rrep: bool,
    #[serde(default)]
    pub non_blocking: bool,
    #[serde(default = "yes")]
    pub symmetric_links: bool,
    #[serde(default)]
    pub connect_policy: LinkChanges,
    #[serde(default)]
    pub topology_budget: u32,
    /// Collapse states that differ only in dead variable bindings.
    #[serde(default = "yes")]
    pub canonical_calls: bool,
}

impl Default for OptionsSpec {
    fn default() -> Self {
        OptionsSpec {
            inv_mode: InvMode::Paper,
            intermediate_rrep: true,
            non_blocking: false,
            symmetric_links: true,
            connect_policy: LinkChanges::Scripted,
            topology_budget: 0,
            canonical_calls: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub name: String,
    /// `aodv` (default), `toy`, or a library path.
    #[serde(default = "Scenario::default_library")]
    pub library: String,
    #[serde(default)]
    pub data: Vec<String>,
    pub nodes: Vec<NodeSpec>,
    #[serde(default)]
    pub topology: TopologySpec,
    #[serde(default)]
    pub inject: Vec<InjectSpec>,
    #[serde(default)]
    pub script: Vec<ScriptEvent>,
    #[serde(default)]
    pub bounds: BoundsSpec,
    #[serde(default)]
    pub options: OptionsSpec,
    /// CTL property for the `ctl` check.
    pub ctl: Option<String>,
}

impl Scenario {
    fn default_library() -> String {
        "aodv".into()
    }

    pub fn from_toml(src: &str) -> Result<Scenario, ScenarioError> {
        let s: Scenario = toml::from_str(src)?;
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Scenario, ScenarioError> {
        let src = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let mut s = Scenario::from_toml(&src)?;
        // A relative library path is taken relative to the scenario file.
        if !matches!(s.library.as_str(), "aodv" | "toy") && Path::new(&s.library).is_relative() {
            if let Some(dir) = path.parent() {
                s.library = dir.join(&s.library).display().to_string();
            }
        }
        Ok(s)
    }

    pub fn library(&self) -> Library {
        Library::from_name(&self.library)
    }

    pub fn ips(&self) -> Vec<String> {
        self.nodes.iter().map(|n| n.ip.clone()).collect()
    }

    /// Injections first, then the script proper.
    pub fn events(&self) -> Vec<ScriptEvent> {
        self.inject
            .iter()
            .map(|i| ScriptEvent {
                kind: EventKind::Inject {
                    ip: i.ip.clone(),
                    data: i.data.clone(),
                    dip: i.dip.clone(),
                },
                trigger: i.trigger,
            })
            .chain(self.script.iter().cloned())
            .collect()
    }

    /// Initial range of every node.
    pub fn ranges(&self) -> BTreeMap<String, BTreeSet<String>> {
        let mut out: BTreeMap<String, BTreeSet<String>> =
            self.nodes.iter().map(|n| (n.ip.clone(), BTreeSet::new())).collect();
        for [a, b] in &self.topology.links {
            out.entry(a.clone()).or_default().insert(b.clone());
            out.entry(b.clone()).or_default().insert(a.clone());
        }
        for [a, b] in &self.topology.arcs {
            out.entry(a.clone()).or_default().insert(b.clone());
        }
        out
    }

    pub fn initial_table(&self, node: &NodeSpec) -> RoutingTable {
        RoutingTable::from_entries(node.routes.iter().map(|r| {
            RouteEntry::new(
                Value::atom(&r.dip),
                r.dsn,
                r.known,
                r.valid,
                r.hops,
                Value::atom(&r.nhip),
            )
            .with_pre(r.pre.iter().map(|p| Value::atom(p)))
        }))
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let bad = |m: String| Err(ScenarioError::Invalid(m));
        if self.nodes.is_empty() {
            return bad("no nodes".into());
        }
        let ips: BTreeSet<&str> = self.nodes.iter().map(|n| n.ip.as_str()).collect();
        if ips.len() != self.nodes.len() {
            return bad("duplicate node address".into());
        }
        let data: BTreeSet<&str> = self.data.iter().map(String::as_str).collect();
        if let Some(d) = data.iter().find(|d| ips.contains(*d)) {
            return bad(format!("`{d}` is both an address and a data item"));
        }
        let node = |ip: &str, what: &str| -> Result<(), ScenarioError> {
            if ips.contains(ip) {
                Ok(())
            } else {
                Err(ScenarioError::Invalid(format!("{what} names unknown node `{ip}`")))
            }
        };
        for [a, b] in self.topology.links.iter().chain(&self.topology.arcs) {
            node(a, "topology")?;
            node(b, "topology")?;
            if a == b {
                return bad(format!("self-link at `{a}`"));
            }
        }
        for n in &self.nodes {
            for r in &n.routes {
                node(&r.dip, "route")?;
                node(&r.nhip, "route")?;
                for p in &r.pre {
                    node(p, "route precursor")?;
                }
            }
            if self.library == "aodv" && n.process.is_some() {
                return bad(format!("node `{}`: AODV nodes take no process term", n.ip));
            }
            if self.library != "aodv" && n.process.is_none() {
                return bad(format!("node `{}` needs a process term", n.ip));
            }
        }
        for e in self.events() {
            match &e.kind {
                EventKind::Inject { ip, data: d, dip } => {
                    node(ip, "inject")?;
                    node(dip, "inject")?;
                    if !data.contains(d.as_str()) {
                        return bad(format!("inject uses undeclared data `{d}`"));
                    }
                }
                EventKind::Connect { a, b } | EventKind::Disconnect { a, b } => {
                    node(a, "script")?;
                    node(b, "script")?;
                }
            }
        }
        if self.options.connect_policy == LinkChanges::Free && self.options.topology_budget == 0 {
            return bad("free link changes need a positive topology_budget".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG: &str = r#"
        name = "diamond"
        data = ["p"]
        nodes = [{ ip = "s" }, { ip = "a" }, { ip = "b" }, { ip = "d" }]
        [topology]
        links = [["s", "a"], ["s", "b"], ["a", "d"], ["b", "d"]]
        [[inject]]
        ip = "s"
        data = "p"
        dip = "d"
        [[script]]
        event = "disconnect"
        a = "a"
        b = "d"
        trigger = "quiescent"
    "#;

    #[test]
    fn parses_and_orders_events() {
        let s = Scenario::from_toml(FIG).unwrap();
        assert_eq!(s.library(), Library::Aodv);
        let ev = s.events();
        assert!(matches!(ev[0].kind, EventKind::Inject { .. }));
        assert_eq!(ev[1].trigger, Trigger::Quiescent);
        assert_eq!(s.ranges()["s"].len(), 2);
        assert_eq!(s.bounds.max_states, 1_000_000);
    }

    #[test]
    fn rejects_unknown_names() {
        let bad = FIG.replace("b = \"d\"", "b = \"z\"");
        assert!(matches!(Scenario::from_toml(&bad), Err(ScenarioError::Invalid(_))));
        assert!(Scenario::from_toml("nodes = []").is_err());
        assert!(matches!(Scenario::from_toml("nodes = 3"), Err(ScenarioError::Toml(_))));
    }
}
