//! Loading process libraries and building AODV nodes.

use std::collections::BTreeSet;
use std::path::PathBuf;

use awn::{
    parse_document_with, NodeExpression, ParallelProcess, ParseError, Program, Signature, Sort, Valuation,
    Value,
};
use thiserror::Error;

use crate::data::{register, DataConfig, RoutingTable, Store};

pub const AODV_LIBRARY: &str = include_str!("../models/aodv.awn");
pub const TOY_LIBRARY: &str = include_str!("../models/toy.awn");

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Library {
    Aodv,
    Toy,
    File(PathBuf),
}

impl Library {
    /// `aodv`, `toy`, or a path to a `.awn` file.
    pub fn from_name(name: &str) -> Library {
        match name {
            "aodv" => Library::Aodv,
            "toy" => Library::Toy,
            path => Library::File(PathBuf::from(path)),
        }
    }

    pub fn is_aodv(&self) -> bool {
        matches!(self, Library::Aodv)
    }
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("cannot read library {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("library {name}, line {}, column {}: {}", .err.line, .err.col, .err.kind)]
    Parse { name: String, err: ParseError },
    #[error("cannot declare `{0}`: {1}")]
    Declare(String, awn::signature::SignatureError),
    #[error("process `{0}` is not defined by the library")]
    MissingProcess(String),
}

/// Parses `library` over a signature holding the given addresses and data
/// items as atoms, plus the AODV operators configured by `cfg`.
pub fn load_program(library: &Library, cfg: DataConfig, ips: &[String], data: &[String]) -> Result<Program, ModelError> {
    let mut sig = Signature::new();
    for ip in ips {
        sig.declare_atom(ip, &Sort::ip()).map_err(|e| ModelError::Declare(ip.clone(), e))?;
    }
    for d in data {
        sig.declare_atom(d, &Sort::data()).map_err(|e| ModelError::Declare(d.clone(), e))?;
    }
    register(&mut sig, cfg).map_err(|e| ModelError::Declare("AODV operators".into(), e))?;
    let (name, src) = match library {
        Library::Aodv => ("aodv".to_string(), AODV_LIBRARY.to_string()),
        Library::Toy => ("toy".to_string(), TOY_LIBRARY.to_string()),
        Library::File(path) => (
            path.display().to_string(),
            std::fs::read_to_string(path).map_err(|source| ModelError::Io {
                path: path.clone(),
                source,
            })?,
        ),
    };
    let doc = parse_document_with(Program::new(sig), &src).map_err(|err| ModelError::Parse { name, err })?;
    Ok(doc.program)
}

/// Initial state of one AODV node: `AODV(ip, sn, rt, {}, {}) <<| QMSG([])`.
pub fn initial_node(
    program: &Program,
    ip: &Value,
    range: BTreeSet<Value>,
    rt: &RoutingTable,
    sn: u64,
) -> Result<NodeExpression, ModelError> {
    let call = |name: &str| {
        program
            .canonical_call(name)
            .ok_or_else(|| ModelError::MissingProcess(name.into()))
    };
    let mut env = Valuation::new();
    env.insert(awn::sym("ip"), ip.clone());
    env.insert(awn::sym("sn"), Value::Nat(sn));
    env.insert(awn::sym("rt"), rt.to_value());
    env.insert(awn::sym("rreqs"), Value::empty_set());
    env.insert(awn::sym("store"), Store::default().to_value());
    let mut queue = Valuation::new();
    queue.insert(awn::sym("msgs"), Value::seq(Vec::new()));
    Ok(NodeExpression {
        ip: ip.clone(),
        process: ParallelProcess::par(
            ParallelProcess::leaf(env, call("AODV")?),
            ParallelProcess::leaf(queue, call("QMSG")?),
        ),
        range,
    })
}

/// The AODV-side valuation of a node: the leftmost leaf binding `rt`.
fn protocol_env(node: &NodeExpression) -> Option<&Valuation> {
    node.process.leaves().into_iter().map(|(env, _)| env).find(|env| env.contains("rt"))
}

pub fn node_table(node: &NodeExpression) -> Option<RoutingTable> {
    RoutingTable::from_value(protocol_env(node)?.get("rt")?).ok()
}

pub fn node_sn(node: &NodeExpression) -> Option<u64> {
    protocol_env(node)?.get("sn")?.as_nat()
}

pub fn node_store(node: &NodeExpression) -> Option<Store> {
    Store::from_value(protocol_env(node)?.get("store")?).ok()
}

/// Length of the message queue, if the node runs one.
pub fn queue_len(node: &NodeExpression) -> Option<usize> {
    node.process
        .leaves()
        .into_iter()
        .find_map(|(env, _)| env.get("msgs").and_then(|m| m.as_seq()).map(|s| s.len()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn libraries_parse() {
        let ips = ["a".to_string(), "b".to_string()];
        let data = ["p".to_string()];
        let p = load_program(&Library::Aodv, DataConfig::default(), &ips, &data).unwrap();
        for name in ["AODV", "PKT", "RREQ", "ANSWER", "RREP", "FORWARD", "RERR", "FAIL", "QMSG", "QSEND"] {
            assert!(p.def(name).is_some(), "{name}");
        }
        assert_eq!(awn::check_program(&p), Ok(()));
        load_program(&Library::Toy, DataConfig::default(), &ips, &data).unwrap();
    }

    #[test]
    fn fresh_node_state() {
        let ips = ["a".to_string()];
        let p = load_program(&Library::Aodv, DataConfig::default(), &ips, &[]).unwrap();
        let n = initial_node(&p, &Value::atom("a"), BTreeSet::new(), &RoutingTable::new(), 1).unwrap();
        assert_eq!(node_sn(&n), Some(1));
        assert!(node_table(&n).unwrap().is_empty());
        assert_eq!(queue_len(&n), Some(0));
        assert_eq!(
            awn::printer::show_parallel(&p, &n.process),
            "(AODV(a,1,{|->},{},{|->}) <<| QMSG([]))"
        );
    }
}
