//! Bounded search for packet-delivery counterexamples over small topologies.

use std::collections::BTreeSet;
use std::fmt::Write;

use serde::Serialize;

use crate::checks::{self, Violation, PACKET_DELIVERY};
use crate::error::Result;
use crate::explorer::Explorer;
use crate::scenario::Scenario;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SearchBounds {
    pub max_nodes: usize,
    /// Injections per scenario, all towards the same destination.
    pub max_injections: usize,
    pub max_connects: usize,
    pub max_states: usize,
}

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds {
            max_nodes: 4,
            max_injections: 2,
            max_connects: 1,
            max_states: 200_000,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchOutcome {
    pub bounds: SearchBounds,
    /// Scenarios whose state space was explored completely.
    pub complete: usize,
    /// Scenarios that hit the state bound and were skipped.
    pub truncated: usize,
    /// The first violating scenario, as TOML, with its witness.
    pub violation: Option<(String, Violation)>,
}

const NAMES: [&str; 4] = ["n0", "n1", "n2", "n3"];

/// Connected graphs on `n` labelled nodes, one per isomorphism class.
fn topologies(n: usize) -> Vec<Vec<(usize, usize)>> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for mask in 0u32..1 << pairs.len() {
        let edges: Vec<(usize, usize)> = (0..pairs.len()).filter(|i| mask >> i & 1 == 1).map(|i| pairs[i]).collect();
        if !connected(n, &edges) {
            continue;
        }
        if seen.insert(canonical(n, &edges)) {
            out.push(edges);
        }
    }
    out.sort_by_key(Vec::len);
    out
}

fn connected(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut reach = vec![false; n];
    reach[0] = true;
    let mut changed = true;
    while changed {
        changed = false;
        for &(a, b) in edges {
            if reach[a] != reach[b] {
                reach[a] = true;
                reach[b] = true;
                changed = true;
            }
        }
    }
    reach.into_iter().all(|r| r)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..n {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

fn canonical(n: usize, edges: &[(usize, usize)]) -> Vec<(usize, usize)> {
    permutations(n)
        .into_iter()
        .map(|p| {
            let mut e: Vec<(usize, usize)> = edges
                .iter()
                .map(|&(a, b)| (p[a].min(p[b]), p[a].max(p[b])))
                .collect();
            e.sort_unstable();
            e
        })
        .min()
        .unwrap_or_default()
}

fn scenario_toml(n: usize, edges: &[(usize, usize)], origins: &[usize], connect: Option<(usize, usize)>) -> String {
    let dest = NAMES[n - 1];
    let mut s = String::from("name = \"delivery-search\"\n");
    let data: Vec<String> = (0..origins.len()).map(|i| format!("\"p{i}\"")).collect();
    let _ = writeln!(s, "data = [{}]", data.join(", "));
    let nodes: Vec<String> = NAMES[..n].iter().map(|ip| format!("{{ ip = \"{ip}\" }}")).collect();
    let _ = writeln!(s, "nodes = [{}]\n\n[topology]", nodes.join(", "));
    let links: Vec<String> = edges
        .iter()
        .map(|&(a, b)| format!("[\"{}\", \"{}\"]", NAMES[a], NAMES[b]))
        .collect();
    let _ = writeln!(s, "links = [{}]", links.join(", "));
    for (i, &o) in origins.iter().enumerate() {
        let _ = writeln!(s, "\n[[inject]]\nip = \"{}\"\ndata = \"p{i}\"\ndip = \"{dest}\"", NAMES[o]);
    }
    if let Some((a, b)) = connect {
        let _ = writeln!(s, "\n[[script]]\nevent = \"connect\"\na = \"{}\"\nb = \"{}\"", NAMES[a], NAMES[b]);
    }
    s
}

/// Candidate scenarios in order of increasing size. The destination is the
/// last node; originators are distinct and listed in injection order.
fn candidates(b: &SearchBounds) -> Vec<String> {
    let mut out = Vec::new();
    for n in 2..=b.max_nodes.min(NAMES.len()) {
        for edges in topologies(n) {
            let non_edges: Vec<(usize, usize)> = (0..n)
                .flat_map(|a| (a + 1..n).map(move |c| (a, c)))
                .filter(|p| !edges.contains(p))
                .collect();
            let mut connects: Vec<Option<(usize, usize)>> = vec![None];
            if b.max_connects > 0 {
                connects.extend(non_edges.into_iter().map(Some));
            }
            for k in 1..=b.max_injections.min(n - 1) {
                for origins in ordered_subsets(n - 1, k) {
                    for &c in &connects {
                        out.push(scenario_toml(n, &edges, &origins, c));
                    }
                }
            }
        }
    }
    out
}

fn ordered_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for rest in ordered_subsets(n, k - 1) {
        for i in 0..n {
            if !rest.contains(&i) {
                let mut v = rest.clone();
                v.push(i);
                out.push(v);
            }
        }
    }
    out
}

/// Checks the packet-delivery property on every candidate until one fails.
pub fn packet_delivery(bounds: SearchBounds) -> Result<SearchOutcome> {
    let mut outcome = SearchOutcome {
        bounds,
        complete: 0,
        truncated: 0,
        violation: None,
    };
    for src in candidates(&bounds) {
        let mut scenario = Scenario::from_toml(&src)?;
        scenario.bounds.max_states = bounds.max_states;
        let ex = Explorer::new(scenario)?;
        let run = ex.explore(None)?;
        if run.bound_hit() {
            outcome.truncated += 1;
            continue;
        }
        outcome.complete += 1;
        let out = checks::ctl(&ex, &run.lts, PACKET_DELIVERY)?;
        if let Some(w) = out.counterexample {
            outcome.violation = Some((src, w));
            break;
        }
    }
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn topology_classes() {
        // connected graphs up to isomorphism: 1, 2 and 6
        assert_eq!(topologies(2).len(), 1);
        assert_eq!(topologies(3).len(), 2);
        assert_eq!(topologies(4).len(), 6);
    }

    #[test]
    fn generated_scenarios_parse() {
        let b = SearchBounds::default();
        let all = candidates(&b);
        assert!(all.len() > 100);
        for src in all.iter().step_by(37) {
            Scenario::from_toml(src).unwrap();
        }
    }
}
