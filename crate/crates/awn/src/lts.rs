//! Labelled transition systems extracted by bounded breadth-first search.

use rustc_hash::FxHashMap;
use std::fmt::Write;
use std::hash::Hash;

use rayon::prelude::*;

use crate::label::{CastInfo, Label};
use crate::semantics::Transition;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Bounds {
    pub max_states: Option<usize>,
    pub max_depth: Option<usize>,
}

impl Bounds {
    pub fn unbounded() -> Self {
        Bounds::default()
    }

    pub fn states(n: usize) -> Self {
        Bounds {
            max_states: Some(n),
            max_depth: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub src: usize,
    pub label: Label,
    pub dst: usize,
    pub cast: Option<CastInfo>,
}

impl Edge {
    pub fn display_label(&self) -> String {
        match (&self.label, &self.cast) {
            (Label::Tau, Some(c)) => c.to_string(),
            (l, _) => l.to_string(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Lts<S> {
    pub states: Vec<S>,
    pub initial: usize,
    pub edges: Vec<Edge>,
    /// Some bound stopped the search: states or transitions may be missing.
    pub truncated: bool,
    /// Number of discovered states left unexpanded because of a bound.
    pub frontier: usize,
    /// Index of the edge through which each state was first reached.
    pub parent: Vec<Option<usize>>,
}

impl<S> Lts<S> {
    /// Builds an LTS directly from its parts (used for generated systems).
    pub fn from_parts(states: Vec<S>, initial: usize, edges: Vec<Edge>) -> Self {
        let n = states.len();
        let mut parent = vec![None; n];
        let mut seen = vec![false; n];
        seen[initial] = true;
        let mut queue = std::collections::VecDeque::from([initial]);
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, e) in edges.iter().enumerate() {
            assert!(e.src < n && e.dst < n, "edge endpoint out of range");
            out[e.src].push(i);
        }
        while let Some(s) = queue.pop_front() {
            for &i in &out[s] {
                let d = edges[i].dst;
                if !seen[d] {
                    seen[d] = true;
                    parent[d] = Some(i);
                    queue.push_back(d);
                }
            }
        }
        Lts {
            states,
            initial,
            edges,
            truncated: false,
            frontier: 0,
            parent,
        }
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_transitions(&self) -> usize {
        self.edges.len()
    }

    /// Outgoing edge indices per state.
    pub fn successors(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.states.len()];
        for (i, e) in self.edges.iter().enumerate() {
            out[e.src].push(i);
        }
        out
    }

    /// Edges of a shortest path from the initial state to `state`.
    pub fn path_to(&self, state: usize) -> Vec<&Edge> {
        let mut path = Vec::new();
        let mut cur = state;
        while let Some(e) = self.parent[cur] {
            path.push(&self.edges[e]);
            cur = self.edges[e].src;
        }
        path.reverse();
        path
    }

    /// Text dump: a header line, then `src<TAB>label<TAB>dst` per transition.
    pub fn dump(&self) -> String {
        let mut out = format!(
            "states {} transitions {} initial {} truncated {}\n",
            self.states.len(),
            self.edges.len(),
            self.initial,
            self.truncated
        );
        for e in &self.edges {
            let _ = writeln!(out, "{}\t{}\t{}", e.src, e.display_label(), e.dst);
        }
        out
    }
}

/// Breadth-first closure of `succ` from `init` up to `bounds`. States for
/// which `within` is false are kept but not expanded, and count as a bound
/// hit. Successor lists are sorted by (label, target) and levels are merged
/// in order, so numbering is deterministic regardless of worker count.
pub fn build_lts<S, E, F, W>(init: S, bounds: Bounds, within: W, succ: F) -> Result<Lts<S>, E>
where
    S: Clone + Eq + Hash + Ord + Send + Sync,
    E: Send,
    F: Fn(&S) -> Result<Vec<Transition<S>>, E> + Sync,
    W: Fn(&S) -> bool + Sync,
{
    let mut index: FxHashMap<S, usize> = FxHashMap::default();
    let mut states = vec![init.clone()];
    let mut parent = vec![None];
    index.insert(init, 0);
    let mut edges = Vec::new();
    let mut truncated = false;
    let mut unexpanded = 0usize;
    let mut level = vec![0usize];
    let mut depth = 0usize;
    while !level.is_empty() {
        let (expand, held): (Vec<usize>, Vec<usize>) = level.iter().partition(|&&s| within(&states[s]));
        if !held.is_empty() {
            truncated = true;
            unexpanded += held.len();
        }
        let at_limit = bounds.max_depth.is_some_and(|d| depth >= d);
        let results: Vec<Result<Vec<Transition<S>>, E>> = expand
            .par_iter()
            .map(|&s| {
                succ(&states[s]).map(|mut ts| {
                    ts.sort_by(|a, b| (&a.label, &a.target).cmp(&(&b.label, &b.target)));
                    ts
                })
            })
            .collect();
        if at_limit {
            for r in results {
                if !r?.is_empty() {
                    truncated = true;
                    unexpanded += 1;
                }
            }
            break;
        }
        let mut next = Vec::new();
        for (&src, r) in expand.iter().zip(results) {
            for t in r? {
                let dst = match index.get(&t.target) {
                    Some(&d) => d,
                    None => {
                        if bounds.max_states.is_some_and(|m| states.len() >= m) {
                            truncated = true;
                            continue;
                        }
                        let d = states.len();
                        index.insert(t.target.clone(), d);
                        states.push(t.target);
                        parent.push(Some(edges.len()));
                        next.push(d);
                        d
                    }
                };
                edges.push(Edge {
                    src,
                    label: t.label,
                    dst,
                    cast: t.cast,
                });
            }
        }
        level = next;
        depth += 1;
    }
    Ok(Lts {
        states,
        initial: 0,
        edges,
        truncated,
        frontier: unexpanded,
        parent,
    })
}

/// Runs `f` on a dedicated pool of `workers` threads (or the global pool).
pub fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match workers {
        Some(n) if n > 0 => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        },
        _ => f(),
    }
}
