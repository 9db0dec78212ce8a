//! Strong bisimilarity by signature-based partition refinement.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::label::Label;
use crate::lts::Lts;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BisimError {
    #[error("transition system {0} is truncated; bisimilarity would be unsound")]
    Truncated(usize),
}

/// Hennessy-Milner formula true in one state and false in the other.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Hml {
    True,
    Not(Box<Hml>),
    /// `<a>(φ1 ∧ ... ∧ φn)`
    Diamond(Label, Vec<Hml>),
}

impl fmt::Display for Hml {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Hml::True => f.write_str("true"),
            Hml::Not(g) => write!(f, "!{g}"),
            Hml::Diamond(a, conj) => {
                write!(f, "<{a}>")?;
                match conj.len() {
                    0 => f.write_str("true"),
                    1 => write!(f, "{}", conj[0]),
                    _ => {
                        f.write_str("(")?;
                        for (i, c) in conj.iter().enumerate() {
                            if i > 0 {
                                f.write_str(" & ")?;
                            }
                            write!(f, "{c}")?;
                        }
                        f.write_str(")")
                    }
                }
            }
        }
    }
}

impl Hml {
    /// Actions along the leading chain of positive diamonds.
    pub fn trace(&self) -> Vec<Label> {
        let mut out = Vec::new();
        let mut cur = self;
        loop {
            match cur {
                Hml::Diamond(a, conj) => {
                    out.push(a.clone());
                    match conj.iter().find(|c| matches!(c, Hml::Diamond(..))) {
                        Some(next) => cur = next,
                        None => break,
                    }
                }
                Hml::Not(g) => cur = g,
                Hml::True => break,
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BisimResult {
    Equivalent,
    /// A formula satisfied by the first initial state but not the second.
    Distinguished { formula: Hml, trace: Vec<Label> },
}

impl BisimResult {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, BisimResult::Equivalent)
    }
}

/// The disjoint union of two systems as plain adjacency with interned labels.
struct Union {
    labels: Vec<Label>,
    succ: Vec<Vec<(usize, usize)>>,
}

impl Union {
    fn new<S, T>(a: &Lts<S>, b: &Lts<T>) -> Self {
        let offset = a.num_states();
        let mut ids: HashMap<Label, usize> = HashMap::new();
        let mut labels = Vec::new();
        let mut succ = vec![Vec::new(); offset + b.num_states()];
        let mut add = |src: usize, label: &Label, dst: usize, labels: &mut Vec<Label>| {
            let next = ids.len();
            let l = *ids.entry(label.clone()).or_insert_with(|| {
                labels.push(label.clone());
                next
            });
            (src, l, dst)
        };
        let mut raw = Vec::new();
        for e in &a.edges {
            raw.push(add(e.src, &e.label, e.dst, &mut labels));
        }
        for e in &b.edges {
            raw.push(add(e.src + offset, &e.label, e.dst + offset, &mut labels));
        }
        for (s, l, t) in raw {
            succ[s].push((l, t));
        }
        Union { labels, succ }
    }
}

/// Partition refinement keeping every intermediate partition, which is what
/// the witness construction needs.
struct Refinement {
    rounds: Vec<Vec<usize>>,
}

impl Refinement {
    fn run(u: &Union) -> Self {
        let n = u.succ.len();
        let mut rounds = vec![vec![0usize; n]];
        let mut count = 1usize;
        loop {
            let cur = rounds.last().unwrap();
            let mut ids: HashMap<(usize, BTreeSet<(usize, usize)>), usize> = HashMap::new();
            let mut next = vec![0usize; n];
            for s in 0..n {
                let sig: BTreeSet<(usize, usize)> = u.succ[s].iter().map(|&(l, t)| (l, cur[t])).collect();
                let fresh = ids.len();
                next[s] = *ids.entry((cur[s], sig)).or_insert(fresh);
            }
            let new_count = ids.len();
            rounds.push(next);
            if new_count == count {
                break;
            }
            count = new_count;
        }
        Refinement { rounds }
    }

    fn final_block(&self, s: usize) -> usize {
        self.rounds.last().unwrap()[s]
    }

    /// First round at which `s` and `t` are in different blocks.
    fn split_round(&self, s: usize, t: usize) -> Option<usize> {
        (0..self.rounds.len()).find(|&k| self.rounds[k][s] != self.rounds[k][t])
    }

    fn signature(&self, u: &Union, s: usize, k: usize) -> BTreeSet<(usize, usize)> {
        u.succ[s].iter().map(|&(l, t)| (l, self.rounds[k][t])).collect()
    }

    /// A formula true at `s` and false at `t`, given they split.
    fn distinguish(&self, u: &Union, s: usize, t: usize) -> Hml {
        let k = self.split_round(s, t).expect("states are not distinguished");
        // same block at round k-1, different signatures w.r.t. round k-1
        let prev = k - 1;
        let sig_s = self.signature(u, s, prev);
        let sig_t = self.signature(u, t, prev);
        if let Some(&(l, block)) = sig_s.difference(&sig_t).next() {
            let s2 = u.succ[s]
                .iter()
                .find(|&&(l2, x)| l2 == l && self.rounds[prev][x] == block)
                .map(|&(_, x)| x)
                .unwrap();
            let conj: Vec<Hml> = u.succ[t]
                .iter()
                .filter(|&&(l2, _)| l2 == l)
                .map(|&(_, t2)| self.distinguish(u, s2, t2))
                .collect();
            Hml::Diamond(u.labels[l].clone(), conj)
        } else {
            Hml::Not(Box::new(self.distinguish(u, t, s)))
        }
    }
}

/// Decides whether the initial states of `a` and `b` are strongly bisimilar.
pub fn bisimilar<S, T>(a: &Lts<S>, b: &Lts<T>) -> Result<BisimResult, BisimError> {
    if a.truncated {
        return Err(BisimError::Truncated(1));
    }
    if b.truncated {
        return Err(BisimError::Truncated(2));
    }
    let u = Union::new(a, b);
    let r = Refinement::run(&u);
    let (s, t) = (a.initial, b.initial + a.num_states());
    if r.final_block(s) == r.final_block(t) {
        return Ok(BisimResult::Equivalent);
    }
    let formula = r.distinguish(&u, s, t);
    let trace = formula.trace();
    Ok(BisimResult::Distinguished { formula, trace })
}

/// Block index of every state of a single system under the coarsest bisimulation.
pub fn bisimulation_classes<S>(a: &Lts<S>) -> Vec<usize> {
    let empty: Lts<()> = Lts::from_parts(vec![()], 0, Vec::new());
    let u = Union::new(a, &empty);
    let r = Refinement::run(&u);
    (0..a.num_states()).map(|s| r.final_block(s)).collect()
}

/// Checks `formula` at state `s` of `lts` (used to validate witnesses).
pub fn hml_holds<S>(lts: &Lts<S>, s: usize, formula: &Hml) -> bool {
    match formula {
        Hml::True => true,
        Hml::Not(g) => !hml_holds(lts, s, g),
        Hml::Diamond(a, conj) => lts
            .edges
            .iter()
            .filter(|e| e.src == s && e.label == *a)
            .any(|e| conj.iter().all(|c| hml_holds(lts, e.dst, c))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lts::Edge;
    use crate::value::Value;

    fn lbl(n: u64) -> Label {
        Label::Deliver(Value::Nat(n))
    }

    fn lts(n: usize, edges: &[(usize, u64, usize)]) -> Lts<usize> {
        Lts::from_parts(
            (0..n).collect(),
            0,
            edges
                .iter()
                .map(|&(s, l, t)| Edge {
                    src: s,
                    label: lbl(l),
                    dst: t,
                    cast: None,
                })
                .collect(),
        )
    }

    #[test]
    fn reflexive() {
        let a = lts(3, &[(0, 1, 1), (1, 2, 2), (2, 1, 0)]);
        assert!(bisimilar(&a, &a).unwrap().is_equivalent());
    }

    #[test]
    fn trace_equivalent_but_not_bisimilar() {
        // a.(b + c) versus a.b + a.c
        let p = lts(4, &[(0, 0, 1), (1, 1, 2), (1, 2, 3)]);
        let q = lts(5, &[(0, 0, 1), (0, 0, 2), (1, 1, 3), (2, 2, 4)]);
        let BisimResult::Distinguished { formula, trace } = bisimilar(&p, &q).unwrap() else {
            panic!("expected a witness");
        };
        assert!(hml_holds(&p, 0, &formula));
        assert!(!hml_holds(&q, 0, &formula));
        assert_eq!(trace[0], lbl(0));
    }

    #[test]
    fn truncated_is_refused() {
        let mut a = lts(1, &[]);
        a.truncated = true;
        assert_eq!(bisimilar(&a, &a), Err(BisimError::Truncated(1)));
    }

    #[test]
    fn unfolding_is_bisimilar() {
        // a loop versus its two-state unfolding
        let p = lts(1, &[(0, 0, 0)]);
        let q = lts(2, &[(0, 0, 1), (1, 0, 0)]);
        assert!(bisimilar(&p, &q).unwrap().is_equivalent());
    }
}
