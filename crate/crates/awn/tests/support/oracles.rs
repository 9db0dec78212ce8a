//! Deliberately naive reference implementations and random instance generators.

use awn::{Ctl, Edge, Kripke, Label, Lts, Value};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Greatest bisimulation on the union of `a` and `b` by removing violating
/// pairs until nothing changes.
pub fn naive_bisimilar(a: &Lts<usize>, b: &Lts<usize>) -> bool {
    let off = a.num_states();
    let n = off + b.num_states();
    let mut out: Vec<Vec<(&Label, usize)>> = vec![Vec::new(); n];
    for e in &a.edges {
        out[e.src].push((&e.label, e.dst));
    }
    for e in &b.edges {
        out[e.src + off].push((&e.label, e.dst + off));
    }
    let mut rel = vec![vec![true; n]; n];
    loop {
        let mut changed = false;
        for s in 0..n {
            for t in 0..n {
                if !rel[s][t] {
                    continue;
                }
                let simulates = |x: usize, y: usize, rel: &Vec<Vec<bool>>, flip: bool| {
                    out[x].iter().all(|(l, x2)| {
                        out[y]
                            .iter()
                            .any(|(l2, y2)| l == l2 && if flip { rel[*y2][*x2] } else { rel[*x2][*y2] })
                    })
                };
                if !simulates(s, t, &rel, false) || !simulates(t, s, &rel, true) {
                    rel[s][t] = false;
                    changed = true;
                }
            }
        }
        if !changed {
            return rel[a.initial][b.initial + off];
        }
    }
}

pub fn random_lts(rng: &mut ChaCha8Rng, max_states: usize, labels: u64) -> Lts<usize> {
    let n = rng.gen_range(1..=max_states);
    let mut edges = Vec::new();
    for s in 0..n {
        for _ in 0..rng.gen_range(0..=3) {
            edges.push(Edge {
                src: s,
                label: Label::Deliver(Value::Nat(rng.gen_range(0..labels))),
                dst: rng.gen_range(0..n),
                cast: None,
            });
        }
    }
    edges.sort_by(|x, y| (x.src, &x.label, x.dst).cmp(&(y.src, &y.label, y.dst)));
    edges.dedup();
    Lts::from_parts((0..n).collect(), 0, edges)
}

/// Copies `lts` with states renamed by a random permutation (initial kept first).
pub fn shuffled(rng: &mut ChaCha8Rng, lts: &Lts<usize>) -> Lts<usize> {
    let n = lts.num_states();
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        perm.swap(i, j);
    }
    let edges = lts
        .edges
        .iter()
        .map(|e| Edge {
            src: perm[e.src],
            label: e.label.clone(),
            dst: perm[e.dst],
            cast: None,
        })
        .collect();
    Lts::from_parts((0..n).collect(), perm[lts.initial], edges)
}

// ---- CTL ----

pub fn random_kripke(rng: &mut ChaCha8Rng, max_states: usize) -> (Kripke, Vec<[bool; 3]>) {
    let n = rng.gen_range(1..=max_states);
    let succ = (0..n)
        .map(|_| {
            let k = if rng.gen_bool(0.15) { 0 } else { rng.gen_range(1..=3) };
            let mut ts: Vec<usize> = (0..k).map(|_| rng.gen_range(0..n)).collect();
            ts.sort_unstable();
            ts.dedup();
            ts
        })
        .collect();
    let labels = (0..n).map(|_| [rng.gen_bool(0.5), rng.gen_bool(0.4), rng.gen_bool(0.3)]).collect();
    (Kripke { succ, initial: vec![0] }, labels)
}

pub fn random_formula(rng: &mut ChaCha8Rng, depth: usize) -> Ctl<usize> {
    if depth == 0 || rng.gen_bool(0.2) {
        return match rng.gen_range(0..8) {
            0 => Ctl::True,
            1 => Ctl::False,
            k => Ctl::Atom(k % 3),
        };
    }
    let sub = |rng: &mut ChaCha8Rng| Box::new(random_formula(rng, depth - 1));
    match rng.gen_range(0..14) {
        0 => Ctl::Not(sub(rng)),
        1 => Ctl::And(sub(rng), sub(rng)),
        2 => Ctl::Or(sub(rng), sub(rng)),
        3 => Ctl::Implies(sub(rng), sub(rng)),
        4 => Ctl::EX(sub(rng)),
        5 => Ctl::AX(sub(rng)),
        6 => Ctl::EF(sub(rng)),
        7 => Ctl::AF(sub(rng)),
        8 => Ctl::EG(sub(rng)),
        9 => Ctl::AG(sub(rng)),
        10 | 11 => Ctl::EU(sub(rng), sub(rng)),
        _ => Ctl::AU(sub(rng), sub(rng)),
    }
}

/// CTL over maximal paths by Kleene iteration straight from the fixpoint
/// characterisations.
pub fn naive_sat(k: &Kripke, f: &Ctl<usize>, labels: &[[bool; 3]]) -> Vec<bool> {
    let n = k.succ.len();
    let ex = |z: &[bool]| -> Vec<bool> { (0..n).map(|s| k.succ[s].iter().any(|&t| z[t])).collect() };
    let ax = |z: &[bool]| -> Vec<bool> { (0..n).map(|s| k.succ[s].iter().all(|&t| z[t])).collect() };
    let dead: Vec<bool> = (0..n).map(|s| k.succ[s].is_empty()).collect();
    let lfp = |step: &dyn Fn(&[bool]) -> Vec<bool>| {
        let mut z = vec![false; n];
        loop {
            let next = step(&z);
            if next == z {
                return z;
            }
            z = next;
        }
    };
    let gfp = |step: &dyn Fn(&[bool]) -> Vec<bool>| {
        let mut z = vec![true; n];
        loop {
            let next = step(&z);
            if next == z {
                return z;
            }
            z = next;
        }
    };
    let rec = |g: &Ctl<usize>| naive_sat(k, g, labels);
    let eu = |p: &[bool], q: &[bool]| {
        lfp(&|z: &[bool]| {
            let e = ex(z);
            (0..n).map(|s| q[s] || (p[s] && e[s])).collect()
        })
    };
    let au = |p: &[bool], q: &[bool]| {
        lfp(&|z: &[bool]| {
            let a = ax(z);
            (0..n).map(|s| q[s] || (p[s] && !dead[s] && a[s])).collect()
        })
    };
    let all = vec![true; n];
    match f {
        Ctl::True => all,
        Ctl::False => vec![false; n],
        Ctl::Atom(i) => labels.iter().map(|l| l[*i]).collect(),
        Ctl::Not(g) => rec(g).into_iter().map(|x| !x).collect(),
        Ctl::And(g, h) => rec(g).into_iter().zip(rec(h)).map(|(x, y)| x && y).collect(),
        Ctl::Or(g, h) => rec(g).into_iter().zip(rec(h)).map(|(x, y)| x || y).collect(),
        Ctl::Implies(g, h) => rec(g).into_iter().zip(rec(h)).map(|(x, y)| !x || y).collect(),
        Ctl::EX(g) => ex(&rec(g)),
        Ctl::AX(g) => ax(&rec(g)),
        Ctl::EF(g) => eu(&all, &rec(g)),
        Ctl::AF(g) => au(&all, &rec(g)),
        Ctl::EU(g, h) => eu(&rec(g), &rec(h)),
        Ctl::AU(g, h) => au(&rec(g), &rec(h)),
        Ctl::EG(g) => {
            let p = rec(g);
            gfp(&|z: &[bool]| {
                let e = ex(z);
                (0..n).map(|s| p[s] && (dead[s] || e[s])).collect()
            })
        }
        Ctl::AG(g) => {
            let p = rec(g);
            gfp(&|z: &[bool]| {
                let a = ax(z);
                (0..n).map(|s| p[s] && a[s]).collect()
            })
        }
    }
}

/// Runs `count` random CTL instances against the naive oracle; returns the
/// number of disagreements and the first one found.
pub fn ctl_agreement(seed: u64, count: usize) -> (usize, Option<String>) {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bad = 0;
    let mut first = None;
    for i in 0..count {
        let (k, labels) = random_kripke(&mut rng, 100);
        let f = random_formula(&mut rng, 4);
        let fast = awn::ctl::sat(&k, &f, &|a: &usize, s| labels[s][*a]);
        let slow = naive_sat(&k, &f, &labels);
        if fast != slow {
            bad += 1;
            first.get_or_insert_with(|| format!("instance {i}: {f}"));
        }
    }
    (bad, first)
}
