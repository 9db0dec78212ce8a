//! Brute-force oracle for `upd` and `inv` over every small routing table.
//!
//! Tables are modelled here as plain tuples and rebuilt from the overwrite
//! condition, sharing nothing with the library beyond the conversion at the
//! end.

use std::collections::{BTreeMap, BTreeSet};

use awn::Value;
use awn_aodv::{InvMode, RouteEntry, RoutingTable};

/// (dsn, known, valid, hops, nhip, pre)
type Row = (u64, bool, bool, u64, &'static str, BTreeSet<&'static str>);
type Table = BTreeMap<&'static str, Row>;

const DESTS: [&str; 2] = ["x", "y"];
const GRID: std::ops::RangeInclusive<u64> = 0..=3;

pub fn rows(nhips: &[&'static str], pres: &[&[&'static str]]) -> Vec<Row> {
    let mut out = Vec::new();
    for dsn in GRID {
        for known in [false, true] {
            for valid in [false, true] {
                for hops in GRID {
                    for &nhip in nhips {
                        for pre in pres {
                            out.push((dsn, known, valid, hops, nhip, pre.iter().copied().collect()));
                        }
                    }
                }
            }
        }
    }
    out
}

/// Every table with at most two entries over the destinations `x`, `y`.
pub fn all_tables() -> Vec<Table> {
    let rs = rows(&["n"], &[&["s"]]);
    let mut out = vec![Table::new()];
    for d in DESTS {
        for r in &rs {
            out.push(Table::from([(d, r.clone())]));
        }
    }
    for r1 in &rs {
        for r2 in &rs {
            out.push(Table::from([("x", r1.clone()), ("y", r2.clone())]));
        }
    }
    out
}

pub fn to_lib(t: &Table) -> RoutingTable {
    RoutingTable::from_entries(t.iter().map(|(d, r)| entry(d, r)))
}

pub fn entry(dip: &str, r: &Row) -> RouteEntry {
    RouteEntry::new(Value::atom(dip), r.0, r.1, r.2, r.3, Value::atom(r.4)).with_pre(r.5.iter().map(|p| Value::atom(p)))
}

/// The overwrite condition: a fresher number, or the same number with the
/// old entry invalid or a shorter route.
fn fresher(new: &Row, old: &Row) -> bool {
    new.0 > old.0 || (new.0 == old.0 && (!old.2 || new.3 < old.3))
}

pub fn upd_oracle(t: &Table, dip: &'static str, r: &Row) -> Table {
    let mut out = Table::new();
    for d in DESTS {
        let row = match (t.get(d), d == dip) {
            (None, false) => continue,
            (Some(old), false) => old.clone(),
            (None, true) => r.clone(),
            (Some(old), true) => {
                let pre: BTreeSet<_> = old.5.union(&r.5).copied().collect();
                if fresher(r, old) {
                    (r.0, r.1, r.2, r.3, r.4, pre)
                } else {
                    (old.0, old.1, old.2, old.3, old.4, pre)
                }
            }
        };
        out.insert(d, row);
    }
    out
}

pub fn inv_oracle(t: &Table, dests: &BTreeMap<&'static str, u64>, mode: InvMode) -> Table {
    t.iter()
        .map(|(&d, row)| {
            let mut row = row.clone();
            if let Some(&rsn) = dests.get(d) {
                match mode {
                    InvMode::Paper if row.2 => {
                        row.0 = rsn.max(row.0 + 1);
                        row.2 = false;
                    }
                    InvMode::Paper => {}
                    InvMode::RfcLiteral => {
                        row.0 = rsn;
                        row.2 = false;
                    }
                }
            }
            (d, row)
        })
        .collect()
}

/// Every partial map from {x, y} to numbers 0..=3.
pub fn all_dests() -> Vec<BTreeMap<&'static str, u64>> {
    let opts: Vec<Option<u64>> = std::iter::once(None).chain(GRID.map(Some)).collect();
    let mut out = Vec::new();
    for a in &opts {
        for b in &opts {
            let mut m = BTreeMap::new();
            if let Some(n) = a {
                m.insert("x", *n);
            }
            if let Some(n) = b {
                m.insert("y", *n);
            }
            out.push(m);
        }
    }
    out
}

#[derive(Debug, Default)]
pub struct OracleRun {
    pub upd_cases: usize,
    pub inv_cases: usize,
    pub mismatches: Vec<String>,
}

/// Compares the library against the oracles on the whole grid.
pub fn exhaustive() -> OracleRun {
    let tables = all_tables();
    let incoming = rows(&["n", "m"], &[&[], &["t"]]);
    let dest_maps = all_dests();
    let mut run = OracleRun::default();
    for t in &tables {
        let lib = to_lib(t);
        for dip in DESTS {
            for r in &incoming {
                run.upd_cases += 1;
                let got = lib.upd(&entry(dip, r));
                let want = to_lib(&upd_oracle(t, dip, r));
                if got != want && run.mismatches.len() < 10 {
                    run.mismatches.push(format!("upd({lib}, {}) = {got}, oracle {want}", entry(dip, r)));
                }
            }
        }
        for dests in &dest_maps {
            let dv: BTreeMap<Value, u64> = dests.iter().map(|(d, n)| (Value::atom(d), *n)).collect();
            for mode in [InvMode::Paper, InvMode::RfcLiteral] {
                run.inv_cases += 1;
                let got = lib.inv(&dv, mode);
                let want = to_lib(&inv_oracle(t, dests, mode));
                if got != want && run.mismatches.len() < 10 {
                    run.mismatches.push(format!("inv({lib}, {dests:?}, {mode:?}) = {got}, oracle {want}"));
                }
            }
        }
    }
    run
}
