//! Running check suites and rendering their verdicts.

use std::fmt::Write;
use std::str::FromStr;

use serde::Serialize;

use crate::checks::{self, Violation, PACKET_DELIVERY};
use crate::error::Result;
use crate::explorer::{Exploration, Explorer};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Prop1,
    LoopFree,
    Monotonic,
    Ctl,
}

impl FromStr for Check {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "prop1" => Ok(Check::Prop1),
            "loopfree" => Ok(Check::LoopFree),
            "monotonic" => Ok(Check::Monotonic),
            "ctl" => Ok(Check::Ctl),
            other => Err(format!("unknown check `{other}` (prop1, loopfree, monotonic, ctl)")),
        }
    }
}

impl Check {
    pub fn name(self) -> &'static str {
        match self {
            Check::Prop1 => "prop1",
            Check::LoopFree => "loopfree",
            Check::Monotonic => "monotonic",
            Check::Ctl => "ctl",
        }
    }
}

/// Ordered by severity, so the worst verdict is the maximum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Inconclusive,
    Violation,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Violation => 1,
            Verdict::Inconclusive => 2,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub check: Check,
    pub verdict: Verdict,
    pub detail: String,
    pub violations: usize,
    /// The first violation found, with its trace.
    pub witness: Option<Violation>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub scenario: String,
    pub states: usize,
    pub transitions: usize,
    pub bound_hit: bool,
    pub unexpanded: usize,
    pub elapsed_ms: u128,
    pub checks: Vec<CheckResult>,
}

fn safety(check: Check, found: Vec<Violation>, bound_hit: bool, what: &str) -> CheckResult {
    let (verdict, detail) = match (found.is_empty(), bound_hit) {
        (false, _) => (Verdict::Violation, format!("{} {what}", found.len())),
        (true, false) => (Verdict::Pass, format!("no {what} in the full state space")),
        (true, true) => (Verdict::Inconclusive, format!("no {what} up to the bounds")),
    };
    CheckResult {
        check,
        verdict,
        detail,
        violations: found.len(),
        witness: found.into_iter().next(),
    }
}

pub fn run_checks(ex: &Explorer, run: &Exploration, selected: &[Check]) -> Result<Report> {
    let lts = &run.lts;
    let hit = run.bound_hit();
    let mut results = Vec::new();
    for &c in selected {
        results.push(match c {
            Check::Prop1 => safety(c, checks::rrep_invariant(lts), hit, "route-reply violations"),
            Check::Monotonic => safety(c, checks::monotonicity(lts), hit, "sequence-number decreases"),
            Check::LoopFree => {
                let r = checks::loop_freedom(lts);
                let arcs = r.arc_violations.len();
                let cycles = r.cycles.len();
                let mut res = safety(
                    c,
                    r.cycles.into_iter().chain(r.arc_violations).collect(),
                    hit,
                    "loop-freedom violations",
                );
                if res.verdict == Verdict::Violation {
                    res.detail = format!("{arcs} arc violations, {cycles} states with routing loops");
                }
                res
            }
            Check::Ctl => {
                let formula = ex.scenario.ctl.as_deref().unwrap_or(PACKET_DELIVERY);
                let out = checks::ctl(ex, lts, formula)?;
                let verdict = match (out.holds, hit) {
                    (_, true) => Verdict::Inconclusive,
                    (true, false) => Verdict::Pass,
                    (false, false) => Verdict::Violation,
                };
                let detail = format!(
                    "{} ({} instances): {}{}",
                    out.formula,
                    out.instances,
                    if out.holds { "holds" } else { "fails" },
                    if hit { ", state space truncated" } else { "" }
                );
                CheckResult {
                    check: c,
                    verdict,
                    detail,
                    violations: usize::from(!out.holds),
                    witness: out.counterexample,
                }
            }
        });
    }
    Ok(Report {
        scenario: ex.scenario.name.clone(),
        states: lts.num_states(),
        transitions: lts.num_transitions(),
        bound_hit: hit,
        unexpanded: lts.frontier,
        elapsed_ms: run.elapsed.as_millis(),
        checks: results,
    })
}

impl Report {
    pub fn verdict(&self) -> Verdict {
        self.checks.iter().map(|c| c.verdict).max().unwrap_or(if self.bound_hit {
            Verdict::Inconclusive
        } else {
            Verdict::Pass
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "scenario {}: {} states, {} transitions{} ({} ms)",
            if self.scenario.is_empty() { "-" } else { &self.scenario },
            self.states,
            self.transitions,
            match (self.bound_hit, self.unexpanded) {
                (false, _) => String::new(),
                (true, 0) => ", bound hit".to_string(),
                (true, n) => format!(", bound hit ({n} states unexpanded)"),
            },
            self.elapsed_ms
        );
        for c in &self.checks {
            let _ = writeln!(out, "{:<10} {:<12} {}", c.check.name(), format!("{:?}", c.verdict).to_lowercase(), c.detail);
            if let Some(w) = &c.witness {
                let _ = writeln!(out, "  witness: {}", w.message);
                for (i, l) in w.trace.iter().enumerate() {
                    let _ = writeln!(out, "    {:>3}  {l}", i + 1);
                }
            }
        }
        let _ = writeln!(out, "verdict: {}", format!("{:?}", self.verdict()).to_lowercase());
        out
    }
}
