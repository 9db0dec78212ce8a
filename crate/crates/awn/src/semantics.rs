//! One-step transition generation for every syntactic layer.
//!
//! `receive(msg)` accepts any message, so receiving is kept symbolic as a
//! [`Receiver`] and instantiated only where a partner offers a concrete
//! message (a `send` inside `⟨⟨`, a cast, or an injected `newpkt`). The public
//! `step_*` functions that expose receive/arrive labels directly take an
//! explicit finite message universe.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::eval::{eval, satisfy, EvalError};
use crate::label::{CastInfo, Label};
use crate::syntax::{
    NetworkExpression, NodeExpression, ParallelProcess, PartialNetwork, Proc, ProcId, Program,
    Side,
};
use crate::valuation::Valuation;
use crate::value::{Sym, Value};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum ConnectPolicy {
    /// (Dis)connect only happens when the environment offers it.
    #[default]
    Scripted,
    /// Every (dis)connect between two distinct network addresses is enabled.
    Free,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct SemanticsOptions {
    /// A node that cannot receive still lets an arriving message through,
    /// ignoring it, so broadcasts never block.
    pub non_blocking: bool,
    pub symmetric_links: bool,
    pub connect_policy: ConnectPolicy,
    /// Replace a pending call `X(e1, ..., en)` by `X(p1, ..., pn)` under the
    /// valuation `{pi := ei}`. Bisimilar, but drops dead bindings so fewer
    /// states are distinct.
    pub canonical_calls: bool,
}

/// The derivation tree of a transition, by rule name.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Derivation {
    pub rule: &'static str,
    pub premises: Vec<Derivation>,
}

impl Derivation {
    pub fn axiom(rule: &'static str) -> Self {
        Derivation {
            rule,
            premises: Vec::new(),
        }
    }

    pub fn new(rule: &'static str, premises: Vec<Derivation>) -> Self {
        Derivation { rule, premises }
    }

    fn wrap(self, rule: &'static str) -> Self {
        Derivation::new(rule, vec![self])
    }
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.rule)?;
        if !self.premises.is_empty() {
            f.write_str("(")?;
            for (i, p) in self.premises.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{p}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition<T> {
    pub label: Label,
    pub target: T,
    pub rule: Derivation,
    /// Present when the transition is (or hides) a cast.
    pub cast: Option<CastInfo>,
}

impl<T> Transition<T> {
    /// The label as shown in traces: hidden casts show as `a:*cast(m)`.
    pub fn display_label(&self) -> String {
        match (&self.label, &self.cast) {
            (Label::Tau, Some(c)) => c.to_string(),
            (l, _) => l.to_string(),
        }
    }
}

/// A sequential process waiting in `receive(var)`; `path` locates its leaf
/// inside the enclosing parallel process.
#[derive(Clone, Debug)]
pub struct Receiver {
    pub env: Valuation,
    pub var: Sym,
    pub next: ProcId,
    pub path: Vec<Side>,
    pub rule: Derivation,
}

enum SeqMove {
    Act {
        label: Label,
        env: Valuation,
        next: ProcId,
        rule: Derivation,
    },
    Recv(Receiver),
}

#[derive(Default)]
struct ParMoves {
    acts: Vec<(Label, ParallelProcess, Derivation)>,
    receivers: Vec<Receiver>,
}

struct NodeMoves {
    /// Cast, tau and deliver transitions of the node.
    acts: Vec<(Label, NodeExpression, Derivation)>,
    receivers: Vec<Receiver>,
}

/// What the environment offers a network in one step.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Environment {
    /// `(ip, data, dip)`: a client may submit `newpkt(data, dip)` at `ip`.
    pub newpkts: Vec<(Value, Value, Value)>,
    /// `Connect`/`Disconnect` labels the environment may trigger.
    pub topology: Vec<Label>,
}

const MAX_CALL_DEPTH: usize = 64;

pub fn newpkt_msg(data: &Value, dip: &Value) -> Value {
    Value::ctor("newpkt", vec![data.clone(), dip.clone()])
}

fn as_newpkt(m: &Value) -> Option<(&Value, &Value)> {
    match m.as_ctor() {
        Some(("newpkt", [d, dip])) => Some((d, dip)),
        _ => None,
    }
}

fn set_of(v: Value) -> Result<BTreeSet<Value>, EvalError> {
    match v {
        Value::Set(s) => Ok((*s).clone()),
        other => Err(EvalError::NotCollection {
            rel: "groupcast",
            got: other.to_string(),
        }),
    }
}

fn dedup<T: Ord + Clone>(mut ts: Vec<Transition<T>>) -> Vec<Transition<T>> {
    ts.sort_by(|a, b| (&a.label, &a.target).cmp(&(&b.label, &b.target)));
    ts.dedup_by(|a, b| a.label == b.label && a.target == b.target);
    ts
}

/// Cartesian product of per-position choices.
fn product<T: Clone>(choices: &[Vec<T>]) -> Vec<Vec<T>> {
    let mut acc: Vec<Vec<T>> = vec![Vec::new()];
    for options in choices {
        let mut next = Vec::with_capacity(acc.len() * options.len());
        for prefix in &acc {
            for o in options {
                let mut row = prefix.clone();
                row.push(o.clone());
                next.push(row);
            }
        }
        acc = next;
    }
    acc
}

fn rebuild(shape: &PartialNetwork, nodes: &[NodeExpression], idx: &mut usize) -> PartialNetwork {
    match shape {
        PartialNetwork::Node(_) => {
            let n = nodes[*idx].clone();
            *idx += 1;
            PartialNetwork::Node(n)
        }
        PartialNetwork::Par(l, r) => {
            let l = rebuild(l, nodes, idx);
            let r = rebuild(r, nodes, idx);
            PartialNetwork::par(l, r)
        }
    }
}

/// The transition generator over one program.
#[derive(Clone, Copy)]
pub struct Semantics<'a> {
    pub program: &'a Program,
    pub opts: SemanticsOptions,
}

impl<'a> Semantics<'a> {
    pub fn new(program: &'a Program, opts: SemanticsOptions) -> Self {
        Semantics { program, opts }
    }

    // ---- sequential layer ----

    fn settle(&self, env: Valuation, next: ProcId) -> (Valuation, ProcId) {
        if !self.opts.canonical_calls {
            return (env, next);
        }
        let Proc::Call { name, args } = self.program.proc(next) else {
            return (env, next);
        };
        let (Some(def), Some(canon)) = (self.program.def(name), self.program.canonical_call(name)) else {
            return (env, next);
        };
        if def.params.len() != args.len() {
            return (env, next);
        }
        let mut fresh = Valuation::new();
        for (param, arg) in def.params.iter().zip(args) {
            match eval(&self.program.sig, &env, arg) {
                Ok(v) => fresh.insert(param.name.clone(), v),
                Err(_) => return (env, next),
            }
        }
        (fresh, canon)
    }

    /// Feeds message `m` to the receiver `rc` located inside `p`.
    fn instantiate(&self, p: &ParallelProcess, rc: &Receiver, m: &Value) -> ParallelProcess {
        let (env, next) = self.receive_into(rc, m);
        p.replace_leaf(&rc.path, env, next)
    }

    fn receive_into(&self, rc: &Receiver, m: &Value) -> (Valuation, ProcId) {
        self.settle(rc.env.updated(rc.var.clone(), m.clone()), rc.next)
    }

    fn seq_moves(&self, env: &Valuation, p: ProcId, depth: usize) -> Result<Vec<SeqMove>, EvalError> {
        let sig = &self.program.sig;
        let act = |label, env: Valuation, next, rule| {
            let (env, next) = self.settle(env, next);
            SeqMove::Act {
                label,
                env,
                next,
                rule: Derivation::axiom(rule),
            }
        };
        Ok(match self.program.proc(p) {
            Proc::Broadcast { msg, then } => {
                vec![act(Label::Broadcast(eval(sig, env, msg)?), env.clone(), *then, "broadcast")]
            }
            Proc::Groupcast { dests, msg, then } => {
                let d = set_of(eval(sig, env, dests)?)?;
                vec![act(Label::Groupcast(d, eval(sig, env, msg)?), env.clone(), *then, "groupcast")]
            }
            Proc::Unicast { dest, msg, then, otherwise } => {
                let d = eval(sig, env, dest)?;
                let m = eval(sig, env, msg)?;
                vec![
                    act(Label::Unicast(d.clone(), m), env.clone(), *then, "unicast"),
                    act(Label::NegUnicast(d), env.clone(), *otherwise, "not-unicast"),
                ]
            }
            Proc::Send { msg, then } => {
                vec![act(Label::Send(eval(sig, env, msg)?), env.clone(), *then, "send")]
            }
            Proc::Deliver { data, then } => {
                vec![act(Label::Deliver(eval(sig, env, data)?), env.clone(), *then, "deliver")]
            }
            Proc::Receive { var, then } => vec![SeqMove::Recv(Receiver {
                env: env.clone(),
                var: var.clone(),
                next: *then,
                path: Vec::new(),
                rule: Derivation::axiom("receive"),
            })],
            Proc::Assign { var, expr, then } => {
                let v = eval(sig, env, expr)?;
                vec![act(Label::Tau, env.updated(var.clone(), v), *then, "assign")]
            }
            Proc::Guard { cond, then } => satisfy(sig, env, cond)?
                .into_iter()
                .map(|ext| act(Label::Tau, ext, *then, "guard"))
                .collect(),
            Proc::Choice(a, b) => {
                let mut out = Vec::new();
                for (side, rule) in [(a, "choice-l"), (b, "choice-r")] {
                    for m in self.seq_moves(env, *side, depth)? {
                        out.push(match m {
                            SeqMove::Act { label, env, next, rule: r } => SeqMove::Act {
                                label,
                                env,
                                next,
                                rule: r.wrap(rule),
                            },
                            SeqMove::Recv(mut rc) => {
                                rc.rule = rc.rule.wrap(rule);
                                SeqMove::Recv(rc)
                            }
                        });
                    }
                }
                out
            }
            Proc::Call { name, args } => {
                if depth >= MAX_CALL_DEPTH {
                    return Err(EvalError::UnguardedRecursion(name.to_string()));
                }
                let def = self
                    .program
                    .def(name)
                    .ok_or_else(|| EvalError::UnknownProcess(name.to_string()))?;
                if def.params.len() != args.len() {
                    return Err(EvalError::Arity {
                        name: name.to_string(),
                        expected: def.params.len(),
                        got: args.len(),
                    });
                }
                let mut fresh = Valuation::new();
                for (param, arg) in def.params.iter().zip(args) {
                    fresh.insert(param.name.clone(), eval(sig, env, arg)?);
                }
                self.seq_moves(&fresh, def.body, depth + 1)?
                    .into_iter()
                    .map(|m| match m {
                        SeqMove::Act { label, env, next, rule } => SeqMove::Act {
                            label,
                            env,
                            next,
                            rule: rule.wrap("call"),
                        },
                        SeqMove::Recv(mut rc) => {
                            rc.rule = rc.rule.wrap("call");
                            SeqMove::Recv(rc)
                        }
                    })
                    .collect()
            }
        })
    }

    /// Table 1: all transitions of `ξ, p`. Receives are instantiated with
    /// every message of `universe`.
    pub fn step_sequential(
        &self,
        env: &Valuation,
        p: ProcId,
        universe: &[Value],
    ) -> Result<Vec<Transition<(Valuation, ProcId)>>, EvalError> {
        let mut out = Vec::new();
        for m in self.seq_moves(env, p, 0)? {
            match m {
                SeqMove::Act { label, env, next, rule } => out.push(Transition {
                    label,
                    target: (env, next),
                    rule,
                    cast: None,
                }),
                SeqMove::Recv(rc) => {
                    for msg in universe {
                        out.push(Transition {
                            label: Label::Receive(msg.clone()),
                            target: self.receive_into(&rc, msg),
                            rule: rc.rule.clone(),
                            cast: None,
                        });
                    }
                }
            }
        }
        Ok(dedup(out))
    }

    // ---- parallel layer ----

    fn par_moves(&self, p: &ParallelProcess) -> Result<ParMoves, EvalError> {
        match p {
            ParallelProcess::Leaf { env, proc } => {
                let mut out = ParMoves::default();
                for m in self.seq_moves(env, *proc, 0)? {
                    match m {
                        SeqMove::Act { label, env, next, rule } => {
                            out.acts.push((label, ParallelProcess::leaf(env, next), rule))
                        }
                        SeqMove::Recv(rc) => out.receivers.push(rc),
                    }
                }
                Ok(out)
            }
            ParallelProcess::Par(l, r) => {
                let lm = self.par_moves(l)?;
                let rm = self.par_moves(r)?;
                let mut out = ParMoves::default();
                for (label, l2, rule) in &lm.acts {
                    out.acts.push((
                        label.clone(),
                        ParallelProcess::Par(Box::new(l2.clone()), r.clone()),
                        rule.clone().wrap("par-l"),
                    ));
                }
                for (label, r2, rule) in &rm.acts {
                    if let Label::Send(m) = label {
                        for rc in &lm.receivers {
                            let l2 = self.instantiate(l, rc, m);
                            out.acts.push((
                                Label::Tau,
                                ParallelProcess::Par(Box::new(l2), Box::new(r2.clone())),
                                Derivation::new("par-sync", vec![rc.rule.clone(), rule.clone()]),
                            ));
                        }
                    } else {
                        out.acts.push((
                            label.clone(),
                            ParallelProcess::Par(l.clone(), Box::new(r2.clone())),
                            rule.clone().wrap("par-r"),
                        ));
                    }
                }
                for mut rc in rm.receivers {
                    rc.path.insert(0, Side::Right);
                    rc.rule = rc.rule.wrap("par-r");
                    out.receivers.push(rc);
                }
                Ok(out)
            }
        }
    }

    /// Table 2: transitions of a parallel process. Receives (possible only
    /// through the rightmost operands) are instantiated over `universe`.
    pub fn step_parallel(
        &self,
        p: &ParallelProcess,
        universe: &[Value],
    ) -> Result<Vec<Transition<ParallelProcess>>, EvalError> {
        let moves = self.par_moves(p)?;
        let mut out: Vec<Transition<ParallelProcess>> = moves
            .acts
            .into_iter()
            .map(|(label, target, rule)| Transition {
                label,
                target,
                rule,
                cast: None,
            })
            .collect();
        for rc in &moves.receivers {
            for m in universe {
                out.push(Transition {
                    label: Label::Receive(m.clone()),
                    target: self.instantiate(p, rc, m),
                    rule: rc.rule.clone(),
                    cast: None,
                });
            }
        }
        Ok(dedup(out))
    }

    // ---- node layer ----

    fn node_moves(&self, n: &NodeExpression) -> Result<NodeMoves, EvalError> {
        let pm = self.par_moves(&n.process)?;
        let with = |p: ParallelProcess| NodeExpression {
            ip: n.ip.clone(),
            process: p,
            range: n.range.clone(),
        };
        let mut acts = Vec::new();
        for (label, p2, rule) in pm.acts {
            let mapped = match label {
                Label::Broadcast(m) => Some((Label::Cast(n.range.clone(), m), "node-broadcast")),
                Label::Groupcast(d, m) => Some((
                    Label::Cast(n.range.intersection(&d).cloned().collect(), m),
                    "node-groupcast",
                )),
                Label::Unicast(dip, m) if n.range.contains(&dip) => {
                    Some((Label::Cast(BTreeSet::from([dip]), m), "node-unicast"))
                }
                Label::NegUnicast(dip) if !n.range.contains(&dip) => Some((Label::Tau, "node-not-unicast")),
                Label::Deliver(d) => Some((Label::NodeDeliver(n.ip.clone(), d), "node-deliver")),
                Label::Tau => Some((Label::Tau, "node-tau")),
                _ => None,
            };
            if let Some((l, r)) = mapped {
                acts.push((l, with(p2), rule.wrap(r)));
            }
        }
        Ok(NodeMoves {
            acts,
            receivers: pm.receivers,
        })
    }

    fn node_arrive(&self, n: &NodeExpression, rc: &Receiver, m: &Value) -> NodeExpression {
        NodeExpression {
            ip: n.ip.clone(),
            process: self.instantiate(&n.process, rc, m),
            range: n.range.clone(),
        }
    }

    /// The node's reaction to a topology label, if any rule applies.
    fn node_topology(&self, n: &NodeExpression, event: &Label) -> Option<(NodeExpression, Derivation)> {
        let (x, y, connect) = match event {
            Label::Connect(x, y) => (x, y, true),
            Label::Disconnect(x, y) => (x, y, false),
            _ => return None,
        };
        let change = |other: &Value, rule| {
            let mut range = n.range.clone();
            if connect {
                range.insert(other.clone());
            } else {
                range.remove(other);
            }
            Some((
                NodeExpression {
                    ip: n.ip.clone(),
                    process: n.process.clone(),
                    range,
                },
                Derivation::axiom(rule),
            ))
        };
        if *x == n.ip {
            return change(y, if connect { "node-connect" } else { "node-disconnect" });
        }
        if !self.opts.symmetric_links {
            return None;
        }
        if *y == n.ip {
            change(x, if connect { "node-connect-sym" } else { "node-disconnect-sym" })
        } else {
            Some((
                n.clone(),
                Derivation::axiom(if connect { "node-connect-idle" } else { "node-disconnect-idle" }),
            ))
        }
    }

    /// Table 3: transitions of a node. Arrive labels range over `universe`;
    /// topology labels over `topology`.
    pub fn step_node(
        &self,
        n: &NodeExpression,
        universe: &[Value],
        topology: &[Label],
    ) -> Result<Vec<Transition<NodeExpression>>, EvalError> {
        let mut out = Vec::new();
        self.node_transitions(n, universe, topology, &mut out)?;
        Ok(dedup(out))
    }

    fn node_transitions(
        &self,
        n: &NodeExpression,
        universe: &[Value],
        topology: &[Label],
        out: &mut Vec<Transition<NodeExpression>>,
    ) -> Result<(), EvalError> {
        let moves = self.node_moves(n)?;
        for (label, target, rule) in moves.acts {
            let cast = match &label {
                Label::Cast(r, m) => Some(CastInfo {
                    sender: n.ip.clone(),
                    range: r.clone(),
                    msg: m.clone(),
                }),
                _ => None,
            };
            out.push(Transition {
                label,
                target,
                rule,
                cast,
            });
        }
        let here = BTreeSet::from([n.ip.clone()]);
        for m in universe {
            for rc in &moves.receivers {
                out.push(Transition {
                    label: Label::Arrive(here.clone(), BTreeSet::new(), m.clone()),
                    target: self.node_arrive(n, rc, m),
                    rule: rc.rule.clone().wrap("node-receive"),
                    cast: None,
                });
            }
            if moves.receivers.is_empty() && self.opts.non_blocking {
                out.push(Transition {
                    label: Label::Arrive(here.clone(), BTreeSet::new(), m.clone()),
                    target: n.clone(),
                    rule: Derivation::axiom("node-ignore"),
                    cast: None,
                });
            }
            out.push(Transition {
                label: Label::Arrive(BTreeSet::new(), here.clone(), m.clone()),
                target: n.clone(),
                rule: Derivation::axiom("node-not-arrive"),
                cast: None,
            });
        }
        for event in topology {
            if let Some((target, rule)) = self.node_topology(n, event) {
                out.push(Transition {
                    label: event.clone(),
                    target,
                    rule,
                    cast: None,
                });
            }
        }
        Ok(())
    }

    // ---- network layer, compositional ----

    fn partial_transitions(
        &self,
        m: &PartialNetwork,
        universe: &[Value],
        topology: &[Label],
    ) -> Result<Vec<Transition<PartialNetwork>>, EvalError> {
        match m {
            PartialNetwork::Node(n) => {
                let mut ts = Vec::new();
                self.node_transitions(n, universe, topology, &mut ts)?;
                Ok(ts
                    .into_iter()
                    .map(|t| Transition {
                        label: t.label,
                        target: PartialNetwork::Node(t.target),
                        rule: t.rule,
                        cast: t.cast,
                    })
                    .collect())
            }
            PartialNetwork::Par(l, r) => {
                let lt = self.partial_transitions(l, universe, topology)?;
                let rt = self.partial_transitions(r, universe, topology)?;
                let mut out = Vec::new();
                let sync = |a: &Transition<PartialNetwork>, b: &Transition<PartialNetwork>| {
                    PartialNetwork::par(a.target.clone(), b.target.clone())
                };
                for a in &lt {
                    for b in &rt {
                        match (&a.label, &b.label) {
                            (Label::Cast(..), Label::Arrive(..)) | (Label::Arrive(..), Label::Cast(..)) => {
                                if let Some(label) = crate::label::gamma(&a.label, &b.label) {
                                    let rule = if matches!(a.label, Label::Cast(..)) {
                                        "net-cast-l"
                                    } else {
                                        "net-cast-r"
                                    };
                                    out.push(Transition {
                                        label,
                                        target: sync(a, b),
                                        rule: Derivation::new(rule, vec![a.rule.clone(), b.rule.clone()]),
                                        cast: a.cast.clone().or_else(|| b.cast.clone()),
                                    });
                                }
                            }
                            (Label::Arrive(..), Label::Arrive(..)) => {
                                if let Some(label) = crate::label::gamma(&a.label, &b.label) {
                                    out.push(Transition {
                                        label,
                                        target: sync(a, b),
                                        rule: Derivation::new("net-arrive", vec![a.rule.clone(), b.rule.clone()]),
                                        cast: None,
                                    });
                                }
                            }
                            (Label::Connect(..), Label::Connect(..))
                            | (Label::Disconnect(..), Label::Disconnect(..))
                                if self.opts.symmetric_links && a.label == b.label =>
                            {
                                out.push(Transition {
                                    label: a.label.clone(),
                                    target: sync(a, b),
                                    rule: Derivation::new("net-topology-sync", vec![a.rule.clone(), b.rule.clone()]),
                                    cast: None,
                                });
                            }
                            _ => {}
                        }
                    }
                }
                let interleaves = |l: &Label| match l {
                    Label::NodeDeliver(..) | Label::Tau => true,
                    Label::Connect(..) | Label::Disconnect(..) => !self.opts.symmetric_links,
                    _ => false,
                };
                for a in lt.iter().filter(|t| interleaves(&t.label)) {
                    out.push(Transition {
                        label: a.label.clone(),
                        target: PartialNetwork::Par(Box::new(a.target.clone()), r.clone()),
                        rule: a.rule.clone().wrap("net-l"),
                        cast: a.cast.clone(),
                    });
                }
                for b in rt.iter().filter(|t| interleaves(&t.label)) {
                    out.push(Transition {
                        label: b.label.clone(),
                        target: PartialNetwork::Par(l.clone(), Box::new(b.target.clone())),
                        rule: b.rule.clone().wrap("net-r"),
                        cast: b.cast.clone(),
                    });
                }
                Ok(out)
            }
        }
    }

    fn topology_labels(&self, m: &PartialNetwork, env: &Environment) -> Vec<Label> {
        let mut labels = env.topology.clone();
        if self.opts.connect_policy == ConnectPolicy::Free {
            let ips = m.addresses();
            for x in &ips {
                for y in &ips {
                    if x != y {
                        labels.push(Label::Connect(x.clone(), y.clone()));
                        labels.push(Label::Disconnect(x.clone(), y.clone()));
                    }
                }
            }
        }
        labels.sort();
        labels.dedup();
        labels
    }

    /// Messages a network can currently exchange: everything some node could
    /// cast now, plus the injectable `newpkt` messages.
    fn universe(&self, m: &PartialNetwork, env: &Environment) -> Result<Vec<Value>, EvalError> {
        let mut msgs = BTreeSet::new();
        for n in m.nodes() {
            for (label, _, _) in self.node_moves(n)?.acts {
                if let Label::Cast(_, msg) = label {
                    msgs.insert(msg);
                }
            }
        }
        for (_, d, dip) in &env.newpkts {
            msgs.insert(newpkt_msg(d, dip));
        }
        Ok(msgs.into_iter().collect())
    }

    /// Table 4 applied literally: compose node transitions over `∥` and,
    /// for complete networks, apply encapsulation. Exponential in the number
    /// of nodes; [`Semantics::step_network`] is the fast route.
    pub fn step_network_literal(
        &self,
        n: &NetworkExpression,
        env: &Environment,
    ) -> Result<Vec<Transition<NetworkExpression>>, EvalError> {
        let m = n.inner();
        let universe = self.universe(m, env)?;
        let topology = self.topology_labels(m, env);
        let ts = self.partial_transitions(m, &universe, &topology)?;
        let out = match n {
            NetworkExpression::Partial(_) => ts
                .into_iter()
                .map(|t| Transition {
                    label: t.label,
                    target: NetworkExpression::Partial(t.target),
                    rule: t.rule,
                    cast: t.cast,
                })
                .collect(),
            NetworkExpression::Complete(_) => {
                let mut out = Vec::new();
                for t in ts {
                    let (label, rule) = match &t.label {
                        Label::Cast(..) => (Label::Tau, "enc-cast"),
                        Label::Arrive(h, _, msg) if h.len() == 1 => match as_newpkt(msg) {
                            Some((d, dip)) => {
                                let ip = h.iter().next().unwrap().clone();
                                let offered = env
                                    .newpkts
                                    .iter()
                                    .any(|(i, dd, ddip)| *i == ip && dd == d && ddip == dip);
                                if !offered {
                                    continue;
                                }
                                (Label::NewPkt(ip, d.clone(), dip.clone()), "enc-newpkt")
                            }
                            None => continue,
                        },
                        Label::Arrive(..) => continue,
                        Label::NodeDeliver(..) | Label::Tau | Label::Connect(..) | Label::Disconnect(..) => {
                            (t.label.clone(), "enc-pass")
                        }
                        _ => continue,
                    };
                    out.push(Transition {
                        label,
                        target: NetworkExpression::Complete(t.target),
                        rule: t.rule.wrap(rule),
                        cast: t.cast,
                    });
                }
                out
            }
        };
        Ok(dedup(out))
    }

    // ---- network layer, direct route for complete networks ----

    /// Transitions of a network. Complete networks use a direct
    /// construction equivalent to composing Tables 3 and 4: a cast reaches
    /// every node in range (each must receive it, or ignore it under the
    /// non-blocking option) and no other node.
    pub fn step_network(
        &self,
        n: &NetworkExpression,
        env: &Environment,
    ) -> Result<Vec<Transition<NetworkExpression>>, EvalError> {
        let m = match n {
            NetworkExpression::Partial(_) => return self.step_network_literal(n, env),
            NetworkExpression::Complete(m) => m,
        };
        let nodes: Vec<NodeExpression> = m.nodes().into_iter().cloned().collect();
        let moves = nodes
            .iter()
            .map(|node| self.node_moves(node))
            .collect::<Result<Vec<_>, _>>()?;
        let complete = |ns: &[NodeExpression]| NetworkExpression::Complete(rebuild(m, ns, &mut 0));
        let mut out = Vec::new();
        for (i, mv) in moves.iter().enumerate() {
            for (label, target, rule) in &mv.acts {
                match label {
                    Label::Cast(range, msg) => {
                        // per other node: its possible successors and their derivations
                        let mut choices: Vec<Vec<(NodeExpression, Derivation)>> = Vec::new();
                        let mut blocked = false;
                        for (j, node) in nodes.iter().enumerate() {
                            if j == i {
                                choices.push(vec![(target.clone(), rule.clone())]);
                                continue;
                            }
                            if !range.contains(&node.ip) {
                                choices.push(vec![(node.clone(), Derivation::axiom("node-not-arrive"))]);
                                continue;
                            }
                            let rcv: Vec<(NodeExpression, Derivation)> = moves[j]
                                .receivers
                                .iter()
                                .map(|rc| (self.node_arrive(node, rc, msg), rc.rule.clone().wrap("node-receive")))
                                .collect();
                            if !rcv.is_empty() {
                                choices.push(rcv);
                            } else if self.opts.non_blocking {
                                choices.push(vec![(node.clone(), Derivation::axiom("node-ignore"))]);
                            } else {
                                blocked = true;
                                break;
                            }
                        }
                        if blocked {
                            continue;
                        }
                        for row in product(&choices) {
                            let (ns, rules): (Vec<_>, Vec<_>) = row.into_iter().unzip();
                            out.push(Transition {
                                label: Label::Tau,
                                target: complete(&ns),
                                rule: Derivation::new("net-cast", rules).wrap("enc-cast"),
                                cast: Some(CastInfo {
                                    sender: nodes[i].ip.clone(),
                                    range: range.clone(),
                                    msg: msg.clone(),
                                }),
                            });
                        }
                    }
                    _ => {
                        let mut ns = nodes.clone();
                        ns[i] = target.clone();
                        out.push(Transition {
                            label: label.clone(),
                            target: complete(&ns),
                            rule: rule.clone().wrap("enc-pass"),
                            cast: None,
                        });
                    }
                }
            }
            for (ip, d, dip) in env.newpkts.iter().filter(|(ip, _, _)| *ip == nodes[i].ip) {
                let msg = newpkt_msg(d, dip);
                let label = Label::NewPkt(ip.clone(), d.clone(), dip.clone());
                for rc in &mv.receivers {
                    let mut ns = nodes.clone();
                    ns[i] = self.node_arrive(&nodes[i], rc, &msg);
                    out.push(Transition {
                        label: label.clone(),
                        target: complete(&ns),
                        rule: rc.rule.clone().wrap("node-receive").wrap("enc-newpkt"),
                        cast: None,
                    });
                }
                if mv.receivers.is_empty() && self.opts.non_blocking {
                    out.push(Transition {
                        label,
                        target: n.clone(),
                        rule: Derivation::axiom("node-ignore").wrap("enc-newpkt"),
                        cast: None,
                    });
                }
            }
        }
        for event in self.topology_labels(m, env) {
            let mut ns = nodes.clone();
            let mut rules = Vec::new();
            let mut applies = !self.opts.symmetric_links;
            let mut ok = true;
            for (j, node) in nodes.iter().enumerate() {
                match self.node_topology(node, &event) {
                    Some((t, r)) => {
                        ns[j] = t;
                        rules.push(r);
                        applies = true;
                    }
                    None if self.opts.symmetric_links => ok = false,
                    None => {}
                }
            }
            if ok && applies && !rules.is_empty() {
                out.push(Transition {
                    label: event,
                    target: complete(&ns),
                    rule: Derivation::new("net-topology", rules).wrap("enc-pass"),
                    cast: None,
                });
            }
        }
        Ok(dedup(out))
    }
}


/// Groups transitions by label, handy for tests.
pub fn by_label<T: Clone>(ts: &[Transition<T>]) -> BTreeMap<String, Vec<T>> {
    let mut out: BTreeMap<String, Vec<T>> = BTreeMap::new();
    for t in ts {
        out.entry(t.label.to_string()).or_default().push(t.target.clone());
    }
    out
}
