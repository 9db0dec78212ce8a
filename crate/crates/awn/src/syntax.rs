//! Abstract syntax for data expressions, formulas and the four process layers.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::signature::Signature;
use crate::valuation::Valuation;
use crate::value::{Sort, Sym, Value};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Expr {
    Var(Sym),
    Const(Value),
    /// Operator application; the operator is looked up in the signature.
    App(Sym, Vec<Expr>),
    Ctor(Sym, Vec<Expr>),
    Tuple(Vec<Expr>),
    Set(Vec<Expr>),
    Map(Vec<(Expr, Expr)>),
    Seq(Vec<Expr>),
}

impl Expr {
    pub fn var(name: &str) -> Expr {
        Expr::Var(crate::value::sym(name))
    }

    pub fn atom(name: &str) -> Expr {
        Expr::Const(Value::atom(name))
    }

    pub fn nat(n: u64) -> Expr {
        Expr::Const(Value::Nat(n))
    }

    pub fn app(op: &str, args: Vec<Expr>) -> Expr {
        Expr::App(crate::value::sym(op), args)
    }

    pub fn ctor(name: &str, args: Vec<Expr>) -> Expr {
        Expr::Ctor(crate::value::sym(name), args)
    }

    /// Adds every variable occurring in `self` to `out`.
    pub fn collect_vars(&self, out: &mut BTreeSet<Sym>) {
        match self {
            Expr::Var(v) => {
                out.insert(v.clone());
            }
            Expr::Const(_) => {}
            Expr::App(_, args)
            | Expr::Ctor(_, args)
            | Expr::Tuple(args)
            | Expr::Set(args)
            | Expr::Seq(args) => args.iter().for_each(|a| a.collect_vars(out)),
            Expr::Map(pairs) => {
                for (k, v) in pairs {
                    k.collect_vars(out);
                    v.collect_vars(out);
                }
            }
        }
    }

    pub fn vars(&self) -> BTreeSet<Sym> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RelOp {
    Eq,
    Neq,
    Lt,
    Le,
    Gt,
    Ge,
    In,
    NotIn,
}

impl RelOp {
    pub fn symbol(self) -> &'static str {
        match self {
            RelOp::Eq => "=",
            RelOp::Neq => "!=",
            RelOp::Lt => "<",
            RelOp::Le => "<=",
            RelOp::Gt => ">",
            RelOp::Ge => ">=",
            RelOp::In => "in",
            RelOp::NotIn => "notin",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    True,
    False,
    Rel(RelOp, Expr, Expr),
    /// A boolean-valued expression used as a predicate.
    Holds(Expr),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Formula) -> Formula {
        Formula::Not(Box::new(a))
    }

    pub fn eq(a: Expr, b: Expr) -> Formula {
        Formula::Rel(RelOp::Eq, a, b)
    }

    pub fn neq(a: Expr, b: Expr) -> Formula {
        Formula::Rel(RelOp::Neq, a, b)
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Sym>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Rel(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Formula::Holds(e) => e.collect_vars(out),
            Formula::Not(f) => f.collect_vars(out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    /// Free variables; formulas have no binders so this is every variable.
    pub fn free_vars(&self) -> BTreeSet<Sym> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }
}

/// Index of a sequential process term in a [`Program`]'s arena.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProcId(pub u32);

/// One node of a sequential process term. Sub-terms are arena indices, so
/// structurally equal terms within one program share an id.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Proc {
    Call { name: Sym, args: Vec<Expr> },
    Guard { cond: Formula, then: ProcId },
    Assign { var: Sym, expr: Expr, then: ProcId },
    Choice(ProcId, ProcId),
    Broadcast { msg: Expr, then: ProcId },
    Groupcast { dests: Expr, msg: Expr, then: ProcId },
    /// `unicast(dest, msg).then > otherwise`
    Unicast { dest: Expr, msg: Expr, then: ProcId, otherwise: ProcId },
    Send { msg: Expr, then: ProcId },
    Deliver { data: Expr, then: ProcId },
    Receive { var: Sym, then: ProcId },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Param {
    pub name: Sym,
    pub sort: Option<Sort>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProcessDefinition {
    pub name: Sym,
    pub params: Vec<Param>,
    pub body: ProcId,
}

/// A signature plus a set of process definitions sharing one term arena.
/// Immutable once loaded.
#[derive(Clone, Debug, Default)]
pub struct Program {
    pub sig: Signature,
    procs: Vec<Proc>,
    index: HashMap<Proc, ProcId>,
    defs: BTreeMap<Sym, ProcessDefinition>,
    /// `X(p1, ..., pn)` with the parameters themselves as arguments, per definition.
    canonical: HashMap<Sym, ProcId>,
}

impl Program {
    pub fn new(sig: Signature) -> Self {
        Program {
            sig,
            procs: Vec::new(),
            index: HashMap::new(),
            defs: BTreeMap::new(),
            canonical: HashMap::new(),
        }
    }

    /// Interns a term node, returning the id of an existing identical node if any.
    pub fn intern(&mut self, p: Proc) -> ProcId {
        if let Some(id) = self.index.get(&p) {
            return *id;
        }
        let id = ProcId(self.procs.len() as u32);
        self.procs.push(p.clone());
        self.index.insert(p, id);
        id
    }

    pub fn proc(&self, id: ProcId) -> &Proc {
        &self.procs[id.0 as usize]
    }

    pub fn define(&mut self, def: ProcessDefinition) -> Option<ProcessDefinition> {
        let call = Proc::Call {
            name: def.name.clone(),
            args: def.params.iter().map(|p| Expr::Var(p.name.clone())).collect(),
        };
        let id = self.intern(call);
        self.canonical.insert(def.name.clone(), id);
        self.defs.insert(def.name.clone(), def)
    }

    /// The term `X(p1, ..., pn)` for a defined `X`.
    pub fn canonical_call(&self, name: &str) -> Option<ProcId> {
        self.canonical.get(name).copied()
    }

    pub fn def(&self, name: &str) -> Option<&ProcessDefinition> {
        self.defs.get(name)
    }

    pub fn defs(&self) -> impl Iterator<Item = &ProcessDefinition> {
        self.defs.values()
    }

    /// Structural equality of two terms living in (possibly) different programs.
    pub fn same_term(&self, a: ProcId, other: &Program, b: ProcId) -> bool {
        use Proc::*;
        match (self.proc(a), other.proc(b)) {
            (Call { name: n1, args: a1 }, Call { name: n2, args: a2 }) => n1 == n2 && a1 == a2,
            (Guard { cond: c1, then: t1 }, Guard { cond: c2, then: t2 }) => {
                c1 == c2 && self.same_term(*t1, other, *t2)
            }
            (
                Assign { var: v1, expr: e1, then: t1 },
                Assign { var: v2, expr: e2, then: t2 },
            ) => v1 == v2 && e1 == e2 && self.same_term(*t1, other, *t2),
            (Choice(l1, r1), Choice(l2, r2)) => {
                self.same_term(*l1, other, *l2) && self.same_term(*r1, other, *r2)
            }
            (Broadcast { msg: m1, then: t1 }, Broadcast { msg: m2, then: t2 })
            | (Send { msg: m1, then: t1 }, Send { msg: m2, then: t2 })
            | (Deliver { data: m1, then: t1 }, Deliver { data: m2, then: t2 }) => {
                m1 == m2 && self.same_term(*t1, other, *t2)
            }
            (
                Groupcast { dests: d1, msg: m1, then: t1 },
                Groupcast { dests: d2, msg: m2, then: t2 },
            ) => d1 == d2 && m1 == m2 && self.same_term(*t1, other, *t2),
            (
                Unicast { dest: d1, msg: m1, then: t1, otherwise: o1 },
                Unicast { dest: d2, msg: m2, then: t2, otherwise: o2 },
            ) => {
                d1 == d2
                    && m1 == m2
                    && self.same_term(*t1, other, *t2)
                    && self.same_term(*o1, other, *o2)
            }
            (Receive { var: v1, then: t1 }, Receive { var: v2, then: t2 }) => {
                v1 == v2 && self.same_term(*t1, other, *t2)
            }
            _ => false,
        }
    }
}

/// Which operand of a binary composition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Left,
    Right,
}

/// `ξ,p` leaves composed with `⟨⟨`. Leaves never see each other's stores.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ParallelProcess {
    Leaf { env: Valuation, proc: ProcId },
    Par(Box<ParallelProcess>, Box<ParallelProcess>),
}

impl ParallelProcess {
    pub fn leaf(env: Valuation, proc: ProcId) -> Self {
        ParallelProcess::Leaf { env, proc }
    }

    pub fn par(left: ParallelProcess, right: ParallelProcess) -> Self {
        ParallelProcess::Par(Box::new(left), Box::new(right))
    }

    pub fn leaves(&self) -> Vec<(&Valuation, ProcId)> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<(&'a Valuation, ProcId)>) {
        match self {
            ParallelProcess::Leaf { env, proc } => out.push((env, *proc)),
            ParallelProcess::Par(l, r) => {
                l.collect_leaves(out);
                r.collect_leaves(out);
            }
        }
    }

    /// Replaces the leaf at `path` (outermost step first).
    pub fn replace_leaf(&self, path: &[Side], env: Valuation, proc: ProcId) -> ParallelProcess {
        match (self, path.split_first()) {
            (_, None) => ParallelProcess::Leaf { env, proc },
            (ParallelProcess::Par(l, r), Some((side, rest))) => match side {
                Side::Left => ParallelProcess::Par(Box::new(l.replace_leaf(rest, env, proc)), r.clone()),
                Side::Right => ParallelProcess::Par(l.clone(), Box::new(r.replace_leaf(rest, env, proc))),
            },
            (ParallelProcess::Leaf { .. }, Some(_)) => panic!("leaf path runs past a leaf"),
        }
    }
}

/// `ip : P : R`
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeExpression {
    pub ip: Value,
    pub process: ParallelProcess,
    pub range: BTreeSet<Value>,
}

/// Nodes joined by `∥`. Composition is kept as written, never reassociated.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PartialNetwork {
    Node(NodeExpression),
    Par(Box<PartialNetwork>, Box<PartialNetwork>),
}

impl PartialNetwork {
    pub fn par(left: PartialNetwork, right: PartialNetwork) -> Self {
        PartialNetwork::Par(Box::new(left), Box::new(right))
    }

    /// Right-nested composition `n1 ∥ (n2 ∥ (...))` of a non-empty node list.
    pub fn from_nodes(mut nodes: Vec<NodeExpression>) -> Option<Self> {
        let last = nodes.pop()?;
        let mut acc = PartialNetwork::Node(last);
        while let Some(n) = nodes.pop() {
            acc = PartialNetwork::par(PartialNetwork::Node(n), acc);
        }
        Some(acc)
    }

    pub fn nodes(&self) -> Vec<&NodeExpression> {
        let mut out = Vec::new();
        self.collect_nodes(&mut out);
        out
    }

    fn collect_nodes<'a>(&'a self, out: &mut Vec<&'a NodeExpression>) {
        match self {
            PartialNetwork::Node(n) => out.push(n),
            PartialNetwork::Par(l, r) => {
                l.collect_nodes(out);
                r.collect_nodes(out);
            }
        }
    }

    pub fn node(&self, ip: &Value) -> Option<&NodeExpression> {
        match self {
            PartialNetwork::Node(n) => (n.ip == *ip).then_some(n),
            PartialNetwork::Par(l, r) => l.node(ip).or_else(|| r.node(ip)),
        }
    }

    /// Applies `f` to every node, keeping the shape.
    pub fn map_nodes<F: FnMut(&NodeExpression) -> NodeExpression>(&self, f: &mut F) -> PartialNetwork {
        match self {
            PartialNetwork::Node(n) => PartialNetwork::Node(f(n)),
            PartialNetwork::Par(l, r) => PartialNetwork::par(l.map_nodes(f), r.map_nodes(f)),
        }
    }

    pub fn addresses(&self) -> Vec<Value> {
        self.nodes().iter().map(|n| n.ip.clone()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NetworkExpression {
    Partial(PartialNetwork),
    /// `[M]`
    Complete(PartialNetwork),
}

impl NetworkExpression {
    pub fn inner(&self) -> &PartialNetwork {
        match self {
            NetworkExpression::Partial(m) | NetworkExpression::Complete(m) => m,
        }
    }

    pub fn is_complete(&self) -> bool {
        matches!(self, NetworkExpression::Complete(_))
    }
}
