//! Commutativity and associativity of `||` on partial networks.

use awn::{
    bisimilar, build_lts, parse_document, parse_network, Bounds, Environment, Label, NetworkExpression,
    NodeExpression, PartialNetwork, Program, Semantics, SemanticsOptions, Value,
};

pub const TOY: &str = "
    const a, b, c : IP;
    const d, e : DATA;
    ctor mg(DATA, IP) : MSG;
    var data : DATA;
    var dip : IP;
    var m : MSG;
    def X(ip; data, dip) = broadcast(mg(data, dip)) . Y(ip)
    def Y(ip) = receive(m) . ( [m = mg(data, dip) && dip = ip] deliver(data) . Y(ip)
                             + [m = mg(data, dip) && dip != ip] X(ip; data, dip) )
";

/// Small networks; each entry lists its nodes.
pub const NETWORKS: [&[&str]; 5] = [
    &["a : X(a; d, b) : {b}", "b : Y(b) : {a}", "c : Y(c) : {}"],
    &["a : X(a; d, b) : {b, c}", "b : Y(b) : {a}", "c : Y(c) : {a}"],
    &["a : X(a; d, c) : {b}", "b : Y(b) : {a, c}", "c : Y(c) : {b}"],
    &["a : X(a; d, b) : {}", "b : X(b; e, a) : {a}", "c : Y(c) : {b}"],
    &["a : Y(a) : {b}", "b : X(b; e, a) : {a}", "c : X(c; d, a) : {a, b}"],
];

pub fn program() -> Program {
    parse_document(TOY).unwrap().program
}

pub fn nodes(p: &mut Program, srcs: &[&str]) -> Vec<NodeExpression> {
    srcs.iter()
        .map(|s| parse_network(p, s).unwrap().inner().nodes()[0].clone())
        .collect()
}

fn leaf(n: &NodeExpression) -> PartialNetwork {
    PartialNetwork::Node(n.clone())
}

fn env() -> Environment {
    Environment {
        newpkts: vec![(Value::atom("a"), Value::atom("e"), Value::atom("c"))],
        topology: vec![Label::Disconnect(Value::atom("a"), Value::atom("b"))],
    }
}

pub fn equivalent(p: &Program, x: PartialNetwork, y: PartialNetwork) -> bool {
    let sem = Semantics::new(p, SemanticsOptions::default());
    let env = env();
    let lts = |n: PartialNetwork| {
        build_lts(NetworkExpression::Partial(n), Bounds::states(200_000), |_| true, |s| {
            sem.step_network_literal(s, &env)
        })
        .unwrap()
    };
    bisimilar(&lts(x), &lts(y)).unwrap().is_equivalent()
}

pub struct AlgebraCase {
    pub commutes: bool,
    pub associates: bool,
    /// A mutated right-hand side must be told apart.
    pub mutant_distinguished: bool,
}

pub fn check_network(srcs: &[&str]) -> AlgebraCase {
    let mut p = program();
    let ns = nodes(&mut p, srcs);
    let (m, n, o) = (leaf(&ns[0]), leaf(&ns[1]), leaf(&ns[2]));
    let commutes = equivalent(
        &p,
        PartialNetwork::par(m.clone(), n.clone()),
        PartialNetwork::par(n.clone(), m.clone()),
    );
    let associates = equivalent(
        &p,
        PartialNetwork::par(PartialNetwork::par(m.clone(), n.clone()), o.clone()),
        PartialNetwork::par(m.clone(), PartialNetwork::par(n.clone(), o.clone())),
    );
    // the first sender reaches one more or one fewer node
    let k = srcs.iter().position(|s| s.contains("X(")).unwrap_or(0);
    let other = ns[(k + 1) % ns.len()].ip.clone();
    let mut mutated = ns.clone();
    if !mutated[k].range.remove(&other) {
        mutated[k].range.insert(other);
    }
    let three = |v: &[NodeExpression]| PartialNetwork::par(PartialNetwork::par(leaf(&v[0]), leaf(&v[1])), leaf(&v[2]));
    let mutant_distinguished = !equivalent(&p, three(&ns), three(&mutated));
    AlgebraCase {
        commutes,
        associates,
        mutant_distinguished,
    }
}
