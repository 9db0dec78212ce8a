//! The two-node toy network: forwarding, empty ranges and mutual blocking.

use awn::printer::show_network;
use awn::{build_lts, parse_document, Bounds, Environment, Label, Lts, NetworkExpression, Semantics, SemanticsOptions};

const TOY: &str = "
    const a, b : IP;
    const d, e : DATA;
    ctor mg(DATA, IP) : MSG;
    var data : DATA;
    var dip : IP;
    var m : MSG;
    def X(ip; data, dip) = broadcast(mg(data, dip)) . Y(ip)
    def Y(ip) = receive(m) . ( [m = mg(data, dip) && dip = ip] deliver(data) . Y(ip)
                             + [m = mg(data, dip) && dip != ip] X(ip; data, dip) )
";

fn explore(network: &str, opts: SemanticsOptions) -> (awn::Program, Lts<NetworkExpression>) {
    let doc = parse_document(&format!("{TOY}\nnetwork {network}")).unwrap();
    let net = doc.network.unwrap();
    let sem = Semantics::new(&doc.program, opts);
    let env = Environment::default();
    let lts = build_lts(net, Bounds::unbounded(), |_| true, |s| sem.step_network(s, &env)).unwrap();
    (doc.program, lts)
}

/// The labels along the unique maximal path, asserting there is no branching.
fn linear_trace(lts: &Lts<NetworkExpression>) -> (Vec<String>, usize) {
    let succ = lts.successors();
    let mut cur = lts.initial;
    let mut labels = Vec::new();
    while let Some(&e) = succ[cur].first() {
        assert_eq!(succ[cur].len(), 1, "branching at state {cur}");
        labels.push(lts.edges[e].display_label());
        cur = lts.edges[e].dst;
    }
    (labels, cur)
}

#[test]
fn forwarding_delivers() {
    let (p, lts) = explore("[a : X(a; d, b) : {b} || b : Y(b) : {a}]", SemanticsOptions::default());
    let (trace, last) = linear_trace(&lts);
    assert_eq!(trace, ["a:*cast(mg(d,b))", "tau", "b:deliver(d)"]);
    assert_eq!(show_network(&p, &lts.states[last]), "[Y(a) || Y(b)]");
}

#[test]
fn empty_ranges_never_deliver() {
    let (_, lts) = explore("[a : X(a; d, b) : {} || b : Y(b) : {}]", SemanticsOptions::default());
    assert!(!lts.edges.iter().any(|e| matches!(e.label, Label::NodeDeliver(..))));
    let (trace, _) = linear_trace(&lts);
    assert_eq!(trace, ["a:*cast(mg(d,b))"]);
}

#[test]
fn mutual_broadcast_blocks_without_augmentation() {
    let net = "[a : X(a; d, b) : {b} || b : X(b; e, a) : {a}]";
    let (_, lts) = explore(net, SemanticsOptions::default());
    assert_eq!(lts.num_transitions(), 0);

    let opts = SemanticsOptions {
        non_blocking: true,
        ..Default::default()
    };
    let (p, lts) = explore(net, opts);
    let deliver_e = lts
        .edges
        .iter()
        .find(|e| e.label == Label::NodeDeliver(awn::Value::atom("a"), awn::Value::atom("e")))
        .expect("a delivers e");
    let trace: Vec<String> = lts.path_to(deliver_e.dst).iter().map(|e| e.display_label()).collect();
    assert_eq!(trace, ["a:*cast(mg(d,b))", "b:*cast(mg(e,a))", "tau", "a:deliver(e)"]);
    assert_eq!(show_network(&p, &lts.states[deliver_e.dst]), "[Y(a) || Y(b)]");
}
