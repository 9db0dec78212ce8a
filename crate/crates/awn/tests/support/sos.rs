//! Per-rule fixtures: a small term and the exact set of its transitions.

use awn::printer::{show_leaf, show_network, show_node_state};
use awn::{
    parse_document, parse_network, parse_value, Environment, Label, NetworkExpression, ParallelProcess,
    Program, Semantics, SemanticsOptions, Value,
};

const PRELUDE: &str = "
    const a, b, c : IP;
    const d, e : DATA;
    ctor mg(DATA, IP) : MSG;
    var m : MSG;
    var n : NAT;
    var data : DATA;
    var dip : IP;
    def P() = deliver(d).P()
    def Q(n) = deliver(e).Q(n)
    def R() = receive(m).P()
    def Z() = [false] Z()
    def S(n) = [[n := n + 1]] Q(n)
";

pub struct Fixture {
    pub rule: &'static str,
    pub got: Vec<String>,
    pub want: Vec<&'static str>,
}

impl Fixture {
    pub fn passes(&self) -> bool {
        self.got == self.want
    }
}

fn program() -> Program {
    parse_document(PRELUDE).unwrap().program
}

fn values(p: &Program, items: &[&str]) -> Vec<Value> {
    items.iter().map(|s| parse_value(p, s).unwrap()).collect()
}

fn leaf_of(p: &mut Program, leaf: &str) -> ParallelProcess {
    let net = parse_network(p, &format!("a : {leaf} : {{}}")).unwrap();
    net.inner().nodes()[0].process.clone()
}

fn show_par(p: &Program, q: &ParallelProcess) -> String {
    q.leaves()
        .into_iter()
        .map(|(env, proc)| format!("{} {env}", show_leaf(p, env, proc)))
        .collect::<Vec<_>>()
        .join(" <<| ")
}

fn sorted(mut v: Vec<String>) -> Vec<String> {
    v.sort();
    v
}

fn seq(leaf: &str, universe: &[&str]) -> Vec<String> {
    let mut p = program();
    let ParallelProcess::Leaf { env, proc } = leaf_of(&mut p, leaf) else {
        panic!("not a sequential process");
    };
    let u = values(&p, universe);
    let sem = Semantics::new(&p, SemanticsOptions::default());
    sorted(
        sem.step_sequential(&env, proc, &u)
            .unwrap()
            .into_iter()
            .map(|t| format!("{} => {} {}", t.label, show_leaf(&p, &t.target.0, t.target.1), t.target.0))
            .collect(),
    )
}

fn par(term: &str, universe: &[&str]) -> Vec<String> {
    let mut p = program();
    let q = leaf_of(&mut p, term);
    let u = values(&p, universe);
    let sem = Semantics::new(&p, SemanticsOptions::default());
    sorted(
        sem.step_parallel(&q, &u)
            .unwrap()
            .into_iter()
            .map(|t| format!("{} => {}", t.label, show_par(&p, &t.target)))
            .collect(),
    )
}

fn node(node: &str, universe: &[&str], topology: &[Label], opts: SemanticsOptions) -> Vec<String> {
    let mut p = program();
    let net = parse_network(&mut p, node).unwrap();
    let n = net.inner().nodes()[0].clone();
    let u = values(&p, universe);
    let sem = Semantics::new(&p, opts);
    sorted(
        sem.step_node(&n, &u, topology)
            .unwrap()
            .into_iter()
            .map(|t| format!("{} => {}", t.label, show_node_state(&p, &t.target)))
            .collect(),
    )
}

fn net(network: &str, env: &Environment, opts: SemanticsOptions) -> Vec<String> {
    let mut p = program();
    let n = parse_network(&mut p, network).unwrap();
    let sem = Semantics::new(&p, opts);
    let show = |t: &NetworkExpression| match t {
        NetworkExpression::Complete(_) => show_network(&p, t),
        NetworkExpression::Partial(m) => m
            .nodes()
            .iter()
            .map(|x| show_node_state(&p, x))
            .collect::<Vec<_>>()
            .join(" || "),
    };
    sorted(
        sem.step_network_literal(&n, env)
            .unwrap()
            .into_iter()
            .map(|t| format!("{} => {}", t.display_label(), show(&t.target)))
            .collect(),
    )
}

fn ip(s: &str) -> Value {
    Value::atom(s)
}

fn plain() -> SemanticsOptions {
    SemanticsOptions::default()
}

fn non_blocking() -> SemanticsOptions {
    SemanticsOptions {
        non_blocking: true,
        ..Default::default()
    }
}

fn symmetric() -> SemanticsOptions {
    SemanticsOptions {
        symmetric_links: true,
        ..Default::default()
    }
}

pub fn fixtures() -> Vec<Fixture> {
    let fx = |rule, got, want: &[&'static str]| Fixture {
        rule,
        got,
        want: want.to_vec(),
    };
    let none = Environment::default();
    let newpkt = Environment {
        newpkts: vec![(ip("a"), ip("d"), ip("b"))],
        topology: Vec::new(),
    };
    let cut = Environment {
        newpkts: Vec::new(),
        topology: vec![Label::Disconnect(ip("a"), ip("b"))],
    };
    let events = [
        Label::Connect(ip("a"), ip("c")),
        Label::Disconnect(ip("a"), ip("b")),
        Label::Connect(ip("c"), ip("a")),
        Label::Connect(ip("b"), ip("c")),
    ];
    let sym_events = [Label::Connect(ip("c"), ip("a")), Label::Disconnect(ip("b"), ip("c"))];
    vec![
        // sequential processes
        fx(
            "broadcast",
            seq("broadcast(mg(d, b)).P()", &[]),
            &["broadcast(mg(d,b)) => P() {}"],
        ),
        fx(
            "groupcast",
            seq("groupcast({b, c}, mg(d, b)).P()", &[]),
            &["groupcast({b,c},mg(d,b)) => P() {}"],
        ),
        fx(
            "unicast / not-unicast",
            seq("unicast(b, mg(d, b)).P() > Q(1)", &[]),
            &["unicast(b,mg(d,b)) => P() {}", "¬unicast(b) => Q(1) {}"],
        ),
        fx("send", seq("send(mg(e, a)).P()", &[]), &["send(mg(e,a)) => P() {}"]),
        fx("deliver", seq("deliver(e).P()", &[]), &["deliver(e) => P() {}"]),
        fx(
            "receive",
            seq("receive(m).P()", &["mg(d,a)", "mg(e,b)"]),
            &[
                "receive(mg(d,a)) => P() {m := mg(d,a)}",
                "receive(mg(e,b)) => P() {m := mg(e,b)}",
            ],
        ),
        fx(
            "assignment",
            seq("{n := 1}, [[n := n + 1]] Q(n)", &[]),
            &["tau => Q(2) {n := 2}"],
        ),
        fx(
            "guard binds by matching",
            seq("{m := mg(d, b)}, [m = mg(data, dip)] Q(1)", &[]),
            &["tau => Q(1) {data := d, dip := b, m := mg(d,b)}"],
        ),
        fx(
            "guard enumerates a sort",
            seq("[dip != a] Q(1)", &[]),
            &["tau => Q(1) {dip := b}", "tau => Q(1) {dip := c}"],
        ),
        fx("guard false", seq("{n := 1}, [n > 1] Q(n)", &[]), &[]),
        fx(
            "choice",
            seq("deliver(d).P() + [[n := 3]] Q(n)", &[]),
            &["deliver(d) => P() {}", "tau => Q(3) {n := 3}"],
        ),
        fx(
            "call",
            seq("{n := 7, m := mg(d,a)}, S(n)", &[]),
            &["tau => Q(8) {n := 8}"],
        ),
        // parallel processes
        fx(
            "par left",
            par("broadcast(mg(d,b)).P() <<| deliver(e).P()", &[]),
            &[
                "broadcast(mg(d,b)) => P() {} <<| deliver(e).P() {}",
                "deliver(e) => broadcast(mg(d, b)).P() {} <<| P() {}",
            ],
        ),
        fx(
            "par sync",
            par("receive(m).P() <<| send(mg(d,c)).P()", &["mg(e,a)"]),
            &["tau => P() {m := mg(d,c)} <<| P() {}"],
        ),
        fx(
            "par right",
            par("deliver(d).P() <<| receive(m).P()", &["mg(e,a)"]),
            &[
                "deliver(d) => P() {} <<| receive(m).P() {}",
                "receive(mg(e,a)) => deliver(d).P() {} <<| P() {m := mg(e,a)}",
            ],
        ),
        // nodes
        fx(
            "node broadcast",
            node("a : broadcast(mg(d,b)).P() : {b, c}", &[], &[], plain()),
            &["{b,c}:*cast(mg(d,b)) => a range {b,c} : P() {}"],
        ),
        fx(
            "node groupcast",
            node("a : groupcast({a, c}, mg(d,b)).P() : {b, c}", &[], &[], plain()),
            &["{c}:*cast(mg(d,b)) => a range {b,c} : P() {}"],
        ),
        fx(
            "node unicast",
            node("a : unicast(b, mg(d,b)).P() > Q(0) : {b}", &[], &[], plain()),
            &["{b}:*cast(mg(d,b)) => a range {b} : P() {}"],
        ),
        fx(
            "node not-unicast",
            node("a : unicast(b, mg(d,b)).P() > Q(0) : {c}", &[], &[], plain()),
            &["tau => a range {c} : Q(0) {}"],
        ),
        fx(
            "node deliver",
            node("b : deliver(d).P() : {}", &[], &[], plain()),
            &["b:deliver(d) => b range {} : P() {}"],
        ),
        fx(
            "node receive / not-arrive",
            node("b : receive(m).P() : {a}", &["mg(d,b)"], &[], plain()),
            &[
                "{b}¬{}:arrive(mg(d,b)) => b range {a} : P() {m := mg(d,b)}",
                "{}¬{b}:arrive(mg(d,b)) => b range {a} : receive(m).P() {}",
            ],
        ),
        fx(
            "node without receiver",
            node("b : deliver(e).P() : {}", &["mg(d,b)"], &[], plain()),
            &[
                "b:deliver(e) => b range {} : P() {}",
                "{}¬{b}:arrive(mg(d,b)) => b range {} : deliver(e).P() {}",
            ],
        ),
        fx(
            "node ignore",
            node("b : deliver(e).P() : {}", &["mg(d,b)"], &[], non_blocking()),
            &[
                "b:deliver(e) => b range {} : P() {}",
                "{b}¬{}:arrive(mg(d,b)) => b range {} : deliver(e).P() {}",
                "{}¬{b}:arrive(mg(d,b)) => b range {} : deliver(e).P() {}",
            ],
        ),
        fx(
            "node connect / disconnect",
            node("a : P() : {b}", &[], &events, plain()),
            &[
                "a:deliver(d) => a range {b} : P() {}",
                "connect(a,c) => a range {b,c} : P() {}",
                "disconnect(a,b) => a range {} : P() {}",
            ],
        ),
        fx(
            "node symmetric links",
            node("a : P() : {b}", &[], &sym_events, symmetric()),
            &[
                "a:deliver(d) => a range {b} : P() {}",
                "connect(c,a) => a range {b,c} : P() {}",
                "disconnect(b,c) => a range {b} : P() {}",
            ],
        ),
        // networks
        fx(
            "net cast / arrive",
            net("a : broadcast(mg(d,b)).P() : {b} || b : receive(m).P() : {a}", &none, plain()),
            &[
                "{b}:*cast(mg(d,b)) => a range {b} : P() {} || b range {a} : P() {m := mg(d,b)}",
                "{b}¬{a}:arrive(mg(d,b)) => a range {b} : broadcast(mg(d, b)).P() {} || b range {a} : P() {m := mg(d,b)}",
                "{}¬{a,b}:arrive(mg(d,b)) => a range {b} : broadcast(mg(d, b)).P() {} || b range {a} : receive(m).P() {}",
            ],
        ),
        fx(
            "net cast out of range",
            net("a : broadcast(mg(d,b)).P() : {} || c : deliver(e).P() : {}", &none, plain()),
            &[
                "c:deliver(e) => a range {} : broadcast(mg(d, b)).P() {} || c range {} : P() {}",
                "{}:*cast(mg(d,b)) => a range {} : P() {} || c range {} : deliver(e).P() {}",
                "{}¬{a,c}:arrive(mg(d,b)) => a range {} : broadcast(mg(d, b)).P() {} || c range {} : deliver(e).P() {}",
            ],
        ),
        fx(
            "encapsulation",
            net("[a : broadcast(mg(d,b)).P() : {b} || b : receive(m).P() : {a}]", &none, plain()),
            &["a:*cast(mg(d,b)) => [P() || P()]"],
        ),
        fx(
            "newpkt",
            net("[a : R() : {} || b : R() : {}]", &newpkt, plain()),
            &["a:newpkt(d,b) => [P() || R()]"],
        ),
        fx(
            "blocked cast",
            net("[a : broadcast(mg(d,b)).P() : {b} || b : deliver(e).P() : {a}]", &none, plain()),
            &["b:deliver(e) => [broadcast(mg(d, b)).P() || P()]"],
        ),
        fx(
            "cast with augmentation",
            net("[a : broadcast(mg(d,b)).P() : {b} || b : deliver(e).P() : {a}]", &none, non_blocking()),
            &[
                "a:*cast(mg(d,b)) => [P() || deliver(e).P()]",
                "b:deliver(e) => [broadcast(mg(d, b)).P() || P()]",
            ],
        ),
        fx(
            "net disconnect",
            net("a : Z() : {b} || b : Z() : {a}", &cut, plain()),
            &["disconnect(a,b) => a range {} : Z() {} || b range {a} : Z() {}"],
        ),
        fx(
            "net symmetric disconnect",
            net("a : Z() : {b} || b : Z() : {a}", &cut, symmetric()),
            &["disconnect(a,b) => a range {} : Z() {} || b range {} : Z() {}"],
        ),
    ]
}
