mod support;

use awn::{build_lts, parse_network, Bounds, Environment, Label, Semantics, SemanticsOptions, Value};
use support::algebra::{check_network, program, NETWORKS};

#[test]
fn parallel_composition_commutes_and_associates() {
    for (i, net) in NETWORKS.iter().enumerate() {
        let case = check_network(net);
        assert!(case.commutes, "network {i} does not commute");
        assert!(case.associates, "network {i} does not associate");
        assert!(case.mutant_distinguished, "network {i}: mutant not distinguished");
    }
}

#[test]
fn direct_and_compositional_network_steps_agree() {
    let env = Environment {
        newpkts: vec![
            (Value::atom("a"), Value::atom("e"), Value::atom("c")),
            (Value::atom("b"), Value::atom("d"), Value::atom("a")),
        ],
        topology: vec![
            Label::Disconnect(Value::atom("a"), Value::atom("b")),
            Label::Connect(Value::atom("c"), Value::atom("a")),
        ],
    };
    for net in NETWORKS {
        let mut p = program();
        let src = format!("[{}]", net.join(" || "));
        let start = parse_network(&mut p, &src).unwrap();
        for (non_blocking, symmetric_links) in [(false, false), (true, false), (false, true), (true, true)] {
            let sem = Semantics::new(
                &p,
                SemanticsOptions {
                    non_blocking,
                    symmetric_links,
                    ..Default::default()
                },
            );
            let fast = build_lts(start.clone(), Bounds::states(50_000), |_| true, |s| sem.step_network(s, &env)).unwrap();
            let slow = build_lts(start.clone(), Bounds::states(50_000), |_| true, |s| {
                sem.step_network_literal(s, &env)
            })
            .unwrap();
            assert!(!fast.truncated);
            assert_eq!(fast.states, slow.states, "{src}");
            assert_eq!(fast.edges, slow.edges, "{src}");
        }
    }
}
