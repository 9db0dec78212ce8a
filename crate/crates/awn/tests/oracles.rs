mod support;

use awn::ctl::{check, sat};
use awn::{bisimilar, bisimulation_classes, hml_holds, BisimResult};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use support::oracles::*;

#[test]
fn ctl_matches_naive_fixpoints() {
    let (bad, first) = ctl_agreement(7, 1500);
    assert_eq!(bad, 0, "first disagreement: {first:?}");
}

#[test]
fn ctl_counterexamples_start_in_initial_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..300 {
        let (k, labels) = random_kripke(&mut rng, 30);
        let f = random_formula(&mut rng, 3);
        let atom = |a: &usize, s: usize| labels[s][*a];
        let v = check(&k, &f, &atom);
        assert_eq!(v.holds, sat(&k, &f, &atom)[0]);
        if let Some(w) = v.counterexample {
            assert_eq!(w.path[0], 0);
            for pair in w.path.windows(2) {
                assert!(k.succ[pair[0]].contains(&pair[1]));
            }
            if let Some(i) = w.loop_start {
                assert!(k.succ[*w.path.last().unwrap()].contains(&w.path[i]));
            }
        }
    }
}

#[test]
fn bisimilarity_matches_naive_relation() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut distinguished = 0;
    for _ in 0..400 {
        let a = random_lts(&mut rng, 12, 2);
        let b = random_lts(&mut rng, 12, 2);
        let verdict = bisimilar(&a, &b).unwrap();
        assert_eq!(verdict.is_equivalent(), naive_bisimilar(&a, &b));
        if let BisimResult::Distinguished { formula, .. } = verdict {
            distinguished += 1;
            assert!(hml_holds(&a, a.initial, &formula), "{formula}");
            assert!(!hml_holds(&b, b.initial, &formula), "{formula}");
        }
    }
    assert!(distinguished > 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bisimilarity_is_an_equivalence(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_lts(&mut rng, 10, 2);
        let b = random_lts(&mut rng, 10, 2);
        let c = random_lts(&mut rng, 10, 2);
        prop_assert!(bisimilar(&a, &a).unwrap().is_equivalent());
        prop_assert!(bisimilar(&a, &shuffled(&mut rng, &a)).unwrap().is_equivalent());
        let ab = bisimilar(&a, &b).unwrap().is_equivalent();
        prop_assert_eq!(ab, bisimilar(&b, &a).unwrap().is_equivalent());
        let bc = bisimilar(&b, &c).unwrap().is_equivalent();
        if ab && bc {
            prop_assert!(bisimilar(&a, &c).unwrap().is_equivalent());
        }
    }

    #[test]
    fn classes_are_closed_under_transfer(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_lts(&mut rng, 15, 3);
        let class = bisimulation_classes(&a);
        for e in &a.edges {
            for s in 0..a.num_states() {
                if class[s] == class[e.src] {
                    prop_assert!(a.edges.iter().any(|f| f.src == s && f.label == e.label && class[f.dst] == class[e.dst]));
                }
            }
        }
    }
}
