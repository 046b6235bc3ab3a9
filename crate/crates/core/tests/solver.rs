mod common;

use common::*;
use crosswork::ccsolve::{brute_solution, detect_excluded, solve};
use crosswork::sufficiency::CondPair;
use crosswork::{gen, CrossTree};
use proptest::prelude::*;
use rand::Rng;

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn solutions_are_sound(seed in any::<u64>(), h in 1usize..4, r in 1usize..3) {
        let mut rng = gen::rng(seed);
        let t = gen::random_leftfull(&mut rng, h, r);
        let sol = solve(&t).unwrap();
        prop_assert!(sol.violations(&t).is_empty(), "{:?}", sol.violations(&t));
        let [a, b] = &sol.pair;
        prop_assert!(t.contains_node(a) && t.contains_node(b));
        prop_assert!(differ_from(a.left.digits(), b.left.digits(), sol.base.left_len()));
        prop_assert!(sol.trace.windows(2).all(|w| w[1].extends(&w[0]) || sol.restarts.iter().any(|x| w[1] == sol.trace[x.at])));
        for x in &sol.restarts {
            let stuck = &sol.trace[x.at - 1];
            for &s in &x.excluded {
                prop_assert!(detect_excluded(&t, stuck, s).unwrap());
            }
        }
        let served = r - sol.excluded.len();
        let best = brute_solution(&t).unwrap().agreement.iter().filter(|a| !a.is_empty()).count();
        prop_assert!(best >= served);
    }

    #[test]
    fn one_component_never_excludes(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let h = rng.gen_range(1..4);
        let t = gen::random_leftfull(&mut rng, h, 1);
        let sol = solve(&t).unwrap();
        prop_assert!(sol.excluded.is_empty());
        prop_assert!(!sol.agreement[0].is_empty());
        prop_assert!(!detect_excluded(&t, &CondPair::root(&t), 0).unwrap());
    }
}

#[test]
fn solve_rejects_bad_inputs() {
    assert!(solve(&CrossTree::full(1, 0)).is_err());
    assert!(solve(&CrossTree::closure_of(1, 1, []).unwrap()).is_err());
}
