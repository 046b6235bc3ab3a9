mod common;

use common::*;
use crosswork::{gen, json, CrossTree, ForbiddenSet, Node, RightTuple, Word};
use proptest::prelude::*;
use rand::Rng;

fn blocked(n: &Node, w: &[(Word, RightTuple)]) -> bool {
    w.iter().any(|(mu, tau)| starts_with(n.left.digits(), mu.digits()) && tuple_extends(&n.right, tau))
}

fn random_word(rng: &mut gen::SweepRng, k: u8, len: usize) -> Word {
    Word::new(k, (0..len).map(|_| rng.gen_range(0..k)).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn right_prune_is_an_idempotent_right_pruned_subtree(seed in any::<u64>(), h in 1usize..4, r in 1usize..3) {
        let mut rng = gen::rng(seed);
        let t = gen::random_tree(&mut rng, h, r, 4);
        prop_assert!(t.is_valid());
        let p = t.right_prune();
        prop_assert!(p.is_valid() && p.is_right_pruned());
        prop_assert!(p.nodes().iter().all(|n| t.contains_node(n)));
        prop_assert_eq!(p.right_prune(), p.clone());
        if t.is_right_pruned() {
            prop_assert_eq!(p, t);
        }
    }

    #[test]
    fn leftfull_matches_definition(seed in any::<u64>(), h in 1usize..4, r in 1usize..3) {
        // the brute check is too slow on the largest shape
        prop_assume!(h + r <= 4);
        let mut rng = gen::rng(seed);
        let t = gen::random_right_pruned(&mut rng, h, r, 0.7);
        for n in t.nodes() {
            prop_assert_eq!(t.leftfull(&n.left, &n.right).unwrap(), brute_leftfull(&t, &n.left, &n.right));
            prop_assert_eq!(t.leftfull_via_c(&n.left, &n.right).unwrap(), brute_leftfull(&t, &n.left, &n.right));
        }
    }

    #[test]
    fn extension_lands_on_a_leftfull_pair(seed in any::<u64>(), h in 1usize..4, r in 1usize..3) {
        let mut rng = gen::rng(seed);
        let t = gen::random_leftfull(&mut rng, h, r);
        let full: Vec<Node> = t.nodes().into_iter().filter(|n| brute_leftfull(&t, &n.left, &n.right)).collect();
        let start = &full[rng.gen_range(0..full.len())];
        let n = rng.gen_range(start.right.len()..=h);
        let (rho, sigma) = t.leftfull_extend(&start.left, &start.right, n).unwrap();
        prop_assert_eq!(sigma.len(), n);
        prop_assert!(rho.len() >= n);
        prop_assert!(starts_with(rho.digits(), start.left.digits()) && tuple_extends(&sigma, &start.right));
        prop_assert!(brute_leftfull(&t, &rho, &sigma));
    }

    #[test]
    fn forbidden_tree_is_the_unblocked_part(seed in any::<u64>(), h in 1usize..3, r in 1usize..3) {
        let mut rng = gen::rng(seed);
        let entries: Vec<(Word, RightTuple)> = (0..rng.gen_range(0..4))
            .map(|_| {
                let l = rng.gen_range(0..=h);
                let rl = rng.gen_range(0..=l);
                let tau = RightTuple::new((0..r).map(|_| random_word(&mut rng, 2, rl)).collect()).unwrap();
                (random_word(&mut rng, 3, l), tau)
            })
            .collect();
        let t = CrossTree::from_forbidden(&ForbiddenSet::new(entries.clone()), h, r).unwrap();
        prop_assert!(t.is_valid() || t.is_empty());
        for n in CrossTree::full(r, h).nodes() {
            prop_assert_eq!(t.contains_node(&n), !blocked(&n, &entries), "{:?}", n);
        }
    }

    #[test]
    fn tree_documents_round_trip(seed in any::<u64>(), h in 0usize..4, r in 1usize..3) {
        let mut rng = gen::rng(seed);
        let t = gen::random_tree(&mut rng, h, r, 3);
        let text = json::tree_to_json(&t);
        let back = json::tree_from_json(&text).unwrap();
        prop_assert_eq!(json::tree_to_json(&back), text);
        prop_assert_eq!(back, t);
    }
}
