mod common;

use std::collections::BTreeSet;

use common::*;
use crosswork::sufficiency::{extract, sufficiency_verdict, CondPair, NodePairSet, SufficiencyVerdict, DEFAULT_SUBTREE_CAP};
use crosswork::{gen, CrossTree, Node};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

/// Every way of picking, for each full-length left word above a stem, one
/// full-height node of `t` above that stem.
fn selections(t: &CrossTree, cp: &CondPair) -> Vec<Vec<Node>> {
    let h = t.height();
    let fulls: Vec<Node> = t.nodes().into_iter().filter(|n| n.left.len() == h && n.right.len() == h).collect();
    let mut groups: Vec<Vec<Node>> = Vec::new();
    let mut seen = BTreeSet::new();
    for stem in &cp.stems {
        for tail in strings(3, h - stem.left.len()) {
            let mut left = stem.left.digits().to_vec();
            left.extend(tail);
            if !seen.insert((left.clone(), stem.right.clone())) {
                continue;
            }
            let group: Vec<Node> = fulls.iter().filter(|n| n.left.digits() == left && node_extends(n, stem)).cloned().collect();
            groups.push(group);
        }
    }
    let mut out = vec![Vec::new()];
    for g in groups {
        out = out.into_iter().flat_map(|pick| g.iter().map(move |n| [pick.clone(), vec![n.clone()]].concat())).collect();
    }
    out
}

fn below_some(n: &Node, picked: &[Node]) -> bool {
    picked.iter().any(|p| node_extends(p, n))
}

fn brute_witness(x: &Node, y: &Node, cp: &CondPair) -> bool {
    node_extends(x, &cp.stems[0])
        && node_extends(y, &cp.stems[1])
        && x.left.len() == y.left.len()
        && differ_from(x.left.digits(), y.left.digits(), cp.left_len())
}

/// Every selection spans a subtree holding a witness pair from `pairs`.
fn brute_sufficient(t: &CrossTree, pairs: &[(Node, Node)], cp: &CondPair) -> bool {
    selections(t, cp)
        .iter()
        .all(|picked| pairs.iter().any(|(x, y)| brute_witness(x, y, cp) && below_some(x, picked) && below_some(y, picked)))
}

fn random_pairs(rng: &mut gen::SweepRng, t: &CrossTree, density: f64) -> Vec<(Node, Node)> {
    let nodes = t.nodes();
    let mut out = Vec::new();
    for a in &nodes {
        for b in &nodes {
            if rng.gen_bool(density) {
                out.push((a.clone(), b.clone()));
            }
        }
    }
    out
}

#[test]
fn verdict_matches_subtree_oracle_at_height_one() {
    let mut rng = gen::rng(0x5F);
    let mut seen = [0usize; 2];
    for t in gen::all_leftfull_height_one() {
        let cp = CondPair::root(&t);
        for density in [0.0, 0.02, 0.05, 0.1, 0.3] {
            for _ in 0..6 {
                let pairs = random_pairs(&mut rng, &t, density);
                let a = NodePairSet::extensional(pairs.clone(), false);
                let verdict = sufficiency_verdict(&t, &a, &cp, DEFAULT_SUBTREE_CAP).unwrap();
                assert_eq!(verdict.holds(), brute_sufficient(&t, &pairs, &cp), "{t:?} {pairs:?}");
                seen[usize::from(verdict.holds())] += 1;
                if let SufficiencyVerdict::Insufficient { subtree, .. } = verdict {
                    let inside = subtree.nodes();
                    assert!(!pairs.iter().any(|(x, y)| brute_witness(x, y, &cp) && inside.contains(x) && inside.contains(y)));
                }
            }
        }
    }
    assert!(seen[0] > 0 && seen[1] > 0, "{seen:?}");
}

#[test]
fn listed_and_predicate_sets_agree() {
    let mut rng = gen::rng(0x60);
    for t in gen::all_leftfull_height_one().iter().take(12) {
        let cp = CondPair::root(t);
        let pairs: BTreeSet<(Node, Node)> = random_pairs(&mut rng, t, 0.08).into_iter().collect();
        let listed = NodePairSet::extensional(pairs.clone(), false);
        let pred = NodePairSet::intensional(move |a, b| pairs.contains(&(a.clone(), b.clone())), false);
        let v1 = sufficiency_verdict(t, &listed, &cp, DEFAULT_SUBTREE_CAP).unwrap();
        let v2 = sufficiency_verdict(t, &pred, &cp, DEFAULT_SUBTREE_CAP).unwrap();
        assert_eq!(v1.holds(), v2.holds());
    }
}

#[test]
fn all_pairs_are_sufficient_and_none_are_not() {
    for t in gen::all_leftfull_height_one() {
        let cp = CondPair::root(&t);
        assert!(sufficiency_verdict(&t, &NodePairSet::all(), &cp, DEFAULT_SUBTREE_CAP).unwrap().holds());
        assert!(!sufficiency_verdict(&t, &NodePairSet::empty(), &cp, DEFAULT_SUBTREE_CAP).unwrap().holds());
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn extraction_lands_in_the_set(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let t = gen::random_leftfull(&mut rng, 2, 1);
        let cp = CondPair::root(&t);
        let tuples = condition_tuples(&t);
        let seed_pair = tuples.choose(&mut rng).unwrap().clone();
        let a = NodePairSet::up_closure_in(&t, &[seed_pair]);
        if sufficiency_verdict(&t, &a, &cp, DEFAULT_SUBTREE_CAP).unwrap().holds() {
            let found = extract(&t, &a, &cp).unwrap();
            let [x, y] = &found.stems;
            prop_assert!(a.contains(x, y));
            prop_assert!(brute_witness(x, y, &cp));
            prop_assert!(brute_leftfull(&t, &x.left, &x.right) && brute_leftfull(&t, &y.left, &y.right));
        } else {
            prop_assert!(extract(&t, &a, &cp).is_err());
        }
    }

    #[test]
    fn enlarging_a_set_keeps_it_sufficient(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let trees = gen::all_leftfull_height_one();
        let t = trees.choose(&mut rng).unwrap();
        let cp = CondPair::root(t);
        let small = random_pairs(&mut rng, t, 0.1);
        let mut big = small.clone();
        big.extend(random_pairs(&mut rng, t, 0.1));
        let vs = sufficiency_verdict(t, &NodePairSet::extensional(small, false), &cp, DEFAULT_SUBTREE_CAP).unwrap();
        let vb = sufficiency_verdict(t, &NodePairSet::extensional(big, false), &cp, DEFAULT_SUBTREE_CAP).unwrap();
        prop_assert!(!vs.holds() || vb.holds());
    }
}
