use std::collections::BTreeSet;

use crosswork::approx::{diagonalize, hyperimmune_witness, limit, normalize, validate_table, DisjointArray};
use crosswork::gammaspace::{
    classify_variation, compatible, interpret, is_one_step_variation, leq, one_step_variations, over, validate_path, FinTree, GammaElem,
    Variation,
};
use crosswork::{gen, json, Word};
use proptest::prelude::*;
use rand::Rng;

fn chain(seed: u64, m: usize, n: u32) -> [GammaElem; 3] {
    let mut rng = gen::rng(seed);
    let a = gen::random_gamma(&mut rng, m, n);
    let b = gen::random_extension(&mut rng, &a, n, 2);
    let c = gen::random_extension(&mut rng, &b, n, 2);
    [a, b, c]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 96, ..ProptestConfig::default() })]

    #[test]
    fn extensions_are_valid_and_above(seed in any::<u64>(), m in 0usize..3, n in 0u32..3) {
        let [a, b, c] = chain(seed, m, n);
        for g in [&a, &b, &c] {
            prop_assert!(validate_path(g).is_empty(), "{:?}", validate_path(g));
            prop_assert!(!interpret(g).is_empty());
        }
        prop_assert!(leq(&a, &b).unwrap() && leq(&b, &c).unwrap());
        prop_assert!(leq(&a, &c).unwrap());
    }

    #[test]
    fn order_is_reflexive_and_antisymmetric(s1 in any::<u64>(), s2 in any::<u64>(), m in 0usize..3) {
        let [a, b, _] = chain(s1, m, 0);
        let [x, _, _] = chain(s2, m, 0);
        for (p, q) in [(&a, &b), (&a, &x), (&b, &x)] {
            prop_assert!(leq(p, p).unwrap());
            if leq(p, q).unwrap() && leq(q, p).unwrap() {
                prop_assert_eq!(p, q);
            }
        }
        prop_assert!(leq(&GammaElem::zeta(m), &x).unwrap());
        if m > 0 {
            prop_assert!(leq(&a, &GammaElem::zeta(m - 1)).is_err());
        }
    }

    #[test]
    fn growing_over_n_stays_over_n(seed in any::<u64>(), m in 0usize..3, n in 0u32..4) {
        let mut rng = gen::rng(seed);
        let g = gen::random_extension(&mut rng, &GammaElem::zeta(m), n, 4);
        prop_assert!(over(&g, n));
        if m == 0 {
            // below an element over n, level-0 maps only lose support
            let GammaElem::Base(b) = &g else { unreachable!() };
            for x in b.support() {
                prop_assert!(x > n);
            }
        }
    }

    #[test]
    fn gamma_documents_round_trip(seed in any::<u64>(), m in 0usize..3) {
        let [a, _, c] = chain(seed, m, 1);
        for g in [a, c] {
            let text = json::to_canonical(&json::gamma_to_doc(&g));
            prop_assert_eq!(json::gamma_from_json(&text).unwrap(), g);
        }
    }

    #[test]
    fn one_step_variations_are_classified(seed in any::<u64>(), bound in 1u32..3) {
        let mut rng = gen::rng(seed);
        let mut t = FinTree::singleton();
        for _ in 0..rng.gen_range(0..4) {
            let vs = one_step_variations(&t, bound);
            if vs.is_empty() {
                break;
            }
            t = vs[rng.gen_range(0..vs.len())].clone();
        }
        let vs = one_step_variations(&t, bound);
        let distinct: BTreeSet<_> = vs.iter().map(|v| v.nodes().clone()).collect();
        prop_assert_eq!(distinct.len(), vs.len());
        for v in &vs {
            prop_assert!(is_one_step_variation(&t, v));
            prop_assert_ne!(classify_variation(&t, v), Variation::None);
            prop_assert!(v.nodes().contains(&Vec::new()));
        }
    }

    #[test]
    fn normalize_always_validates(seed in any::<u64>(), m in 0usize..2, valid in any::<bool>()) {
        let mut rng = gen::rng(seed);
        let xi = gen::random_stream(&mut rng, m, 4, 3, valid);
        let t = normalize(&xi, m);
        prop_assert!(validate_table(&t).is_empty(), "{:?}", validate_table(&t));
        if valid {
            for n in 0..xi.rows.len() {
                if let Some(last) = xi.row_final(n) {
                    prop_assert_eq!(&limit(&t, n).unwrap(), last);
                }
            }
        }
    }

    #[test]
    fn diagonalized_prefix_is_compatible(seed in any::<u64>(), count in 1usize..5) {
        let mut rng = gen::rng(seed);
        let tables: Vec<_> = (0..count).map(|_| {
            let m = rng.gen_range(0..3);
            gen::random_table(&mut rng, m, 24, 3)
        }).collect();
        let (prefix, cert) = diagonalize(&tables).unwrap();
        prop_assert_eq!(cert.entries.len(), count);
        for e in &cert.entries {
            prop_assert!(compatible(&prefix, &interpret(&limit(&tables[e.table], e.row).unwrap())));
        }
    }

    #[test]
    fn hyperimmune_witness_is_least(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let arr: DisjointArray = gen::random_disjoint_array(&mut rng, 5);
        let len = rng.gen_range(0..14);
        let digits: Vec<u8> = (0..len).map(|_| rng.gen_range(0..3)).collect();
        let f = Word::new(3, digits.clone()).unwrap();
        let hit = |n: usize| arr.rows[n].iter().enumerate().all(|(j, set)| set.iter().all(|&x| digits.get(x as usize) == Some(&(j as u8))));
        let expected = (0..arr.rows.len()).find(|&n| hit(n));
        prop_assert_eq!(hyperimmune_witness(&f, &arr), expected);
    }
}
