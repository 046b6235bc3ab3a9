mod common;

use std::collections::BTreeMap;

use common::*;
use crosswork::incmaps::{ext1, verify, IncompatMap};
use crosswork::words::words_of_length;
use crosswork::{gen, json, Word};
use proptest::prelude::*;
use rand::Rng;

/// A random map on `3^n` whose targets usually extend their sources.
fn random_map(rng: &mut gen::SweepRng, n: usize, m: usize) -> IncompatMap {
    let table: BTreeMap<Word, Word> = words_of_length(3, n)
        .into_iter()
        .map(|src| {
            let mut digits: Vec<u8> = (0..m).map(|_| rng.gen_range(0..3)).collect();
            if rng.gen_bool(0.9) {
                digits[..n].copy_from_slice(src.digits());
            }
            (src, Word::new(3, digits).unwrap())
        })
        .collect();
    IncompatMap::new(n, m, table).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, ..ProptestConfig::default() })]

    #[test]
    fn verify_matches_definition(seed in any::<u64>(), n in 0usize..3, extra in 0usize..3) {
        let mut rng = gen::rng(seed);
        let phi = random_map(&mut rng, n, n + extra);
        let stem = rng.gen_range(0..=n);
        let rho0: Vec<u8> = (0..stem).map(|_| rng.gen_range(0..3)).collect();
        let rho1: Vec<u8> = (0..stem).map(|_| rng.gen_range(0..3)).collect();
        let got = verify(&phi, &Word::new(3, rho0.clone()).unwrap(), &Word::new(3, rho1.clone()).unwrap()).unwrap();
        prop_assert_eq!(got, brute_verify(&phi, &rho0, &rho1));
    }

    #[test]
    fn grown_identity_still_preserves(seed in any::<u64>(), n in 1usize..4, extra in 0usize..3) {
        let mut rng = gen::rng(seed);
        let rho = Word::new(3, (0..n).map(|_| rng.gen_range(0..3)).collect()).unwrap();
        let tail = Word::new(3, (0..extra).map(|_| rng.gen_range(0..3)).collect()).unwrap();
        let rho_hat = rho.concat(&tail);
        let phi = ext1(&rho, &rho_hat, &IncompatMap::identity(n)).unwrap();
        prop_assert_eq!(phi.apply(&rho), &rho_hat);
        prop_assert!(brute_verify(&phi, &[], &[]));
        prop_assert_eq!(json::map_from_json(&json::map_to_json(&phi)).unwrap(), phi);
    }
}

#[test]
fn identity_preserves_over_every_stem_pair() {
    for n in 0..3 {
        let id = IncompatMap::identity(n);
        for len in 0..=n {
            for a in words_of_length(3, len) {
                for b in words_of_length(3, len) {
                    assert!(verify(&id, &a, &b).unwrap());
                }
            }
        }
    }
}

#[test]
fn stems_of_different_lengths_are_rejected() {
    let id = IncompatMap::identity(2);
    assert!(verify(&id, &Word::parse("0", 3).unwrap(), &Word::parse("", 3).unwrap()).is_err());
    assert!(verify(&id, &Word::parse("000", 3).unwrap(), &Word::parse("111", 3).unwrap()).is_err());
}
