//! Maps `3^n -> 3^m` that preserve complete incompatibility, and the two
//! constructions that grow them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{input, Error, Result};
use crate::words::{enumerate_extensions, incompatible_from, words_of_length, Word, LEFT_K};

/// A total map from ternary words of length `n` to ternary words of length `m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncompatMap {
    n: usize,
    m: usize,
    // Indexed by the rank of the source word.
    table: Vec<Word>,
}

impl IncompatMap {
    pub fn new(n: usize, m: usize, table: BTreeMap<Word, Word>) -> Result<Self> {
        if m < n {
            return input(format!("target length {m} is shorter than source length {n}"));
        }
        let expected = 3usize.pow(n as u32);
        if table.len() != expected {
            return input(format!("table has {} entries, expected {expected}", table.len()));
        }
        let mut rows = Vec::with_capacity(expected);
        for (rank, (src, tgt)) in table.into_iter().enumerate() {
            if src.alphabet() != LEFT_K || tgt.alphabet() != LEFT_K {
                return input("map words must be ternary");
            }
            if src.len() != n {
                return input(format!("source {src} does not have length {n}"));
            }
            if tgt.len() != m {
                return input(format!("target {tgt} of {src} does not have length {m}"));
            }
            debug_assert_eq!(src.rank(), rank);
            rows.push(tgt);
        }
        Ok(IncompatMap { n, m, table: rows })
    }

    pub fn identity(n: usize) -> Self {
        IncompatMap { n, m: n, table: words_of_length(LEFT_K, n) }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Image of `mu`. Panics if `mu` is not a ternary word of length `n`.
    pub fn apply(&self, mu: &Word) -> &Word {
        assert_eq!(mu.len(), self.n, "source length mismatch");
        &self.table[mu.rank()]
    }

    pub fn get(&self, mu: &Word) -> Result<&Word> {
        if mu.len() != self.n || mu.alphabet() != LEFT_K {
            return input(format!("{mu} is not a ternary word of length {}", self.n));
        }
        Ok(&self.table[mu.rank()])
    }

    /// `(source, target)` pairs in lexicographic source order.
    pub fn entries(&self) -> impl Iterator<Item = (Word, &Word)> {
        self.table.iter().enumerate().map(|(rank, tgt)| (Word::unrank(LEFT_K, self.n, rank), tgt))
    }

    fn extends_sources(&self) -> bool {
        self.entries().all(|(src, tgt)| src.is_prefix_of_unchecked(tgt))
    }
}

/// Whether `phi` preserves incompatibility over `(rho0, rho1)`: it extends
/// every source, and each pair above the stems that is completely
/// incompatible over them is sent to a pair completely incompatible over
/// the sources.
pub fn verify(phi: &IncompatMap, rho0: &Word, rho1: &Word) -> Result<bool> {
    if rho0.len() != rho1.len() {
        return input(format!("stems {rho0} and {rho1} have different lengths"));
    }
    if rho0.len() > phi.n {
        return input(format!("stems are longer than the source length {}", phi.n));
    }
    if rho0.alphabet() != LEFT_K || rho1.alphabet() != LEFT_K {
        return input("stems must be ternary");
    }
    if !phi.extends_sources() {
        return Ok(false);
    }
    let lefts = enumerate_extensions(rho0, phi.n);
    let rights = enumerate_extensions(rho1, phi.n);
    let from = rho0.len();
    for mu0 in &lefts {
        for mu1 in &rights {
            if !incompatible_from(mu0.digits(), mu1.digits(), from) {
                continue;
            }
            if !incompatible_from(phi.apply(mu0).digits(), phi.apply(mu1).digits(), phi.n) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Extends `psi` to a map whose value at `rho` is `rho_hat`, shifting the
/// added tail by the first digit of each source.
pub fn ext1(rho: &Word, rho_hat: &Word, psi: &IncompatMap) -> Result<IncompatMap> {
    if rho.len() != psi.n || rho.alphabet() != LEFT_K {
        return input(format!("rho = {rho} is not a ternary word of length {}", psi.n));
    }
    if rho_hat.alphabet() != LEFT_K || rho_hat.len() < psi.m {
        return input(format!("rho_hat = {rho_hat} is shorter than the targets of psi ({})", psi.m));
    }
    let base = psi.apply(rho);
    if !base.is_prefix_of_unchecked(rho_hat) {
        return input(format!("psi({rho}) = {base} is not a prefix of {rho_hat}"));
    }
    if !verify(psi, &Word::empty(LEFT_K), &Word::empty(LEFT_K))? {
        return input("psi does not preserve incompatibility over the empty stems");
    }
    let tau = rho_hat.suffix_from(psi.m);
    if tau.is_empty() {
        return Ok(psi.clone());
    }
    let Some(lead) = rho.get(0) else {
        return input("a map on the empty word cannot grow and still preserve incompatibility");
    };
    let table = psi
        .table
        .iter()
        .map(|eta| {
            let a = eta.digits()[0];
            let shifted: Vec<u8> = tau.digits().iter().map(|&x| (x + a + 3 - lead) % 3).collect();
            eta.concat(&Word::from_digits_unchecked(LEFT_K, shifted))
        })
        .collect();
    let phi = IncompatMap { n: psi.n, m: rho_hat.len(), table };
    debug_assert_eq!(phi.apply(rho), rho_hat);
    Ok(phi)
}

type Evaluator<V> = Box<dyn Fn(&Word) -> BTreeSet<V> + Send + Sync>;

/// A total non-increasing map from ternary words (up to `depth`) to finite
/// sets drawn from `universe`.
pub struct MonotoneOracle<V> {
    universe: Vec<V>,
    depth: usize,
    evaluator: Evaluator<V>,
}

impl<V: fmt::Debug> fmt::Debug for MonotoneOracle<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MonotoneOracle").field("universe", &self.universe).field("depth", &self.depth).finish()
    }
}

impl<V: Ord + Clone + fmt::Debug + Send + Sync + 'static> MonotoneOracle<V> {
    pub fn new(
        universe: impl IntoIterator<Item = V>,
        depth: usize,
        evaluator: impl Fn(&Word) -> BTreeSet<V> + Send + Sync + 'static,
    ) -> Self {
        let mut universe: Vec<V> = universe.into_iter().collect();
        universe.sort();
        universe.dedup();
        MonotoneOracle { universe, depth, evaluator: Box::new(evaluator) }
    }

    /// Oracle given by an explicit table over every word up to `depth`.
    pub fn from_table(depth: usize, table: BTreeMap<Word, BTreeSet<V>>) -> Result<Self> {
        for len in 0..=depth {
            for w in words_of_length(LEFT_K, len) {
                if !table.contains_key(&w) {
                    return input(format!("oracle table has no entry for {w:?}"));
                }
            }
        }
        let universe: BTreeSet<V> = table.values().flatten().cloned().collect();
        Ok(MonotoneOracle::new(universe, depth, move |w| table.get(w).cloned().unwrap_or_default()))
    }

    pub fn universe(&self) -> &[V] {
        &self.universe
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn eval(&self, w: &Word) -> Result<BTreeSet<V>> {
        if w.len() > self.depth {
            return input(format!("{w} lies beyond the oracle depth {}", self.depth));
        }
        Ok((self.evaluator)(w))
    }

    /// Exhaustive check of the non-increasing property up to the depth.
    pub fn check_monotone(&self) -> Result<()> {
        for len in 0..self.depth {
            for w in words_of_length(LEFT_K, len) {
                let here = self.eval(&w)?;
                for d in 0..LEFT_K {
                    let child = w.child(d);
                    let there = self.eval(&child)?;
                    if !there.is_subset(&here) {
                        return input(format!("oracle grows from {w:?} to {child:?}"));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Builds a map on `3^n` along which every value of the oracle either drops
/// out at `phi(rho)` or persists on every extension within `budget`.
///
/// Requirements `(nu, rho)` are handled in lexicographic order; an unsettled
/// one is settled by growing `phi(rho)` to the shortest (then lex-first)
/// extension where `nu` is absent.
pub fn ext2<V>(oracle: &MonotoneOracle<V>, n: usize, budget: usize) -> Result<(usize, IncompatMap)>
where
    V: Ord + Clone + fmt::Debug + Send + Sync + 'static,
{
    if budget < n {
        return input(format!("budget {budget} is below n = {n}"));
    }
    if budget > oracle.depth {
        return input(format!("budget {budget} exceeds the oracle depth {}", oracle.depth));
    }
    let mut phi = IncompatMap::identity(n);
    for nu in &oracle.universe {
        for rho in words_of_length(LEFT_K, n) {
            let at = phi.apply(&rho).clone();
            if !oracle.eval(&at)?.contains(nu) {
                continue;
            }
            let Some(eta) = first_drop(oracle, &at, nu, budget)? else { continue };
            if n == 0 {
                return Err(Error::BudgetExhausted {
                    budget,
                    pending: format!("({nu:?}, {rho:?}): a map on the empty word cannot grow"),
                });
            }
            phi = ext1(&rho, &eta, &phi)?;
        }
    }
    Ok((phi.m, phi))
}

/// Shortest, then lex-first, extension of `at` within `budget` where `nu`
/// is absent.
fn first_drop<V>(oracle: &MonotoneOracle<V>, at: &Word, nu: &V, budget: usize) -> Result<Option<Word>>
where
    V: Ord + Clone + fmt::Debug + Send + Sync + 'static,
{
    for len in at.len() + 1..=budget {
        for eta in enumerate_extensions(at, len) {
            if !oracle.eval(&eta)?.contains(nu) {
                return Ok(Some(eta));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse(s, 3).unwrap()
    }

    fn map(n: usize, m: usize, pairs: &[(&str, &str)]) -> IncompatMap {
        IncompatMap::new(n, m, pairs.iter().map(|(a, b)| (w(a), w(b))).collect()).unwrap()
    }

    fn eps() -> Word {
        w("")
    }

    #[test]
    fn verify_examples() {
        assert!(verify(&IncompatMap::identity(1), &eps(), &eps()).unwrap());
        let doubled = map(1, 2, &[("0", "00"), ("1", "11"), ("2", "22")]);
        assert!(verify(&doubled, &eps(), &eps()).unwrap());
        let flat = map(1, 2, &[("0", "00"), ("1", "10"), ("2", "21")]);
        assert!(!verify(&flat, &eps(), &eps()).unwrap());
    }

    #[test]
    fn verify_rejects_non_extending_maps_and_bad_stems() {
        let moved = map(1, 1, &[("0", "1"), ("1", "0"), ("2", "2")]);
        assert!(!verify(&moved, &eps(), &eps()).unwrap());
        assert!(verify(&IncompatMap::identity(1), &w("0"), &eps()).is_err());
        assert!(verify(&IncompatMap::identity(1), &w("00"), &w("11")).is_err());
    }

    #[test]
    fn malformed_tables_are_rejected() {
        assert!(IncompatMap::new(1, 1, [(w("0"), w("0"))].into_iter().collect()).is_err());
        assert!(IncompatMap::new(1, 0, BTreeMap::new()).is_err());
        let short: BTreeMap<_, _> = [("0", "0"), ("1", "1"), ("2", "")].iter().map(|(a, b)| (w(a), w(b))).collect();
        assert!(IncompatMap::new(1, 1, short).is_err());
    }

    #[test]
    fn ext1_examples() {
        let id = IncompatMap::identity(1);
        let phi = ext1(&w("0"), &w("02"), &id).unwrap();
        assert_eq!(phi, map(1, 2, &[("0", "02"), ("1", "10"), ("2", "21")]));
        assert!(verify(&phi, &eps(), &eps()).unwrap());

        assert_eq!(ext1(&w("1"), &w("1"), &id).unwrap(), id);

        let phi = ext1(&w("1"), &w("11"), &id).unwrap();
        assert_eq!(phi, map(1, 2, &[("0", "00"), ("1", "11"), ("2", "22")]));
    }

    #[test]
    fn ext1_rejects_bad_input() {
        let id = IncompatMap::identity(1);
        assert!(ext1(&w("0"), &w("12"), &id).is_err());
        assert!(ext1(&w("00"), &w("002"), &id).is_err());
        let flat = map(1, 2, &[("0", "00"), ("1", "10"), ("2", "21")]);
        assert!(ext1(&w("0"), &w("001"), &flat).is_err());
        assert!(ext1(&eps(), &w("0"), &IncompatMap::identity(0)).is_err());
        assert_eq!(ext1(&eps(), &eps(), &IncompatMap::identity(0)).unwrap(), IncompatMap::identity(0));
    }

    #[test]
    fn ext2_constant_oracle_keeps_identity() {
        let oracle = MonotoneOracle::new([0u8, 1], 3, |_| BTreeSet::from([0u8, 1]));
        let (m, phi) = ext2(&oracle, 1, 3).unwrap();
        assert_eq!(m, 1);
        assert_eq!(phi, IncompatMap::identity(1));
    }

    #[test]
    fn ext2_vanishing_oracle() {
        let oracle = MonotoneOracle::new([0u8, 1], 3, |w| if w.is_empty() { BTreeSet::from([0u8, 1]) } else { BTreeSet::new() });
        oracle.check_monotone().unwrap();
        // The identity already lands where every value is gone.
        let (m, phi) = ext2(&oracle, 1, 3).unwrap();
        assert_eq!(m, 1);
        assert_eq!(phi, IncompatMap::identity(1));
        // At the empty word nothing can grow.
        assert!(matches!(ext2(&oracle, 0, 2), Err(Error::BudgetExhausted { .. })));
    }

    #[test]
    fn ext2_grows_where_values_drop() {
        // 0 disappears once a word has a 2 beyond position 0.
        let oracle = MonotoneOracle::new([0u8], 3, |w| {
            if w.digits().iter().skip(1).any(|&d| d == 2) {
                BTreeSet::new()
            } else {
                BTreeSet::from([0u8])
            }
        });
        oracle.check_monotone().unwrap();
        let (m, phi) = ext2(&oracle, 1, 3).unwrap();
        assert!(verify(&phi, &eps(), &eps()).unwrap());
        assert_eq!(m, 3);
        assert_eq!(phi.apply(&w("1")), &w("102"));
        for (_, tgt) in phi.entries() {
            let here = oracle.eval(tgt).unwrap();
            for len in tgt.len()..=3 {
                for ext in enumerate_extensions(tgt, len) {
                    assert!(here.is_subset(&oracle.eval(&ext).unwrap()), "{tgt:?} -> {ext:?}");
                }
            }
        }
    }

    #[test]
    fn ext2_budget_checks() {
        let oracle = MonotoneOracle::new([0u8], 2, |_| BTreeSet::from([0u8]));
        assert!(ext2(&oracle, 2, 1).is_err());
        assert!(ext2(&oracle, 1, 3).is_err());
    }

    #[test]
    fn non_monotone_oracle_is_detected() {
        let oracle = MonotoneOracle::new([0u8], 2, |w| if w.len() == 1 { BTreeSet::from([0u8]) } else { BTreeSet::new() });
        assert!(oracle.check_monotone().is_err());
    }
}
