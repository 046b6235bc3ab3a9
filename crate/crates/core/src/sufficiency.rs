//! Condition-tuples, sets of node pairs, and sufficiency at finite height.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::crosstree::CrossTree;
use crate::error::{input, Error, Result};
use crate::incmaps::{ext2, MonotoneOracle};
use crate::words::{enumerate_extensions, incompatible_from, Node, RightTuple, Word};

pub const DEFAULT_SUBTREE_CAP: u64 = 1_000_000;

/// Two stems with equal left lengths.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CondPair {
    pub stems: [Node; 2],
}

impl CondPair {
    pub fn new(first: Node, second: Node) -> Result<Self> {
        if first.left.len() != second.left.len() {
            return input(format!("stems {first:?} and {second:?} have different left lengths"));
        }
        if first.right.arity() != second.right.arity() {
            return input("stems have different arities");
        }
        Ok(CondPair { stems: [first, second] })
    }

    pub fn root(t: &CrossTree) -> Self {
        CondPair { stems: [t.root(), t.root()] }
    }

    pub fn rho(&self, i: usize) -> &Word {
        &self.stems[i].left
    }

    pub fn sigma(&self, i: usize) -> &RightTuple {
        &self.stems[i].right
    }

    pub fn left_len(&self) -> usize {
        self.stems[0].left.len()
    }

    /// Componentwise extension of `other`.
    pub fn extends(&self, other: &CondPair) -> bool {
        other.stems[0].is_prefix_of(&self.stems[0]) && other.stems[1].is_prefix_of(&self.stems[1])
    }

    /// Errors unless both stems lie in `t` with `t` left-full below each.
    pub fn check_on(&self, t: &CrossTree) -> Result<()> {
        for stem in &self.stems {
            if !t.leftfull(&stem.left, &stem.right)? {
                return input(format!("tree is not left-full below {stem:?}"));
            }
        }
        Ok(())
    }
}

type PairPredicate = Arc<dyn Fn(&Node, &Node) -> bool + Send + Sync>;

#[derive(Clone)]
enum Members {
    /// First node to the second nodes it pairs with.
    Extensional(BTreeMap<Node, BTreeSet<Node>>),
    Intensional(PairPredicate),
}

/// A set of node pairs, listed or given by a predicate.
#[derive(Clone)]
pub struct NodePairSet {
    members: Members,
    suffix_closed: bool,
}

impl fmt::Debug for NodePairSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.members {
            Members::Extensional(_) => f.debug_struct("NodePairSet").field("pairs", &self.pairs().unwrap().collect::<Vec<_>>()).finish(),
            Members::Intensional(_) => f.debug_struct("NodePairSet").field("pairs", &"<predicate>").finish(),
        }
    }
}

/// Pairs checked when spot-validating a predicate for suffix closure.
const INTENSIONAL_SAMPLE: usize = 20_000;

impl NodePairSet {
    pub fn extensional(pairs: impl IntoIterator<Item = (Node, Node)>, suffix_closed: bool) -> Self {
        let mut map: BTreeMap<Node, BTreeSet<Node>> = BTreeMap::new();
        for (a, b) in pairs {
            map.entry(a).or_default().insert(b);
        }
        NodePairSet { members: Members::Extensional(map), suffix_closed }
    }

    pub fn intensional(pred: impl Fn(&Node, &Node) -> bool + Send + Sync + 'static, suffix_closed: bool) -> Self {
        NodePairSet { members: Members::Intensional(Arc::new(pred)), suffix_closed }
    }

    pub fn all() -> Self {
        NodePairSet::intensional(|_, _| true, true)
    }

    pub fn empty() -> Self {
        NodePairSet::extensional([], true)
    }

    /// Every pair of nodes of `t` extending one of the `seeds` componentwise.
    pub fn up_closure_in(t: &CrossTree, seeds: &[(Node, Node)]) -> Self {
        let nodes = t.nodes();
        let mut pairs = BTreeSet::new();
        for (s0, s1) in seeds {
            let above0: Vec<&Node> = nodes.iter().filter(|n| s0.is_prefix_of(n)).collect();
            let above1: Vec<&Node> = nodes.iter().filter(|n| s1.is_prefix_of(n)).collect();
            for a in &above0 {
                for b in &above1 {
                    pairs.insert(((*a).clone(), (*b).clone()));
                }
            }
        }
        NodePairSet::extensional(pairs, true)
    }

    pub fn contains(&self, a: &Node, b: &Node) -> bool {
        match &self.members {
            Members::Extensional(s) => s.get(a).is_some_and(|bs| bs.contains(b)),
            Members::Intensional(p) => p(a, b),
        }
    }

    pub fn is_flagged_suffix_closed(&self) -> bool {
        self.suffix_closed
    }

    /// The listed pairs in order, for extensional sets.
    pub fn pairs(&self) -> Option<impl Iterator<Item = (&Node, &Node)> + '_> {
        match &self.members {
            Members::Extensional(s) => Some(s.iter().flat_map(|(a, bs)| bs.iter().map(move |b| (a, b)))),
            Members::Intensional(_) => None,
        }
    }

    /// Checks closure under immediate extensions inside `t`. Listed sets are
    /// checked in full; predicates on the first pairs of `t` in order.
    pub fn validate_suffix_closed(&self, t: &CrossTree) -> Result<()> {
        let check = |a: &Node, b: &Node| -> Result<()> {
            for a2 in t.successors(a) {
                if !self.contains(&a2, b) {
                    return input(format!("pair set is not suffix-closed: ({a:?}, {b:?}) is in, ({a2:?}, {b:?}) is not"));
                }
            }
            for b2 in t.successors(b) {
                if !self.contains(a, &b2) {
                    return input(format!("pair set is not suffix-closed: ({a:?}, {b:?}) is in, ({a:?}, {b2:?}) is not"));
                }
            }
            Ok(())
        };
        match &self.members {
            Members::Extensional(map) => {
                let succ: BTreeMap<Node, Vec<Node>> = t.nodes().into_iter().map(|n| {
                    let next = t.successors(&n);
                    (n, next)
                }).collect();
                for (a, bs) in map {
                    let Some(next_a) = succ.get(a) else { continue };
                    for b in bs {
                        let Some(next_b) = succ.get(b) else { continue };
                        if let Some(a2) = next_a.iter().find(|a2| !self.contains(a2, b)) {
                            return input(format!("pair set is not suffix-closed: ({a:?}, {b:?}) is in, ({a2:?}, {b:?}) is not"));
                        }
                        if let Some(b2) = next_b.iter().find(|b2| !bs.contains(b2)) {
                            return input(format!("pair set is not suffix-closed: ({a:?}, {b:?}) is in, ({a:?}, {b2:?}) is not"));
                        }
                    }
                }
            }
            Members::Intensional(_) => {
                let nodes = t.nodes();
                let sampled = nodes.iter().flat_map(|a| nodes.iter().map(move |b| (a, b))).take(INTENSIONAL_SAMPLE);
                for (a, b) in sampled {
                    if self.contains(a, b) {
                        check(a, b)?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Outcome of the sufficiency decision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SufficiencyVerdict {
    Sufficient { checked: u64 },
    /// The first subtree, in selection order, with no witness pair.
    Insufficient { subtree: CrossTree, checked: u64 },
}

impl SufficiencyVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, SufficiencyVerdict::Sufficient { .. })
    }
}

/// Whether `(a, b)` is a witness for `cp`: both extend their stems, the left
/// words have equal length and their suffixes differ everywhere.
pub fn is_witness(a: &Node, b: &Node, cp: &CondPair) -> bool {
    cp.stems[0].is_prefix_of(a)
        && cp.stems[1].is_prefix_of(b)
        && a.left.len() == b.left.len()
        && incompatible_from(a.left.digits(), b.left.digits(), cp.left_len())
}

fn pair_order(x: &(Node, Node), y: &(Node, Node)) -> Ordering {
    x.0.left.len()
        .cmp(&y.0.left.len())
        .then_with(|| x.0.shortlex_cmp(&y.0))
        .then_with(|| x.1.shortlex_cmp(&y.1))
}

/// Witness pairs of `a` among the nodes of `t`, in (length, lex) order.
fn witness_candidates(t: &CrossTree, a: &NodePairSet, cp: &CondPair) -> Vec<(Node, Node)> {
    let mut out: Vec<(Node, Node)> = match a.pairs() {
        Some(listed) => listed
            .filter(|(x, y)| is_witness(x, y, cp) && t.contains_node(x) && t.contains_node(y))
            .map(|(x, y)| (x.clone(), y.clone()))
            .collect(),
        None => {
            let nodes = t.nodes();
            let above0: Vec<&Node> = nodes.iter().filter(|n| cp.stems[0].is_prefix_of(n)).collect();
            let above1: Vec<&Node> = nodes.iter().filter(|n| cp.stems[1].is_prefix_of(n)).collect();
            let mut found = Vec::new();
            for x in &above0 {
                for y in &above1 {
                    if is_witness(x, y, cp) && a.contains(x, y) {
                        found.push(((*x).clone(), (*y).clone()));
                    }
                }
            }
            found
        }
    };
    out.sort_by(pair_order);
    out
}

/// One requirement of a minimal subtree: a full-length left word above a
/// stem, and the full-height right tuples that can serve it.
struct Requirement {
    left: Word,
    choices: Vec<RightTuple>,
}

fn requirements(t: &CrossTree, cp: &CondPair) -> Vec<Requirement> {
    let h = t.height();
    let mut keyed: BTreeMap<(Word, RightTuple), ()> = BTreeMap::new();
    for i in 0..2 {
        for mu in enumerate_extensions(cp.rho(i), h) {
            keyed.insert((mu, cp.sigma(i).clone()), ());
        }
    }
    keyed
        .into_keys()
        .map(|(mu, sigma)| {
            let choices = t
                .slice_ref(&mu)
                .map(|s| s.iter().filter(|tau| tau.len() == h && sigma.is_prefix_of_unchecked(tau)).cloned().collect())
                .unwrap_or_default();
            Requirement { left: mu, choices }
        })
        .collect()
}

/// Depth-first search over selections, one right tuple per requirement,
/// with a witness counter kept up to date incrementally.
struct Search<'a> {
    reqs: &'a [Requirement],
    // For every witness node: requirement index -> choices covering it.
    covers: Vec<Vec<Vec<bool>>>,
    // Witness candidates as indices into the node list.
    cands: Vec<Vec<usize>>,
    node_cands: Vec<Vec<usize>>,
    node_count: Vec<u32>,
    cand_count: Vec<usize>,
    covered: usize,
    selection: Vec<usize>,
    checked: u64,
    cap: u64,
}

impl Search<'_> {
    fn toggle(&mut self, j: usize, c: usize, add: bool) {
        for node in 0..self.covers.len() {
            if !self.covers[node][j][c] {
                continue;
            }
            if add {
                self.node_count[node] += 1;
                if self.node_count[node] == 1 {
                    for &k in &self.node_cands[node] {
                        self.cand_count[k] += 1;
                        if self.cand_count[k] == self.cands[k].len() {
                            self.covered += 1;
                        }
                    }
                }
            } else {
                self.node_count[node] -= 1;
                if self.node_count[node] == 0 {
                    for &k in &self.node_cands[node] {
                        if self.cand_count[k] == self.cands[k].len() {
                            self.covered -= 1;
                        }
                        self.cand_count[k] -= 1;
                    }
                }
            }
        }
    }

    /// `Ok(true)` when every completion of the current selection has a witness.
    fn run(&mut self, j: usize) -> Result<bool> {
        self.checked += 1;
        if self.checked > self.cap {
            return Err(Error::CapExceeded { what: "subtree checks", cap: self.cap });
        }
        if self.covered > 0 {
            return Ok(true);
        }
        if j == self.reqs.len() {
            return Ok(false);
        }
        for c in 0..self.reqs[j].choices.len() {
            self.toggle(j, c, true);
            self.selection.push(c);
            let ok = self.run(j + 1)?;
            if !ok {
                return Ok(false);
            }
            self.selection.pop();
            self.toggle(j, c, false);
        }
        Ok(true)
    }
}

/// Decides sufficiency of `a` over `cp` by running through the minimal
/// subtrees of `t` for which `cp` is a condition-tuple.
pub fn sufficiency_verdict(t: &CrossTree, a: &NodePairSet, cp: &CondPair, cap: u64) -> Result<SufficiencyVerdict> {
    cp.check_on(t)?;
    let reqs = requirements(t, cp);
    let cand_pairs = witness_candidates(t, a, cp);
    let mut nodes: Vec<Node> = Vec::new();
    let mut index: BTreeMap<Node, usize> = BTreeMap::new();
    let mut cands = Vec::new();
    for (x, y) in &cand_pairs {
        let mut ids = Vec::new();
        for n in [x, y] {
            let id = *index.entry(n.clone()).or_insert_with(|| {
                nodes.push(n.clone());
                nodes.len() - 1
            });
            if !ids.contains(&id) {
                ids.push(id);
            }
        }
        cands.push(ids);
    }
    let covers = nodes
        .iter()
        .map(|n| {
            reqs.iter()
                .map(|req| {
                    let left_ok = n.left.is_prefix_of_unchecked(&req.left);
                    req.choices.iter().map(|tau| left_ok && n.right.is_prefix_of_unchecked(tau)).collect()
                })
                .collect()
        })
        .collect();
    let mut node_cands = vec![Vec::new(); nodes.len()];
    for (k, ids) in cands.iter().enumerate() {
        for &id in ids {
            node_cands[id].push(k);
        }
    }
    let mut search = Search {
        reqs: &reqs,
        covers,
        cand_count: vec![0; cands.len()],
        cands,
        node_cands,
        node_count: vec![0; nodes.len()],
        covered: 0,
        selection: Vec::new(),
        checked: 0,
        cap,
    };
    if search.run(0)? {
        return Ok(SufficiencyVerdict::Sufficient { checked: search.checked });
    }
    let chosen = reqs
        .iter()
        .zip(&search.selection)
        .map(|(req, &c)| Node::new_unchecked(req.left.clone(), req.choices[c].clone()));
    let subtree = CrossTree::closure_with(t.r(), t.height(), t.alphabets(), chosen.chain([t.root()]))?;
    Ok(SufficiencyVerdict::Insufficient { subtree, checked: search.checked })
}

pub fn is_sufficient(t: &CrossTree, a: &NodePairSet, cp: &CondPair) -> Result<bool> {
    Ok(sufficiency_verdict(t, a, cp, DEFAULT_SUBTREE_CAP)?.holds())
}

/// Finds a condition-tuple in `a` extending `cp` whose left words are
/// completely incompatible over the old stems.
///
/// The right-tuple sets above the stems feed the map construction; the
/// full-height nodes it reaches span a subtree `S`, in which a witness pair
/// is located and lifted to full height.
pub fn extract(t: &CrossTree, a: &NodePairSet, cp: &CondPair) -> Result<CondPair> {
    extract_with_cap(t, a, cp, DEFAULT_SUBTREE_CAP)
}

pub fn extract_with_cap(t: &CrossTree, a: &NodePairSet, cp: &CondPair, cap: u64) -> Result<CondPair> {
    if !a.is_flagged_suffix_closed() {
        return input("pair set is not flagged suffix-closed");
    }
    cp.check_on(t)?;
    a.validate_suffix_closed(t)?;
    if !sufficiency_verdict(t, a, cp, cap)?.holds() {
        return input("pair set is not sufficient over the given condition-tuple");
    }

    let h = t.height();
    let n = h - cp.left_len();
    let slices = [stem_values(t, cp, 0, n), stem_values(t, cp, 1, n)];
    let table: BTreeMap<Word, BTreeSet<(usize, RightTuple)>> = (0..=n)
        .flat_map(|len| crate::words::words_of_length(crate::words::LEFT_K, len))
        .map(|tau| {
            let mut vals = BTreeSet::new();
            for ext in enumerate_extensions(&tau, n) {
                for (i, slice) in slices.iter().enumerate() {
                    for nu in slice.get(&ext).into_iter().flatten() {
                        vals.insert((i, nu.clone()));
                    }
                }
            }
            (tau, vals)
        })
        .collect();
    let oracle = MonotoneOracle::from_table(n, table)?;
    let (_, psi) = ext2(&oracle, n, n)?;

    let mut full: [Vec<Node>; 2] = [Vec::new(), Vec::new()];
    for tau in crate::words::words_of_length(crate::words::LEFT_K, n) {
        let image = psi.apply(&tau);
        for (i, part) in full.iter_mut().enumerate() {
            for (j, nu) in oracle.eval(image)? {
                if j == i {
                    part.push(Node::new_unchecked(cp.rho(i).concat(image), cp.sigma(i).concat(&nu)));
                }
            }
        }
    }
    let s = CrossTree::closure_with(t.r(), h, t.alphabets(), full.iter().flatten().cloned().chain([t.root()]))?;

    for (x, y) in witness_candidates(&s, a, cp) {
        if let Some(lifted) = lift(&x, &y, &full, cp) {
            debug_assert!(a.contains(&lifted.stems[0], &lifted.stems[1]));
            if !a.contains(&lifted.stems[0], &lifted.stems[1]) {
                return Err(Error::Internal(format!("lifted pair {lifted:?} left the pair set")));
            }
            return Ok(lifted);
        }
    }
    Err(Error::Internal(format!(
        "no liftable witness in the subtree spanned by the full-height nodes: {:?}",
        s.nodes()
    )))
}

/// `tau -> {nu : (rho_i tau, sigma_i nu) in t}` over suffixes `tau` of length `n`.
fn stem_values(t: &CrossTree, cp: &CondPair, i: usize, n: usize) -> BTreeMap<Word, Vec<RightTuple>> {
    let (rho, sigma) = (cp.rho(i), cp.sigma(i));
    let h = t.height();
    crate::words::words_of_length(crate::words::LEFT_K, n)
        .into_iter()
        .map(|tau| {
            let vals = t
                .slice_ref(&rho.concat(&tau))
                .map(|s| {
                    s.iter()
                        .filter(|full| full.len() == h && sigma.is_prefix_of_unchecked(full))
                        .map(|full| full.suffix_from(sigma.len()))
                        .collect()
                })
                .unwrap_or_default();
            (tau, vals)
        })
        .collect()
}

/// Lex-first full-height pair in `full[0] x full[1]` above `(x, y)` whose
/// left words stay completely incompatible over the stems.
fn lift(x: &Node, y: &Node, full: &[Vec<Node>; 2], cp: &CondPair) -> Option<CondPair> {
    let above = |i: usize, base: &Node| -> Vec<Node> {
        let mut v: Vec<Node> = full[i].iter().filter(|f| base.is_prefix_of(f)).cloned().collect();
        v.sort();
        v
    };
    let (ups0, ups1) = (above(0, x), above(1, y));
    let from = cp.left_len();
    for u in &ups0 {
        for v in &ups1 {
            if incompatible_from(u.left.digits(), v.left.digits(), from) {
                return Some(CondPair { stems: [u.clone(), v.clone()] });
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crosstree::ForbiddenSet;

    fn w(s: &str) -> Word {
        Word::parse(s, 3).unwrap()
    }

    fn t1(s: &str) -> RightTuple {
        RightTuple::parse(&[s], 2).unwrap()
    }

    fn n(l: &str, r: &str) -> Node {
        Node::new(w(l), t1(r)).unwrap()
    }

    #[test]
    fn all_pairs_on_the_full_tree() {
        let t = CrossTree::full(1, 1);
        let cp = CondPair::root(&t);
        assert!(is_sufficient(&t, &NodePairSet::all(), &cp).unwrap());
        let got = extract(&t, &NodePairSet::all(), &cp).unwrap();
        assert_eq!(got, CondPair::new(n("0", "0"), n("1", "0")).unwrap());
    }

    #[test]
    fn empty_set_is_not_sufficient() {
        let t = CrossTree::full(1, 1);
        let cp = CondPair::root(&t);
        let verdict = sufficiency_verdict(&t, &NodePairSet::empty(), &cp, DEFAULT_SUBTREE_CAP).unwrap();
        let SufficiencyVerdict::Insufficient { subtree, .. } = verdict else { panic!("expected a counterexample") };
        assert!(subtree.is_valid());
        assert!(subtree.leftfull(&w(""), &t1("")).unwrap());
        assert!(extract(&t, &NodePairSet::empty(), &cp).is_err());
    }

    #[test]
    fn pairs_both_starting_with_zero_are_not_sufficient() {
        let t = CrossTree::full(1, 1);
        let cp = CondPair::root(&t);
        let zeros = NodePairSet::intensional(|a, b| a.left.get(0) == Some(0) && b.left.get(0) == Some(0), true);
        assert!(!is_sufficient(&t, &zeros, &cp).unwrap());
    }

    #[test]
    fn right_parts_starting_with_one() {
        // Every left word carries the right word "1".
        let t = CrossTree::closure_of(1, 1, [n("0", "1"), n("1", "1"), n("2", "1"), n("0", "0")]).unwrap();
        let cp = CondPair::root(&t);
        let ones = NodePairSet::intensional(|a, b| a.right.words()[0].get(0) == Some(1) && b.right.words()[0].get(0) == Some(1), true);
        // A subtree may use "0" above "0", but "1" and "2" still give a witness.
        assert!(is_sufficient(&t, &ones, &cp).unwrap());
        let got = extract(&t, &ones, &cp).unwrap();
        assert_eq!(got.sigma(0), &t1("1"));
        assert_eq!(got.sigma(1), &t1("1"));
        assert!(is_witness(&got.stems[0], &got.stems[1], &cp));
    }

    #[test]
    fn full_height_stems_in_the_set_come_back() {
        let t = CrossTree::full(1, 1);
        let cp = CondPair::new(n("0", "1"), n("2", "0")).unwrap();
        let a = NodePairSet::up_closure_in(&t, &[(n("0", "1"), n("2", "0"))]);
        assert_eq!(extract(&t, &a, &cp).unwrap(), cp);
    }

    #[test]
    fn stems_must_be_left_full() {
        let t = CrossTree::from_forbidden(&ForbiddenSet::new([(w("2"), t1(""))]), 1, 1).unwrap();
        let cp = CondPair::root(&t);
        assert!(matches!(is_sufficient(&t, &NodePairSet::all(), &cp), Err(Error::Input(_))));
    }

    #[test]
    fn suffix_closure_validation() {
        let t = CrossTree::full(1, 1);
        let not_closed = NodePairSet::extensional([(t.root(), t.root())], true);
        assert!(not_closed.validate_suffix_closed(&t).is_err());
        assert!(extract(&t, &not_closed, &CondPair::root(&t)).is_err());
        let closed = NodePairSet::up_closure_in(&t, &[(t.root(), t.root())]);
        assert!(closed.validate_suffix_closed(&t).is_ok());
        let unflagged = NodePairSet::extensional(closed.pairs().unwrap().map(|(a, b)| (a.clone(), b.clone())), false);
        assert!(extract(&t, &unflagged, &CondPair::root(&t)).is_err());
    }

    #[test]
    fn cap_is_enforced() {
        let t = CrossTree::full(1, 2);
        let cp = CondPair::root(&t);
        let result = sufficiency_verdict(&t, &NodePairSet::empty(), &cp, 5);
        assert!(matches!(result, Err(Error::CapExceeded { .. })));
    }
}
