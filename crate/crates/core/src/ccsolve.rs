//! Finite simulation of the construction of a cross-constraint solution:
//! a descending sequence of condition-tuples whose left words split apart
//! while the right words keep meeting, with restarts on excluded components.

use std::collections::{BTreeMap, BTreeSet};

use crate::crosstree::CrossTree;
use crate::error::{input, Error, Result};
use crate::sufficiency::CondPair;
use crate::words::{agreement_positions, incompatible_from, words_of_length, Node, RightTuple, Word};

/// Right tuples below which the tree is left-full, per left word, in
/// (length, lex) order.
#[derive(Debug, Clone)]
pub struct LeftfullIndex {
    height: usize,
    by_left: BTreeMap<Word, Vec<RightTuple>>,
}

impl LeftfullIndex {
    pub fn new(t: &CrossTree) -> Self {
        let mut by_left = BTreeMap::new();
        for left in t.left_words() {
            let mut good: Vec<RightTuple> = t
                .slice_ref(left)
                .into_iter()
                .flatten()
                .filter(|sigma| t.leftfull_unchecked(left, sigma))
                .cloned()
                .collect();
            good.sort_by(RightTuple::shortlex_cmp);
            if !good.is_empty() {
                by_left.insert(left.clone(), good);
            }
        }
        LeftfullIndex { height: t.height(), by_left }
    }

    pub fn contains(&self, rho: &Word, sigma: &RightTuple) -> bool {
        self.by_left.get(rho).is_some_and(|v| v.contains(sigma))
    }

    /// Left-full extensions of `sigma` above `rho`, shortest first.
    fn above<'a>(&'a self, rho: &Word, sigma: &'a RightTuple) -> impl Iterator<Item = &'a RightTuple> {
        self.by_left.get(rho).into_iter().flatten().filter(move |t| sigma.is_prefix_of_unchecked(t))
    }
}

/// Whether the right words at component `s` agree somewhere past both old
/// stems.
fn agrees_at(s: usize, new: [&RightTuple; 2], old_lens: [usize; 2]) -> bool {
    let (a, b) = (new[0].component(s).digits(), new[1].component(s).digits());
    let from = old_lens[0].max(old_lens[1]);
    let to = a.len().min(b.len());
    (from..to).any(|p| a[p] == b[p])
}

/// Pairs of left words extending the stems by `extra` digits, with the
/// added digits differing everywhere, in lex order.
fn split_extensions(rho0: &Word, rho1: &Word, extra: usize) -> Vec<(Word, Word)> {
    let tails = words_of_length(3, extra);
    let mut out = Vec::new();
    for u in &tails {
        for v in &tails {
            if incompatible_from(u.digits(), v.digits(), 0) {
                out.push((rho0.concat(u), rho1.concat(v)));
            }
        }
    }
    out
}

/// Every extension condition-tuple of `cp` whose left words grow by
/// exactly `extra` digits, in search order; `visit` returns `true` to stop.
fn for_each_extension(
    idx: &LeftfullIndex,
    cp: &CondPair,
    extra: usize,
    mut visit: impl FnMut(CondPair) -> bool,
) -> bool {
    for (r0, r1) in split_extensions(cp.rho(0), cp.rho(1), extra) {
        let ups1: Vec<&RightTuple> = idx.above(&r1, cp.sigma(1)).collect();
        if ups1.is_empty() {
            continue;
        }
        for s0 in idx.above(&r0, cp.sigma(0)) {
            for s1 in &ups1 {
                let next = CondPair {
                    stems: [Node::new_unchecked(r0.clone(), s0.clone()), Node::new_unchecked(r1.clone(), (*s1).clone())],
                };
                if visit(next) {
                    return true;
                }
            }
        }
    }
    false
}

fn old_lens(cp: &CondPair) -> [usize; 2] {
    [cp.sigma(0).len(), cp.sigma(1).len()]
}

/// Components, among `comps`, for which no extension of `cp` (of any
/// length, including the trivial one) has agreeing right words.
fn excluded_among(idx: &LeftfullIndex, cp: &CondPair, comps: &[usize]) -> BTreeSet<usize> {
    let mut open: BTreeSet<usize> = comps.iter().copied().collect();
    let lens = old_lens(cp);
    for extra in 0..=idx.height - cp.left_len() {
        for_each_extension(idx, cp, extra, |next| {
            open.retain(|&s| !agrees_at(s, [next.sigma(0), next.sigma(1)], lens));
            open.is_empty()
        });
        if open.is_empty() {
            break;
        }
    }
    open
}

fn check_condition(t: &CrossTree, cp: &CondPair) -> Result<()> {
    if cp.sigma(0).arity() != t.r() {
        return input(format!("condition arity {} differs from the tree arity {}", cp.sigma(0).arity(), t.r()));
    }
    cp.check_on(t)
}

/// Whether every extension condition-tuple of `cp` keeps the right words
/// at component `s` completely incompatible over the current ones.
pub fn detect_excluded(t: &CrossTree, cp: &CondPair, s: usize) -> Result<bool> {
    check_condition(t, cp)?;
    if s >= t.r() {
        return input(format!("component {s} out of range for r = {}", t.r()));
    }
    let idx = LeftfullIndex::new(t);
    Ok(!excluded_among(&idx, cp, &[s]).is_empty())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepOutcome {
    /// Every component not excluded agrees somewhere in the new part.
    Extended(CondPair),
    /// The listed components are excluded by the current condition.
    Stuck(BTreeSet<usize>),
    /// No extension serves all components jointly although each one alone
    /// can be served. The extension taken keeps the unserved ones reachable
    /// when possible, then serves the most.
    Partial { next: CondPair, satisfied: BTreeSet<usize> },
}

/// (viable, pending served, served), the next condition, and who it serves.
type Scored = ((bool, usize, usize), CondPair, BTreeSet<usize>);

fn step(idx: &LeftfullIndex, cp: &CondPair, required: &[usize], pending: &BTreeSet<usize>) -> Result<StepOutcome> {
    if cp.left_len() >= idx.height {
        return input("condition is already at full height");
    }
    let lens = old_lens(cp);
    let mut found = None;
    let mut best: Option<Scored> = None;
    for extra in 1..=idx.height - cp.left_len() {
        let done = for_each_extension(idx, cp, extra, |next| {
            let satisfied: BTreeSet<usize> =
                required.iter().copied().filter(|&s| agrees_at(s, [next.sigma(0), next.sigma(1)], lens)).collect();
            if satisfied.len() == required.len() {
                found = Some(next);
                return true;
            }
            let unmet: Vec<usize> = pending.iter().copied().filter(|s| !satisfied.contains(s)).collect();
            let viable = excluded_among(idx, &next, &unmet).is_empty();
            let score = (viable, satisfied.intersection(pending).count(), satisfied.len());
            if best.as_ref().is_none_or(|(b, _, _)| score > *b) {
                best = Some((score, next, satisfied));
            }
            false
        });
        if done {
            break;
        }
    }
    if let Some(next) = found {
        return Ok(StepOutcome::Extended(next));
    }
    let stuck = excluded_among(idx, cp, required);
    if !stuck.is_empty() {
        return Ok(StepOutcome::Stuck(stuck));
    }
    match best {
        Some((_, next, satisfied)) => Ok(StepOutcome::Partial { next, satisfied }),
        None => Err(Error::Internal(format!("no extension of {cp:?} below full height despite left-fullness"))),
    }
}

/// One step of the construction from `cp`, ignoring the `excluded` components.
pub fn extend_step(t: &CrossTree, cp: &CondPair, excluded: &BTreeSet<usize>) -> Result<StepOutcome> {
    check_condition(t, cp)?;
    let required: Vec<usize> = (0..t.r()).filter(|s| !excluded.contains(s)).collect();
    let pending = required.iter().copied().collect();
    step(&LeftfullIndex::new(t), cp, &required, &pending)
}

/// Where the construction restarted and what it excluded there.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Restart {
    /// Index into the trace of the restarted condition.
    pub at: usize,
    pub excluded: BTreeSet<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    /// Full-height nodes.
    pub pair: [Node; 2],
    /// Per component, the positions where the two right words agree.
    pub agreement: Vec<BTreeSet<usize>>,
    pub excluded: BTreeSet<usize>,
    /// Excluded components still unserved when the last condition of the
    /// trace reached full height. No completion of that condition serves
    /// one of them together with all of `completed`.
    pub exhausted: BTreeSet<usize>,
    /// Components the full-height completion of the last condition served.
    pub completed: BTreeSet<usize>,
    pub trace: Vec<CondPair>,
    pub restarts: Vec<Restart>,
    /// The condition the final run started from.
    pub base: CondPair,
}

impl Solution {
    fn build(pair: [Node; 2], excluded: BTreeSet<usize>, trace: Vec<CondPair>, restarts: Vec<Restart>, base: CondPair) -> Self {
        let r = pair[0].right.arity();
        let agreement = (0..r)
            .map(|s| agreement_positions(pair[0].right.component(s), pair[1].right.component(s)).expect("equal lengths"))
            .collect();
        Solution { pair, agreement, excluded, exhausted: BTreeSet::new(), completed: BTreeSet::new(), trace, restarts, base }
    }

    /// Violations of the solution invariants against `t`; empty when sound.
    pub fn violations(&self, t: &CrossTree) -> Vec<String> {
        let mut out = Vec::new();
        let h = t.height();
        for node in &self.pair {
            if node.left.len() != h || node.right.len() != h || !t.contains_node(node) {
                out.push(format!("{node:?} is not a full-height node of the tree"));
            }
        }
        if !self.base.stems[0].is_prefix_of(&self.pair[0]) || !self.base.stems[1].is_prefix_of(&self.pair[1]) {
            out.push("solution does not extend its base condition".into());
        } else if !incompatible_from(self.pair[0].left.digits(), self.pair[1].left.digits(), self.base.left_len()) {
            out.push("left words are not completely incompatible over the base condition".into());
        }
        let from = self.base.sigma(0).len().max(self.base.sigma(1).len());
        for s in 0..t.r() {
            if !self.excluded.contains(&s) && !self.agreement[s].iter().any(|&p| p >= from) {
                out.push(format!("component {s} is not excluded but has no agreement past position {from}"));
            }
        }
        if !self.exhausted.is_subset(&self.excluded) {
            out.push("exhausted components are not all excluded".into());
        }
        if let Some(last) = self.trace.last() {
            let lens = old_lens(last);
            for &s in &self.completed {
                if !agrees_at(s, [&self.pair[0].right, &self.pair[1].right], lens) {
                    out.push(format!("component {s} is marked completed but does not agree past the last condition"));
                }
            }
            let (f0, f1) = completions(t, last);
            for &s in &self.exhausted {
                let mut want = self.completed.clone();
                want.insert(s);
                let joint = f0.iter().any(|a| f1.iter().any(|b| want.iter().all(|&c| agrees_at(c, [a, b], lens))));
                if joint {
                    out.push(format!("component {s} could have been completed together with {:?}", self.completed));
                }
            }
        }
        if self.restarts.len() > t.r() {
            out.push(format!("{} restarts exceed r = {}", self.restarts.len(), t.r()));
        }
        out
    }
}

/// Full-height right tuples above each stem of a full-height left condition.
fn completions(t: &CrossTree, cp: &CondPair) -> (Vec<RightTuple>, Vec<RightTuple>) {
    let h = t.height();
    let fulls = |i: usize| -> Vec<RightTuple> {
        t.slice_ref(cp.rho(i))
            .into_iter()
            .flatten()
            .filter(|tau| tau.len() == h && cp.sigma(i).is_prefix_of_unchecked(tau))
            .cloned()
            .collect()
    };
    (fulls(0), fulls(1))
}

/// Full-height completion of `cp` maximising the number of pending
/// components that agree, lex-first among the best.
fn complete(t: &CrossTree, cp: &CondPair, pending: &BTreeSet<usize>) -> Result<[Node; 2]> {
    let (f0, f1) = completions(t, cp);
    let lens = old_lens(cp);
    let mut best: Option<(usize, (&RightTuple, &RightTuple))> = None;
    for a in &f0 {
        for b in &f1 {
            let score = pending.iter().filter(|&&s| agrees_at(s, [a, b], lens)).count();
            if best.is_none_or(|(s, _)| score > s) {
                best = Some((score, (a, b)));
            }
        }
    }
    let (_, (a, b)) = best.ok_or_else(|| Error::Internal(format!("no full-height completion of {cp:?}")))?;
    Ok([Node::new_unchecked(cp.rho(0).clone(), a.clone()), Node::new_unchecked(cp.rho(1).clone(), b.clone())])
}

/// Runs the construction from the root pair to full height.
pub fn solve(t: &CrossTree) -> Result<Solution> {
    t.alphabets().require_asymmetry()?;
    if t.height() == 0 {
        return input("height 0 leaves no room to extend the root pair");
    }
    if !t.contains_node(&t.root()) || !t.leftfull(&t.root().left, &t.root().right)? {
        return input("tree is not left-full below the root");
    }
    let idx = LeftfullIndex::new(t);
    let r = t.r();
    let mut cp = CondPair::root(t);
    let mut base = cp.clone();
    let mut excluded = BTreeSet::new();
    let mut pending: BTreeSet<usize> = (0..r).collect();
    let mut trace = vec![cp.clone()];
    let mut restarts = Vec::new();
    while cp.left_len() < t.height() {
        let required: Vec<usize> = (0..r).filter(|s| !excluded.contains(s)).collect();
        match step(&idx, &cp, &required, &pending)? {
            StepOutcome::Extended(next) => {
                pending.clear();
                cp = next;
            }
            StepOutcome::Partial { next, satisfied } => {
                pending.retain(|s| !satisfied.contains(s));
                cp = next;
            }
            StepOutcome::Stuck(comps) => {
                excluded.extend(comps.iter().copied());
                cp = CondPair { stems: [cp.stems[0].clone(), cp.stems[0].clone()] };
                base = cp.clone();
                pending = (0..r).filter(|s| !excluded.contains(s)).collect();
                restarts.push(Restart { at: trace.len(), excluded: comps });
            }
        }
        trace.push(cp.clone());
    }
    let pair = complete(t, &cp, &pending)?;
    let lens = old_lens(&cp);
    let exhausted: BTreeSet<usize> =
        pending.iter().copied().filter(|&s| !agrees_at(s, [&pair[0].right, &pair[1].right], lens)).collect();
    excluded.extend(exhausted.iter().copied());
    let mut solution = Solution::build(pair, excluded, trace, restarts, base);
    solution.completed = pending.difference(&exhausted).copied().collect();
    solution.exhausted = exhausted;
    let problems = solution.violations(t);
    if !problems.is_empty() {
        return Err(Error::Internal(format!("solution invariants fail: {problems:?}; solution {solution:?}")));
    }
    Ok(solution)
}

/// Exhaustive reference: the lex-least full-height pair with completely
/// incompatible left words that agrees on the most components.
pub fn brute_solution(t: &CrossTree) -> Option<Solution> {
    let fulls: Vec<Node> = {
        let mut v: Vec<Node> = t.full_height_nodes().collect();
        v.sort();
        v
    };
    let r = t.r();
    let mut best: Option<(usize, [&Node; 2])> = None;
    for a in &fulls {
        for b in &fulls {
            if !incompatible_from(a.left.digits(), b.left.digits(), 0) {
                continue;
            }
            let score = (0..r).filter(|&s| agrees_at(s, [&a.right, &b.right], [0, 0])).count();
            if best.is_none_or(|(s, _)| score > s) {
                best = Some((score, [a, b]));
            }
        }
    }
    let (_, [a, b]) = best?;
    let root = CondPair::root(t);
    let mut sol = Solution::build([a.clone(), b.clone()], BTreeSet::new(), vec![], vec![], root);
    sol.excluded = (0..r).filter(|&s| sol.agreement[s].is_empty()).collect();
    Some(sol)
}

#[cfg(test)]
mod tests {
    use super::*;

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
    fn full_tree_height_one() {
        let t = CrossTree::full(1, 1);
        let sol = solve(&t).unwrap();
        assert_eq!(sol.pair, [n("0", "0"), n("1", "0")]);
        assert_eq!(sol.agreement, vec![BTreeSet::from([0])]);
        assert!(sol.excluded.is_empty());
        let brute = brute_solution(&t).unwrap();
        assert_eq!(brute.pair, sol.pair);
    }

    #[test]
    fn height_zero_is_rejected() {
        let t = CrossTree::full(1, 0);
        assert!(matches!(solve(&t), Err(Error::Input(_))));
    }

    #[test]
    fn three_leaf_tree() {
        let t = CrossTree::closure_of(1, 1, [n("0", "0"), n("1", "0"), n("2", "1")]).unwrap();
        let sol = solve(&t).unwrap();
        assert_eq!(sol.pair, [n("0", "0"), n("1", "0")]);
        assert_eq!(sol.agreement[0], BTreeSet::from([0]));
    }

    #[test]
    fn extend_step_on_the_full_tree() {
        let t = CrossTree::full(1, 2);
        let got = extend_step(&t, &CondPair::root(&t), &BTreeSet::new()).unwrap();
        assert_eq!(got, StepOutcome::Extended(CondPair::new(n("0", "0"), n("1", "0")).unwrap()));

        let cp = CondPair::new(n("0", "0"), n("1", "0")).unwrap();
        let StepOutcome::Extended(next) = extend_step(&t, &cp, &BTreeSet::new()).unwrap() else { panic!() };
        assert_eq!(next.left_len(), 2);
        assert_eq!(next.sigma(0).component(0).get(1), next.sigma(1).component(0).get(1));
    }

    #[test]
    fn root_is_never_excluded_at_height_one() {
        let t = CrossTree::full(1, 1);
        assert!(!detect_excluded(&t, &CondPair::root(&t), 0).unwrap());
        assert!(detect_excluded(&t, &CondPair::root(&t), 1).is_err());
    }

    #[test]
    fn engineered_exclusion() {
        // Above "0x" the only right word is "00", above "1y" and "2y" it is
        // "11": past the stems below, position 1 never agrees.
        let mut nodes = Vec::new();
        for a in ["0", "1", "2"] {
            for b in ["0", "1", "2"] {
                let right = if a == "0" { "00" } else { "11" };
                nodes.push(n(&format!("{a}{b}"), right));
            }
        }
        let t = CrossTree::closure_of(1, 2, nodes).unwrap();
        let cp = CondPair::new(n("0", "0"), n("1", "1")).unwrap();
        assert!(detect_excluded(&t, &cp, 0).unwrap());
        assert_eq!(extend_step(&t, &cp, &BTreeSet::new()).unwrap(), StepOutcome::Stuck(BTreeSet::from([0])));
        let sol = solve(&t).unwrap();
        assert!(sol.violations(&t).is_empty());
    }

    #[test]
    fn r2_full_tree_agrees_on_both() {
        let t = CrossTree::full(2, 2);
        let sol = solve(&t).unwrap();
        assert!(sol.excluded.is_empty());
        assert!(sol.agreement.iter().all(|a| !a.is_empty()));
        let brute = brute_solution(&t).unwrap();
        assert!(brute.agreement.iter().all(|a| !a.is_empty()));
    }
}
