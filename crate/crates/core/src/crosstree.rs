//! Finite cross-trees: sets of pairs `(left word, right tuple)` closed under
//! the componentwise prefix order, with `|right| <= |left|`.
//!
//! Storage is a map from left word to the slice of right tuples sitting
//! above it, since slicing and left-fullness queries dominate the workload.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::sync::OnceLock;

use crate::error::{input, Error, Result};
use crate::words::{enumerate_extensions, Alphabets, Node, RightTuple, Word};

#[derive(Debug)]
pub struct CrossTree {
    r: usize,
    height: usize,
    alphabets: Alphabets,
    slices: BTreeMap<Word, BTreeSet<RightTuple>>,
    leaves_full: OnceLock<bool>,
}

impl Clone for CrossTree {
    fn clone(&self) -> Self {
        CrossTree {
            r: self.r,
            height: self.height,
            alphabets: self.alphabets,
            slices: self.slices.clone(),
            leaves_full: OnceLock::new(),
        }
    }
}

impl PartialEq for CrossTree {
    fn eq(&self, other: &Self) -> bool {
        self.r == other.r
            && self.height == other.height
            && self.alphabets == other.alphabets
            && self.slices == other.slices
    }
}

impl Eq for CrossTree {}

/// Basic open sets excluded by [`CrossTree::from_forbidden`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ForbiddenSet {
    pub entries: BTreeSet<(Word, RightTuple)>,
}

impl ForbiddenSet {
    pub fn new(entries: impl IntoIterator<Item = (Word, RightTuple)>) -> Self {
        ForbiddenSet { entries: entries.into_iter().collect() }
    }

    fn blocks(&self, left: &Word, right: &RightTuple) -> bool {
        self.entries
            .iter()
            .any(|(mu, tau)| mu.is_prefix_of_unchecked(left) && tau.is_prefix_of_unchecked(right))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ViolationKind {
    MissingRoot,
    NotDownwardClosed,
    ExceedsHeight,
    ArityMismatch,
    AlphabetMismatch,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub node: Option<Node>,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match self.kind {
            ViolationKind::MissingRoot => "missing root",
            ViolationKind::NotDownwardClosed => "not downward-closed",
            ViolationKind::ExceedsHeight => "left word longer than the height",
            ViolationKind::ArityMismatch => "right tuple arity differs from r",
            ViolationKind::AlphabetMismatch => "word alphabet differs from the tree's",
        };
        match &self.node {
            Some(n) => write!(f, "{what}: {n:?}"),
            None => write!(f, "{what}"),
        }
    }
}

impl CrossTree {
    /// Builds a tree from an explicit node list. Shape invariants are not
    /// enforced here; use [`CrossTree::validate`].
    pub fn new(r: usize, height: usize, alphabets: Alphabets, nodes: impl IntoIterator<Item = Node>) -> Result<Self> {
        if r == 0 {
            return input("arity r must be at least 1");
        }
        let mut slices: BTreeMap<Word, BTreeSet<RightTuple>> = BTreeMap::new();
        for node in nodes {
            slices.entry(node.left).or_default().insert(node.right);
        }
        Ok(CrossTree { r, height, alphabets, slices, leaves_full: OnceLock::new() })
    }

    /// Downward closure of `nodes` under the componentwise prefix order.
    pub fn closure_of(r: usize, height: usize, nodes: impl IntoIterator<Item = Node>) -> Result<Self> {
        CrossTree::closure_with(r, height, Alphabets::default(), nodes)
    }

    pub fn closure_with(
        r: usize,
        height: usize,
        alphabets: Alphabets,
        nodes: impl IntoIterator<Item = Node>,
    ) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut queue: VecDeque<Node> = nodes.into_iter().collect();
        while let Some(node) = queue.pop_front() {
            if node.right.arity() != r {
                return input(format!("node {node:?} has arity {} but r = {r}", node.right.arity()));
            }
            if !seen.insert(node.clone()) {
                continue;
            }
            queue.extend(predecessors(&node));
        }
        CrossTree::new(r, height, alphabets, seen)
    }

    /// The tree of all nodes with left length at most `height`.
    pub fn full(r: usize, height: usize) -> Self {
        CrossTree::from_forbidden(&ForbiddenSet::default(), height, r).expect("r >= 1")
    }

    /// Tree of all `(rho, sigma)` with no forbidden pair below them, cut at
    /// height `n`.
    pub fn from_forbidden(w: &ForbiddenSet, n: usize, r: usize) -> Result<Self> {
        CrossTree::from_forbidden_with(w, n, r, Alphabets::default())
    }

    pub fn from_forbidden_with(w: &ForbiddenSet, n: usize, r: usize, alphabets: Alphabets) -> Result<Self> {
        if r == 0 {
            return input("arity r must be at least 1");
        }
        let root = Node::new_unchecked(Word::empty(alphabets.left), RightTuple::empty(r, alphabets.right));
        let mut nodes = Vec::new();
        // Forbidden sets are upward closed, so a breadth-first walk from the
        // root that stops at blocked nodes visits exactly the tree.
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::from([root]);
        while let Some(node) = queue.pop_front() {
            if seen.contains(&node) || w.blocks(&node.left, &node.right) {
                continue;
            }
            seen.insert(node.clone());
            for succ in successors_in_space(&node, n, r, alphabets) {
                queue.push_back(succ);
            }
            nodes.push(node);
        }
        CrossTree::new(r, n, alphabets, nodes)
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn alphabets(&self) -> Alphabets {
        self.alphabets
    }

    pub fn is_empty(&self) -> bool {
        self.slices.values().all(BTreeSet::is_empty)
    }

    pub fn len(&self) -> usize {
        self.slices.values().map(BTreeSet::len).sum()
    }

    pub fn root(&self) -> Node {
        Node::new_unchecked(Word::empty(self.alphabets.left), RightTuple::empty(self.r, self.alphabets.right))
    }

    pub fn contains(&self, left: &Word, right: &RightTuple) -> bool {
        self.slices.get(left).is_some_and(|s| s.contains(right))
    }

    pub fn contains_node(&self, node: &Node) -> bool {
        self.contains(&node.left, &node.right)
    }

    /// Left words that carry at least one node.
    pub fn left_words(&self) -> impl Iterator<Item = &Word> {
        self.slices.iter().filter(|(_, s)| !s.is_empty()).map(|(w, _)| w)
    }

    /// Nodes in `(length, lex)` order.
    pub fn nodes(&self) -> Vec<Node> {
        let mut out: Vec<Node> = self
            .slices
            .iter()
            .flat_map(|(l, s)| s.iter().map(move |r| Node::new_unchecked(l.clone(), r.clone())))
            .collect();
        out.sort_by(Node::shortlex_cmp);
        out
    }

    /// `{sigma : (rho, sigma) in t}`.
    pub fn slice(&self, rho: &Word) -> BTreeSet<RightTuple> {
        self.slices.get(rho).cloned().unwrap_or_default()
    }

    pub(crate) fn slice_ref(&self, rho: &Word) -> Option<&BTreeSet<RightTuple>> {
        self.slices.get(rho)
    }

    /// Nodes whose left word has length exactly `len`.
    pub fn level(&self, len: usize) -> impl Iterator<Item = Node> + '_ {
        self.slices
            .iter()
            .filter(move |(l, _)| l.len() == len)
            .flat_map(|(l, s)| s.iter().map(move |r| Node::new_unchecked(l.clone(), r.clone())))
    }

    /// Nodes where both components have length `height`.
    pub fn full_height_nodes(&self) -> impl Iterator<Item = Node> + '_ {
        let h = self.height;
        self.level(h).filter(move |n| n.right.len() == h)
    }

    /// Empty when every tree invariant holds; otherwise one entry per violation.
    pub fn validate(&self) -> Vec<Violation> {
        let mut report = Vec::new();
        if !self.contains_node(&self.root()) {
            report.push(Violation { node: None, kind: ViolationKind::MissingRoot });
        }
        for node in self.nodes() {
            if node.right.arity() != self.r {
                report.push(Violation { node: Some(node), kind: ViolationKind::ArityMismatch });
                continue;
            }
            if node.left.alphabet() != self.alphabets.left || node.right.alphabet() != self.alphabets.right {
                report.push(Violation { node: Some(node), kind: ViolationKind::AlphabetMismatch });
                continue;
            }
            if node.left.len() > self.height {
                report.push(Violation { node: Some(node.clone()), kind: ViolationKind::ExceedsHeight });
            }
            if predecessors(&node).iter().any(|p| !self.contains_node(p)) {
                report.push(Violation { node: Some(node), kind: ViolationKind::NotDownwardClosed });
            }
        }
        report
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// Immediate extensions of `node` that lie in the tree.
    pub fn successors(&self, node: &Node) -> Vec<Node> {
        successors_in_space(node, self.height, self.r, self.alphabets)
            .into_iter()
            .filter(|n| self.contains_node(n))
            .collect()
    }

    /// Nodes with no proper extension in the tree.
    pub fn is_leaf(&self, node: &Node) -> bool {
        let k = self.alphabets.left;
        let grows_left = (0..k).any(|d| self.contains(&node.left.child(d), &node.right));
        if grows_left {
            return false;
        }
        match self.slices.get(&node.left) {
            Some(slice) if node.right.len() < node.left.len() => !has_right_child(slice, &node.right),
            _ => true,
        }
    }

    /// Whether every leaf has left length equal to the height.
    pub fn leaves_at_full_height(&self) -> bool {
        *self.leaves_full.get_or_init(|| {
            self.slices.iter().all(|(left, slice)| {
                left.len() == self.height
                    || slice.iter().all(|right| {
                        !self.is_leaf(&Node::new_unchecked(left.clone(), right.clone()))
                    })
            })
        })
    }

    /// Whether every slice `T[rho]` has all its leaves at length `|rho|`.
    pub fn is_right_pruned(&self) -> bool {
        self.slices.iter().all(|(left, slice)| {
            slice.iter().all(|t| t.len() == left.len() || has_right_child(slice, t))
        })
    }

    /// Largest right-pruned cross-subtree.
    pub fn right_prune(&self) -> CrossTree {
        let mut slices = self.slices.clone();
        loop {
            let mut doomed: Vec<(Word, RightTuple)> = Vec::new();
            for (left, slice) in &slices {
                for t in slice {
                    if t.len() < left.len() && !has_right_child(slice, t) {
                        doomed.push((left.clone(), t.clone()));
                    }
                }
            }
            if doomed.is_empty() {
                break;
            }
            // Removing all dead ends of one round together keeps the set
            // downward closed: anything above a dead end is a dead end too.
            for (left, t) in doomed {
                if let Some(slice) = slices.get_mut(&left) {
                    slice.remove(&t);
                }
            }
        }
        slices.retain(|_, s| !s.is_empty());
        CrossTree { r: self.r, height: self.height, alphabets: self.alphabets, slices, leaves_full: OnceLock::new() }
    }

    /// Nodes of left length at most `m`, as a tree of height `m`.
    pub fn truncate(&self, m: usize) -> CrossTree {
        let slices = self.slices.iter().filter(|(l, _)| l.len() <= m).map(|(l, s)| (l.clone(), s.clone())).collect();
        CrossTree { r: self.r, height: m, alphabets: self.alphabets, slices, leaves_full: OnceLock::new() }
    }

    fn check_member(&self, rho: &Word, sigma: &RightTuple) -> Result<()> {
        if sigma.arity() != self.r {
            return input(format!("sigma has arity {} but the tree has r = {}", sigma.arity(), self.r));
        }
        if rho.alphabet() != self.alphabets.left || sigma.alphabet() != self.alphabets.right {
            return input("stem alphabets do not match the tree");
        }
        if !self.contains(rho, sigma) {
            return input(format!("({rho}, {sigma:?}) is not a node of the tree"));
        }
        Ok(())
    }

    /// Whether some full-length tuple extending `sigma` sits above `mu`.
    fn has_full_extension(&self, mu: &Word, sigma: &RightTuple) -> bool {
        let Some(slice) = self.slices.get(mu) else { return false };
        let n = self.height;
        slice.iter().any(|t| t.len() == n && sigma.is_prefix_of_unchecked(t))
    }

    /// Finite left-fullness below `(rho, sigma)`: every leaf sits at full
    /// left length, and every full-length extension of `rho` carries a
    /// full-length extension of `sigma`.
    pub fn leftfull(&self, rho: &Word, sigma: &RightTuple) -> Result<bool> {
        self.check_member(rho, sigma)?;
        Ok(self.leftfull_unchecked(rho, sigma))
    }

    pub(crate) fn leftfull_unchecked(&self, rho: &Word, sigma: &RightTuple) -> bool {
        if rho.len() > self.height || !self.leaves_at_full_height() {
            return false;
        }
        enumerate_extensions(rho, self.height).iter().all(|mu| self.has_full_extension(mu, sigma))
    }

    /// Left-fullness on a right-pruned tree, decided by membership of
    /// `(mu, sigma)` for every full-length `mu` above `rho`. The global leaf
    /// condition is shared with [`CrossTree::leftfull`].
    pub fn leftfull_via_c(&self, rho: &Word, sigma: &RightTuple) -> Result<bool> {
        if !self.is_right_pruned() {
            return input("tree is not right-pruned");
        }
        self.check_member(rho, sigma)?;
        if rho.len() > self.height || !self.leaves_at_full_height() {
            return Ok(false);
        }
        Ok(enumerate_extensions(rho, self.height).iter().all(|mu| self.contains(mu, sigma)))
    }

    /// First full-length `mu` above `rho` with no full-length extension of
    /// `sigma` above it.
    fn blocking_left(&self, rho: &Word, sigma: &RightTuple) -> Option<Word> {
        enumerate_extensions(rho, self.height).into_iter().find(|mu| !self.has_full_extension(mu, sigma))
    }

    /// Finds `(rho', sigma') >= (rho, sigma)` with `|sigma'| = n` below which
    /// the tree is still left-full. Candidates for `sigma'` are tried in
    /// lexicographic order; each failure moves the left stem up to the
    /// lex-first full-length word that blocks it.
    pub fn leftfull_extend(&self, rho: &Word, sigma: &RightTuple, n: usize) -> Result<(Word, RightTuple)> {
        if !self.leftfull(rho, sigma)? {
            return input(format!("tree is not left-full below ({rho}, {sigma:?})"));
        }
        if n > self.height {
            return input(format!("target length {n} exceeds the height {}", self.height));
        }
        if n < sigma.len() {
            return input(format!("target length {n} is shorter than sigma ({})", sigma.len()));
        }
        if n == sigma.len() {
            return Ok((rho.clone(), sigma.clone()));
        }
        let mut current = rho.clone();
        while current.len() < n {
            current = current.child(0);
        }
        for candidate in sigma.extensions(n) {
            if self.contains(&current, &candidate) && self.leftfull_unchecked(&current, &candidate) {
                return Ok((current, candidate));
            }
            current = self
                .blocking_left(&current, &candidate)
                .ok_or_else(|| Error::Internal(format!("no blocking word found above {current}")))?;
        }
        Err(Error::Internal(format!(
            "every length-{n} extension of {sigma:?} was blocked although the tree is left-full below ({rho}, {sigma:?})"
        )))
    }
}

/// Immediate predecessors among valid nodes.
pub(crate) fn predecessors(node: &Node) -> Vec<Node> {
    let mut out = Vec::with_capacity(2);
    let (l, r) = (node.left.len(), node.right.len());
    if l > 0 && r < l {
        out.push(Node::new_unchecked(node.left.prefix(l - 1), node.right.clone()));
    }
    if r > 0 {
        out.push(Node::new_unchecked(node.left.clone(), node.right.prefix(r - 1)));
    }
    out
}

/// Immediate successors in the ambient space of height `n`.
fn successors_in_space(node: &Node, n: usize, r: usize, alphabets: Alphabets) -> Vec<Node> {
    let mut out = Vec::new();
    if node.left.len() < n {
        for d in 0..alphabets.left {
            out.push(Node::new_unchecked(node.left.child(d), node.right.clone()));
        }
    }
    if node.right.len() < node.left.len() {
        for col in RightTuple::all_of_length(r, alphabets.right, 1) {
            let column: Vec<u8> = col.words().iter().map(|w| w.digits()[0]).collect();
            out.push(Node::new_unchecked(node.left.clone(), node.right.child(&column)));
        }
    }
    out
}

fn has_right_child(slice: &BTreeSet<RightTuple>, t: &RightTuple) -> bool {
    let next = t.len() + 1;
    slice.iter().any(|u| u.len() == next && t.is_prefix_of_unchecked(u))
}
