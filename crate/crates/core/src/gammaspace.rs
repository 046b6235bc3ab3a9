//! The Gamma hierarchy: finite-support 3-colorings at level 0, computation
//! paths of labeled finite trees above, and bounded fragment exploration.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use crate::error::{input, Error, Result};
use crate::words::Word;

/// A finite-support partial 3-coloring of the naturals.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Gamma0 {
    // Kept sorted by position; values are colors 0, 1, 2.
    entries: Vec<(u32, u8)>,
}

impl Gamma0 {
    pub fn new(map: BTreeMap<u32, u8>) -> Result<Self> {
        if let Some((x, v)) = map.iter().find(|(_, &v)| v > 2) {
            return input(format!("color {v} at {x} is not in {{0, 1, 2}}"));
        }
        Ok(Gamma0 { entries: map.into_iter().collect() })
    }

    pub fn from_pairs(pairs: &[(u32, u8)]) -> Result<Self> {
        let map: BTreeMap<u32, u8> = pairs.iter().copied().collect();
        if map.len() != pairs.len() {
            return input("repeated position in a coloring");
        }
        Gamma0::new(map)
    }

    /// The empty map, root of level 0.
    pub fn zeta() -> Self {
        Gamma0::default()
    }

    pub fn is_zeta(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = u32> + '_ {
        self.entries.iter().map(|&(x, _)| x)
    }

    pub fn entries(&self) -> &[(u32, u8)] {
        &self.entries
    }

    pub fn get(&self, x: u32) -> Option<u8> {
        self.entries.binary_search_by_key(&x, |&(k, _)| k).ok().map(|i| self.entries[i].1)
    }

    /// The order of level 0: the empty map below everything, all else incomparable.
    pub fn leq(&self, other: &Gamma0) -> bool {
        self.is_zeta() || self == other
    }
}

impl fmt::Debug for Gamma0 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (x, v)) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}:{v}")?;
        }
        write!(f, "}}")
    }
}

/// A finite prefix-closed set of sequences of naturals containing the empty sequence.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct FinTree {
    nodes: BTreeSet<Vec<u32>>,
}

impl FinTree {
    pub fn new(nodes: impl IntoIterator<Item = Vec<u32>>) -> Result<Self> {
        let nodes: BTreeSet<Vec<u32>> = nodes.into_iter().collect();
        if !nodes.contains(&Vec::new()) {
            return input("tree has no root");
        }
        if let Some(bad) = nodes.iter().find(|n| !n.is_empty() && !nodes.contains(&n[..n.len() - 1])) {
            return input(format!("tree is not prefix-closed at {bad:?}"));
        }
        Ok(FinTree { nodes })
    }

    pub fn singleton() -> Self {
        FinTree { nodes: BTreeSet::from([Vec::new()]) }
    }

    pub fn nodes(&self) -> &BTreeSet<Vec<u32>> {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, xi: &[u32]) -> bool {
        self.nodes.contains(xi)
    }

    pub fn children(&self, xi: &[u32]) -> Vec<u32> {
        self.nodes.iter().filter(|n| n.len() == xi.len() + 1 && n.starts_with(xi)).map(|n| n[xi.len()]).collect()
    }

    pub fn is_leaf(&self, xi: &[u32]) -> bool {
        self.contains(xi) && self.children(xi).is_empty()
    }

    pub fn leaves(&self) -> Vec<Vec<u32>> {
        self.nodes.iter().filter(|n| self.children(n).is_empty()).cloned().collect()
    }

    fn grown(&self, xi: &[u32], f: &BTreeSet<u32>) -> FinTree {
        let mut nodes = self.nodes.clone();
        for &c in f {
            let mut child = xi.to_vec();
            child.push(c);
            nodes.insert(child);
        }
        FinTree { nodes }
    }

    fn cut_back(&self, xi: &[u32], f: &BTreeSet<u32>) -> FinTree {
        let nodes = self
            .nodes
            .iter()
            .filter(|n| !(n.len() > xi.len() && n.starts_with(xi)) || (n.len() == xi.len() + 1 && f.contains(&n[xi.len()])))
            .cloned()
            .collect();
        FinTree { nodes }
    }
}

/// How one tree arises from another by a single move.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Variation {
    Grow { at: Vec<u32>, f: BTreeSet<u32> },
    Backtrack { at: Vec<u32>, f: BTreeSet<u32> },
    /// Backtracking that keeps every child, which the rule forbids.
    FullBacktrack { at: Vec<u32> },
    None,
}

/// Classifies `t1` as a move from `t0`, scanning every candidate node.
pub fn classify_variation(t0: &FinTree, t1: &FinTree) -> Variation {
    let mut full = None;
    for xi in &t0.nodes {
        let f: BTreeSet<u32> = t1.children(xi).into_iter().collect();
        if t0.is_leaf(xi) {
            if !f.is_empty() && t0.grown(xi, &f) == *t1 {
                return Variation::Grow { at: xi.clone(), f };
            }
            continue;
        }
        let kids: BTreeSet<u32> = t0.children(xi).into_iter().collect();
        if f.is_empty() || !f.is_subset(&kids) || t0.cut_back(xi, &f) != *t1 {
            continue;
        }
        if f == kids {
            full.get_or_insert_with(|| xi.clone());
        } else {
            return Variation::Backtrack { at: xi.clone(), f };
        }
    }
    match full {
        Some(at) => Variation::FullBacktrack { at },
        None => Variation::None,
    }
}

pub fn is_one_step_variation(t0: &FinTree, t1: &FinTree) -> bool {
    matches!(classify_variation(t0, t1), Variation::Grow { .. } | Variation::Backtrack { .. })
}

/// Every one-step variation of `t` whose new children use indices below `bound`.
pub fn one_step_variations(t: &FinTree, bound: u32) -> Vec<FinTree> {
    let mut out = Vec::new();
    for xi in &t.nodes {
        if t.is_leaf(xi) {
            for f in nonempty_subsets(&(0..bound).collect::<Vec<_>>()) {
                out.push(t.grown(xi, &f));
            }
        } else {
            let kids = t.children(xi);
            for f in nonempty_subsets(&kids) {
                if f.len() < kids.len() {
                    out.push(t.cut_back(xi, &f));
                }
            }
        }
    }
    out
}

fn nonempty_subsets(items: &[u32]) -> Vec<BTreeSet<u32>> {
    (1u64..(1u64 << items.len()))
        .map(|mask| items.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &x)| x).collect())
        .collect()
}

/// One stage of a computation path: a tree and its labels one level down.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Step {
    pub tree: FinTree,
    pub labels: BTreeMap<Vec<u32>, GammaElem>,
}

impl Step {
    fn label(&self, xi: &[u32]) -> &GammaElem {
        &self.labels[xi]
    }
}

/// An element of the level-`m` space.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum GammaElem {
    Base(Gamma0),
    Path { level: usize, steps: Vec<Step> },
}

impl GammaElem {
    /// The root of level `m`.
    pub fn zeta(m: usize) -> GammaElem {
        if m == 0 {
            return GammaElem::Base(Gamma0::zeta());
        }
        let step = Step { tree: FinTree::singleton(), labels: BTreeMap::from([(Vec::new(), GammaElem::zeta(m - 1))]) };
        GammaElem::Path { level: m, steps: vec![step] }
    }

    pub fn level(&self) -> usize {
        match self {
            GammaElem::Base(_) => 0,
            GammaElem::Path { level, .. } => *level,
        }
    }

    pub fn steps(&self) -> &[Step] {
        match self {
            GammaElem::Base(_) => &[],
            GammaElem::Path { steps, .. } => steps,
        }
    }

    pub fn last_step(&self) -> Option<&Step> {
        self.steps().last()
    }

    /// This path followed by one more stage.
    pub fn extended(&self, step: Step) -> Result<GammaElem> {
        match self {
            GammaElem::Base(_) => input("a level-0 element has no stages"),
            GammaElem::Path { level, steps } => {
                let mut steps = steps.clone();
                steps.push(step);
                Ok(GammaElem::Path { level: *level, steps })
            }
        }
    }

    /// The first `len` stages.
    pub fn truncated(&self, len: usize) -> GammaElem {
        match self {
            GammaElem::Base(_) => self.clone(),
            GammaElem::Path { level, steps } => GammaElem::Path { level: *level, steps: steps[..len.min(steps.len())].to_vec() },
        }
    }
}

/// Strict order along tree edges: the child label lies strictly above the parent's.
fn strictly_below(a: &GammaElem, b: &GammaElem) -> bool {
    a != b && leq_unchecked(a, b)
}

fn leq_unchecked(a: &GammaElem, b: &GammaElem) -> bool {
    match (a, b) {
        (GammaElem::Base(x), GammaElem::Base(y)) => x.leq(y),
        (GammaElem::Path { steps: s, .. }, GammaElem::Path { steps: t, .. }) => s.len() <= t.len() && t[..s.len()] == s[..],
        _ => false,
    }
}

/// The order of a level: prefix order on paths, root-below-all at level 0.
pub fn leq(a: &GammaElem, b: &GammaElem) -> Result<bool> {
    if a.level() != b.level() {
        return input(format!("levels {} and {} differ", a.level(), b.level()));
    }
    Ok(leq_unchecked(a, b))
}

/// Every broken invariant, recursively through the labels; empty when valid.
pub fn validate_path(gamma: &GammaElem) -> Vec<String> {
    let mut report = Vec::new();
    validate_into(gamma, &mut report, "");
    report
}

fn validate_into(gamma: &GammaElem, report: &mut Vec<String>, at: &str) {
    let GammaElem::Path { level, steps } = gamma else { return };
    let level = *level;
    if level == 0 {
        report.push(format!("{at}a path cannot have level 0"));
        return;
    }
    if steps.is_empty() {
        report.push(format!("{at}empty path"));
        return;
    }
    let below = GammaElem::zeta(level - 1);
    if steps[0].tree != FinTree::singleton() {
        report.push(format!("{at}first tree is not the singleton"));
    }
    for (j, step) in steps.iter().enumerate() {
        let here = format!("{at}step {j}: ");
        if FinTree::new(step.tree.nodes.iter().cloned()).is_err() {
            report.push(format!("{here}tree is not prefix-closed with a root"));
            continue;
        }
        let domain: BTreeSet<&Vec<u32>> = step.labels.keys().collect();
        if domain != step.tree.nodes.iter().collect() {
            report.push(format!("{here}labels do not cover exactly the tree"));
            continue;
        }
        if step.label(&[]) != &below {
            report.push(format!("{here}root label is not the root of level {}", level - 1));
        }
        for (xi, label) in &step.labels {
            if label.level() != level - 1 {
                report.push(format!("{here}label at {xi:?} has level {} instead of {}", label.level(), level - 1));
                continue;
            }
            validate_into(label, report, &format!("{here}label at {xi:?}: "));
            if let Some((_, parent)) = xi.split_last().map(|(_, p)| ((), p)) {
                if !strictly_below(step.label(parent), label) {
                    report.push(format!("{here}labeling is not increasing from {parent:?} to {xi:?}"));
                }
            }
        }
        if j == 0 {
            continue;
        }
        let prev = &steps[j - 1];
        match classify_variation(&prev.tree, &step.tree) {
            Variation::Grow { .. } | Variation::Backtrack { .. } => {}
            Variation::FullBacktrack { at } => report.push(format!("{here}F not proper: backtracking at {at:?} keeps every child")),
            Variation::None => report.push(format!("{here}tree is not a one-step variation of the previous one")),
        }
        for (xi, label) in &step.labels {
            if let Some(old) = prev.labels.get(xi) {
                if old != label {
                    report.push(format!("{here}incompatible labelings at {xi:?}"));
                }
            }
        }
    }
}

/// The finite set of level-0 colorings an element currently denotes.
pub fn interpret(gamma: &GammaElem) -> BTreeSet<Gamma0> {
    match gamma {
        GammaElem::Base(g) => BTreeSet::from([g.clone()]),
        GammaElem::Path { steps, .. } => {
            let last = steps.last().expect("a path has at least one stage");
            let out: BTreeSet<Gamma0> = last.tree.leaves().iter().flat_map(|xi| interpret(last.label(xi))).collect();
            assert!(!out.is_empty(), "interpretation of a valid element is nonempty");
            out
        }
    }
}

/// Whether every coloring denoted by `gamma` lives strictly above `n`.
pub fn over(gamma: &GammaElem, n: u32) -> bool {
    set_over(&interpret(gamma), n)
}

pub fn set_over(fs: &BTreeSet<Gamma0>, n: u32) -> bool {
    fs.iter().all(|g| g.support().all(|x| x > n))
}

/// Whether the coloring prefix `f` extends some element of `fs`.
pub fn compatible(f: &Word, fs: &BTreeSet<Gamma0>) -> bool {
    fs.iter().any(|g| g.entries().iter().all(|&(x, v)| f.get(x as usize) == Some(v)))
}

// ---------------------------------------------------------------- fragments

pub const DEFAULT_FRAGMENT_CAP: usize = 200_000;

/// Which labels a fragment offers when growing a leaf.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelMode {
    /// Every element strictly above the parent label, every index set.
    Full,
    /// One label per up-set type and one index set per size.
    Quotient,
}

/// Bounded fragment of the hierarchy: child indices below `bound`, level-0
/// supports inside `0..=support`.
pub struct Fragment {
    bound: u32,
    support: u32,
    cap: usize,
    mode: LabelMode,
    types: HashMap<(usize, Vec<usize>), usize>,
    state_type: HashMap<GammaElem, usize>,
    heights: Vec<usize>,
    upsets: HashMap<GammaElem, Vec<GammaElem>>,
}

/// A longest strictly increasing chain found in a fragment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chain {
    pub length: usize,
    pub witness: Vec<GammaElem>,
}

impl Fragment {
    pub fn new(bound: u32, support: u32, cap: usize, mode: LabelMode) -> Self {
        Fragment {
            bound,
            support,
            cap,
            mode,
            types: HashMap::new(),
            state_type: HashMap::new(),
            heights: Vec::new(),
            upsets: HashMap::new(),
        }
    }

    fn check_cap(&self) -> Result<()> {
        if self.state_type.len() + self.upsets.len() > self.cap {
            return Err(Error::FragmentTooLarge { cap: self.cap });
        }
        Ok(())
    }

    /// Nonempty level-0 colorings with support inside `0..=support`.
    fn base_children(&self) -> Vec<GammaElem> {
        let positions = self.support as usize + 1;
        let mut out = Vec::new();
        let total = 4usize.pow(positions as u32);
        for code in 1..total {
            let mut map = BTreeMap::new();
            let mut c = code;
            for x in 0..positions {
                let digit = c % 4;
                c /= 4;
                if digit > 0 {
                    map.insert(x as u32, (digit - 1) as u8);
                }
            }
            out.push(GammaElem::Base(Gamma0::new(map).expect("colors below 3")));
        }
        out.sort();
        if self.mode == LabelMode::Quotient {
            out.truncate(1);
        }
        out
    }

    /// Elements one move above `gamma` in the fragment.
    pub fn successors(&mut self, gamma: &GammaElem) -> Result<Vec<GammaElem>> {
        let last = match gamma {
            GammaElem::Base(g) if g.is_zeta() => return Ok(self.base_children()),
            GammaElem::Base(_) => return Ok(Vec::new()),
            GammaElem::Path { steps, .. } => steps.last().expect("nonempty path").clone(),
        };
        let mut out = Vec::new();
        for xi in last.tree.nodes.iter() {
            let kids = last.tree.children(xi);
            if kids.is_empty() {
                let choices = self.label_choices(last.label(xi))?;
                if choices.is_empty() {
                    continue;
                }
                for f in self.grow_sets() {
                    for assignment in self.assignments(&choices, f.len()) {
                        let tree = last.tree.grown(xi, &f);
                        let mut labels = last.labels.clone();
                        for (&c, label) in f.iter().zip(assignment) {
                            let mut child = xi.clone();
                            child.push(c);
                            labels.insert(child, label);
                        }
                        out.push(gamma.extended(Step { tree, labels })?);
                    }
                }
            } else {
                for f in nonempty_subsets(&kids) {
                    if f.len() == kids.len() {
                        continue;
                    }
                    let tree = last.tree.cut_back(xi, &f);
                    let labels = last.labels.iter().filter(|(k, _)| tree.contains(k)).map(|(k, v)| (k.clone(), v.clone())).collect();
                    out.push(gamma.extended(Step { tree, labels })?);
                }
            }
        }
        Ok(out)
    }

    fn grow_sets(&self) -> Vec<BTreeSet<u32>> {
        match self.mode {
            LabelMode::Full => nonempty_subsets(&(0..self.bound).collect::<Vec<_>>()),
            LabelMode::Quotient => (1..=self.bound).map(|k| (0..k).collect()).collect(),
        }
    }

    /// Label tuples for `k` new children: all of them, or only sorted ones
    /// when siblings are interchangeable.
    fn assignments(&self, choices: &[GammaElem], k: usize) -> Vec<Vec<GammaElem>> {
        let mut acc: Vec<Vec<usize>> = vec![vec![]];
        for _ in 0..k {
            let mut next = Vec::new();
            for partial in &acc {
                let start = match self.mode {
                    LabelMode::Full => 0,
                    LabelMode::Quotient => partial.last().copied().unwrap_or(0),
                };
                for i in start..choices.len() {
                    let mut p = partial.clone();
                    p.push(i);
                    next.push(p);
                }
            }
            acc = next;
        }
        acc.into_iter().map(|idx| idx.into_iter().map(|i| choices[i].clone()).collect()).collect()
    }

    /// Labels a new child of a node labeled `x` may carry.
    fn label_choices(&mut self, x: &GammaElem) -> Result<Vec<GammaElem>> {
        if let Some(v) = self.upsets.get(x) {
            return Ok(v.clone());
        }
        let mut seen = BTreeSet::new();
        let mut order = Vec::new();
        let mut queue: VecDeque<GammaElem> = self.successors(x)?.into();
        while let Some(e) = queue.pop_front() {
            if !seen.insert(e.clone()) {
                continue;
            }
            for s in self.successors(&e)? {
                queue.push_back(s);
            }
            order.push(e);
            if seen.len() > self.cap {
                return Err(Error::FragmentTooLarge { cap: self.cap });
            }
        }
        let chosen = match self.mode {
            LabelMode::Full => order,
            LabelMode::Quotient => {
                let mut by_type = BTreeMap::new();
                for e in order {
                    let t = self.type_of(&e)?;
                    by_type.entry(t).or_insert(e);
                }
                by_type.into_values().collect()
            }
        };
        self.upsets.insert(x.clone(), chosen.clone());
        self.check_cap()?;
        Ok(chosen)
    }

    /// The moves available from an element depend only on its last stage.
    fn state_key(gamma: &GammaElem) -> GammaElem {
        match gamma {
            GammaElem::Base(_) => gamma.clone(),
            GammaElem::Path { level, steps } => GammaElem::Path { level: *level, steps: vec![steps.last().unwrap().clone()] },
        }
    }

    /// Bisimulation class: the set of classes one move above.
    pub fn type_of(&mut self, gamma: &GammaElem) -> Result<usize> {
        let key = Fragment::state_key(gamma);
        if let Some(&t) = self.state_type.get(&key) {
            return Ok(t);
        }
        let mut succ = Vec::new();
        for s in self.successors(gamma)? {
            succ.push(self.type_of(&s)?);
        }
        succ.sort_unstable();
        succ.dedup();
        let height = 1 + succ.iter().map(|&t| self.heights[t]).max().unwrap_or(0);
        let next = self.types.len();
        let t = *self.types.entry((gamma.level(), succ)).or_insert(next);
        if t == next {
            self.heights.push(height);
        }
        self.state_type.insert(key, t);
        self.check_cap()?;
        Ok(t)
    }

    /// Length of the longest strictly increasing chain starting at `gamma`.
    pub fn height(&mut self, gamma: &GammaElem) -> Result<usize> {
        let t = self.type_of(gamma)?;
        Ok(self.heights[t])
    }

    /// A longest chain from the root of level `m`.
    pub fn longest_chain(&mut self, m: usize) -> Result<Chain> {
        let mut current = GammaElem::zeta(m);
        let length = self.height(&current)?;
        let mut witness = vec![current.clone()];
        while witness.len() < length {
            let want = length - witness.len();
            let mut next = None;
            for s in self.successors(&current)? {
                if self.height(&s)? == want {
                    next = Some(s);
                    break;
                }
            }
            current = next.ok_or_else(|| Error::Internal("height table inconsistent with successors".into()))?;
            witness.push(current.clone());
        }
        Ok(Chain { length, witness })
    }

    /// Every element reachable from the root of level `m`.
    pub fn enumerate(&mut self, m: usize) -> Result<Vec<GammaElem>> {
        let mut out = Vec::new();
        let mut queue = VecDeque::from([GammaElem::zeta(m)]);
        while let Some(e) = queue.pop_front() {
            queue.extend(self.successors(&e)?);
            out.push(e);
            if out.len() > self.cap {
                return Err(Error::FragmentTooLarge { cap: self.cap });
            }
        }
        Ok(out)
    }
}

/// Longest chain in the fragment of level `m` with child indices below
/// `bound` and supports inside `0..=support`.
pub fn longest_chain(m: usize, bound: u32, support: u32) -> Result<Chain> {
    Fragment::new(bound, support, DEFAULT_FRAGMENT_CAP, LabelMode::Quotient).longest_chain(m)
}
