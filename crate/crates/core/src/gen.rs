//! Seeded and exhaustive instance generators for sweeps.
//!
//! A right-pruned tree is the downward closure of its diagonal nodes
//! (`|right| = |left|`), and those form a tree under simultaneous
//! truncation. Generators work on that diagonal tree.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::approx::{ApproxTable, DisjointArray, StepStream, StreamCell};
use crate::crosstree::CrossTree;
use crate::gammaspace::{FinTree, Gamma0, GammaElem, Step};
use crate::words::{words_of_length, Alphabets, Node, RightTuple, Word, LEFT_K};

pub type SweepRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SweepRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// The one-digit columns of an `r`-tuple of binary words.
fn columns(r: usize) -> Vec<Vec<u8>> {
    RightTuple::all_of_length(r, 2, 1)
        .into_iter()
        .map(|t| t.words().iter().map(|w| w.digits()[0]).collect())
        .collect()
}

/// Diagonal children of a diagonal node.
pub fn diagonal_children(node: &Node, r: usize) -> Vec<Node> {
    let mut out = Vec::new();
    for d in 0..LEFT_K {
        for col in columns(r) {
            out.push(Node::new_unchecked(node.left.child(d), node.right.child(&col)));
        }
    }
    out
}

/// Downward closure of a set of diagonal nodes plus the root.
pub fn from_diagonal(r: usize, height: usize, diag: impl IntoIterator<Item = Node>) -> CrossTree {
    let root = Node::new_unchecked(Word::empty(LEFT_K), RightTuple::empty(r, 2));
    CrossTree::closure_with(r, height, Alphabets::default(), diag.into_iter().chain([root])).expect("arity matches")
}

/// Random right-pruned tree: each diagonal child survives with probability `keep`.
pub fn random_right_pruned(rng: &mut SweepRng, height: usize, r: usize, keep: f64) -> CrossTree {
    let root = Node::new_unchecked(Word::empty(LEFT_K), RightTuple::empty(r, 2));
    let mut diag = vec![root.clone()];
    let mut frontier = vec![root];
    for _ in 0..height {
        let mut next = Vec::new();
        for node in &frontier {
            for child in diagonal_children(node, r) {
                if rng.gen_bool(keep) {
                    next.push(child);
                }
            }
        }
        diag.extend(next.iter().cloned());
        frontier = next;
    }
    from_diagonal(r, height, diag)
}

/// Random tree, right-pruned and left-full below the root: every diagonal
/// node keeps at least one child per left digit.
pub fn random_leftfull(rng: &mut SweepRng, height: usize, r: usize) -> CrossTree {
    let root = Node::new_unchecked(Word::empty(LEFT_K), RightTuple::empty(r, 2));
    let cols = columns(r);
    let mut diag = vec![root.clone()];
    let mut frontier = vec![root];
    for _ in 0..height {
        let mut next = Vec::new();
        for node in &frontier {
            for d in 0..LEFT_K {
                let forced = rng.gen_range(0..cols.len());
                for (i, col) in cols.iter().enumerate() {
                    if i == forced || rng.gen_bool(0.35) {
                        next.push(Node::new_unchecked(node.left.child(d), node.right.child(col)));
                    }
                }
            }
        }
        diag.extend(next.iter().cloned());
        frontier = next;
    }
    from_diagonal(r, height, diag)
}

/// Random downward-closed tree, not necessarily right-pruned.
pub fn random_tree(rng: &mut SweepRng, height: usize, r: usize, seeds: usize) -> CrossTree {
    let mut nodes = Vec::new();
    for _ in 0..seeds {
        let l = rng.gen_range(0..=height);
        let left = Word::unrank(LEFT_K, l, rng.gen_range(0..3usize.pow(l as u32)));
        let rl = rng.gen_range(0..=l);
        let right = RightTuple::all_of_length(r, 2, rl);
        let pick = right[rng.gen_range(0..right.len())].clone();
        nodes.push(Node::new_unchecked(left, pick));
    }
    let root = Node::new_unchecked(Word::empty(LEFT_K), RightTuple::empty(r, 2));
    CrossTree::closure_with(r, height, Alphabets::default(), nodes.into_iter().chain([root])).expect("arity matches")
}

/// All diagonal subtrees rooted at `node` (which is always included), down
/// to `height`. Exponential; callers keep the size small.
pub fn diagonal_subtrees(node: &Node, height: usize, r: usize) -> Vec<Vec<Node>> {
    if node.left.len() == height {
        return vec![vec![node.clone()]];
    }
    let mut acc: Vec<Vec<Node>> = vec![vec![node.clone()]];
    for child in diagonal_children(node, r) {
        let below = diagonal_subtrees(&child, height, r);
        let mut grown = Vec::with_capacity(acc.len() * (below.len() + 1));
        for base in &acc {
            grown.push(base.clone());
            for sub in &below {
                let mut v = base.clone();
                v.extend(sub.iter().cloned());
                grown.push(v);
            }
        }
        acc = grown;
    }
    acc
}

/// Every right-pruned tree of the given height and arity.
pub fn all_right_pruned(height: usize, r: usize) -> Vec<CrossTree> {
    let root = Node::new_unchecked(Word::empty(LEFT_K), RightTuple::empty(r, 2));
    diagonal_subtrees(&root, height, r).into_iter().map(|d| from_diagonal(r, height, d)).collect()
}

/// Every tree of height one and arity one that is left-full below the
/// root: a nonempty set of right digits above each left digit.
pub fn all_leftfull_height_one() -> Vec<CrossTree> {
    let choices: [&[u8]; 3] = [&[0], &[1], &[0, 1]];
    let mut out = Vec::new();
    for a in choices {
        for b in choices {
            for c in choices {
                let mut nodes = Vec::new();
                for (d, set) in [a, b, c].into_iter().enumerate() {
                    for &x in set {
                        nodes.push(Node::new_unchecked(
                            Word::from_digits_unchecked(LEFT_K, vec![d as u8]),
                            RightTuple::new(vec![Word::from_digits_unchecked(2, vec![x])]).expect("one word"),
                        ));
                    }
                }
                out.push(from_diagonal(1, 1, nodes));
            }
        }
    }
    out
}

/// Random non-increasing table from ternary words up to `depth` to subsets
/// of `0..universe`.
pub fn random_oracle_table(rng: &mut SweepRng, depth: usize, universe: u8) -> BTreeMap<Word, BTreeSet<u8>> {
    let mut table = BTreeMap::new();
    let top: BTreeSet<u8> = (0..universe).filter(|_| rng.gen_bool(0.8)).collect();
    table.insert(Word::empty(LEFT_K), top);
    for len in 1..=depth {
        for w in words_of_length(LEFT_K, len) {
            let parent = table[&w.prefix(len - 1)].clone();
            let keep = rng.gen_range(0.5..1.0);
            let here: BTreeSet<u8> = parent.into_iter().filter(|_| rng.gen_bool(keep)).collect();
            table.insert(w, here);
        }
    }
    table
}

// ---------------------------------------------------------------- gamma spaces

/// Child indices used by the random path generator.
const GAMMA_BRANCH: u32 = 3;
/// Supports of generated colorings sit in `n+1..=n+GAMMA_WIDTH`.
pub const GAMMA_WIDTH: u32 = 3;

/// A random coloring with nonempty support inside `n+1..=n+GAMMA_WIDTH`.
pub fn random_coloring_over(rng: &mut SweepRng, n: u32) -> Gamma0 {
    loop {
        let mut map = BTreeMap::new();
        for x in n + 1..=n + GAMMA_WIDTH {
            if rng.gen_bool(0.5) {
                map.insert(x, rng.gen_range(0..3u8));
            }
        }
        if !map.is_empty() {
            return Gamma0::new(map).expect("colors below 3");
        }
    }
}

/// A random element strictly above `x`, over `n`, when one exists.
fn random_above(rng: &mut SweepRng, x: &GammaElem, n: u32) -> Option<GammaElem> {
    match x {
        GammaElem::Base(g) if g.is_zeta() => Some(GammaElem::Base(random_coloring_over(rng, n))),
        GammaElem::Base(_) => None,
        GammaElem::Path { .. } => {
            let moves = rng.gen_range(1..=2);
            let y = random_extension(rng, x, n, moves);
            (y.steps().len() > x.steps().len()).then_some(y)
        }
    }
}

/// `gamma` followed by up to `moves` random moves whose new labels are over `n`.
pub fn random_extension(rng: &mut SweepRng, gamma: &GammaElem, n: u32, moves: usize) -> GammaElem {
    let mut cur = gamma.clone();
    for _ in 0..moves {
        let Some(last) = cur.last_step().cloned() else { return cur };
        let mut candidates: Vec<Vec<u32>> = last.tree.nodes().iter().cloned().collect();
        let mut moved = None;
        while moved.is_none() && !candidates.is_empty() {
            let xi = candidates.swap_remove(rng.gen_range(0..candidates.len()));
            let kids = last.tree.children(&xi);
            if kids.is_empty() {
                let f: BTreeSet<u32> = (0..GAMMA_BRANCH).filter(|_| rng.gen_bool(0.5)).collect();
                let f = if f.is_empty() { BTreeSet::from([rng.gen_range(0..GAMMA_BRANCH)]) } else { f };
                let mut labels = last.labels.clone();
                let mut nodes: Vec<Vec<u32>> = last.tree.nodes().iter().cloned().collect();
                let mut ok = true;
                for c in f {
                    let mut child = xi.clone();
                    child.push(c);
                    match random_above(rng, &last.labels[&xi], n) {
                        Some(label) => {
                            labels.insert(child.clone(), label);
                            nodes.push(child);
                        }
                        None => ok = false,
                    }
                }
                if ok {
                    moved = Some(Step { tree: FinTree::new(nodes).expect("grown tree"), labels });
                }
            } else if kids.len() >= 2 {
                let keep: Vec<u32> = kids.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
                let keep = if keep.is_empty() || keep.len() == kids.len() { vec![kids[rng.gen_range(0..kids.len())]] } else { keep };
                let nodes: Vec<Vec<u32>> = last
                    .tree
                    .nodes()
                    .iter()
                    .filter(|v| !(v.len() > xi.len() && v.starts_with(&xi)) || (v.len() == xi.len() + 1 && keep.contains(&v[xi.len()])))
                    .cloned()
                    .collect();
                let labels = last.labels.iter().filter(|(k, _)| nodes.contains(k)).map(|(k, v)| (k.clone(), v.clone())).collect();
                moved = Some(Step { tree: FinTree::new(nodes).expect("cut tree"), labels });
            }
        }
        match moved {
            Some(step) => cur = cur.extended(step).expect("paths extend"),
            None => return cur,
        }
    }
    cur
}

/// A random valid element of level `m` over `n`.
pub fn random_gamma(rng: &mut SweepRng, m: usize, n: u32) -> GammaElem {
    if m == 0 {
        return if rng.gen_bool(0.2) { GammaElem::zeta(0) } else { GammaElem::Base(random_coloring_over(rng, n)) };
    }
    let moves = rng.gen_range(0..=4);
    random_extension(rng, &GammaElem::zeta(m), n, moves)
}

/// A random valid table: each row climbs through prefixes of one path.
pub fn random_table(rng: &mut SweepRng, m: usize, rows: usize, cols: usize) -> ApproxTable {
    let grid = (0..rows)
        .map(|n| {
            let target = random_gamma(rng, m, n as u32);
            let depth = target.steps().len();
            let mut cuts: Vec<usize> = (1..cols).map(|_| rng.gen_range(1..=depth.max(1))).collect();
            cuts.sort_unstable();
            if let Some(last) = cuts.last_mut() {
                *last = depth.max(1);
            }
            let mut row = vec![GammaElem::zeta(m)];
            for c in cuts {
                row.push(if m == 0 { target.clone() } else { target.truncated(c) });
            }
            row
        })
        .collect();
    ApproxTable::new(m, grid)
}

/// A random stream: a valid table, revealed at random stages, and unless
/// `valid` is set damaged by swaps, foreign cells, gaps and bad labels.
pub fn random_stream(rng: &mut SweepRng, m: usize, rows: usize, cols: usize, valid: bool) -> StepStream {
    let table = random_table(rng, m, rows, cols);
    let mut stream = StepStream::from_table(&table);
    for cell in stream.rows.iter_mut().flatten().flatten() {
        cell.stage = rng.gen_range(0..=2 * cols);
    }
    if valid {
        return stream;
    }
    let damage = rng.gen_range(1..=4);
    for _ in 0..damage {
        let n = rng.gen_range(0..rows);
        let s = rng.gen_range(0..cols);
        let row = &mut stream.rows[n];
        match rng.gen_range(0..5) {
            0 => {
                let s2 = rng.gen_range(0..cols);
                row.swap(s, s2);
            }
            1 => row[s] = None,
            2 => {
                // Not over its row.
                let bad = GammaElem::Base(Gamma0::from_pairs(&[(n as u32, 1)]).expect("one point"));
                let value = if m == 0 { bad } else { random_extension(rng, &GammaElem::zeta(m), 0, 2) };
                row[s] = Some(StreamCell { value, stage: rng.gen_range(0..=cols) });
            }
            3 => {
                let value = random_gamma(rng, (m + 1) % 3, n as u32);
                row[s] = Some(StreamCell { value, stage: rng.gen_range(0..=cols) });
            }
            _ => {
                if let Some(Some(cell)) = row.get_mut(s) {
                    if let GammaElem::Path { steps, .. } = &mut cell.value {
                        if let Some(step) = steps.last_mut() {
                            step.labels.insert(vec![], GammaElem::Base(random_coloring_over(rng, n as u32)));
                        }
                    }
                }
            }
        }
    }
    stream
}

/// A random disjoint array with three sets per row, all above the row index.
pub fn random_disjoint_array(rng: &mut SweepRng, rows: usize) -> DisjointArray {
    let grid = (0..rows)
        .map(|n| {
            let mut sets = vec![BTreeSet::new(); 3];
            for x in n as u32 + 1..=n as u32 + 1 + GAMMA_WIDTH {
                if rng.gen_bool(0.6) {
                    sets[rng.gen_range(0..3)].insert(x);
                }
            }
            sets
        })
        .collect();
    DisjointArray::new(grid).expect("generated sets are disjoint and above the row")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exhaustive_counts() {
        // Per left digit: nothing, or a nonempty set of right digits.
        assert_eq!(all_right_pruned(1, 1).len(), 64);
        assert_eq!(all_leftfull_height_one().len(), 27);
        let root = Node::new_unchecked(Word::empty(3), RightTuple::empty(1, 2));
        let zero = Node::new_unchecked(Word::parse("0", 3).unwrap(), RightTuple::parse(&["0"], 2).unwrap());
        assert_eq!(diagonal_subtrees(&zero, 2, 1).len(), 64);
        assert_eq!(diagonal_subtrees(&root, 0, 1).len(), 1);
    }

    #[test]
    fn generated_trees_have_their_shape() {
        let mut g = rng(7);
        for _ in 0..50 {
            let h = g.gen_range(0..=3);
            let r = g.gen_range(1..=2);
            let t = random_right_pruned(&mut g, h, r, 0.5);
            assert!(t.is_valid() && t.is_right_pruned());
            let t = random_leftfull(&mut g, h, r);
            assert!(t.is_valid() && t.is_right_pruned());
            assert!(t.leftfull(&t.root().left, &t.root().right).unwrap());
            let t = random_tree(&mut g, h, r, 6);
            assert!(t.is_valid());
        }
        for t in all_leftfull_height_one() {
            assert!(t.leftfull(&t.root().left, &t.root().right).unwrap());
        }
    }

    #[test]
    fn gamma_generators_are_valid() {
        let mut g = rng(11);
        for k in 0..200 {
            let m = k % 3;
            let n = g.gen_range(0..5);
            let gamma = random_gamma(&mut g, m, n);
            assert!(crate::gammaspace::validate_path(&gamma).is_empty(), "{gamma:?}");
            assert!(crate::gammaspace::over(&gamma, n));
            let t = random_table(&mut g, m, 4, 3);
            assert!(crate::approx::validate_table(&t).is_empty(), "{:?}", crate::approx::validate_table(&t));
        }
        let arr = random_disjoint_array(&mut g, 10);
        assert_eq!(arr.rows.len(), 10);
    }

    #[test]
    fn oracle_tables_are_non_increasing() {
        let mut g = rng(3);
        let table = random_oracle_table(&mut g, 3, 4);
        for (w, vals) in &table {
            if !w.is_empty() {
                assert!(vals.is_subset(&table[&w.prefix(w.len() - 1)]));
            }
        }
    }
}
