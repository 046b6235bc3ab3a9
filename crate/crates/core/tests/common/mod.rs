//! Brute-force reference implementations used by the integration tests.
//! They work on raw digit vectors and the public node listing only.

#![allow(dead_code)]

use std::collections::BTreeSet;

use crosswork::incmaps::IncompatMap;
use crosswork::{CrossTree, Node, RightTuple, Word};

pub fn w(s: &str) -> Word {
    Word::parse(s, 3).unwrap()
}

pub fn t1(s: &str) -> RightTuple {
    RightTuple::parse(&[s], 2).unwrap()
}

pub fn node(l: &str, r: &str) -> Node {
    Node::new(w(l), t1(r)).unwrap()
}

/// All digit strings of length `len` over `0..k`, lexicographic.
pub fn strings(k: u8, len: usize) -> Vec<Vec<u8>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        let mut next = Vec::new();
        for s in &out {
            for d in 0..k {
                let mut v = s.clone();
                v.push(d);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

pub fn starts_with(long: &[u8], short: &[u8]) -> bool {
    long.len() >= short.len() && &long[..short.len()] == short
}

pub fn tuple_extends(long: &RightTuple, short: &RightTuple) -> bool {
    long.words().iter().zip(short.words()).all(|(a, b)| starts_with(a.digits(), b.digits()))
}

pub fn node_extends(long: &Node, short: &Node) -> bool {
    starts_with(long.left.digits(), short.left.digits()) && tuple_extends(&long.right, &short.right)
}

/// Differ at every position from `from` on.
pub fn differ_from(a: &[u8], b: &[u8], from: usize) -> bool {
    a.len() == b.len() && (from..a.len()).all(|i| a[i] != b[i])
}

/// Left-fullness straight from the definition on the node listing.
pub fn brute_leftfull(t: &CrossTree, rho: &Word, sigma: &RightTuple) -> bool {
    let nodes = t.nodes();
    let set: BTreeSet<&Node> = nodes.iter().collect();
    if !set.contains(&Node::new(rho.clone(), sigma.clone()).unwrap()) {
        return false;
    }
    let h = t.height();
    for a in &nodes {
        let has_succ = nodes.iter().any(|b| {
            let grow_left = b.left.len() == a.left.len() + 1
                && starts_with(b.left.digits(), a.left.digits())
                && b.right == a.right;
            let grow_right = b.left == a.left && b.right.len() == a.right.len() + 1 && tuple_extends(&b.right, &a.right);
            grow_left || grow_right
        });
        if !has_succ && a.left.len() != h {
            return false;
        }
    }
    if rho.len() > h {
        return false;
    }
    strings(3, h - rho.len()).into_iter().all(|tail| {
        let mut mu = rho.digits().to_vec();
        mu.extend(tail);
        nodes.iter().any(|n| n.left.digits() == mu.as_slice() && n.right.len() == h && tuple_extends(&n.right, sigma))
    })
}

/// Incompatibility preservation straight from the definition.
pub fn brute_verify(phi: &IncompatMap, rho0: &[u8], rho1: &[u8]) -> bool {
    let n = phi.n();
    let sources: Vec<(Vec<u8>, Vec<u8>)> =
        phi.entries().map(|(s, t)| (s.digits().to_vec(), t.digits().to_vec())).collect();
    if sources.iter().any(|(s, t)| !starts_with(t, s)) {
        return false;
    }
    for (s0, t0) in &sources {
        for (s1, t1) in &sources {
            if !starts_with(s0, rho0) || !starts_with(s1, rho1) {
                continue;
            }
            if differ_from(s0, s1, rho0.len()) && !differ_from(t0, t1, n) {
                return false;
            }
        }
    }
    true
}

/// Leftfull node pairs `(a, b)` of `t` with equal left lengths.
pub fn condition_tuples(t: &CrossTree) -> Vec<(Node, Node)> {
    let full: Vec<Node> = t.nodes().into_iter().filter(|n| brute_leftfull(t, &n.left, &n.right)).collect();
    let mut out = Vec::new();
    for a in &full {
        for b in &full {
            if a.left.len() == b.left.len() {
                out.push((a.clone(), b.clone()));
            }
        }
    }
    out
}
