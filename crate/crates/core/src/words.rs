//! Finite words over small alphabets, right tuples of binary words, and the
//! nodes of cross-trees.
//!
//! Left words default to the ternary alphabet, right words to the binary
//! one. Every value is immutable once built.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use crate::error::{input, Error, Result};

/// Default alphabet size of left words.
pub const LEFT_K: u8 = 3;
/// Default alphabet size of right words.
pub const RIGHT_K: u8 = 2;

/// Alphabet sizes used by a cross-tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Alphabets {
    pub left: u8,
    pub right: u8,
}

impl Default for Alphabets {
    fn default() -> Self {
        Alphabets { left: LEFT_K, right: RIGHT_K }
    }
}

impl Alphabets {
    pub fn new(left: u8, right: u8) -> Result<Self> {
        if left < 2 || right < 2 {
            return input(format!("alphabets must have at least two symbols, got ({left}, {right})"));
        }
        if left > 10 || right > 10 {
            return input("alphabets larger than 10 cannot be written as digit strings");
        }
        Ok(Alphabets { left, right })
    }

    /// Rejects alphabet pairs where the left side is not strictly larger.
    pub fn require_asymmetry(&self) -> Result<()> {
        if self.left <= self.right {
            return input(format!(
                "operation needs k_left > k_right, got ({}, {})",
                self.left, self.right
            ));
        }
        Ok(())
    }
}

/// A finite word over `{0, .., k-1}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    digits: Vec<u8>,
    k: u8,
}

impl Word {
    pub fn new(k: u8, digits: Vec<u8>) -> Result<Self> {
        if k == 0 {
            return input("alphabet size must be positive");
        }
        if let Some(d) = digits.iter().find(|&&d| d >= k) {
            return input(format!("digit {d} out of alphabet of size {k}"));
        }
        Ok(Word { digits, k })
    }

    pub(crate) fn from_digits_unchecked(k: u8, digits: Vec<u8>) -> Self {
        debug_assert!(digits.iter().all(|&d| d < k));
        Word { digits, k }
    }

    pub fn empty(k: u8) -> Self {
        Word { digits: Vec::new(), k }
    }

    /// Parses a string of ASCII digits.
    pub fn parse(s: &str, k: u8) -> Result<Self> {
        let mut digits = Vec::with_capacity(s.len());
        for (i, c) in s.chars().enumerate() {
            let d = c.to_digit(10).ok_or_else(|| Error::Parse {
                location: format!("character {i} of {s:?}"),
                message: "expected an ASCII digit".into(),
            })?;
            digits.push(d as u8);
        }
        Word::new(k, digits)
    }

    pub fn alphabet(&self) -> u8 {
        self.k
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    pub fn get(&self, i: usize) -> Option<u8> {
        self.digits.get(i).copied()
    }

    /// The prefix of length `len` (clamped to the word length).
    pub fn prefix(&self, len: usize) -> Word {
        Word { digits: self.digits[..len.min(self.len())].to_vec(), k: self.k }
    }

    /// The part of `self` after the first `from` symbols.
    pub fn suffix_from(&self, from: usize) -> Word {
        Word { digits: self.digits[from.min(self.len())..].to_vec(), k: self.k }
    }

    pub fn child(&self, d: u8) -> Word {
        debug_assert!(d < self.k);
        let mut digits = Vec::with_capacity(self.len() + 1);
        digits.extend_from_slice(&self.digits);
        digits.push(d);
        Word { digits, k: self.k }
    }

    pub fn concat(&self, tail: &Word) -> Word {
        debug_assert_eq!(self.k, tail.k);
        let mut digits = self.digits.clone();
        digits.extend_from_slice(&tail.digits);
        Word { digits, k: self.k }
    }

    /// Non-strict prefix test; panics-free, assumes a shared alphabet.
    pub(crate) fn is_prefix_of_unchecked(&self, other: &Word) -> bool {
        other.digits.starts_with(&self.digits)
    }

    /// Shortlex comparison: length first, then lexicographic.
    pub fn shortlex_cmp(&self, other: &Word) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.digits.cmp(&other.digits))
    }

    /// Index of a word among the words of its length in lexicographic order.
    pub fn rank(&self) -> usize {
        self.digits.iter().fold(0usize, |acc, &d| acc * self.k as usize + d as usize)
    }

    /// Inverse of [`Word::rank`].
    pub fn unrank(k: u8, len: usize, mut rank: usize) -> Word {
        let mut digits = vec![0u8; len];
        for slot in digits.iter_mut().rev() {
            *slot = (rank % k as usize) as u8;
            rank /= k as usize;
        }
        Word { digits, k }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.digits {
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

/// An r-tuple of equal-length words over the right alphabet.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RightTuple {
    words: Vec<Word>,
}

impl RightTuple {
    pub fn new(words: Vec<Word>) -> Result<Self> {
        let Some(first) = words.first() else {
            return input("right tuples need arity at least 1");
        };
        let (len, k) = (first.len(), first.alphabet());
        if words.iter().any(|w| w.len() != len) {
            return input("right tuple components must have equal length");
        }
        if words.iter().any(|w| w.alphabet() != k) {
            return input("right tuple components must share an alphabet");
        }
        Ok(RightTuple { words })
    }

    pub fn empty(r: usize, k: u8) -> Self {
        RightTuple { words: vec![Word::empty(k); r] }
    }

    pub fn parse<S: AsRef<str>>(parts: &[S], k: u8) -> Result<Self> {
        let words = parts.iter().map(|p| Word::parse(p.as_ref(), k)).collect::<Result<Vec<_>>>()?;
        RightTuple::new(words)
    }

    pub fn arity(&self) -> usize {
        self.words.len()
    }

    /// Common length of the components.
    pub fn len(&self) -> usize {
        self.words[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn alphabet(&self) -> u8 {
        self.words[0].alphabet()
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn component(&self, s: usize) -> &Word {
        &self.words[s]
    }

    pub fn prefix(&self, len: usize) -> RightTuple {
        RightTuple { words: self.words.iter().map(|w| w.prefix(len)).collect() }
    }

    /// Appends one symbol to every component.
    pub fn child(&self, column: &[u8]) -> RightTuple {
        debug_assert_eq!(column.len(), self.arity());
        RightTuple { words: self.words.iter().zip(column).map(|(w, &d)| w.child(d)).collect() }
    }

    pub fn concat(&self, tail: &RightTuple) -> RightTuple {
        RightTuple { words: self.words.iter().zip(&tail.words).map(|(a, b)| a.concat(b)).collect() }
    }

    pub fn suffix_from(&self, from: usize) -> RightTuple {
        RightTuple { words: self.words.iter().map(|w| w.suffix_from(from)).collect() }
    }

    pub(crate) fn is_prefix_of_unchecked(&self, other: &RightTuple) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a.is_prefix_of_unchecked(b))
    }

    pub fn shortlex_cmp(&self, other: &RightTuple) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.cmp(other))
    }

    /// All tuples of arity `r` whose components have length `len`, in
    /// lexicographic order.
    pub fn all_of_length(r: usize, k: u8, len: usize) -> Vec<RightTuple> {
        let per = words_of_length(k, len);
        let mut out = vec![Vec::new()];
        for _ in 0..r {
            out = out
                .into_iter()
                .flat_map(|prefix: Vec<Word>| {
                    per.iter().map(move |w| {
                        let mut p = prefix.clone();
                        p.push(w.clone());
                        p
                    })
                })
                .collect();
        }
        out.into_iter().map(|words| RightTuple { words }).collect()
    }

    /// All extensions of `self` to component length `len`, lexicographic.
    pub fn extensions(&self, len: usize) -> Vec<RightTuple> {
        if len < self.len() {
            return Vec::new();
        }
        RightTuple::all_of_length(self.arity(), self.alphabet(), len - self.len())
            .into_iter()
            .map(|tail| self.concat(&tail))
            .collect()
    }
}

impl fmt::Debug for RightTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.words).finish()
    }
}

/// A node `(left, right)` of a cross-tree.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Node {
    pub left: Word,
    pub right: RightTuple,
}

impl Node {
    pub fn new(left: Word, right: RightTuple) -> Result<Self> {
        if right.len() > left.len() {
            return input(format!(
                "right length {} exceeds left length {} in node ({left}, {right:?})",
                right.len(),
                left.len()
            ));
        }
        Ok(Node { left, right })
    }

    pub(crate) fn new_unchecked(left: Word, right: RightTuple) -> Self {
        debug_assert!(right.len() <= left.len());
        Node { left, right }
    }

    /// Componentwise non-strict prefix.
    pub fn is_prefix_of(&self, other: &Node) -> bool {
        self.left.is_prefix_of_unchecked(&other.left) && self.right.is_prefix_of_unchecked(&other.right)
    }

    /// Length in the max-of-components sense; for valid nodes this is the left length.
    pub fn height(&self) -> usize {
        self.left.len().max(self.right.len())
    }

    /// `(length, lex)` order on nodes.
    pub fn shortlex_cmp(&self, other: &Node) -> Ordering {
        self.left
            .shortlex_cmp(&other.left)
            .then_with(|| self.right.shortlex_cmp(&other.right))
    }
}

impl fmt::Debug for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}, {:?})", self.left, self.right)
    }
}

/// Values carrying the componentwise prefix order.
pub trait PrefixOrder {
    /// Non-strict prefix test; errors when the shapes are not comparable.
    fn is_prefix_of(&self, other: &Self) -> Result<bool>;
}

impl PrefixOrder for Word {
    fn is_prefix_of(&self, other: &Word) -> Result<bool> {
        if self.k != other.k {
            return input(format!("alphabet mismatch: {} vs {}", self.k, other.k));
        }
        Ok(self.is_prefix_of_unchecked(other))
    }
}

impl PrefixOrder for RightTuple {
    fn is_prefix_of(&self, other: &RightTuple) -> Result<bool> {
        if self.arity() != other.arity() {
            return input(format!("arity mismatch: {} vs {}", self.arity(), other.arity()));
        }
        if self.alphabet() != other.alphabet() {
            return input("alphabet mismatch between tuples");
        }
        Ok(self.is_prefix_of_unchecked(other))
    }
}

pub fn is_prefix<P: PrefixOrder>(a: &P, b: &P) -> Result<bool> {
    a.is_prefix_of(b)
}

/// Whether `(mu0, mu1)` is completely incompatible over `(rho0, rho1)`:
/// the suffixes past the stems differ at every position.
pub fn completely_incompatible(mu0: &Word, mu1: &Word, rho0: &Word, rho1: &Word) -> Result<bool> {
    if mu0.len() != mu1.len() {
        return input(format!("words {mu0} and {mu1} have different lengths"));
    }
    if rho0.len() != rho1.len() {
        return input(format!("stems {rho0} and {rho1} have different lengths"));
    }
    if !rho0.is_prefix_of(mu0)? || !rho1.is_prefix_of(mu1)? {
        return input(format!("stems ({rho0}, {rho1}) are not prefixes of ({mu0}, {mu1})"));
    }
    Ok(incompatible_from(mu0.digits(), mu1.digits(), rho0.len()))
}

/// Unchecked core of [`completely_incompatible`]: digits differ at every
/// position from `from` on. Callers guarantee equal lengths.
pub(crate) fn incompatible_from(a: &[u8], b: &[u8], from: usize) -> bool {
    a[from..].iter().zip(&b[from..]).all(|(x, y)| x != y)
}

/// Positions where two equal-length words agree.
pub fn agreement_positions(w0: &Word, w1: &Word) -> Result<BTreeSet<usize>> {
    if w0.len() != w1.len() {
        return input(format!("words {w0} and {w1} have different lengths"));
    }
    Ok(w0
        .digits()
        .iter()
        .zip(w1.digits())
        .enumerate()
        .filter(|(_, (a, b))| a == b)
        .map(|(i, _)| i)
        .collect())
}

/// All words of length `len` over `{0, .., k-1}`, lexicographic.
pub fn words_of_length(k: u8, len: usize) -> Vec<Word> {
    let count = (k as usize).pow(len as u32);
    (0..count).map(|r| Word::unrank(k, len, r)).collect()
}

/// All extensions of `stem` to `target_length`, lexicographic. Empty when
/// the stem is already longer than the target.
pub fn enumerate_extensions(stem: &Word, target_length: usize) -> Vec<Word> {
    if target_length < stem.len() {
        return Vec::new();
    }
    words_of_length(stem.alphabet(), target_length - stem.len())
        .iter()
        .map(|tail| stem.concat(tail))
        .collect()
}
