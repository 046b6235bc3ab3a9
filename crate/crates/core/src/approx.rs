//! Finite approximation tables over the Gamma hierarchy, the normalizing
//! wrapper for ill-formed streams, and the diagonalizer they feed.

use std::collections::BTreeSet;

use crate::error::{input, Error, Result};
use crate::gammaspace::{compatible, interpret, leq, over, validate_path, Gamma0, GammaElem};
use crate::words::{Word, LEFT_K};

/// Rows `n`, columns `s`; row `n` approximates one element over `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApproxTable {
    m: usize,
    rows: Vec<Vec<GammaElem>>,
}

impl ApproxTable {
    /// Unchecked; see [`validate_table`].
    pub fn new(m: usize, rows: Vec<Vec<GammaElem>>) -> Self {
        ApproxTable { m, rows }
    }

    /// Every row constant at the root.
    pub fn constant_root(m: usize, rows: usize, cols: usize) -> Self {
        ApproxTable { m, rows: vec![vec![GammaElem::zeta(m); cols]; rows] }
    }

    pub fn level(&self) -> usize {
        self.m
    }

    pub fn rows(&self) -> &[Vec<GammaElem>] {
        &self.rows
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn col_count(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    pub fn get(&self, n: usize, s: usize) -> Option<&GammaElem> {
        self.rows.get(n)?.get(s)
    }
}

/// Broken table invariants by cell; empty when the table is valid.
pub fn validate_table(t: &ApproxTable) -> Vec<String> {
    let mut out = Vec::new();
    let root = GammaElem::zeta(t.m);
    let cols = t.col_count();
    for (n, row) in t.rows.iter().enumerate() {
        if row.is_empty() || row.len() != cols {
            out.push(format!("row {n} has {} columns, expected {cols} (at least 1)", row.len()));
            continue;
        }
        let mut well_formed = vec![true; row.len()];
        for (s, cell) in row.iter().enumerate() {
            if cell.level() != t.m {
                out.push(format!("cell ({n},{s}) has level {} instead of {}", cell.level(), t.m));
                well_formed[s] = false;
                continue;
            }
            let report = validate_path(cell);
            if !report.is_empty() {
                out.push(format!("cell ({n},{s}) is not a valid element: {}", report.join("; ")));
                well_formed[s] = false;
                continue;
            }
            if !over(cell, n as u32) {
                out.push(format!("cell ({n},{s}) is not over {n}"));
            }
        }
        if well_formed[0] && row[0] != root {
            out.push(format!("cell ({n},0) is not the root"));
        }
        for s in 1..row.len() {
            if well_formed[s - 1] && well_formed[s] && !leq(&row[s - 1], &row[s]).unwrap_or(false) {
                out.push(format!("row {n} decreases at ({n},{s})"));
            }
        }
    }
    out
}

fn require_valid(t: &ApproxTable) -> Result<()> {
    let report = validate_table(t);
    if report.is_empty() {
        Ok(())
    } else {
        input(format!("invalid table: {}", report.join("; ")))
    }
}

/// The last column of row `n`, read as the row's limit.
pub fn limit(t: &ApproxTable, n: usize) -> Result<GammaElem> {
    require_valid(t)?;
    let row = t.rows.get(n).ok_or_else(|| Error::Input(format!("row {n} out of range for {} rows", t.rows.len())))?;
    Ok(row.last().expect("validated rows are nonempty").clone())
}

/// A stream cell: a value and the stage from which it is visible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StreamCell {
    pub value: GammaElem,
    pub stage: usize,
}

/// A possibly ill-formed grid of guesses, revealed stage by stage.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StepStream {
    pub rows: Vec<Vec<Option<StreamCell>>>,
}

impl StepStream {
    /// A table seen as a stream whose every cell is visible at once.
    pub fn from_table(t: &ApproxTable) -> Self {
        StepStream {
            rows: t.rows.iter().map(|row| row.iter().map(|v| Some(StreamCell { value: v.clone(), stage: 0 })).collect()).collect(),
        }
    }

    fn last_stage(&self) -> usize {
        self.rows.iter().flatten().flatten().map(|c| c.stage).max().unwrap_or(0)
    }

    fn width(&self) -> usize {
        self.rows.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// The last present value of row `n`.
    pub fn row_final(&self, n: usize) -> Option<&GammaElem> {
        self.rows.get(n)?.iter().rev().flatten().next().map(|c| &c.value)
    }
}

/// Turns any stream into a valid table: each stage moves to the value of
/// the largest earlier visible column that lies strictly above the current
/// one (and is a well-formed element over the row), else stays put.
pub fn normalize(xi: &StepStream, m: usize) -> ApproxTable {
    let stages = xi.width().max(xi.last_stage() + 1) + 1;
    let root = GammaElem::zeta(m);
    let rows = xi
        .rows
        .iter()
        .enumerate()
        .map(|(n, row)| {
            let usable: Vec<Option<&StreamCell>> = row
                .iter()
                .map(|c| c.as_ref().filter(|c| c.value.level() == m && validate_path(&c.value).is_empty() && over(&c.value, n as u32)))
                .collect();
            let mut out = vec![root.clone()];
            for t in 1..stages {
                let prev = out[t - 1].clone();
                let next = (0..t.min(usable.len()))
                    .rev()
                    .filter_map(|s| usable[s])
                    .find(|c| c.stage <= t && c.value != prev && leq(&prev, &c.value).unwrap_or(false))
                    .map_or(prev, |c| c.value.clone());
                out.push(next);
            }
            out
        })
        .collect();
    ApproxTable { m, rows }
}

/// Rows of `k`-tuples of pairwise disjoint finite sets, all above the row index.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DisjointArray {
    pub rows: Vec<Vec<BTreeSet<u32>>>,
}

impl DisjointArray {
    pub fn new(rows: Vec<Vec<BTreeSet<u32>>>) -> Result<Self> {
        let arr = DisjointArray { rows };
        arr.check()?;
        Ok(arr)
    }

    pub fn check(&self) -> Result<()> {
        let k = self.rows.first().map_or(0, Vec::len);
        for (n, row) in self.rows.iter().enumerate() {
            if row.len() != k {
                return input(format!("row {n} has {} sets, expected {k}", row.len()));
            }
            let mut seen = BTreeSet::new();
            for (j, set) in row.iter().enumerate() {
                if let Some(x) = set.iter().find(|&&x| x <= n as u32) {
                    return input(format!("row {n}: {x} in set {j} is not above {n}"));
                }
                if let Some(x) = set.iter().find(|x| seen.contains(*x)) {
                    return input(format!("row {n}: {x} appears in two sets"));
                }
                seen.extend(set.iter().copied());
            }
        }
        Ok(())
    }
}

/// The level-0 table whose row `n` jumps from the empty map to the coloring
/// sending each member of the `j`-th set to `j`.
pub fn from_array(arr: &DisjointArray) -> Result<ApproxTable> {
    arr.check()?;
    if arr.rows.first().is_some_and(|r| r.len() != LEFT_K as usize) {
        return input(format!("array rows must hold {LEFT_K} sets"));
    }
    let rows = arr
        .rows
        .iter()
        .map(|sets| {
            let pairs: Vec<(u32, u8)> = sets.iter().enumerate().flat_map(|(j, set)| set.iter().map(move |&x| (x, j as u8))).collect();
            let g = Gamma0::from_pairs(&pairs).expect("disjoint sets give a function");
            vec![GammaElem::zeta(0), GammaElem::Base(g)]
        })
        .collect();
    Ok(ApproxTable { m: 0, rows })
}

/// Least row whose sets all sit inside the prefix and are colored by their
/// index there.
pub fn hyperimmune_witness(f: &Word, arr: &DisjointArray) -> Option<usize> {
    arr.rows.iter().position(|sets| {
        sets.iter().enumerate().all(|(j, set)| set.iter().all(|&x| f.get(x as usize) == Some(j as u8)))
    })
}

/// One diagonalization stage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertEntry {
    pub table: usize,
    pub row: usize,
    pub chosen: Gamma0,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Certificate {
    pub entries: Vec<CertEntry>,
}

/// Order on colorings used to pick a member: support first, then values.
fn support_then_values(g: &Gamma0) -> (Vec<u32>, Vec<u8>) {
    (g.support().collect(), g.entries().iter().map(|&(_, v)| v).collect())
}

/// Builds a coloring prefix compatible with the limit of each table at the
/// row equal to the prefix length when the table is consulted.
pub fn diagonalize(tables: &[ApproxTable]) -> Result<(Word, Certificate)> {
    for (i, t) in tables.iter().enumerate() {
        let report = validate_table(t);
        if !report.is_empty() {
            return input(format!("table {i} is invalid: {}", report.join("; ")));
        }
    }
    let mut prefix: Vec<u8> = Vec::new();
    let mut cert = Certificate::default();
    for (i, t) in tables.iter().enumerate() {
        let n = prefix.len();
        if n >= t.row_count() {
            return Err(Error::TableExhausted { table: i, row: n, rows: t.row_count() });
        }
        let gamma = limit(t, n)?;
        let chosen = interpret(&gamma).into_iter().min_by_key(support_then_values).expect("interpretations are nonempty");
        if let Some(top) = chosen.support().last() {
            prefix.resize(top as usize + 1, 0);
            for &(x, v) in chosen.entries() {
                prefix[x as usize] = v;
            }
        }
        cert.entries.push(CertEntry { table: i, row: n, chosen });
    }
    let word = Word::new(LEFT_K, prefix)?;
    recheck(tables, &word, &cert)?;
    Ok((word, cert))
}

/// Re-verifies a certificate: the prefix is compatible with every recorded limit.
pub fn recheck(tables: &[ApproxTable], prefix: &Word, cert: &Certificate) -> Result<()> {
    for e in &cert.entries {
        let t = tables.get(e.table).ok_or_else(|| Error::Input(format!("certificate names missing table {}", e.table)))?;
        let fs = interpret(&limit(t, e.row)?);
        if !fs.contains(&e.chosen) || !compatible(prefix, &fs) {
            return Err(Error::Internal(format!("prefix {prefix:?} is not compatible with table {} at row {}", e.table, e.row)));
        }
    }
    Ok(())
}
