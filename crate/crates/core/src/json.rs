//! Canonical JSON documents for every artifact the workbench reads or writes.
//!
//! Words are strings of digits, right tuples arrays of such strings. Parse
//! errors carry a location: `line:column` for malformed JSON, a field path
//! for well-formed JSON with bad content.

use std::collections::{BTreeMap, BTreeSet};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::approx::{ApproxTable, CertEntry, Certificate, DisjointArray, StepStream, StreamCell};
use crate::ccsolve::Solution;
use crate::crosstree::{CrossTree, ForbiddenSet};
use crate::error::{Error, Result};
use crate::gammaspace::{FinTree, Gamma0, GammaElem, Step};
use crate::incmaps::IncompatMap;
use crate::sufficiency::{CondPair, NodePairSet};
use crate::words::{Alphabets, Node, RightTuple, Word, LEFT_K};

fn parse_err(location: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Parse { location: location.into(), message: message.into() }
}

fn from_str<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| parse_err(format!("{}:{}", e.line(), e.column()), e.to_string()))
}

/// Compact rendering with sorted keys; equal values give byte-identical text.
pub fn to_canonical(value: &impl Serialize) -> String {
    serde_json::to_value(value).expect("documents serialize").to_string()
}

fn word_at(s: &str, k: u8, at: &str) -> Result<Word> {
    Word::parse(s, k).map_err(|e| parse_err(at, e.to_string()))
}

fn tuple_at(parts: &[String], k: u8, at: &str) -> Result<RightTuple> {
    RightTuple::parse(parts, k).map_err(|e| parse_err(at, e.to_string()))
}

// ---------------------------------------------------------------- nodes

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct NodeDoc {
    pub left: String,
    pub right: Vec<String>,
}

impl NodeDoc {
    pub fn from_node(n: &Node) -> Self {
        NodeDoc { left: n.left.to_string(), right: n.right.words().iter().map(Word::to_string).collect() }
    }

    pub fn to_node(&self, alphabets: Alphabets, at: &str) -> Result<Node> {
        let left = word_at(&self.left, alphabets.left, &format!("{at}.left"))?;
        let right = tuple_at(&self.right, alphabets.right, &format!("{at}.right"))?;
        Node::new(left, right).map_err(|e| parse_err(at, e.to_string()))
    }
}

// ---------------------------------------------------------------- cross-trees

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeDoc {
    pub r: usize,
    pub height: usize,
    pub nodes: Vec<NodeDoc>,
}

pub fn tree_to_doc(t: &CrossTree) -> TreeDoc {
    TreeDoc { r: t.r(), height: t.height(), nodes: t.nodes().iter().map(NodeDoc::from_node).collect() }
}

pub fn tree_to_json(t: &CrossTree) -> String {
    to_canonical(&tree_to_doc(t))
}

/// Loads a tree as listed; shape problems are left to `CrossTree::validate`.
pub fn tree_from_json(text: &str) -> Result<CrossTree> {
    let doc: TreeDoc = from_str(text)?;
    let alphabets = Alphabets::default();
    let nodes = doc
        .nodes
        .iter()
        .enumerate()
        .map(|(i, n)| n.to_node(alphabets, &format!("nodes[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    CrossTree::new(doc.r, doc.height, alphabets, nodes).map_err(|e| parse_err("r", e.to_string()))
}

/// Forbidden basic open sets: an array of `{left, right}` records.
pub fn forbidden_from_json(text: &str) -> Result<ForbiddenSet> {
    let docs: Vec<NodeDoc> = from_str(text)?;
    let alphabets = Alphabets::default();
    let mut entries = Vec::new();
    for (i, d) in docs.iter().enumerate() {
        let at = format!("[{i}]");
        entries.push((word_at(&d.left, alphabets.left, &format!("{at}.left"))?, tuple_at(&d.right, alphabets.right, &format!("{at}.right"))?));
    }
    Ok(ForbiddenSet::new(entries))
}

pub fn forbidden_to_json(w: &ForbiddenSet) -> String {
    let docs: Vec<NodeDoc> = w
        .entries
        .iter()
        .map(|(mu, tau)| NodeDoc { left: mu.to_string(), right: tau.words().iter().map(Word::to_string).collect() })
        .collect();
    to_canonical(&docs)
}

// ---------------------------------------------------------------- maps

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapDoc {
    pub n: usize,
    pub m: usize,
    pub table: BTreeMap<String, String>,
}

pub fn map_to_json(phi: &IncompatMap) -> String {
    let table = phi.entries().map(|(src, dst)| (src.to_string(), dst.to_string())).collect();
    to_canonical(&MapDoc { n: phi.n(), m: phi.m(), table })
}

pub fn map_from_json(text: &str) -> Result<IncompatMap> {
    let doc: MapDoc = from_str(text)?;
    let mut table = BTreeMap::new();
    for (src, dst) in &doc.table {
        let at = format!("table.{src}");
        table.insert(word_at(src, LEFT_K, &at)?, word_at(dst, LEFT_K, &at)?);
    }
    IncompatMap::new(doc.n, doc.m, table).map_err(|e| parse_err("table", e.to_string()))
}

// ---------------------------------------------------------------- condition pairs and pair sets

pub fn condpair_to_value(cp: &CondPair) -> Value {
    serde_json::to_value([NodeDoc::from_node(&cp.stems[0]), NodeDoc::from_node(&cp.stems[1])]).expect("nodes serialize")
}

pub fn condpair_from_json(text: &str) -> Result<CondPair> {
    let docs: [NodeDoc; 2] = from_str(text)?;
    let a = docs[0].to_node(Alphabets::default(), "[0]")?;
    let b = docs[1].to_node(Alphabets::default(), "[1]")?;
    CondPair::new(a, b).map_err(|e| parse_err("[1]", e.to_string()))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairDoc {
    pub first: NodeDoc,
    pub second: NodeDoc,
}

/// An extensional pair set; the file asserts suffix closure, which
/// consumers check against their tree.
pub fn pairset_from_json(text: &str) -> Result<NodePairSet> {
    let docs: Vec<PairDoc> = from_str(text)?;
    let mut pairs = Vec::new();
    for (i, d) in docs.iter().enumerate() {
        let a = d.first.to_node(Alphabets::default(), &format!("[{i}].first"))?;
        let b = d.second.to_node(Alphabets::default(), &format!("[{i}].second"))?;
        pairs.push((a, b));
    }
    Ok(NodePairSet::extensional(pairs, true))
}

pub fn pairset_to_json(a: &NodePairSet) -> Option<String> {
    let docs: Vec<PairDoc> =
        a.pairs()?.map(|(x, y)| PairDoc { first: NodeDoc::from_node(x), second: NodeDoc::from_node(y) }).collect();
    Some(to_canonical(&docs))
}

// ---------------------------------------------------------------- solutions

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RestartDoc {
    pub at: usize,
    pub excluded: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolutionDoc {
    pub pair: [NodeDoc; 2],
    pub agreement: Vec<Vec<usize>>,
    pub excluded: Vec<usize>,
    pub exhausted: Vec<usize>,
    pub completed: Vec<usize>,
    pub trace: Vec<Value>,
    pub restarts: Vec<RestartDoc>,
}

pub fn solution_to_value(s: &Solution) -> Value {
    let doc = SolutionDoc {
        pair: [NodeDoc::from_node(&s.pair[0]), NodeDoc::from_node(&s.pair[1])],
        agreement: s.agreement.iter().map(|a| a.iter().copied().collect()).collect(),
        excluded: s.excluded.iter().copied().collect(),
        exhausted: s.exhausted.iter().copied().collect(),
        completed: s.completed.iter().copied().collect(),
        trace: s.trace.iter().map(condpair_to_value).collect(),
        restarts: s.restarts.iter().map(|r| RestartDoc { at: r.at, excluded: r.excluded.iter().copied().collect() }).collect(),
    };
    serde_json::to_value(doc).expect("solutions serialize")
}

// ---------------------------------------------------------------- gamma elements

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct Gamma0Doc {
    pub support: Vec<u32>,
    pub values: Vec<u8>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct LabelDoc {
    pub node: Vec<u32>,
    pub label: GammaDoc,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct StepDoc {
    pub tree: Vec<Vec<u32>>,
    pub labels: Vec<LabelDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct GammaDoc {
    pub level: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<Gamma0Doc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<Vec<StepDoc>>,
}

pub fn gamma0_to_doc(g: &Gamma0) -> Gamma0Doc {
    Gamma0Doc { support: g.support().collect(), values: g.entries().iter().map(|&(_, v)| v).collect() }
}

fn gamma0_from_doc(d: &Gamma0Doc, at: &str) -> Result<Gamma0> {
    if d.support.len() != d.values.len() {
        return Err(parse_err(at, "support and values differ in length"));
    }
    let pairs: Vec<(u32, u8)> = d.support.iter().copied().zip(d.values.iter().copied()).collect();
    Gamma0::from_pairs(&pairs).map_err(|e| parse_err(at, e.to_string()))
}

pub fn gamma_to_doc(g: &GammaElem) -> GammaDoc {
    match g {
        GammaElem::Base(b) => GammaDoc { level: 0, map: Some(gamma0_to_doc(b)), steps: None },
        GammaElem::Path { level, steps } => GammaDoc {
            level: *level,
            map: None,
            steps: Some(
                steps
                    .iter()
                    .map(|s| StepDoc {
                        tree: s.tree.nodes().iter().cloned().collect(),
                        labels: s.labels.iter().map(|(k, v)| LabelDoc { node: k.clone(), label: gamma_to_doc(v) }).collect(),
                    })
                    .collect(),
            ),
        },
    }
}

pub fn gamma_from_doc(d: &GammaDoc, at: &str) -> Result<GammaElem> {
    match (d.level, &d.map, &d.steps) {
        (0, Some(map), None) => Ok(GammaElem::Base(gamma0_from_doc(map, &format!("{at}.map"))?)),
        (0, _, _) => Err(parse_err(at, "a level-0 element needs exactly a map")),
        (level, None, Some(steps)) => {
            let mut out = Vec::new();
            for (j, s) in steps.iter().enumerate() {
                let here = format!("{at}.steps[{j}]");
                let tree = FinTree::new(s.tree.iter().cloned()).map_err(|e| parse_err(format!("{here}.tree"), e.to_string()))?;
                let mut labels = BTreeMap::new();
                for (i, l) in s.labels.iter().enumerate() {
                    let label = gamma_from_doc(&l.label, &format!("{here}.labels[{i}].label"))?;
                    if labels.insert(l.node.clone(), label).is_some() {
                        return Err(parse_err(format!("{here}.labels[{i}]"), "node labeled twice"));
                    }
                }
                out.push(Step { tree, labels });
            }
            if out.is_empty() {
                return Err(parse_err(at, "a path needs at least one step"));
            }
            Ok(GammaElem::Path { level, steps: out })
        }
        _ => Err(parse_err(at, "a path element needs exactly a list of steps")),
    }
}

pub fn gamma_to_value(g: &GammaElem) -> Value {
    serde_json::to_value(gamma_to_doc(g)).expect("elements serialize")
}

pub fn gamma_from_json(text: &str) -> Result<GammaElem> {
    gamma_from_doc(&from_str(text)?, "$")
}

pub fn gamma0_set_to_value(fs: &BTreeSet<Gamma0>) -> Value {
    serde_json::to_value(fs.iter().map(gamma0_to_doc).collect::<Vec<_>>()).expect("maps serialize")
}

// ---------------------------------------------------------------- tables, streams, arrays

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableDoc {
    pub m: usize,
    pub rows: Vec<Vec<GammaDoc>>,
}

pub fn table_to_json(t: &ApproxTable) -> String {
    to_canonical(&TableDoc { m: t.level(), rows: t.rows().iter().map(|r| r.iter().map(gamma_to_doc).collect()).collect() })
}

pub fn table_from_json(text: &str) -> Result<ApproxTable> {
    let doc: TableDoc = from_str(text)?;
    let rows = doc
        .rows
        .iter()
        .enumerate()
        .map(|(n, row)| row.iter().enumerate().map(|(s, c)| gamma_from_doc(c, &format!("rows[{n}][{s}]"))).collect())
        .collect::<Result<Vec<Vec<_>>>>()?;
    Ok(ApproxTable::new(doc.m, rows))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellDoc {
    pub value: GammaDoc,
    pub stage: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StreamDoc {
    pub rows: Vec<Vec<Option<CellDoc>>>,
}

pub fn stream_from_json(text: &str) -> Result<StepStream> {
    let doc: StreamDoc = from_str(text)?;
    let mut rows = Vec::new();
    for (n, row) in doc.rows.iter().enumerate() {
        let mut cells = Vec::new();
        for (s, c) in row.iter().enumerate() {
            cells.push(match c {
                None => None,
                Some(c) => Some(StreamCell { value: gamma_from_doc(&c.value, &format!("rows[{n}][{s}].value"))?, stage: c.stage }),
            });
        }
        rows.push(cells);
    }
    Ok(StepStream { rows })
}

pub fn stream_to_json(x: &StepStream) -> String {
    let doc = StreamDoc {
        rows: x
            .rows
            .iter()
            .map(|r| r.iter().map(|c| c.as_ref().map(|c| CellDoc { value: gamma_to_doc(&c.value), stage: c.stage })).collect())
            .collect(),
    };
    to_canonical(&doc)
}

pub fn array_from_json(text: &str) -> Result<DisjointArray> {
    let rows: Vec<Vec<BTreeSet<u32>>> = from_str(text)?;
    DisjointArray::new(rows).map_err(|e| parse_err("$", e.to_string()))
}

pub fn array_to_json(arr: &DisjointArray) -> String {
    to_canonical(&arr.rows)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertEntryDoc {
    pub table: usize,
    pub row: usize,
    pub chosen: Gamma0Doc,
}

pub fn certificate_to_value(prefix: &Word, cert: &Certificate) -> Value {
    let entries: Vec<CertEntryDoc> = cert
        .entries
        .iter()
        .map(|e: &CertEntry| CertEntryDoc { table: e.table, row: e.row, chosen: gamma0_to_doc(&e.chosen) })
        .collect();
    serde_json::json!({ "prefix": prefix.to_string(), "stages": entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;

    #[test]
    fn trees_round_trip_canonically() {
        let mut rng = gen::rng(5);
        for _ in 0..20 {
            let t = gen::random_right_pruned(&mut rng, 2, 2, 0.6);
            let text = tree_to_json(&t);
            let back = tree_from_json(&text).unwrap();
            assert_eq!(back, t);
            assert_eq!(tree_to_json(&back), text);
        }
    }

    #[test]
    fn parse_errors_have_locations() {
        match tree_from_json("{\"r\": 1,\n \"height\": }") {
            Err(Error::Parse { location, .. }) => assert!(location.starts_with("2:")),
            other => panic!("{other:?}"),
        }
        let bad = r#"{"r":1,"height":1,"nodes":[{"left":"","right":[""]},{"left":"3","right":["0"]}]}"#;
        match tree_from_json(bad) {
            Err(Error::Parse { location, .. }) => assert_eq!(location, "nodes[1].left"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn gamma_round_trip() {
        let mut rng = gen::rng(9);
        for m in 0..3 {
            for _ in 0..10 {
                let g = gen::random_gamma(&mut rng, m, 2);
                let text = to_canonical(&gamma_to_doc(&g));
                assert_eq!(gamma_from_json(&text).unwrap(), g);
            }
            let t = gen::random_table(&mut rng, m, 3, 3);
            assert_eq!(table_from_json(&table_to_json(&t)).unwrap(), t);
            let x = gen::random_stream(&mut rng, m, 3, 3, false);
            assert_eq!(stream_from_json(&stream_to_json(&x)).unwrap(), x);
        }
        let arr = gen::random_disjoint_array(&mut rng, 4);
        assert_eq!(array_from_json(&array_to_json(&arr)).unwrap(), arr);
        assert_eq!(to_canonical(&gamma_to_doc(&GammaElem::zeta(0))), r#"{"level":0,"map":{"support":[],"values":[]}}"#);
    }

    #[test]
    fn maps_and_pairs_round_trip() {
        let phi = IncompatMap::identity(2);
        assert_eq!(map_from_json(&map_to_json(&phi)).unwrap(), phi);
        let t = CrossTree::full(1, 1);
        let a = NodePairSet::up_closure_in(&t, &[(t.root(), t.root())]);
        let text = pairset_to_json(&a).unwrap();
        let back = pairset_from_json(&text).unwrap();
        assert_eq!(pairset_to_json(&back).unwrap(), text);
        let w = ForbiddenSet::new([(Word::parse("0", 3).unwrap(), RightTuple::parse(&["1"], 2).unwrap())]);
        assert_eq!(forbidden_from_json(&forbidden_to_json(&w)).unwrap(), w);
    }
}
