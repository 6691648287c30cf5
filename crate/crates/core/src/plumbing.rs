//! Weighted trees and the blow-down part of plumbing calculus.
//!
//! Vertices carry integer self-intersections; every vertex is a rational
//! curve. A vertex of weight −1 and valence at most two can be blown down:
//! its neighbors gain +1 each and, for valence two, become adjacent.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg;
use crate::scalar::lift_matrix;
use crate::syntax::{self, ParseError};
use crate::Int;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlumbingError {
    #[error("not a tree: {0}")]
    NotATree(String),
    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("vertex `{label}` (weight {weight}, valence {valence}) cannot be blown down")]
    NotContractible { label: String, weight: i64, valence: usize },
    #[error("intersection form is not negative definite")]
    NotNegativeDefinite,
    #[error("vertex `{label}` has non-negative weight {weight}")]
    NonRationalWeight { label: String, weight: i64 },
}

/// A weighted tree, possibly empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedTree {
    labels: Vec<String>,
    weights: Vec<i64>,
    adj: Vec<BTreeSet<usize>>,
}

impl WeightedTree {
    pub fn empty() -> Self {
        Self {
            labels: Vec::new(),
            weights: Vec::new(),
            adj: Vec::new(),
        }
    }

    /// Build from labelled vertices and label pairs; rejects cycles,
    /// disconnected inputs and unknown labels.
    pub fn new<S: AsRef<str>>(vertices: &[(S, i64)], edges: &[(S, S)]) -> Result<Self, PlumbingError> {
        let mut index = HashMap::new();
        for (i, (label, _)) in vertices.iter().enumerate() {
            if index.insert(label.as_ref().to_owned(), i).is_some() {
                return Err(PlumbingError::DuplicateVertex(label.as_ref().to_owned()));
            }
        }
        let mut pairs = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            let ia = *index
                .get(a.as_ref())
                .ok_or_else(|| PlumbingError::UnknownVertex(a.as_ref().to_owned()))?;
            let ib = *index
                .get(b.as_ref())
                .ok_or_else(|| PlumbingError::UnknownVertex(b.as_ref().to_owned()))?;
            pairs.push((ia, ib));
        }
        Self::from_indices(
            vertices.iter().map(|(l, _)| l.as_ref().to_owned()).collect(),
            vertices.iter().map(|(_, w)| *w).collect(),
            &pairs,
        )
    }

    pub fn from_indices(labels: Vec<String>, weights: Vec<i64>, edges: &[(usize, usize)]) -> Result<Self, PlumbingError> {
        let n = labels.len();
        let mut adj = vec![BTreeSet::new(); n];
        for &(a, b) in edges {
            if a == b {
                return Err(PlumbingError::NotATree(format!("loop at `{}`", labels[a])));
            }
            if !adj[a].insert(b) {
                return Err(PlumbingError::NotATree(format!(
                    "repeated edge `{}`–`{}`",
                    labels[a], labels[b]
                )));
            }
            adj[b].insert(a);
        }
        let tree = Self { labels, weights, adj };
        if n > 0 {
            if edges.len() != n - 1 {
                return Err(PlumbingError::NotATree(format!("{} vertices but {} edges", n, edges.len())));
            }
            if tree.component_count() != 1 {
                return Err(PlumbingError::NotATree("disconnected".into()));
            }
        } else if !edges.is_empty() {
            return Err(PlumbingError::NotATree("edges without vertices".into()));
        }
        Ok(tree)
    }

    /// A chain with labels `v0, v1, …`.
    pub fn chain(weights: &[i64]) -> Self {
        let labels = (0..weights.len()).map(|i| format!("v{i}")).collect();
        let edges: Vec<_> = (1..weights.len()).map(|i| (i - 1, i)).collect();
        Self::from_indices(labels, weights.to_vec(), &edges).unwrap()
    }

    /// A star: center weight, then one chain of weights per arm, listed from
    /// the center outwards.
    pub fn star(center: i64, arms: &[Vec<i64>]) -> Self {
        let mut labels = vec!["c".to_owned()];
        let mut weights = vec![center];
        let mut edges = Vec::new();
        for (a, arm) in arms.iter().enumerate() {
            let mut prev = 0;
            for (j, &w) in arm.iter().enumerate() {
                labels.push(format!("a{}.{}", a + 1, j + 1));
                weights.push(w);
                let v = weights.len() - 1;
                edges.push((prev, v));
                prev = v;
            }
        }
        Self::from_indices(labels, weights, &edges).unwrap()
    }

    fn component_count(&self) -> usize {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut count = 0;
        for s in 0..n {
            if seen[s] {
                continue;
            }
            count += 1;
            let mut stack = vec![s];
            seen[s] = true;
            while let Some(v) = stack.pop() {
                for &u in &self.adj[v] {
                    if !seen[u] {
                        seen[u] = true;
                        stack.push(u);
                    }
                }
            }
        }
        count
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn weight(&self, v: usize) -> i64 {
        self.weights[v]
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[v].iter().copied()
    }

    pub fn valence(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Edges as index pairs `(a, b)` with `a < b`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.len())
            .flat_map(|a| self.adj[a].iter().filter(move |&&b| a < b).map(move |&b| (a, b)))
            .collect()
    }

    /// Weights on the diagonal, 1 for each edge.
    pub fn intersection_matrix(&self) -> Vec<Vec<i64>> {
        let n = self.len();
        let mut m = vec![vec![0; n]; n];
        for v in 0..n {
            m[v][v] = self.weights[v];
            for &u in &self.adj[v] {
                m[v][u] = 1;
            }
        }
        m
    }

    /// The subtree induced on `keep`, which must be connected.
    pub fn induced(&self, keep: &[usize]) -> Result<Self, PlumbingError> {
        let pos: HashMap<usize, usize> = keep.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let edges: Vec<(usize, usize)> = self
            .edges()
            .into_iter()
            .filter_map(|(a, b)| Some((*pos.get(&a)?, *pos.get(&b)?)))
            .collect();
        Self::from_indices(
            keep.iter().map(|&v| self.labels[v].clone()).collect(),
            keep.iter().map(|&v| self.weights[v]).collect(),
            &edges,
        )
    }

    /// Add one −1 leaf labelled `label` on `host`.
    pub fn with_leaf(&self, host: usize, label: String) -> Self {
        let mut t = self.clone();
        let v = t.labels.len();
        t.labels.push(label);
        t.weights.push(-1);
        t.adj.push(BTreeSet::from([host]));
        t.adj[host].insert(v);
        t
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for v in 0..self.len() {
            writeln!(out, "vertex {} weight={}", self.labels[v], self.weights[v]).unwrap();
        }
        for (a, b) in self.edges() {
            writeln!(out, "edge {} {}", self.labels[a], self.labels[b]).unwrap();
        }
        out
    }

    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for v in 0..self.len() {
            let rec = GraphRecord::Vertex {
                vertex: self.labels[v].clone(),
                weight: self.weights[v],
                in_ecl: None,
                attach: Vec::new(),
            };
            out.push_str(&serde_json::to_string(&rec).unwrap());
            out.push('\n');
        }
        for (a, b) in self.edges() {
            let rec = GraphRecord::Edge {
                edge: [self.labels[a].clone(), self.labels[b].clone()],
            };
            out.push_str(&serde_json::to_string(&rec).unwrap());
            out.push('\n');
        }
        out
    }
}

/// One line of the JSON graph format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GraphRecord {
    Vertex {
        vertex: String,
        weight: i64,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        in_ecl: Option<bool>,
        #[serde(skip_serializing_if = "Vec::is_empty", default)]
        attach: Vec<usize>,
    },
    Edge {
        edge: [String; 2],
    },
}

/// Optional per-vertex flags carried by the graph format.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VertexFlags {
    pub in_ecl: bool,
    /// Branches whose strict transform meets this vertex.
    pub attach: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphParseError {
    #[error(transparent)]
    Syntax(#[from] ParseError),
    #[error(transparent)]
    Invalid(#[from] PlumbingError),
}

/// Parse the text graph format:
///
/// ```text
/// vertex <id> weight=<int> [in-ecl] [attach=<branch>]
/// edge <id> <id>
/// ```
pub fn parse_graph(text: &str) -> Result<(WeightedTree, Vec<VertexFlags>), GraphParseError> {
    let mut vertices: Vec<(String, i64)> = Vec::new();
    let mut flags = Vec::new();
    let mut edges: Vec<(String, String)> = Vec::new();
    for (line_no, line) in syntax::content_lines(text) {
        let toks = syntax::tokens(line);
        match toks[0].text {
            "vertex" => {
                let id = toks
                    .get(1)
                    .filter(|t| syntax::is_identifier(t.text))
                    .ok_or_else(|| ParseError::new(line_no, toks[0].column, "vertex needs an identifier"))?;
                let mut weight = None;
                let mut f = VertexFlags::default();
                for tok in &toks[2..] {
                    let text = tok.text.trim_end_matches(',');
                    if let Some(w) = text.strip_prefix("weight=") {
                        weight = Some(w.parse::<i64>().map_err(|_| {
                            ParseError::new(line_no, tok.column, format!("bad weight `{w}`"))
                        })?);
                    } else if let Some(a) = text.strip_prefix("attach=") {
                        f.attach.push(a.parse().map_err(|_| {
                            ParseError::new(line_no, tok.column, format!("bad branch index `{a}`"))
                        })?);
                    } else if text == "in-ecl" {
                        f.in_ecl = true;
                    } else if text == "flags:" {
                    } else {
                        return Err(ParseError::new(line_no, tok.column, format!("unexpected `{}`", tok.text)).into());
                    }
                }
                let weight = weight.ok_or_else(|| ParseError::new(line_no, toks[0].column, "vertex needs weight="))?;
                vertices.push((id.text.to_owned(), weight));
                flags.push(f);
            }
            "edge" => {
                if toks.len() != 3 {
                    return Err(ParseError::new(line_no, toks[0].column, "edge needs exactly two vertices").into());
                }
                edges.push((toks[1].text.to_owned(), toks[2].text.to_owned()));
            }
            other => {
                return Err(ParseError::new(line_no, toks[0].column, format!("unknown declaration `{other}`")).into())
            }
        }
    }
    Ok((WeightedTree::new(&vertices, &edges)?, flags))
}

/// Parse the JSON-lines graph format.
pub fn parse_graph_json(text: &str) -> Result<(WeightedTree, Vec<VertexFlags>), GraphParseError> {
    let mut vertices = Vec::new();
    let mut flags = Vec::new();
    let mut edges = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec: GraphRecord =
            serde_json::from_str(line).map_err(|e| ParseError::new(i + 1, e.column(), e.to_string()))?;
        match rec {
            GraphRecord::Vertex {
                vertex,
                weight,
                in_ecl,
                attach,
            } => {
                vertices.push((vertex, weight));
                flags.push(VertexFlags {
                    in_ecl: in_ecl.unwrap_or(false),
                    attach,
                });
            }
            GraphRecord::Edge { edge: [a, b] } => edges.push((a, b)),
        }
    }
    Ok((WeightedTree::new(&vertices, &edges)?, flags))
}

/// Blow down `v`: weight −1 and valence at most two.
pub fn blow_down_step(tree: &WeightedTree, v: usize) -> Result<WeightedTree, PlumbingError> {
    let valence = tree.valence(v);
    if tree.weight(v) != -1 || valence > 2 {
        return Err(PlumbingError::NotContractible {
            label: tree.label(v).to_owned(),
            weight: tree.weight(v),
            valence,
        });
    }
    let mut work = Work::new(tree);
    work.contract(v);
    Ok(work.into_tree(tree))
}

/// Mutable working copy used by the reducers.
struct Work {
    weights: Vec<i64>,
    adj: Vec<Vec<usize>>,
    alive: Vec<bool>,
}

impl Work {
    fn new(tree: &WeightedTree) -> Self {
        Self::with_weights(tree, tree.weights.clone())
    }

    fn with_weights(tree: &WeightedTree, weights: Vec<i64>) -> Self {
        Self {
            weights,
            adj: tree.adj.iter().map(|s| s.iter().copied().collect()).collect(),
            alive: vec![true; tree.len()],
        }
    }

    fn eligible(&self, v: usize) -> bool {
        self.alive[v] && self.weights[v] == -1 && self.adj[v].len() <= 2
    }

    fn eligible_vertices(&self) -> Vec<usize> {
        (0..self.weights.len()).filter(|&v| self.eligible(v)).collect()
    }

    fn contract(&mut self, v: usize) {
        let nb = std::mem::take(&mut self.adj[v]);
        for &u in &nb {
            self.weights[u] += 1;
            self.adj[u].retain(|&x| x != v);
        }
        if let [a, b] = nb[..] {
            self.adj[a].push(b);
            self.adj[b].push(a);
        }
        self.alive[v] = false;
    }

    fn into_tree(self, original: &WeightedTree) -> WeightedTree {
        let keep: Vec<usize> = (0..self.alive.len()).filter(|&v| self.alive[v]).collect();
        let pos: HashMap<usize, usize> = keep.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut edges = Vec::new();
        for &a in &keep {
            for &b in &self.adj[a] {
                if a < b {
                    edges.push((pos[&a], pos[&b]));
                }
            }
        }
        WeightedTree::from_indices(
            keep.iter().map(|&v| original.labels[v].clone()).collect(),
            keep.iter().map(|&v| self.weights[v]).collect(),
            &edges,
        )
        .expect("blow-downs keep trees")
    }
}

/// Result of a full greedy blow-down.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduction {
    /// Labels of the contracted vertices, in order.
    pub trace: Vec<String>,
    /// What remains when no vertex is eligible.
    pub remainder: WeightedTree,
}

impl Reduction {
    /// A smooth graph blows down to nothing.
    pub fn is_smooth(&self) -> bool {
        self.remainder.is_empty()
    }
}

/// Contract the first eligible vertex (in index order) until none is left.
pub fn reduce(tree: &WeightedTree) -> Reduction {
    reduce_by(tree, |eligible| eligible[0])
}

/// Like [`reduce`], with the choice among eligible vertices delegated to
/// `choose`, which returns one element of the (non-empty) slice it gets.
pub fn reduce_by(tree: &WeightedTree, mut choose: impl FnMut(&[usize]) -> usize) -> Reduction {
    let mut work = Work::new(tree);
    let mut trace = Vec::new();
    loop {
        let eligible = work.eligible_vertices();
        if eligible.is_empty() {
            break;
        }
        let v = choose(&eligible);
        assert!(work.eligible(v), "chooser returned an ineligible vertex");
        work.contract(v);
        trace.push(tree.labels[v].clone());
    }
    Reduction {
        trace,
        remainder: work.into_tree(tree),
    }
}

fn blows_down_with_weights(tree: &WeightedTree, weights: Vec<i64>) -> bool {
    let mut work = Work::with_weights(tree, weights);
    let mut remaining = tree.len();
    while let Some(v) = (0..work.weights.len()).find(|&v| work.eligible(v)) {
        work.contract(v);
        remaining -= 1;
    }
    remaining == 0
}

/// Negative definiteness of the intersection form by exact leading
/// principal minors. The empty form counts as definite.
pub fn is_negative_definite(tree: &WeightedTree) -> bool {
    let m: Vec<Vec<Int>> = lift_matrix(&tree.intersection_matrix());
    linalg::is_negative_definite(&m)
}

/// A machine-checkable proof that a tree is sandwiched: attach the listed
/// numbers of −1 leaves, then blow down in the listed order to nothing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    /// `(host label, number of −1 leaves)`, hosts in tree order.
    pub additions: Vec<(String, u32)>,
    /// Labels of the blown-down vertices, ending with the empty graph.
    pub blow_downs: Vec<String>,
}

impl Certificate {
    pub fn total_additions(&self) -> u32 {
        self.additions.iter().map(|(_, k)| k).sum()
    }

    /// The tree with the certificate's leaves attached. Leaf `j` on host
    /// `h` is labelled `h+j`.
    pub fn extended_tree(&self, tree: &WeightedTree) -> Result<WeightedTree, PlumbingError> {
        let mut t = tree.clone();
        for (host, count) in &self.additions {
            let h = tree
                .index_of(host)
                .ok_or_else(|| PlumbingError::UnknownVertex(host.clone()))?;
            for j in 1..=*count {
                t = t.with_leaf(h, format!("{host}+{j}"));
            }
        }
        Ok(t)
    }

    /// Replay the additions and blow-downs; true iff every step is legal and
    /// the graph ends empty.
    pub fn verify(&self, tree: &WeightedTree) -> bool {
        let Ok(mut t) = self.extended_tree(tree) else {
            return false;
        };
        for label in &self.blow_downs {
            let Some(v) = t.index_of(label) else {
                return false;
            };
            match blow_down_step(&t, v) {
                Ok(next) => t = next,
                Err(_) => return false,
            }
        }
        t.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Recognition {
    Certified(Certificate),
    /// No certificate with at most `bounds[v]` leaves on vertex `v`.
    Unknown { bounds: Vec<u32>, candidates_tried: u64 },
}

/// Search for −1 leaves turning `tree` into a smooth graph.
///
/// Candidates are tried by increasing total number of leaves and, within
/// one total, in lexicographic order of the per-vertex counts; the first
/// success is returned with a replay-checked certificate. `max_extra`
/// defaults to `|weight(v)|` per vertex.
///
/// Two necessary conditions shrink the search without losing solutions.
/// The attached leaves can be blown down first, leaving the tree with
/// weights `w + k`. Each vertex then receives exactly `−1 − (w_v + k_v)`
/// increments before its own blow-down, so `k_v ≤ −1 − w_v`; and each
/// blow-down but the last hands out one or two increments, so the total
/// `Σ(−1 − w_v − k_v)` lies in `[n − 1, 2(n − 1)]`.
pub fn recognize_sandwiched(tree: &WeightedTree, max_extra: Option<u32>) -> Result<Recognition, PlumbingError> {
    for v in 0..tree.len() {
        if tree.weight(v) >= 0 {
            return Err(PlumbingError::NonRationalWeight {
                label: tree.label(v).to_owned(),
                weight: tree.weight(v),
            });
        }
    }
    if !is_negative_definite(tree) {
        return Err(PlumbingError::NotNegativeDefinite);
    }
    let n = tree.len();
    if n == 0 {
        return Ok(Recognition::Certified(Certificate {
            additions: Vec::new(),
            blow_downs: Vec::new(),
        }));
    }
    let bounds: Vec<u32> = (0..n)
        .map(|v| max_extra.unwrap_or(tree.weight(v).unsigned_abs() as u32))
        .collect();
    let caps: Vec<u32> = (0..n)
        .map(|v| bounds[v].min((-1 - tree.weight(v)) as u32))
        .collect();
    let slack: i64 = (0..n).map(|v| -1 - tree.weight(v)).sum();
    let edges = n.saturating_sub(1) as i64;
    let lo = (slack - 2 * edges).max(0);
    let hi = (slack - edges).min(caps.iter().map(|&c| c as i64).sum());

    let mut tried = 0u64;
    for total in lo..=hi {
        let candidates = compositions(&caps, total as u32);
        tried += candidates.len() as u64;
        let found = candidates.par_iter().find_first(|k| {
            let weights = (0..n).map(|v| tree.weight(v) + k[v] as i64).collect();
            blows_down_with_weights(tree, weights)
        });
        if let Some(k) = found {
            return Ok(Recognition::Certified(certificate_for(tree, k)));
        }
    }
    Ok(Recognition::Unknown {
        bounds,
        candidates_tried: tried,
    })
}

fn certificate_for(tree: &WeightedTree, counts: &[u32]) -> Certificate {
    let mut cert = Certificate {
        additions: (0..tree.len())
            .filter(|&v| counts[v] > 0)
            .map(|v| (tree.label(v).to_owned(), counts[v]))
            .collect(),
        blow_downs: Vec::new(),
    };
    let extended = cert.extended_tree(tree).expect("hosts come from the tree");
    let red = reduce(&extended);
    debug_assert!(red.is_smooth());
    cert.blow_downs = red.trace;
    assert!(cert.verify(tree), "certificate failed replay");
    cert
}

/// All vectors `k` with `0 ≤ k[v] ≤ caps[v]` and `Σ k = total`, in
/// lexicographic order.
fn compositions(caps: &[u32], total: u32) -> Vec<Vec<u32>> {
    fn go(caps: &[u32], suffix_cap: &[u32], pos: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if pos == caps.len() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let rest = suffix_cap[pos + 1];
        let min = left.saturating_sub(rest);
        let max = caps[pos].min(left);
        for k in min..=max {
            cur.push(k);
            go(caps, suffix_cap, pos + 1, left - k, cur, out);
            cur.pop();
        }
    }
    let mut suffix = vec![0u32; caps.len() + 1];
    for i in (0..caps.len()).rev() {
        suffix[i] = suffix[i + 1] + caps[i];
    }
    let mut out = Vec::new();
    if suffix[0] >= total {
        go(caps, &suffix, 0, total, &mut Vec::new(), &mut out);
    }
    out
}

/// Canonical string of the tree up to weight-preserving isomorphism, from
/// the rooted encodings at the centroid(s).
pub fn canonical_form(tree: &WeightedTree) -> String {
    if tree.is_empty() {
        return "()".into();
    }
    centroids(tree)
        .into_iter()
        .map(|c| rooted_code(tree, c, None))
        .min()
        .unwrap()
}

pub fn trees_isomorphic(a: &WeightedTree, b: &WeightedTree) -> bool {
    a.len() == b.len() && canonical_form(a) == canonical_form(b)
}

fn rooted_code(tree: &WeightedTree, v: usize, parent: Option<usize>) -> String {
    let mut kids: Vec<String> = tree
        .neighbors(v)
        .filter(|&u| Some(u) != parent)
        .map(|u| rooted_code(tree, u, Some(v)))
        .collect();
    kids.sort_unstable();
    format!("({}{})", tree.weight(v), kids.concat())
}

fn centroids(tree: &WeightedTree) -> Vec<usize> {
    let n = tree.len();
    let mut order = Vec::with_capacity(n);
    let mut parent = vec![usize::MAX; n];
    let mut stack = vec![0];
    let mut seen = vec![false; n];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        order.push(v);
        for u in tree.neighbors(v) {
            if !seen[u] {
                seen[u] = true;
                parent[u] = v;
                stack.push(u);
            }
        }
    }
    let mut size = vec![1usize; n];
    for &v in order.iter().rev() {
        if parent[v] != usize::MAX {
            size[parent[v]] += size[v];
        }
    }
    let heaviest = |v: usize| {
        tree.neighbors(v)
            .map(|u| if u == parent[v] { n - size[v] } else { size[u] })
            .max()
            .unwrap_or(0)
    };
    let best = (0..n).map(heaviest).min().unwrap();
    (0..n).filter(|&v| heaviest(v) == best).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn six_line_star() -> WeightedTree {
        WeightedTree::star(-7, &vec![vec![-2, -2, -2]; 6])
    }

    #[test]
    fn castelnuovo_base_case() {
        let t = WeightedTree::chain(&[-1]);
        assert!(blow_down_step(&t, 0).unwrap().is_empty());
    }

    #[test]
    fn blow_down_leaf() {
        let t = WeightedTree::chain(&[-1, -2]);
        let s = blow_down_step(&t, 0).unwrap();
        assert_eq!(s.weights(), &[-1]);
    }

    #[test]
    fn blow_down_middle_joins_neighbors() {
        let t = WeightedTree::chain(&[-3, -1, -2]);
        let s = blow_down_step(&t, 1).unwrap();
        assert_eq!(s.weights(), &[-2, -1]);
        assert_eq!(s.edges(), vec![(0, 1)]);
    }

    #[test]
    fn blow_down_rejects_ineligible() {
        let t = WeightedTree::chain(&[-2, -1]);
        assert!(matches!(blow_down_step(&t, 0), Err(PlumbingError::NotContractible { .. })));
        let star = WeightedTree::star(-1, &[vec![-2], vec![-2], vec![-2]]);
        assert!(matches!(
            blow_down_step(&star, 0),
            Err(PlumbingError::NotContractible { valence: 3, .. })
        ));
    }

    #[test]
    fn cusp_line_extension_reduces() {
        // (−1)–(−3)–(−2)–(−3) with a −1 leaf on the −2
        let t = WeightedTree::new(
            &[("e", -1), ("a", -3), ("b", -2), ("c", -3), ("f", -1)],
            &[("e", "a"), ("a", "b"), ("b", "c"), ("b", "f")],
        )
        .unwrap();
        let red = reduce(&t);
        assert!(red.is_smooth());
        assert_eq!(red.trace.len(), 5);
    }

    #[test]
    fn star_with_arm_leaves_reduces() {
        let star = six_line_star();
        let mut t = star.clone();
        for a in 1..=6 {
            let end = star.index_of(&format!("a{a}.3")).unwrap();
            t = t.with_leaf(end, format!("e{a}"));
        }
        assert!(reduce(&t).is_smooth());
    }

    #[test]
    fn single_minus_two_is_stuck() {
        let t = WeightedTree::chain(&[-2]);
        let red = reduce(&t);
        assert!(!red.is_smooth());
        assert_eq!(red.remainder, t);
    }

    #[test]
    fn definiteness() {
        assert!(is_negative_definite(&WeightedTree::chain(&[-2])));
        assert!(!is_negative_definite(&WeightedTree::chain(&[0])));
        assert!(is_negative_definite(&WeightedTree::chain(&[-3, -2, -3])));
        assert!(!is_negative_definite(&WeightedTree::chain(&[-1, -1])));
        assert!(is_negative_definite(&six_line_star()));
    }

    #[test]
    fn recognize_chain() {
        let t = WeightedTree::chain(&[-3, -2, -3]);
        let Recognition::Certified(cert) = recognize_sandwiched(&t, None).unwrap() else {
            panic!("expected a certificate");
        };
        assert!(cert.verify(&t));
        assert_eq!(cert.additions, vec![("v1".to_owned(), 1), ("v2".to_owned(), 1)]);
    }

    #[test]
    fn recognize_star() {
        let t = six_line_star();
        let Recognition::Certified(cert) = recognize_sandwiched(&t, None).unwrap() else {
            panic!("expected a certificate");
        };
        assert!(cert.verify(&t));
        let mut hosts: Vec<&str> = cert.additions.iter().map(|(h, _)| h.as_str()).collect();
        hosts.sort_unstable();
        assert_eq!(hosts, vec!["a1.3", "a2.3", "a3.3", "a4.3", "a5.3", "a6.3"]);
        assert!(cert.additions.iter().all(|(_, k)| *k == 1));
    }

    #[test]
    fn recognize_single_vertex() {
        let t = WeightedTree::chain(&[-2]);
        let Recognition::Certified(cert) = recognize_sandwiched(&t, None).unwrap() else {
            panic!("expected a certificate");
        };
        assert_eq!(cert.total_additions(), 1);
        assert_eq!(cert.blow_downs, vec!["v0+1".to_owned(), "v0".to_owned()]);
    }

    #[test]
    fn recognize_rejects_bad_input() {
        assert!(matches!(
            recognize_sandwiched(&WeightedTree::chain(&[-2, 0]), None),
            Err(PlumbingError::NonRationalWeight { .. })
        ));
        assert_eq!(
            recognize_sandwiched(&WeightedTree::chain(&[-1, -1]), None),
            Err(PlumbingError::NotNegativeDefinite)
        );
    }

    #[test]
    fn recognize_reports_bound() {
        // E8 (−2 everywhere) is not sandwiched: its determinant is 1 but
        // no −1 leaves help within small bounds.
        let e8 = WeightedTree::star(-2, &[vec![-2], vec![-2, -2], vec![-2, -2, -2, -2]]);
        match recognize_sandwiched(&e8, Some(1)).unwrap() {
            Recognition::Unknown { bounds, .. } => assert_eq!(bounds, vec![1; 8]),
            Recognition::Certified(c) => panic!("unexpected certificate {c:?}"),
        }
    }

    #[test]
    fn isomorphism() {
        let a = WeightedTree::chain(&[-3, -2, -3]);
        let b = WeightedTree::new(&[("x", -3), ("y", -3), ("z", -2)], &[("x", "z"), ("z", "y")]).unwrap();
        assert!(trees_isomorphic(&a, &b));
        assert!(!trees_isomorphic(&a, &WeightedTree::chain(&[-3, -3, -2])));
        let permuted = WeightedTree::star(-7, &vec![vec![-2, -2, -2]; 6]);
        assert!(trees_isomorphic(&six_line_star(), &permuted));
    }

    #[test]
    fn rejects_cycles_and_forests() {
        let cyc = WeightedTree::new(&[("a", -2), ("b", -2), ("c", -2)], &[("a", "b"), ("b", "c"), ("c", "a")]);
        assert!(matches!(cyc, Err(PlumbingError::NotATree(_))));
        let forest = WeightedTree::new(&[("a", -2), ("b", -2)], &[]);
        assert!(matches!(forest, Err(PlumbingError::NotATree(_))));
    }

    #[test]
    fn text_format_round_trips() {
        let t = WeightedTree::chain(&[-3, -2, -3]);
        let (back, flags) = parse_graph(&t.to_text()).unwrap();
        assert_eq!(back, t);
        assert!(flags.iter().all(|f| *f == VertexFlags::default()));
        let (back, _) = parse_graph_json(&t.to_json_lines()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn compositions_are_lexicographic() {
        let c = compositions(&[1, 2, 1], 2);
        assert_eq!(c, vec![vec![0, 1, 1], vec![0, 2, 0], vec![1, 0, 1], vec![1, 1, 0]]);
    }
}
