//! The blow-up process fixed by a decorated germ and the graphs it produces.
//!
//! Along each branch we blow up the points of its chain, truncated or
//! extended by free simple points, until the multiplicities used add up to
//! exactly `l_i`. The exceptional curve `F(P)` of a blown-up point has
//! self-intersection `−1 − #{Q proximate to P}`; `F(P)` and `F(Q)` (with `Q`
//! proximate to `P`) still meet at the end unless a later blown-up point is
//! proximate to both.

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::germ::DecoratedGerm;
use crate::plumbing::{self, GraphRecord, PlumbingError, WeightedTree};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResolutionError {
    #[error("branch {branch}: no blow-up sequence along the chain realizes l={l} (chain multiplicities {mults:?})")]
    DecorationTooSmall { branch: usize, l: u64, mults: Vec<u64> },
    #[error("E(C,l) is empty: X(C,l) is a smooth point")]
    EmptyGraph,
    #[error("E(C,l) is not connected ({components} components)")]
    NotConnected { components: usize },
    #[error("branch {branch}: its -1 curve meets {count} components of E(C,l), expected exactly one")]
    AmbiguousAttachment { branch: usize, count: usize },
}

/// The points actually blown up for a decorated germ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtendedCluster {
    labels: Vec<String>,
    parent: Vec<Option<usize>>,
    satellite: Vec<Option<usize>>,
    appended: Vec<bool>,
    chains: Vec<Vec<usize>>,
    chain_mults: Vec<Vec<u64>>,
}

impl ExtendedCluster {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, p: usize) -> &str {
        &self.labels[p]
    }

    pub fn is_appended(&self, p: usize) -> bool {
        self.appended[p]
    }

    pub fn is_satellite(&self, p: usize) -> bool {
        self.satellite[p].is_some()
    }

    pub fn parent(&self, p: usize) -> Option<usize> {
        self.parent[p]
    }

    /// Extended chain of branch `i` (0-based), as point indices.
    pub fn chain(&self, i: usize) -> &[usize] {
        &self.chains[i]
    }

    /// Multiplicities of branch `i` (0-based) along its extended chain.
    pub fn chain_multiplicities(&self, i: usize) -> &[u64] {
        &self.chain_mults[i]
    }

    /// Last point of the extended chain of branch `i` (0-based).
    pub fn attachment_point(&self, i: usize) -> usize {
        *self.chains[i].last().unwrap()
    }

    pub fn chain_labels(&self, i: usize) -> Vec<&str> {
        self.chains[i].iter().map(|&p| self.labels[p].as_str()).collect()
    }

    fn is_proximate(&self, q: usize, p: usize) -> bool {
        self.parent[q] == Some(p) || self.satellite[q] == Some(p)
    }

    /// Number of points proximate to `p`.
    pub fn proximate_count(&self, p: usize) -> usize {
        (0..self.len()).filter(|&q| self.is_proximate(q, p)).count()
    }
}

/// Truncate or extend every chain so that its multiplicities sum to `l_i`.
pub fn extend_cluster(germ: &DecoratedGerm) -> Result<ExtendedCluster, ResolutionError> {
    let cluster = germ.cluster();
    let r = germ.branch_count();

    // per branch: kept prefix length and number of appended free points
    let mut plan = Vec::with_capacity(r);
    for i in 0..r {
        let mults = germ.branch_multiplicities(i + 1).unwrap();
        let l = germ.decoration()[i];
        let total: u64 = mults.iter().sum();
        if l >= total {
            plan.push((mults.len(), l - total));
        } else {
            let mut acc = 0;
            let cut = mults.iter().position(|&m| {
                acc += m;
                acc >= l
            });
            match cut {
                Some(t) if acc == l => plan.push((t + 1, 0)),
                _ => {
                    return Err(ResolutionError::DecorationTooSmall {
                        branch: i + 1,
                        l,
                        mults: mults.to_vec(),
                    })
                }
            }
        }
    }

    let mut used = vec![false; cluster.len()];
    for (i, &(keep, _)) in plan.iter().enumerate() {
        for &p in &germ.branches()[i].chain[..keep] {
            used[p] = true;
        }
    }
    let taken: std::collections::HashSet<&str> = (0..cluster.len()).map(|p| cluster.id(p)).collect();

    // Depth-first over the extended tree: base children in canonical order,
    // then appended points by branch.
    let canonical = germ.canonical_order();
    let rank: HashMap<usize, usize> = canonical.iter().enumerate().map(|(k, &p)| (p, k)).collect();

    let mut labels = Vec::new();
    let mut parent = Vec::new();
    let mut satellite = Vec::new();
    let mut appended = Vec::new();
    let mut new_index: HashMap<usize, usize> = HashMap::new();

    // appended tails hang off the last kept point of each branch
    let mut tails: HashMap<usize, Vec<usize>> = HashMap::new();
    for (i, &(keep, extra)) in plan.iter().enumerate() {
        if extra > 0 {
            tails.entry(germ.branches()[i].chain[keep - 1]).or_default().push(i);
        }
    }
    let mut tail_start: Vec<Option<usize>> = vec![None; r];

    let mut stack = vec![cluster.root()];
    while let Some(p) = stack.pop() {
        let idx = labels.len();
        new_index.insert(p, idx);
        labels.push(cluster.id(p).to_owned());
        parent.push(cluster.parent(p).map(|q| new_index[&q]));
        satellite.push(cluster.satellite_target(p).map(|q| new_index[&q]));
        appended.push(false);

        if let Some(branches) = tails.get(&p) {
            for &i in branches {
                let (_, extra) = plan[i];
                let name = &germ.branches()[i].name;
                let mut prev = idx;
                for k in 1..=extra {
                    let mut label = format!("{name}~{k}");
                    while taken.contains(label.as_str()) {
                        label.push('~');
                    }
                    let q = labels.len();
                    labels.push(label);
                    parent.push(Some(prev));
                    satellite.push(None);
                    appended.push(true);
                    if k == 1 {
                        tail_start[i] = Some(q);
                    }
                    prev = q;
                }
            }
        }

        let mut kids: Vec<usize> = cluster.children(p).iter().copied().filter(|&c| used[c]).collect();
        kids.sort_by_key(|c| std::cmp::Reverse(rank[c]));
        stack.extend(kids);
    }

    let mut chains = Vec::with_capacity(r);
    let mut chain_mults = Vec::with_capacity(r);
    for (i, &(keep, extra)) in plan.iter().enumerate() {
        let base = &germ.branches()[i].chain[..keep];
        let mut chain: Vec<usize> = base.iter().map(|p| new_index[p]).collect();
        let mut mults = germ.branch_multiplicities(i + 1).unwrap()[..keep].to_vec();
        if let Some(start) = tail_start[i] {
            chain.extend(start..start + extra as usize);
            mults.extend(std::iter::repeat(1).take(extra as usize));
        }
        debug_assert_eq!(mults.iter().sum::<u64>(), germ.decoration()[i]);
        chains.push(chain);
        chain_mults.push(mults);
    }

    Ok(ExtendedCluster {
        labels,
        parent,
        satellite,
        appended,
        chains,
        chain_mults,
    })
}

/// Dual graph of all exceptional curves of the blow-up process.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExceptionalGraph {
    pub tree: WeightedTree,
    /// Vertex `E_i` met by the strict transform of branch `i` (0-based).
    pub attach: Vec<usize>,
    /// Membership in `E(C,l)`: vertices meeting no strict transform.
    pub in_ecl: Vec<bool>,
}

pub fn exceptional_graph(ext: &ExtendedCluster) -> ExceptionalGraph {
    let n = ext.len();
    let weights: Vec<i64> = (0..n).map(|p| -1 - ext.proximate_count(p) as i64).collect();
    let mut edges = Vec::new();
    for q in 0..n {
        for p in ext.parent[q].into_iter().chain(ext.satellite[q]) {
            let separated = (0..n).any(|s| ext.is_proximate(s, p) && ext.is_proximate(s, q));
            if !separated {
                edges.push((p, q));
            }
        }
    }
    let tree = WeightedTree::from_indices(ext.labels.clone(), weights, &edges)
        .expect("exceptional configurations of point blow-ups are trees");
    let attach: Vec<usize> = (0..ext.chains.len()).map(|i| ext.attachment_point(i)).collect();
    let mut in_ecl = vec![true; n];
    for &a in &attach {
        in_ecl[a] = false;
    }
    ExceptionalGraph { tree, attach, in_ecl }
}

impl ExceptionalGraph {
    pub fn ecl_vertices(&self) -> Vec<usize> {
        (0..self.tree.len()).filter(|&v| self.in_ecl[v]).collect()
    }

    fn branches_at(&self, v: usize) -> Vec<usize> {
        (0..self.attach.len()).filter(|&i| self.attach[i] == v).map(|i| i + 1).collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for v in 0..self.tree.len() {
            out.push_str(&format!("vertex {} weight={}", self.tree.label(v), self.tree.weight(v)));
            if self.in_ecl[v] {
                out.push_str(" in-ecl");
            }
            for i in self.branches_at(v) {
                out.push_str(&format!(" attach={i}"));
            }
            out.push('\n');
        }
        for (a, b) in self.tree.edges() {
            out.push_str(&format!("edge {} {}\n", self.tree.label(a), self.tree.label(b)));
        }
        out
    }

    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for v in 0..self.tree.len() {
            let rec = GraphRecord::Vertex {
                vertex: self.tree.label(v).to_owned(),
                weight: self.tree.weight(v),
                in_ecl: Some(self.in_ecl[v]),
                attach: self.branches_at(v),
            };
            out.push_str(&serde_json::to_string(&rec).unwrap());
            out.push('\n');
        }
        for (a, b) in self.tree.edges() {
            let rec = GraphRecord::Edge {
                edge: [self.tree.label(a).to_owned(), self.tree.label(b).to_owned()],
            };
            out.push_str(&serde_json::to_string(&rec).unwrap());
            out.push('\n');
        }
        out
    }
}

/// `E(C,l)` with its definiteness flag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SandwichedGraph {
    pub tree: WeightedTree,
    pub negative_definite: bool,
}

fn ecl_of(graph: &ExceptionalGraph) -> Result<WeightedTree, ResolutionError> {
    let keep = graph.ecl_vertices();
    if keep.is_empty() {
        return Err(ResolutionError::EmptyGraph);
    }
    graph.tree.induced(&keep).map_err(|e| match e {
        PlumbingError::NotATree(_) => ResolutionError::NotConnected {
            components: count_components(&graph.tree, &keep),
        },
        other => unreachable!("induced subgraph of a tree: {other}"),
    })
}

fn count_components(tree: &WeightedTree, keep: &[usize]) -> usize {
    let inside: std::collections::HashSet<usize> = keep.iter().copied().collect();
    let mut seen = std::collections::HashSet::new();
    let mut count = 0;
    for &s in keep {
        if !seen.insert(s) {
            continue;
        }
        count += 1;
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            for u in tree.neighbors(v) {
                if inside.contains(&u) && seen.insert(u) {
                    stack.push(u);
                }
            }
        }
    }
    count
}

/// Full exceptional graph of a germ.
pub fn resolve(germ: &DecoratedGerm) -> Result<ExceptionalGraph, ResolutionError> {
    Ok(exceptional_graph(&extend_cluster(germ)?))
}

pub fn sandwiched_graph(germ: &DecoratedGerm) -> Result<SandwichedGraph, ResolutionError> {
    let tree = ecl_of(&resolve(germ)?)?;
    let negative_definite = plumbing::is_negative_definite(&tree);
    Ok(SandwichedGraph { tree, negative_definite })
}

/// Branch `i` ↦ the component `F_i` of `E(C,l)` met by `E_i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Marking {
    /// Label of `F_i` for each branch, in branch order.
    pub pieces: Vec<String>,
}

impl Marking {
    pub fn piece(&self, branch: usize) -> &str {
        &self.pieces[branch - 1]
    }
}

pub fn marking(germ: &DecoratedGerm) -> Result<Marking, ResolutionError> {
    let graph = resolve(germ)?;
    ecl_of(&graph)?;
    marking_of(&graph)
}

pub fn marking_of(graph: &ExceptionalGraph) -> Result<Marking, ResolutionError> {
    let pieces = graph
        .attach
        .iter()
        .enumerate()
        .map(|(i, &e)| {
            let inside: Vec<usize> = graph.tree.neighbors(e).filter(|&u| graph.in_ecl[u]).collect();
            match inside[..] {
                [f] => Ok(graph.tree.label(f).to_owned()),
                _ => Err(ResolutionError::AmbiguousAttachment {
                    branch: i + 1,
                    count: inside.len(),
                }),
            }
        })
        .collect::<Result<_, _>>()?;
    Ok(Marking { pieces })
}
