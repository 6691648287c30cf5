//! Decorated plane-curve germs as combinatorial objects.
//!
//! A germ is described by its cluster of infinitely near points (a rooted
//! tree where every point is proximate to its parent and possibly to one
//! more earlier point), one root-to-node chain per branch, and a decoration
//! `l_i` per branch. Multiplicities are never part of the input: they follow
//! from the chains through the proximity equalities
//! `m_P = Σ_{Q proximate to P} m_Q`, with multiplicity 1 at the last point of
//! each chain.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::syntax::{self, ParseError};

/// One point record as written in a germ file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Point {
    pub id: String,
    pub parent: Option<String>,
    /// The second point this one is proximate to, making it a satellite.
    pub proximate: Option<String>,
}

impl Point {
    pub fn root(id: &str) -> Self {
        Self {
            id: id.to_owned(),
            parent: None,
            proximate: None,
        }
    }

    pub fn free(id: &str, parent: &str) -> Self {
        Self {
            id: id.to_owned(),
            parent: Some(parent.to_owned()),
            proximate: None,
        }
    }

    pub fn satellite(id: &str, parent: &str, target: &str) -> Self {
        Self {
            id: id.to_owned(),
            parent: Some(parent.to_owned()),
            proximate: Some(target.to_owned()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClusterViolation {
    #[error("duplicate point id `{0}`")]
    DuplicateId(String),
    #[error("cluster has no points")]
    Empty,
    #[error("no root point (every point has a parent)")]
    NoRoot,
    #[error("multiple roots: {}", .0.join(", "))]
    MultipleRoots(Vec<String>),
    #[error("point `{id}` refers to unknown point `{reference}`")]
    UnknownPoint { id: String, reference: String },
    #[error("cyclic parentage through point `{0}`")]
    CyclicParentage(String),
    #[error("point `{id}`: `{target}` is not a point its parent is proximate to")]
    BadSatelliteTarget { id: String, target: String },
    /// Two satellites of one parent on the same exceptional curve: the two
    /// curves meet only once.
    #[error("points `{first}` and `{second}` both lie on the intersection of `{parent}` with `{target}`")]
    SharedSatellitePosition {
        first: String,
        second: String,
        parent: String,
        target: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid cluster: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
pub struct ClusterError(pub Vec<ClusterViolation>);

/// Every violation of the cluster invariants, in input order.
pub fn validate_cluster(points: &[Point]) -> Vec<ClusterViolation> {
    let mut out = Vec::new();
    if points.is_empty() {
        out.push(ClusterViolation::Empty);
        return out;
    }
    let mut index = HashMap::new();
    for (i, p) in points.iter().enumerate() {
        if index.insert(p.id.as_str(), i).is_some() {
            out.push(ClusterViolation::DuplicateId(p.id.clone()));
        }
    }

    let roots: Vec<String> = points
        .iter()
        .filter(|p| p.parent.is_none())
        .map(|p| p.id.clone())
        .collect();
    match roots.len() {
        0 => out.push(ClusterViolation::NoRoot),
        1 => {}
        _ => out.push(ClusterViolation::MultipleRoots(roots)),
    }

    let mut parent_of: Vec<Option<usize>> = vec![None; points.len()];
    for (i, p) in points.iter().enumerate() {
        for reference in p.parent.iter().chain(p.proximate.iter()) {
            if !index.contains_key(reference.as_str()) {
                out.push(ClusterViolation::UnknownPoint {
                    id: p.id.clone(),
                    reference: reference.clone(),
                });
            }
        }
        parent_of[i] = p.parent.as_deref().and_then(|q| index.get(q).copied());
    }

    // A walk of more than n parent steps must revisit a point.
    let mut cyclic = vec![false; points.len()];
    for start in 0..points.len() {
        let mut cur = Some(start);
        let mut steps = 0;
        while let Some(c) = cur {
            if steps > points.len() {
                cyclic[start] = true;
                break;
            }
            cur = parent_of[c];
            steps += 1;
        }
    }
    let mut reported = HashSet::new();
    for (i, p) in points.iter().enumerate() {
        if cyclic[i] && reported.insert(i) {
            out.push(ClusterViolation::CyclicParentage(p.id.clone()));
        }
    }

    for (i, p) in points.iter().enumerate() {
        let Some(target) = p.proximate.as_deref() else {
            continue;
        };
        let Some(&t) = index.get(target) else {
            continue;
        };
        let allowed = parent_of[i].is_some_and(|par| {
            !cyclic[par]
                && (parent_of[par] == Some(t)
                    || points[par]
                        .proximate
                        .as_deref()
                        .is_some_and(|s| index.get(s) == Some(&t)))
        });
        if !allowed {
            out.push(ClusterViolation::BadSatelliteTarget {
                id: p.id.clone(),
                target: target.to_owned(),
            });
        }
    }

    let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
    for (i, p) in points.iter().enumerate() {
        let (Some(par), Some(&t)) = (parent_of[i], p.proximate.as_deref().and_then(|s| index.get(s))) else {
            continue;
        };
        if let Some(&j) = seen.get(&(par, t)) {
            out.push(ClusterViolation::SharedSatellitePosition {
                first: points[j].id.clone(),
                second: p.id.clone(),
                parent: points[par].id.clone(),
                target: points[t].id.clone(),
            });
        } else {
            seen.insert((par, t), i);
        }
    }
    out
}

/// A validated cluster of infinitely near points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProximityCluster {
    ids: Vec<String>,
    parent: Vec<Option<usize>>,
    satellite: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    depth: Vec<usize>,
    root: usize,
    index: HashMap<String, usize>,
}

impl ProximityCluster {
    pub fn new(points: &[Point]) -> Result<Self, ClusterError> {
        let violations = validate_cluster(points);
        if !violations.is_empty() {
            return Err(ClusterError(violations));
        }
        let index: HashMap<String, usize> = points
            .iter()
            .enumerate()
            .map(|(i, p)| (p.id.clone(), i))
            .collect();
        let parent: Vec<Option<usize>> = points
            .iter()
            .map(|p| p.parent.as_ref().map(|q| index[q]))
            .collect();
        let satellite = points
            .iter()
            .map(|p| p.proximate.as_ref().map(|q| index[q]))
            .collect();
        let mut children = vec![Vec::new(); points.len()];
        let mut root = 0;
        for (i, par) in parent.iter().enumerate() {
            match par {
                Some(p) => children[*p].push(i),
                None => root = i,
            }
        }
        let mut depth = vec![0; points.len()];
        let mut stack = vec![root];
        while let Some(p) = stack.pop() {
            for &c in &children[p] {
                depth[c] = depth[p] + 1;
                stack.push(c);
            }
        }
        Ok(Self {
            ids: points.iter().map(|p| p.id.clone()).collect(),
            parent,
            satellite,
            children,
            depth,
            root,
            index,
        })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn id(&self, p: usize) -> &str {
        &self.ids[p]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn parent(&self, p: usize) -> Option<usize> {
        self.parent[p]
    }

    pub fn satellite_target(&self, p: usize) -> Option<usize> {
        self.satellite[p]
    }

    pub fn is_satellite(&self, p: usize) -> bool {
        self.satellite[p].is_some()
    }

    pub fn children(&self, p: usize) -> &[usize] {
        &self.children[p]
    }

    pub fn depth(&self, p: usize) -> usize {
        self.depth[p]
    }

    /// Whether `q` is proximate to `p`.
    pub fn is_proximate(&self, q: usize, p: usize) -> bool {
        self.parent[q] == Some(p) || self.satellite[q] == Some(p)
    }

    /// The points `q` is proximate to: its parent and, for a satellite,
    /// its satellite target.
    pub fn proximate_to(&self, q: usize) -> impl Iterator<Item = usize> + '_ {
        self.parent[q].into_iter().chain(self.satellite[q])
    }

    pub fn points(&self) -> Vec<Point> {
        (0..self.len())
            .map(|i| Point {
                id: self.ids[i].clone(),
                parent: self.parent[i].map(|p| self.ids[p].clone()),
                proximate: self.satellite[i].map(|p| self.ids[p].clone()),
            })
            .collect()
    }

    /// The root path ending at `p`.
    pub fn path_to(&self, p: usize) -> Vec<usize> {
        let mut path = vec![p];
        let mut cur = p;
        while let Some(par) = self.parent[cur] {
            path.push(par);
            cur = par;
        }
        path.reverse();
        path
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GermError {
    #[error(transparent)]
    Cluster(#[from] ClusterError),
    #[error("germ has no branches")]
    NoBranches,
    #[error("duplicate branch name `{0}`")]
    DuplicateBranchName(String),
    #[error("branch `{branch}`: invalid chain: {reason}")]
    InvalidChain { branch: String, reason: String },
    #[error("point `{0}` lies on no branch chain")]
    SpuriousPoint(String),
    #[error("branches {0} and {1} have identical chains (non-reduced germ)")]
    BranchesNotSeparated(usize, usize),
    #[error("branch `{branch}`: decoration must be positive")]
    ZeroDecoration { branch: String },
    #[error("branch `{branch}`: decoration l={l} is below the total multiplicity m={m}")]
    DecorationBelowMultiplicity { branch: String, l: u64, m: u64 },
    #[error("no branch with index {0}")]
    NoSuchBranch(usize),
    #[error("intersection of branch {0} with itself is undefined")]
    SameBranch(usize),
}

/// Rule used for the embedded-resolution total multiplicity `M(i)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MBigRule {
    /// Sum over the centers of the minimal normal-crossings resolution, then
    /// one more free simple point when the branch's last center is a
    /// satellite point.
    #[default]
    PaperCalibrated,
    /// Sum over the centers of the minimal normal-crossings resolution.
    PlainNc,
}

impl FromStr for MBigRule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "paper-calibrated" | "calibrated" => Ok(Self::PaperCalibrated),
            "plain-nc" => Ok(Self::PlainNc),
            other => Err(format!("unknown M rule `{other}` (expected paper-calibrated or plain-nc)")),
        }
    }
}

impl fmt::Display for MBigRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::PaperCalibrated => "paper-calibrated",
            Self::PlainNc => "plain-nc",
        })
    }
}

/// Input description of one branch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchSpec {
    pub name: String,
    pub chain: Vec<String>,
    pub l: u64,
}

impl BranchSpec {
    pub fn new(name: &str, chain: &[&str], l: u64) -> Self {
        Self {
            name: name.to_owned(),
            chain: chain.iter().map(|s| (*s).to_owned()).collect(),
            l,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Branch {
    pub name: String,
    /// Point indices into the cluster, root first.
    pub chain: Vec<usize>,
}

/// Multiplicity sequence of a branch along `chain` from the proximity
/// equalities, read backwards from the terminal value 1.
pub fn chain_multiplicities(cluster: &ProximityCluster, chain: &[usize]) -> Result<Vec<u64>, String> {
    check_chain(cluster, chain)?;
    let n = chain.len();
    let mut m = vec![0u64; n];
    m[n - 1] = 1;
    for t in (0..n - 1).rev() {
        let p = chain[t];
        m[t] = (t + 1..n)
            .filter(|&s| cluster.is_proximate(chain[s], p))
            .map(|s| m[s])
            .sum();
    }
    Ok(m)
}

fn check_chain(cluster: &ProximityCluster, chain: &[usize]) -> Result<(), String> {
    let Some(&first) = chain.first() else {
        return Err("empty chain".into());
    };
    if first != cluster.root() {
        return Err(format!("chain starts at `{}`, not at the root", cluster.id(first)));
    }
    for w in chain.windows(2) {
        if cluster.parent(w[1]) != Some(w[0]) {
            return Err(format!(
                "`{}` is not the parent of `{}`",
                cluster.id(w[0]),
                cluster.id(w[1])
            ));
        }
    }
    Ok(())
}

/// Numerical invariants of a decorated germ.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GermInvariants {
    pub delta: Vec<u64>,
    pub total_multiplicity: Vec<u64>,
    pub embedded_total_multiplicity: Vec<u64>,
    /// Symmetric; the diagonal is unused and left at zero.
    pub intersections: Vec<Vec<u64>>,
    pub delta_curve: u64,
    pub rule: MBigRule,
    pub standard: bool,
}

/// A decorated germ `(C, l)`: cluster, numbered branches and decoration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecoratedGerm {
    cluster: ProximityCluster,
    branches: Vec<Branch>,
    decoration: Vec<u64>,
    mults: Vec<Vec<u64>>,
    // position of each point on each chain
    position: Vec<HashMap<usize, usize>>,
}

impl DecoratedGerm {
    pub fn new(cluster: ProximityCluster, specs: Vec<BranchSpec>) -> Result<Self, GermError> {
        if specs.is_empty() {
            return Err(GermError::NoBranches);
        }
        let mut names = HashSet::new();
        let mut branches = Vec::with_capacity(specs.len());
        let mut mults = Vec::with_capacity(specs.len());
        for spec in &specs {
            if !names.insert(spec.name.as_str()) {
                return Err(GermError::DuplicateBranchName(spec.name.clone()));
            }
            let chain = spec
                .chain
                .iter()
                .map(|id| {
                    cluster.index_of(id).ok_or_else(|| GermError::InvalidChain {
                        branch: spec.name.clone(),
                        reason: format!("unknown point `{id}`"),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            let m = chain_multiplicities(&cluster, &chain).map_err(|reason| GermError::InvalidChain {
                branch: spec.name.clone(),
                reason,
            })?;
            mults.push(m);
            branches.push(Branch {
                name: spec.name.clone(),
                chain,
            });
        }

        let mut covered = vec![false; cluster.len()];
        for b in &branches {
            for &p in &b.chain {
                covered[p] = true;
            }
        }
        if let Some(p) = covered.iter().position(|c| !c) {
            return Err(GermError::SpuriousPoint(cluster.id(p).to_owned()));
        }
        for i in 0..branches.len() {
            for k in i + 1..branches.len() {
                if branches[i].chain == branches[k].chain {
                    return Err(GermError::BranchesNotSeparated(i + 1, k + 1));
                }
            }
        }

        let position = branches
            .iter()
            .map(|b| b.chain.iter().enumerate().map(|(t, &p)| (p, t)).collect())
            .collect();
        let germ = Self {
            cluster,
            branches,
            decoration: specs.iter().map(|s| s.l).collect(),
            mults,
            position,
        };
        for (i, spec) in specs.iter().enumerate() {
            if spec.l == 0 {
                return Err(GermError::ZeroDecoration {
                    branch: spec.name.clone(),
                });
            }
            let m = germ.total_multiplicity(i + 1)?;
            if spec.l < m {
                return Err(GermError::DecorationBelowMultiplicity {
                    branch: spec.name.clone(),
                    l: spec.l,
                    m,
                });
            }
        }
        Ok(germ)
    }

    pub fn cluster(&self) -> &ProximityCluster {
        &self.cluster
    }

    /// Number of branches `r`.
    pub fn branch_count(&self) -> usize {
        self.branches.len()
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    /// Decoration vector `l`, indexed from 0.
    pub fn decoration(&self) -> &[u64] {
        &self.decoration
    }

    /// A copy with a different decoration.
    pub fn with_decoration(&self, l: &[u64]) -> Result<Self, GermError> {
        let specs = self
            .branches
            .iter()
            .zip(l)
            .map(|(b, &l)| BranchSpec {
                name: b.name.clone(),
                chain: b.chain.iter().map(|&p| self.cluster.id(p).to_owned()).collect(),
                l,
            })
            .collect();
        Self::new(self.cluster.clone(), specs)
    }

    fn check_index(&self, i: usize) -> Result<usize, GermError> {
        if i == 0 || i > self.branches.len() {
            Err(GermError::NoSuchBranch(i))
        } else {
            Ok(i - 1)
        }
    }

    /// Multiplicity sequence of branch `i` (1-based) along its chain.
    pub fn branch_multiplicities(&self, i: usize) -> Result<&[u64], GermError> {
        let i = self.check_index(i)?;
        Ok(&self.mults[i])
    }

    /// Multiplicity of branch `i` (0-based) at cluster point `p`; zero off
    /// the chain.
    pub(crate) fn mult_at(&self, i: usize, p: usize) -> u64 {
        self.position[i].get(&p).map_or(0, |&t| self.mults[i][t])
    }

    /// Multiplicity of the whole curve at each cluster point.
    pub fn curve_multiplicities(&self) -> Vec<u64> {
        (0..self.cluster.len())
            .map(|p| (0..self.branches.len()).map(|i| self.mult_at(i, p)).sum())
            .collect()
    }

    pub fn delta_branch(&self, i: usize) -> Result<u64, GermError> {
        Ok(self.branch_multiplicities(i)?.iter().map(|&m| m * (m - 1) / 2).sum())
    }

    pub fn delta_curve(&self) -> u64 {
        let by_points: u64 = self
            .curve_multiplicities()
            .iter()
            .map(|&m| m * m.saturating_sub(1) / 2)
            .sum();
        debug_assert_eq!(by_points, self.delta_by_branches());
        by_points
    }

    fn delta_by_branches(&self) -> u64 {
        let r = self.branch_count();
        let deltas: u64 = (1..=r).map(|i| self.delta_branch(i).unwrap()).sum();
        let cross: u64 = (1..=r)
            .flat_map(|i| (i + 1..=r).map(move |k| (i, k)))
            .map(|(i, k)| self.pairwise_intersection(i, k).unwrap())
            .sum();
        deltas + cross
    }

    /// Intersection multiplicity `C_i · C_k` by Noether's formula over the
    /// shared prefix of the two chains.
    pub fn pairwise_intersection(&self, i: usize, k: usize) -> Result<u64, GermError> {
        let (a, b) = (self.check_index(i)?, self.check_index(k)?);
        if a == b {
            return Err(GermError::SameBranch(i));
        }
        let (ca, cb) = (&self.branches[a].chain, &self.branches[b].chain);
        if ca == cb {
            return Err(GermError::BranchesNotSeparated(i, k));
        }
        Ok(ca
            .iter()
            .zip(cb)
            .take_while(|(p, q)| p == q)
            .enumerate()
            .map(|(t, _)| self.mults[a][t] * self.mults[b][t])
            .sum())
    }

    /// Centers of the minimal joint resolution: points where the curve is
    /// singular or where two branches still meet.
    pub fn resolution_centers(&self) -> Vec<bool> {
        self.curve_multiplicities().iter().map(|&m| m >= 2).collect()
    }

    /// Centers of the minimal embedded resolution: besides the resolution
    /// centers, satellite points (three components of the total transform
    /// meet there) and points where a branch is tangent to an earlier
    /// exceptional curve (its next point is a satellite).
    pub fn embedded_centers(&self) -> Vec<bool> {
        let mut centers = self.resolution_centers();
        for p in 0..self.cluster.len() {
            if self.cluster.is_satellite(p) {
                centers[p] = true;
            }
        }
        for b in &self.branches {
            for w in b.chain.windows(2) {
                if self.cluster.is_satellite(w[1]) {
                    centers[w[0]] = true;
                }
            }
        }
        centers
    }

    /// Total multiplicity `m(i)` of branch `i` with respect to the curve.
    pub fn total_multiplicity(&self, i: usize) -> Result<u64, GermError> {
        let a = self.check_index(i)?;
        let centers = self.resolution_centers();
        Ok(self.sum_over(a, &centers))
    }

    /// Embedded-resolution total multiplicity `M(i)` under `rule`.
    pub fn embedded_total_multiplicity(&self, i: usize, rule: MBigRule) -> Result<u64, GermError> {
        let a = self.check_index(i)?;
        let centers = self.embedded_centers();
        let mut total = self.sum_over(a, &centers);
        if rule == MBigRule::PaperCalibrated {
            let last_center = self.branches[a].chain.iter().rev().find(|&&p| centers[p]);
            if last_center.is_some_and(|&p| self.cluster.is_satellite(p)) {
                // one free simple point after the satellite center
                total += 1;
            }
        }
        Ok(total)
    }

    fn sum_over(&self, a: usize, centers: &[bool]) -> u64 {
        self.branches[a]
            .chain
            .iter()
            .zip(&self.mults[a])
            .filter(|(p, _)| centers[**p])
            .map(|(_, m)| m)
            .sum()
    }

    /// `l_i ≥ M(i) + 1` for every branch.
    pub fn is_standard(&self, rule: MBigRule) -> bool {
        (1..=self.branch_count()).all(|i| {
            self.decoration[i - 1] >= self.embedded_total_multiplicity(i, rule).unwrap() + 1
        })
    }

    pub fn invariants(&self, rule: MBigRule) -> GermInvariants {
        let r = self.branch_count();
        let mut intersections = vec![vec![0; r]; r];
        for i in 0..r {
            for k in 0..r {
                if i != k {
                    intersections[i][k] = self.pairwise_intersection(i + 1, k + 1).unwrap();
                }
            }
        }
        GermInvariants {
            delta: (1..=r).map(|i| self.delta_branch(i).unwrap()).collect(),
            total_multiplicity: (1..=r).map(|i| self.total_multiplicity(i).unwrap()).collect(),
            embedded_total_multiplicity: (1..=r)
                .map(|i| self.embedded_total_multiplicity(i, rule).unwrap())
                .collect(),
            intersections,
            delta_curve: self.delta_curve(),
            rule,
            standard: self.is_standard(rule),
        }
    }

    /// Points in canonical depth-first order together with their canonical
    /// subtree codes. Children are visited in the order of their codes, so
    /// the order only depends on the isomorphism class of
    /// (cluster, numbered chains, decoration).
    pub(crate) fn canonical_order(&self) -> Vec<usize> {
        let n = self.cluster.len();
        let mut terminals: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, b) in self.branches.iter().enumerate() {
            terminals[*b.chain.last().unwrap()].push(i);
        }
        let mut code: Vec<String> = vec![String::new(); n];
        // children have larger depth, so process by decreasing depth
        let mut by_depth: Vec<usize> = (0..n).collect();
        by_depth.sort_by_key(|&p| std::cmp::Reverse(self.cluster.depth(p)));
        for &p in &by_depth {
            let sat = self
                .cluster
                .satellite_target(p)
                .map_or("-".to_owned(), |t| (self.cluster.depth(p) - self.cluster.depth(t)).to_string());
            let ends: Vec<String> = terminals[p]
                .iter()
                .map(|&i| format!("{}:{}", i + 1, self.decoration[i]))
                .collect();
            let mut kids: Vec<&str> = self.cluster.children(p).iter().map(|&c| code[c].as_str()).collect();
            kids.sort_unstable();
            code[p] = format!("({}|{}|{})", sat, ends.join(","), kids.concat());
        }
        let mut order = Vec::with_capacity(n);
        let mut stack = vec![self.cluster.root()];
        while let Some(p) = stack.pop() {
            order.push(p);
            let mut kids = self.cluster.children(p).to_vec();
            kids.sort_by(|&a, &b| code[a].cmp(&code[b]));
            stack.extend(kids.into_iter().rev());
        }
        order
    }

    fn render(&self, with_names: bool) -> String {
        let order = self.canonical_order();
        let mut rename = vec![String::new(); self.cluster.len()];
        for (k, &p) in order.iter().enumerate() {
            rename[p] = format!("q{k}");
        }
        let mut out = String::new();
        for &p in &order {
            out.push_str("point ");
            out.push_str(&rename[p]);
            if let Some(par) = self.cluster.parent(p) {
                out.push_str(" parent=");
                out.push_str(&rename[par]);
            }
            if let Some(t) = self.cluster.satellite_target(p) {
                out.push_str(" proximate=");
                out.push_str(&rename[t]);
            }
            out.push('\n');
        }
        for (i, b) in self.branches.iter().enumerate() {
            let name = if with_names { b.name.clone() } else { format!("C{}", i + 1) };
            let chain: Vec<&str> = b.chain.iter().map(|&p| rename[p].as_str()).collect();
            out.push_str(&format!(
                "branch {} chain={} l={}\n",
                name,
                chain.join(","),
                self.decoration[i]
            ));
        }
        out
    }

    /// Germ file text with points renamed `q0, q1, …` in canonical order.
    pub fn canonical_text(&self) -> String {
        self.render(true)
    }

    /// Relabeling-invariant key: equal keys iff the germs are topologically
    /// equivalent with matching branch numbering and decoration.
    pub fn topology_key(&self) -> String {
        self.render(false)
    }

    /// Topological equivalence respecting branch numbering and decoration.
    /// On success the witness maps each point id of `self` to the matching
    /// point id of `other`.
    pub fn equivalence(&self, other: &Self) -> Option<BTreeMap<String, String>> {
        if self.topology_key() != other.topology_key() {
            return None;
        }
        let a = self.canonical_order();
        let b = other.canonical_order();
        Some(
            a.iter()
                .zip(&b)
                .map(|(&p, &q)| (self.cluster.id(p).to_owned(), other.cluster.id(q).to_owned()))
                .collect(),
        )
    }

    pub fn is_topologically_equivalent(&self, other: &Self) -> bool {
        self.topology_key() == other.topology_key()
    }
}

impl fmt::Display for DecoratedGerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical_text())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GermParseError {
    #[error(transparent)]
    Syntax(#[from] ParseError),
    #[error(transparent)]
    Invalid(#[from] GermError),
}

impl From<ClusterError> for GermParseError {
    fn from(e: ClusterError) -> Self {
        Self::Invalid(GermError::Cluster(e))
    }
}

/// Parse the germ text format:
///
/// ```text
/// point <id> [parent=<id>] [proximate=<id>]
/// branch <name> chain=<id>,<id>,... l=<positive int>
/// ```
pub fn parse_germ(text: &str) -> Result<DecoratedGerm, GermParseError> {
    let mut points = Vec::new();
    let mut specs = Vec::new();
    for (line_no, line) in syntax::content_lines(text) {
        let toks = syntax::tokens(line);
        let head = toks[0];
        let name_tok = toks
            .get(1)
            .ok_or_else(|| ParseError::new(line_no, head.column, format!("`{}` needs a name", head.text)))?;
        if !syntax::is_identifier(name_tok.text) {
            return Err(ParseError::new(line_no, name_tok.column, format!("bad identifier `{}`", name_tok.text)).into());
        }
        let mut fields: HashMap<&str, (&str, usize)> = HashMap::new();
        for tok in &toks[2..] {
            let Some((key, value)) = tok.text.split_once('=') else {
                return Err(ParseError::new(line_no, tok.column, format!("expected key=value, got `{}`", tok.text)).into());
            };
            if fields.insert(key, (value, tok.column)).is_some() {
                return Err(ParseError::new(line_no, tok.column, format!("repeated field `{key}`")).into());
            }
        }
        let allowed: &[&str] = match head.text {
            "point" => &["parent", "proximate"],
            "branch" => &["chain", "l"],
            other => {
                return Err(ParseError::new(line_no, head.column, format!("unknown declaration `{other}`")).into())
            }
        };
        for (key, (_, col)) in &fields {
            if !allowed.contains(key) {
                return Err(ParseError::new(line_no, *col, format!("unknown field `{key}`")).into());
            }
        }
        let ident = |key: &str| -> Result<Option<String>, ParseError> {
            match fields.get(key) {
                None => Ok(None),
                Some((v, col)) if syntax::is_identifier(v) => {
                    let _ = col;
                    Ok(Some((*v).to_owned()))
                }
                Some((v, col)) => Err(ParseError::new(line_no, *col, format!("bad identifier `{v}`"))),
            }
        };
        if head.text == "point" {
            points.push(Point {
                id: name_tok.text.to_owned(),
                parent: ident("parent")?,
                proximate: ident("proximate")?,
            });
        } else {
            let (chain, chain_col) = fields
                .get("chain")
                .copied()
                .ok_or_else(|| ParseError::new(line_no, head.column, "branch needs chain="))?;
            let chain: Vec<String> = chain.split(',').map(str::to_owned).collect();
            if let Some(bad) = chain.iter().find(|c| !syntax::is_identifier(c)) {
                return Err(ParseError::new(line_no, chain_col, format!("bad point id `{bad}` in chain")).into());
            }
            let (l, l_col) = fields
                .get("l")
                .copied()
                .ok_or_else(|| ParseError::new(line_no, head.column, "branch needs l="))?;
            let l: u64 = l
                .parse()
                .map_err(|_| ParseError::new(line_no, l_col, format!("l must be a positive integer, got `{l}`")))?;
            specs.push(BranchSpec {
                name: name_tok.text.to_owned(),
                chain,
                l,
            });
        }
    }
    let cluster = ProximityCluster::new(&points)?;
    Ok(DecoratedGerm::new(cluster, specs)?)
}

impl FromStr for DecoratedGerm {
    type Err = GermParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_germ(s)
    }
}

/// Ready-made germs used throughout the tests and the CLI.
pub mod samples {
    use super::*;

    /// Cusp `y² = x³` and its tangent line `y = 0`, decorated `(l1, l2)`.
    pub fn cusp_and_tangent_line(l1: u64, l2: u64) -> DecoratedGerm {
        let cluster = ProximityCluster::new(&[
            Point::root("q0"),
            Point::free("q1", "q0"),
            Point::satellite("q2", "q1", "q0"),
        ])
        .unwrap();
        DecoratedGerm::new(
            cluster,
            vec![
                BranchSpec::new("cusp", &["q0", "q1", "q2"], l1),
                BranchSpec::new("line", &["q0", "q1"], l2),
            ],
        )
        .unwrap()
    }

    /// `r` pairwise transverse lines through the origin `o`, all decorated
    /// `l`. Line `Li` passes through the free point `pi` of the first
    /// neighbourhood, which separates it from the others.
    pub fn concurrent_lines(r: usize, l: u64) -> DecoratedGerm {
        let mut points = vec![Point::root("o")];
        for i in 1..=r {
            points.push(Point::free(&format!("p{i}"), "o"));
        }
        let cluster = ProximityCluster::new(&points).unwrap();
        let specs = (1..=r)
            .map(|i| BranchSpec::new(&format!("L{i}"), &["o", &format!("p{i}")], l))
            .collect();
        DecoratedGerm::new(cluster, specs).unwrap()
    }

    pub fn smooth_branch(l: u64) -> DecoratedGerm {
        let cluster = ProximityCluster::new(&[Point::root("o")]).unwrap();
        DecoratedGerm::new(cluster, vec![BranchSpec::new("C", &["o"], l)]).unwrap()
    }
}
