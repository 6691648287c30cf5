//! Generators and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use picturedef::germ::chain_multiplicities;
use picturedef::incidence::{canonicalize, validate_matrix};
use picturedef::{BranchSpec, ConstraintSet, DecoratedGerm, IncidenceMatrix, Point, ProximityCluster, WeightedTree};
use rand::seq::SliceRandom;
use rand::Rng;

/// A random valid germ on at most `max_points` points. Each point gets a
/// random parent and, when allowed, a random satellite target among the
/// points its parent is proximate to. Branches end at every leaf and at some
/// inner points; decorations exceed the chain sum by at most `extra`.
pub fn random_germ<R: Rng>(rng: &mut R, max_points: usize, extra: u64) -> Option<DecoratedGerm> {
    let n = rng.gen_range(1..=max_points);
    let mut points = vec![Point::root("q0")];
    // proximate targets of each point other than its parent
    let mut prox: Vec<Vec<usize>> = vec![vec![]];
    let mut parent = vec![usize::MAX];
    for k in 1..n {
        let p = rng.gen_range(0..k);
        let mut targets = prox[p].clone();
        if parent[p] != usize::MAX {
            targets.push(parent[p]);
        }
        // each intersection of E_p with another curve holds one point
        targets.retain(|&t| !(1..k).any(|s| parent[s] == p && prox[s] == [t]));
        let id = format!("q{k}");
        let pid = format!("q{p}");
        if !targets.is_empty() && rng.gen_bool(0.5) {
            let t = *targets.choose(rng).unwrap();
            points.push(Point::satellite(&id, &pid, &format!("q{t}")));
            prox.push(vec![t]);
        } else {
            points.push(Point::free(&id, &pid));
            prox.push(vec![]);
        }
        parent.push(p);
    }
    let cluster = ProximityCluster::new(&points).ok()?;
    let mut ends: Vec<usize> = (0..n).filter(|&p| cluster.children(p).is_empty()).collect();
    for p in 0..n {
        if !cluster.children(p).is_empty() && rng.gen_bool(0.2) {
            ends.push(p);
        }
    }
    ends.sort_unstable();
    let mut specs = Vec::new();
    for (b, &e) in ends.iter().enumerate() {
        let path = cluster.path_to(e);
        let sum: u64 = chain_multiplicities(&cluster, &path).ok()?.iter().sum();
        let chain: Vec<String> = path.iter().map(|&p| cluster.id(p).to_owned()).collect();
        let refs: Vec<&str> = chain.iter().map(String::as_str).collect();
        specs.push(BranchSpec::new(&format!("B{}", b + 1), &refs, sum + rng.gen_range(0..=extra)));
    }
    DecoratedGerm::new(cluster, specs).ok()
}

/// The same germ with points renamed and listed in a shuffled order.
pub fn relabel<R: Rng>(germ: &DecoratedGerm, rng: &mut R) -> DecoratedGerm {
    let cl = germ.cluster();
    let mut names: Vec<String> = (0..cl.len()).map(|k| format!("x{}", 100 + k)).collect();
    names.shuffle(rng);
    let name = |p: usize| names[p].clone();
    let mut points: Vec<Point> = (0..cl.len())
        .map(|p| Point {
            id: name(p),
            parent: cl.parent(p).map(name),
            proximate: cl.satellite_target(p).map(name),
        })
        .collect();
    points.shuffle(rng);
    let specs = germ
        .branches()
        .iter()
        .zip(germ.decoration())
        .map(|(b, &l)| {
            let chain: Vec<String> = b.chain.iter().map(|&p| name(p)).collect();
            let refs: Vec<&str> = chain.iter().map(String::as_str).collect();
            BranchSpec::new(&b.name, &refs, l)
        })
        .collect();
    DecoratedGerm::new(ProximityCluster::new(&points).unwrap(), specs).unwrap()
}

/// Every multiset of nonzero columns with the right row sums, filtered by the
/// full constraint check. Columns are drawn in decreasing order from the box
/// `Π [0, l_i]`, so nothing but the row sums prunes the search.
pub fn brute_force(cs: &ConstraintSet) -> BTreeSet<IncidenceMatrix> {
    let r = cs.rows();
    let mut boxed = Vec::new();
    let mut cur = vec![0u32; r];
    loop {
        if cur.iter().any(|&v| v > 0) {
            boxed.push(cur.clone());
        }
        let mut i = 0;
        while i < r && cur[i] as u64 == cs.lengths[i] {
            cur[i] = 0;
            i += 1;
        }
        if i == r {
            break;
        }
        cur[i] += 1;
    }
    boxed.sort();
    boxed.reverse();

    fn go(
        boxed: &[Vec<u32>],
        start: usize,
        left: &mut Vec<i64>,
        cols: &mut Vec<Vec<u32>>,
        cs: &ConstraintSet,
        out: &mut BTreeSet<IncidenceMatrix>,
    ) {
        if left.iter().all(|&v| v == 0) {
            let m = IncidenceMatrix::from_columns(left.len(), cols.clone());
            if validate_matrix(&m, cs).is_empty() {
                out.insert(canonicalize(&m));
            }
            return;
        }
        for idx in start..boxed.len() {
            let c = &boxed[idx];
            if c.iter().zip(left.iter()).all(|(&v, &l)| v as i64 <= l) {
                for (l, &v) in left.iter_mut().zip(c) {
                    *l -= v as i64;
                }
                cols.push(c.clone());
                go(boxed, idx, left, cols, cs, out);
                cols.pop();
                for (l, &v) in left.iter_mut().zip(c) {
                    *l += v as i64;
                }
            }
        }
    }

    let mut out = BTreeSet::new();
    let mut left: Vec<i64> = cs.lengths.iter().map(|&l| l as i64).collect();
    go(&boxed, 0, &mut left, &mut Vec::new(), cs, &mut out);
    out
}

/// A constraint set not necessarily coming from a germ.
pub fn random_constraints<R: Rng>(rng: &mut R, max_rows: usize, max_total: u64) -> ConstraintSet {
    let r = rng.gen_range(1..=max_rows);
    let mut lengths = Vec::new();
    let mut left = max_total;
    for i in 0..r {
        let cap = left - (r - i - 1) as u64;
        let l = rng.gen_range(1..=cap.min(6));
        lengths.push(l);
        left -= l;
    }
    let deltas = lengths.iter().map(|&l| rng.gen_range(0..=l.min(3))).collect();
    let mut intersections = vec![vec![0; r]; r];
    for i in 0..r {
        for k in i + 1..r {
            let x = rng.gen_range(0..=lengths[i].min(lengths[k]));
            intersections[i][k] = x;
            intersections[k][i] = x;
        }
    }
    ConstraintSet {
        deltas,
        lengths,
        intersections,
    }
}

/// Random tree with weights in `[lo, -1]`, vertices `v0..`.
pub fn random_tree<R: Rng>(rng: &mut R, n: usize, lo: i64) -> WeightedTree {
    let labels: Vec<String> = (0..n).map(|v| format!("v{v}")).collect();
    let weights: Vec<i64> = (0..n).map(|_| rng.gen_range(lo..=-1)).collect();
    let edges: Vec<(usize, usize)> = (1..n).map(|v| (rng.gen_range(0..v), v)).collect();
    WeightedTree::from_indices(labels, weights, &edges).unwrap()
}

pub fn shuffled_columns<R: Rng>(m: &IncidenceMatrix, rng: &mut R) -> IncidenceMatrix {
    let mut perm: Vec<usize> = (0..m.cols()).collect();
    perm.shuffle(rng);
    m.permute_columns(&perm)
}
