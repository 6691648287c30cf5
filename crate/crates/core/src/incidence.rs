//! Incidence matrices of picture deformations.
//!
//! An `r × n` matrix `(m_ij)` records the multiplicity of the point `P_j` on
//! the deformed branch `D_i`. It must satisfy, for every row `i` and every
//! pair of rows `i ≠ k`:
//!
//! ```text
//! Σ_j m_ij (m_ij − 1)/2 = δ_i      Σ_j m_ij m_kj = C_i · C_k      Σ_j m_ij = l_i
//! ```
//!
//! Matrices are only defined up to column permutation; the canonical
//! representative has its columns in non-increasing lexicographic order.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::germ::{DecoratedGerm, MBigRule};
use crate::linalg;
use crate::syntax::{self, ParseError};
use crate::Rational;

/// The right-hand sides of the three constraint equations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintSet {
    pub deltas: Vec<u64>,
    pub lengths: Vec<u64>,
    /// Symmetric `C_i · C_k`; the diagonal is ignored.
    pub intersections: Vec<Vec<u64>>,
}

impl ConstraintSet {
    pub fn rows(&self) -> usize {
        self.lengths.len()
    }

    /// Largest admissible entry in row `i`: `e(e−1)/2 ≤ δ_i` and `e ≤ l_i`.
    pub fn entry_bound(&self, i: usize) -> u32 {
        let mut e = 0u64;
        while (e + 1) * e / 2 <= self.deltas[i] && e < self.lengths[i] {
            e += 1;
        }
        e as u32
    }

    /// Diagonal `l_i + 2δ_i`, off-diagonal `C_i·C_k`: the required `M·Mᵀ`.
    pub fn gram_target(&self) -> Vec<Vec<i64>> {
        let r = self.rows();
        (0..r)
            .map(|i| {
                (0..r)
                    .map(|k| {
                        if i == k {
                            (self.lengths[i] + 2 * self.deltas[i]) as i64
                        } else {
                            self.intersections[i][k] as i64
                        }
                    })
                    .collect()
            })
            .collect()
    }

    /// δ ≡ 0 and every pair of branches meets transversally.
    pub fn is_ordinary_multiline(&self) -> bool {
        let r = self.rows();
        self.deltas.iter().all(|&d| d == 0)
            && (0..r).all(|i| (0..r).all(|k| i == k || self.intersections[i][k] == 1))
    }
}

pub fn constraints_of(germ: &DecoratedGerm) -> ConstraintSet {
    let inv = germ.invariants(MBigRule::default());
    ConstraintSet {
        deltas: inv.delta,
        lengths: germ.decoration().to_vec(),
        intersections: inv.intersections,
    }
}

/// An `r × n` non-negative integer matrix, stored by columns.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct IncidenceMatrix {
    rows: usize,
    cols: Vec<Vec<u32>>,
}

impl IncidenceMatrix {
    pub fn from_columns(rows: usize, cols: Vec<Vec<u32>>) -> Self {
        assert!(cols.iter().all(|c| c.len() == rows), "column length must equal the row count");
        Self { rows, cols }
    }

    pub fn from_rows(rows: &[Vec<u32>]) -> Self {
        let r = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == n), "ragged matrix");
        Self {
            rows: r,
            cols: (0..n).map(|j| rows.iter().map(|row| row[j]).collect()).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols.len()
    }

    pub fn column(&self, j: usize) -> &[u32] {
        &self.cols[j]
    }

    pub fn columns(&self) -> &[Vec<u32>] {
        &self.cols
    }

    pub fn entry(&self, i: usize, j: usize) -> u32 {
        self.cols[j][i]
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows)
            .map(|i| self.cols.iter().map(|c| c[i]).collect())
            .collect()
    }

    pub fn to_i64_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows)
            .map(|i| self.cols.iter().map(|c| c[i] as i64).collect())
            .collect()
    }

    /// `M · Mᵀ`.
    pub fn gram(&self) -> Vec<Vec<i64>> {
        let r = self.rows;
        let mut g = vec![vec![0i64; r]; r];
        for c in &self.cols {
            for i in 0..r {
                for k in 0..r {
                    g[i][k] += c[i] as i64 * c[k] as i64;
                }
            }
        }
        g
    }

    pub fn is_canonical(&self) -> bool {
        self.cols.windows(2).all(|w| w[0] >= w[1])
    }

    /// The same matrix with its columns permuted: column `j` of the result
    /// is column `perm[j]` of `self`.
    pub fn permute_columns(&self, perm: &[usize]) -> Self {
        Self {
            rows: self.rows,
            cols: perm.iter().map(|&j| self.cols[j].clone()).collect(),
        }
    }

    /// Line sets of the columns with at least two nonzero entries.
    pub fn multi_point_supports(&self) -> BTreeSet<BTreeSet<usize>> {
        self.cols
            .iter()
            .map(|c| (0..self.rows).filter(|&i| c[i] > 0).collect::<BTreeSet<_>>())
            .filter(|s| s.len() >= 2)
            .collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for row in self.to_rows() {
            let cells: Vec<String> = row.iter().map(u32::to_string).collect();
            out.push_str(&cells.join(" "));
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for IncidenceMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Sort columns into non-increasing lexicographic order.
pub fn canonicalize(m: &IncidenceMatrix) -> IncidenceMatrix {
    let mut cols = m.cols.clone();
    cols.sort_unstable_by(|a, b| b.cmp(a));
    IncidenceMatrix { rows: m.rows, cols }
}

/// Matrices separated by blank lines, in the given order.
pub fn matrices_to_text(ms: &[IncidenceMatrix]) -> String {
    ms.iter().map(IncidenceMatrix::to_text).collect::<Vec<_>>().join("\n")
}

pub fn parse_matrices(text: &str) -> Result<Vec<IncidenceMatrix>, IncidenceError> {
    let mut out = Vec::new();
    let mut block: Vec<Vec<u32>> = Vec::new();
    let mut width = None;
    let flush = |block: &mut Vec<Vec<u32>>, width: &mut Option<usize>, out: &mut Vec<IncidenceMatrix>| {
        if !block.is_empty() {
            out.push(IncidenceMatrix::from_rows(block));
            block.clear();
        }
        *width = None;
    };
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("");
        if line.trim().is_empty() {
            // comment-only lines do not end a block
            if raw.trim().is_empty() {
                flush(&mut block, &mut width, &mut out);
            }
            continue;
        }
        let mut row = Vec::new();
        for tok in syntax::tokens(line) {
            let v: i64 = tok
                .text
                .parse()
                .map_err(|_| ParseError::new(line_no, tok.column, format!("not an integer: `{}`", tok.text)))?;
            if v < 0 {
                return Err(IncidenceError::NegativeEntry {
                    line: line_no,
                    column: tok.column,
                });
            }
            row.push(v as u32);
        }
        match width {
            Some(w) if w != row.len() => {
                return Err(ParseError::new(line_no, 1, format!("row has {} entries, expected {w}", row.len())).into())
            }
            _ => width = Some(row.len()),
        }
        block.push(row);
    }
    flush(&mut block, &mut width, &mut out);
    Ok(out)
}

/// One failed check of [`validate_matrix`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    RowCount { expected: usize, found: usize },
    ZeroColumn { column: usize },
    /// `Σ_j m_ij ≠ l_i`
    Length { row: usize, expected: u64, found: u64 },
    /// `Σ_j m_ij(m_ij−1)/2 ≠ δ_i`
    Delta { row: usize, expected: u64, found: u64 },
    /// `Σ_j m_ij m_kj ≠ C_i·C_k`
    Intersection { rows: (usize, usize), expected: u64, found: u64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::RowCount { expected, found } => write!(f, "matrix has {found} rows, germ has {expected} branches"),
            Self::ZeroColumn { column } => write!(f, "column {} is zero", column + 1),
            Self::Length { row, expected, found } => {
                write!(f, "row {}: sum of entries is {found}, l = {expected}", row + 1)
            }
            Self::Delta { row, expected, found } => {
                write!(f, "row {}: sum of m(m-1)/2 is {found}, delta = {expected}", row + 1)
            }
            Self::Intersection { rows, expected, found } => write!(
                f,
                "rows {} and {}: dot product is {found}, intersection number = {expected}",
                rows.0 + 1,
                rows.1 + 1
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IncidenceError {
    #[error("matrix violates the constraints: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    ConstraintMismatch(Vec<Violation>),
    #[error("negative entry at line {line}, column {column}")]
    NegativeEntry { line: usize, column: usize },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// Check the three constraint equations exactly, reporting every violation.
pub fn validate_matrix(m: &IncidenceMatrix, cs: &ConstraintSet) -> Vec<Violation> {
    let r = cs.rows();
    if m.rows() != r {
        return vec![Violation::RowCount {
            expected: r,
            found: m.rows(),
        }];
    }
    let mut out = Vec::new();
    for (j, c) in m.columns().iter().enumerate() {
        if c.iter().all(|&v| v == 0) {
            out.push(Violation::ZeroColumn { column: j });
        }
    }
    for i in 0..r {
        let found: u64 = m.columns().iter().map(|c| c[i] as u64).sum();
        if found != cs.lengths[i] {
            out.push(Violation::Length {
                row: i,
                expected: cs.lengths[i],
                found,
            });
        }
        let found: u64 = m
            .columns()
            .iter()
            .map(|c| {
                let v = c[i] as u64;
                v * v.saturating_sub(1) / 2
            })
            .sum();
        if found != cs.deltas[i] {
            out.push(Violation::Delta {
                row: i,
                expected: cs.deltas[i],
                found,
            });
        }
    }
    for i in 0..r {
        for k in i + 1..r {
            let found: u64 = m.columns().iter().map(|c| c[i] as u64 * c[k] as u64).sum();
            if found != cs.intersections[i][k] {
                out.push(Violation::Intersection {
                    rows: (i, k),
                    expected: cs.intersections[i][k],
                    found,
                });
            }
        }
    }
    out
}

pub fn check_matrix(m: &IncidenceMatrix, cs: &ConstraintSet) -> Result<(), IncidenceError> {
    let v = validate_matrix(m, cs);
    if v.is_empty() {
        Ok(())
    } else {
        Err(IncidenceError::ConstraintMismatch(v))
    }
}

/// All admissible nonzero columns, in non-increasing lexicographic order.
pub fn candidate_columns(cs: &ConstraintSet) -> Vec<Vec<u32>> {
    let r = cs.rows();
    let bounds: Vec<u32> = (0..r).map(|i| cs.entry_bound(i)).collect();
    let mut out = Vec::new();
    let mut cur = vec![0u32; r];
    loop {
        let fits_pairs = (0..r).all(|i| (i + 1..r).all(|k| (cur[i] * cur[k]) as u64 <= cs.intersections[i][k]));
        if cur.iter().any(|&v| v > 0) && fits_pairs {
            out.push(cur.clone());
        }
        // odometer, last row fastest
        let mut pos = r;
        loop {
            if pos == 0 {
                out.sort_unstable_by(|a, b| b.cmp(a));
                return out;
            }
            pos -= 1;
            if cur[pos] < bounds[pos] {
                cur[pos] += 1;
                break;
            }
            cur[pos] = 0;
        }
    }
}

struct Search<'a> {
    cands: &'a [Vec<u32>],
    // suffix_max[idx][i]: largest entry of row i among cands[idx..]
    suffix_max: Vec<Vec<u32>>,
    r: usize,
}

#[derive(Clone)]
struct Residual {
    lengths: Vec<i64>,
    deltas: Vec<i64>,
    pairs: Vec<i64>,
}

impl Residual {
    fn of(cs: &ConstraintSet) -> Self {
        let r = cs.rows();
        Self {
            lengths: cs.lengths.iter().map(|&v| v as i64).collect(),
            deltas: cs.deltas.iter().map(|&v| v as i64).collect(),
            pairs: (0..r)
                .flat_map(|i| (i + 1..r).map(move |k| (i, k)))
                .map(|(i, k)| cs.intersections[i][k] as i64)
                .collect(),
        }
    }

    fn is_zero(&self) -> bool {
        self.lengths.iter().all(|&v| v == 0)
            && self.deltas.iter().all(|&v| v == 0)
            && self.pairs.iter().all(|&v| v == 0)
    }

    /// Subtract column `c` if it fits.
    fn take(&mut self, c: &[u32]) -> bool {
        let r = c.len();
        for i in 0..r {
            let e = c[i] as i64;
            if e > self.lengths[i] || e * (e - 1) / 2 > self.deltas[i] {
                return false;
            }
        }
        let mut p = 0;
        for i in 0..r {
            for k in i + 1..r {
                if (c[i] * c[k]) as i64 > self.pairs[p] {
                    return false;
                }
                p += 1;
            }
        }
        self.apply(c, -1);
        true
    }

    fn apply(&mut self, c: &[u32], sign: i64) {
        let r = c.len();
        let mut p = 0;
        for i in 0..r {
            let e = c[i] as i64;
            self.lengths[i] += sign * e;
            self.deltas[i] += sign * e * (e - 1) / 2;
            for k in i + 1..r {
                self.pairs[p] += sign * (c[i] * c[k]) as i64;
                p += 1;
            }
        }
    }
}

impl<'a> Search<'a> {
    fn new(cands: &'a [Vec<u32>], r: usize) -> Self {
        let mut suffix_max = vec![vec![0u32; r]; cands.len() + 1];
        for idx in (0..cands.len()).rev() {
            for i in 0..r {
                suffix_max[idx][i] = suffix_max[idx + 1][i].max(cands[idx][i]);
            }
        }
        Self { cands, suffix_max, r }
    }

    /// Rows still needing mass (or δ) that no remaining candidate can serve.
    fn hopeless(&self, res: &Residual, idx: usize) -> bool {
        let sm = &self.suffix_max[idx];
        (0..self.r).any(|i| (res.lengths[i] > 0 && sm[i] == 0) || (res.deltas[i] > 0 && sm[i] < 2))
    }

    fn run(&self, res: &mut Residual, start: usize, chosen: &mut Vec<usize>, out: &mut Vec<IncidenceMatrix>) {
        if res.is_zero() {
            out.push(IncidenceMatrix {
                rows: self.r,
                cols: chosen.iter().map(|&j| self.cands[j].clone()).collect(),
            });
            return;
        }
        if self.hopeless(res, start) {
            return;
        }
        for idx in start..self.cands.len() {
            let c = &self.cands[idx];
            if res.take(c) {
                chosen.push(idx);
                self.run(res, idx, chosen, out);
                chosen.pop();
                res.apply(c, 1);
            }
        }
    }
}

/// Every canonical matrix satisfying the constraints, each
/// column-permutation class exactly once, sorted.
///
/// Orderly generation: columns are appended in non-increasing order, so each
/// multiset of columns is produced once and already canonical. Subtrees
/// rooted at the first column run in parallel on the ambient rayon pool.
pub fn enumerate_matrices(cs: &ConstraintSet) -> Vec<IncidenceMatrix> {
    let cands = candidate_columns(cs);
    let search = Search::new(&cands, cs.rows());
    let root = Residual::of(cs);
    if root.is_zero() {
        return vec![IncidenceMatrix {
            rows: cs.rows(),
            cols: Vec::new(),
        }];
    }
    let mut found: Vec<IncidenceMatrix> = (0..cands.len())
        .into_par_iter()
        .flat_map_iter(|first| {
            let mut res = root.clone();
            let mut out = Vec::new();
            if res.take(&cands[first]) {
                let mut chosen = vec![first];
                search.run(&mut res, first, &mut chosen, &mut out);
            }
            out
        })
        .collect();
    found.sort_unstable();
    found
}

/// Outcome of the translated-lines realizability test.
#[derive(Debug, Clone, PartialEq)]
pub enum Realizability {
    /// Offsets `b_i` such that the lines `y = a_i x + b_i` meet exactly in
    /// the multi-point columns of the matrix.
    Realizable { offsets: Vec<Rational> },
    /// Every sample produced extra concurrences. If the matrix were
    /// realizable, this would happen with probability at most
    /// `failure_bound`.
    NotRealizable { samples: usize, failure_bound: f64 },
}

impl Realizability {
    pub fn is_realizable(&self) -> bool {
        matches!(self, Self::Realizable { .. })
    }
}

/// Sampling range for the random combination coefficients: `[-R, R]`.
pub const SAMPLE_RADIUS: i64 = 1 << 20;

/// Decide whether translating the lines `y = a_i x` realizes `m`.
///
/// Concurrency of the lines of a column at an unknown point `(x, y)` is the
/// linear condition `a_i x − y + b_i = 0` for each line `i` of the column,
/// so the offsets realizing at least the prescribed concurrences form the
/// projection of an exactly computed nullspace. A random integer point of
/// that space is then checked for extra concurrences. Each extra concurrence
/// is the vanishing of a 3×3 determinant, linear in the random coefficients,
/// so a realizable matrix is misjudged in one sample with probability at
/// most `C(r,3) / (2R + 1)`; samples are independent.
pub fn realizable_by_translated_lines<R: Rng>(
    m: &IncidenceMatrix,
    cs: &ConstraintSet,
    slopes: &[Rational],
    samples: usize,
    rng: &mut R,
) -> Result<Realizability, IncidenceError> {
    check_multiline(cs, slopes)?;
    check_matrix(m, cs)?;
    if m.columns().iter().flatten().any(|&v| v > 1) {
        return Err(IncidenceError::PreconditionViolated("entries must be 0 or 1".into()));
    }
    let r = cs.rows();
    let supports: Vec<BTreeSet<usize>> = m.multi_point_supports().into_iter().collect();

    // unknowns: b_0..b_{r-1}, then (x_t, y_t) per multi-point column
    let width = r + 2 * supports.len();
    let mut system = Vec::new();
    for (t, s) in supports.iter().enumerate() {
        for &i in s {
            let mut row = vec![Rational::zero(); width];
            row[i] = Rational::one();
            row[r + 2 * t] = slopes[i].clone();
            row[r + 2 * t + 1] = -Rational::one();
            system.push(row);
        }
    }
    let basis = linalg::nullspace(&system, width);
    let target: BTreeSet<BTreeSet<usize>> = supports.into_iter().collect();

    for _ in 0..samples.max(1) {
        let coeffs: Vec<Rational> = basis
            .iter()
            .map(|_| Rational::from_integer(BigInt::from(rng.gen_range(-SAMPLE_RADIUS..=SAMPLE_RADIUS))))
            .collect();
        let offsets: Vec<Rational> = (0..r)
            .map(|i| {
                basis
                    .iter()
                    .zip(&coeffs)
                    .fold(Rational::zero(), |acc, (v, c)| acc + v[i].clone() * c.clone())
            })
            .collect();
        if concurrences(slopes, &offsets) == target {
            return Ok(Realizability::Realizable { offsets });
        }
    }
    let triples = (r * r.saturating_sub(1) * r.saturating_sub(2) / 6) as f64;
    let per_sample = (triples / (2 * SAMPLE_RADIUS + 1) as f64).min(1.0);
    Ok(Realizability::NotRealizable {
        samples: samples.max(1),
        failure_bound: per_sample.powi(samples.max(1) as i32),
    })
}

/// Sets of lines through each intersection point of `y = a_i x + b_i`,
/// for points where at least two lines meet.
pub fn concurrences(slopes: &[Rational], offsets: &[Rational]) -> BTreeSet<BTreeSet<usize>> {
    let r = slopes.len();
    let mut points: BTreeMap<(Rational, Rational), BTreeSet<usize>> = BTreeMap::new();
    for i in 0..r {
        for k in i + 1..r {
            let x = (offsets[k].clone() - offsets[i].clone()) / (slopes[i].clone() - slopes[k].clone());
            let y = slopes[i].clone() * x.clone() + offsets[i].clone();
            let set = points.entry((x, y)).or_default();
            set.insert(i);
            set.insert(k);
        }
    }
    points.into_values().collect()
}

fn check_multiline(cs: &ConstraintSet, slopes: &[Rational]) -> Result<(), IncidenceError> {
    if !cs.is_ordinary_multiline() {
        return Err(IncidenceError::PreconditionViolated(
            "germ is not an ordinary multi-line germ (needs delta = 0 and pairwise intersection 1)".into(),
        ));
    }
    if slopes.len() != cs.rows() {
        return Err(IncidenceError::PreconditionViolated(format!(
            "{} slopes for {} lines",
            slopes.len(),
            cs.rows()
        )));
    }
    let distinct: BTreeSet<&Rational> = slopes.iter().collect();
    if distinct.len() != slopes.len() {
        return Err(IncidenceError::PreconditionViolated("slopes must be distinct".into()));
    }
    Ok(())
}

/// The matrices of [`enumerate_matrices`] realizable by translating lines of
/// the given slopes. Matrix `k` of the enumeration is tested with its own
/// random stream derived from `seed`, so the result does not depend on the
/// number of worker threads.
pub fn enumerate_realizable(
    cs: &ConstraintSet,
    slopes: &[Rational],
    samples: usize,
    seed: u64,
) -> Result<Vec<IncidenceMatrix>, IncidenceError> {
    check_multiline(cs, slopes)?;
    let all = enumerate_matrices(cs);
    let verdicts: Vec<bool> = all
        .par_iter()
        .enumerate()
        .map(|(k, m)| {
            let mut rng = stream_rng(seed, k as u64);
            realizable_by_translated_lines(m, cs, slopes, samples, &mut rng).map(|v| v.is_realizable())
        })
        .collect::<Result<_, _>>()?;
    Ok(all.into_iter().zip(verdicts).filter(|(_, ok)| *ok).map(|(m, _)| m).collect())
}

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// `r` distinct random rational slopes `p/q` with `|p| ≤ 10⁴`, `1 ≤ q ≤ 10⁴`.
pub fn random_slopes<R: Rng>(r: usize, rng: &mut R) -> Vec<Rational> {
    let mut out: Vec<Rational> = Vec::with_capacity(r);
    while out.len() < r {
        let s = Rational::new(
            BigInt::from(rng.gen_range(-10_000i64..=10_000)),
            BigInt::from(rng.gen_range(1i64..=10_000)),
        );
        if !out.contains(&s) {
            out.push(s);
        }
    }
    out
}

/// The six lines through pairs of four points in general position, in the
/// order (01, 02, 03, 12, 13, 23), with their slopes, offsets and canonical
/// incidence matrix (four triple points, three double points and twelve
/// free points for decoration 5).
pub fn complete_quadrilateral(points: &[(Rational, Rational); 4]) -> (Vec<Rational>, Vec<Rational>, IncidenceMatrix) {
    let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    let mut slopes = Vec::new();
    let mut offsets = Vec::new();
    for &(a, b) in &pairs {
        let (xa, ya) = &points[a];
        let (xb, yb) = &points[b];
        let s = (yb.clone() - ya.clone()) / (xb.clone() - xa.clone());
        offsets.push(ya.clone() - s.clone() * xa.clone());
        slopes.push(s);
    }
    let mut cols: Vec<Vec<u32>> = Vec::new();
    for p in 0..4 {
        cols.push(pairs.iter().map(|&(a, b)| u32::from(a == p || b == p)).collect());
    }
    // opposite sides meet in the three diagonal points
    for (x, y) in [(0, 5), (1, 4), (2, 3)] {
        cols.push((0..6).map(|i| u32::from(i == x || i == y)).collect());
    }
    for i in 0..6 {
        // each line has two triple points and one double point: 5 − 3 free
        for _ in 0..2 {
            cols.push((0..6).map(|k| u32::from(k == i)).collect());
        }
    }
    (slopes, offsets, canonicalize(&IncidenceMatrix::from_columns(6, cols)))
}
