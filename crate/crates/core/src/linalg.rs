//! Exact dense linear algebra.
//!
//! Field routines (`rank`, `nullspace`) use Gauss–Jordan elimination over an
//! [`ExactField`]. Integer routines use fraction-free Bareiss elimination for
//! leading principal minors and unimodular column operations for integer
//! kernels, followed by a row Hermite normal form so kernel bases are unique.

use crate::scalar::{ExactField, Integral};

/// Reduced row echelon form in place. Returns the pivot columns.
pub fn rref<F: ExactField>(m: &mut [Vec<F>]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_exactly_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = F::one() / m[r][c].clone();
        for v in m[r].iter_mut() {
            *v = v.clone() * inv.clone();
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_exactly_zero() {
                let f = m[i][c].clone();
                for j in c..cols {
                    let t = m[r][j].clone() * f.clone();
                    m[i][j] = m[i][j].clone() - t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank<F: ExactField>(m: &[Vec<F>]) -> usize {
    let mut work = m.to_vec();
    rref(&mut work).len()
}

/// Basis of `{x : m·x = 0}` for an `rows × cols` matrix, one vector per free
/// column, each with a 1 in its free position.
pub fn nullspace<F: ExactField>(m: &[Vec<F>], cols: usize) -> Vec<Vec<F>> {
    let mut work = m.to_vec();
    let pivots = rref(&mut work);
    let mut is_pivot = vec![false; cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    (0..cols)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = vec![F::zero(); cols];
            v[free] = F::one();
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -work[row][free].clone();
            }
            v
        })
        .collect()
}

/// Leading principal minors `d_1, d_2, …` by Bareiss elimination without
/// pivoting. Stops after the first vanishing minor, since later minors are
/// not reachable without row exchanges.
pub fn leading_minors<T: Integral>(m: &[Vec<T>]) -> Vec<T> {
    let n = m.len();
    let mut a = m.to_vec();
    let mut minors = Vec::with_capacity(n);
    let mut prev = T::one();
    for k in 0..n {
        let pivot = a[k][k].clone();
        minors.push(pivot.clone());
        if pivot.is_zero() {
            break;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = pivot.clone() * a[i][j].clone() - a[i][k].clone() * a[k][j].clone();
                a[i][j] = num / prev.clone();
            }
        }
        prev = pivot;
    }
    minors
}

/// Determinant by Bareiss elimination with row exchanges.
pub fn determinant<T: Integral>(m: &[Vec<T>]) -> T {
    let n = m.len();
    if n == 0 {
        return T::one();
    }
    let mut a = m.to_vec();
    let mut sign = T::one();
    let mut prev = T::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return T::zero();
        };
        if p != k {
            a.swap(p, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = a[k][k].clone() * a[i][j].clone() - a[i][k].clone() * a[k][j].clone();
                a[i][j] = num / prev.clone();
            }
        }
        prev = a[k][k].clone();
    }
    sign * a[n - 1][n - 1].clone()
}

/// Sylvester's criterion for negative definiteness: the k-th leading
/// principal minor has sign `(-1)^k`.
pub fn is_negative_definite<T: Integral>(m: &[Vec<T>]) -> bool {
    let minors = leading_minors(m);
    minors.len() == m.len()
        && minors.iter().enumerate().all(|(k, d)| {
            if k % 2 == 0 {
                d.is_negative()
            } else {
                d.is_positive()
            }
        })
}

/// Basis of the integer kernel `{v ∈ ℤⁿ : m·v = 0}` of an `r × n` matrix.
///
/// Column operations with unimodular 2×2 blocks bring `m` to lower echelon
/// form while the same operations are recorded in `U`; the columns of `U`
/// past the echelon part span the kernel lattice. The result is put in row
/// Hermite normal form, so the basis only depends on the lattice.
pub fn integer_kernel<T: Integral>(m: &[Vec<T>], cols: usize) -> Vec<Vec<T>> {
    let rows = m.len();
    let mut a = m.to_vec();
    let mut u: Vec<Vec<T>> = (0..cols)
        .map(|i| {
            (0..cols)
                .map(|j| if i == j { T::one() } else { T::zero() })
                .collect()
        })
        .collect();

    let mut c = 0;
    for i in 0..rows {
        if c == cols {
            break;
        }
        let Some(j0) = (c..cols).find(|&j| !a[i][j].is_zero()) else {
            continue;
        };
        swap_columns(&mut a, c, j0);
        swap_columns(&mut u, c, j0);
        for j in c + 1..cols {
            if a[i][j].is_zero() {
                continue;
            }
            let x = a[i][c].clone();
            let y = a[i][j].clone();
            let eg = x.extended_gcd(&y);
            let (g, s, t) = (eg.gcd, eg.x, eg.y);
            let xg = x / g.clone();
            let yg = y / g;
            // [col_c, col_j] <- [s·col_c + t·col_j, xg·col_j − yg·col_c]
            combine_columns(&mut a, c, j, &s, &t, &xg, &yg);
            combine_columns(&mut u, c, j, &s, &t, &xg, &yg);
        }
        c += 1;
    }

    let basis: Vec<Vec<T>> = (c..cols)
        .map(|j| (0..cols).map(|i| u[i][j].clone()).collect())
        .collect();
    hermite_rows(basis)
}

fn swap_columns<T: Clone>(m: &mut [Vec<T>], a: usize, b: usize) {
    if a != b {
        for row in m.iter_mut() {
            row.swap(a, b);
        }
    }
}

fn combine_columns<T: Integral>(m: &mut [Vec<T>], c: usize, j: usize, s: &T, t: &T, xg: &T, yg: &T) {
    for row in m.iter_mut() {
        let vc = row[c].clone();
        let vj = row[j].clone();
        row[c] = s.clone() * vc.clone() + t.clone() * vj.clone();
        row[j] = xg.clone() * vj - yg.clone() * vc;
    }
}

/// Row Hermite normal form of a set of integer row vectors. Zero rows are
/// dropped; pivots are positive and entries above each pivot lie in
/// `[0, pivot)`.
pub fn hermite_rows<T: Integral>(mut rows: Vec<Vec<T>>) -> Vec<Vec<T>> {
    let cols = rows.first().map_or(0, Vec::len);
    let mut p = 0;
    for c in 0..cols {
        if p == rows.len() {
            break;
        }
        // Euclid on the column entries of rows p.. until one nonzero remains.
        loop {
            let Some(min) = (p..rows.len())
                .filter(|&i| !rows[i][c].is_zero())
                .min_by(|&x, &y| rows[x][c].abs().cmp(&rows[y][c].abs()))
            else {
                break;
            };
            rows.swap(p, min);
            let mut settled = true;
            for i in p + 1..rows.len() {
                if rows[i][c].is_zero() {
                    continue;
                }
                let q = rows[i][c].div_floor(&rows[p][c]);
                for k in c..cols {
                    let t = q.clone() * rows[p][k].clone();
                    rows[i][k] = rows[i][k].clone() - t;
                }
                settled &= rows[i][c].is_zero();
            }
            if settled {
                break;
            }
        }
        if rows[p][c].is_zero() {
            continue;
        }
        if rows[p][c].is_negative() {
            for v in rows[p].iter_mut() {
                *v = -v.clone();
            }
        }
        for i in 0..p {
            let q = rows[i][c].div_floor(&rows[p][c]);
            if !q.is_zero() {
                for k in c..cols {
                    let t = q.clone() * rows[p][k].clone();
                    rows[i][k] = rows[i][k].clone() - t;
                }
            }
        }
        p += 1;
    }
    rows.truncate(p);
    rows.retain(|r| r.iter().any(|v| !v.is_zero()));
    rows
}

/// `a · b` for integer matrices given as rows.
pub fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).map(|k| row[k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

pub fn transpose<T: Clone>(m: &[Vec<T>], cols: usize) -> Vec<Vec<T>> {
    (0..cols)
        .map(|j| m.iter().map(|row| row[j].clone()).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Int, Rational64};

    fn q(n: i64) -> Rational64 {
        Rational64::from_integer(n)
    }

    #[test]
    fn rank_and_nullspace_over_rationals() {
        let m = vec![vec![q(1), q(2), q(3)], vec![q(2), q(4), q(6)]];
        assert_eq!(rank(&m), 1);
        let ns = nullspace(&m, 3);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            let dot: Rational64 = m[0].iter().zip(v).map(|(a, b)| *a * *b).sum();
            assert!(num_traits::Zero::is_zero(&dot));
        }
    }

    #[test]
    fn chain_minors_alternate() {
        // chain (-3,-2,-3)
        let m: Vec<Vec<i64>> = vec![vec![-3, 1, 0], vec![1, -2, 1], vec![0, 1, -3]];
        assert_eq!(leading_minors(&m), vec![-3, 5, -12]);
        assert!(is_negative_definite(&m));
        assert_eq!(determinant(&m), -12);
        assert!(!is_negative_definite(&[vec![0i64]]));
    }

    #[test]
    fn determinant_matches_cofactor_expansion() {
        let m: Vec<Vec<i64>> = vec![vec![0, 2, 1], vec![3, -1, 4], vec![5, 2, 0]];
        // 0·(0−8) − 2·(0−20) + 1·(6+5)
        assert_eq!(determinant(&m), 51);
        let big: Vec<Vec<Int>> = crate::scalar::lift_matrix(&m);
        assert_eq!(determinant(&big), Int::from(51));
    }

    #[test]
    fn kernel_of_single_row() {
        let k = integer_kernel(&[vec![1i64, 1]], 2);
        assert_eq!(k, vec![vec![1, -1]]);
    }

    #[test]
    fn kernel_is_saturated() {
        // 2x + 4y = 0 has kernel generated by (2, -1), not (4, -2).
        let k = integer_kernel(&[vec![2i64, 4]], 2);
        assert_eq!(k, vec![vec![2, -1]]);
    }

    #[test]
    fn hermite_is_basis_independent() {
        let a = hermite_rows(vec![vec![1i64, 2, 3], vec![0, 1, 1]]);
        let b = hermite_rows(vec![vec![1i64, 3, 4], vec![2, 5, 7]]);
        assert_eq!(a, b);
    }
}
