//! Dense real linear algebra for incidence matrices.

use nalgebra::{DMatrix, DVector};

/// Pivots below this (relative to the largest entry) count as zero.
pub const PIVOT_TOLERANCE: f64 = 1e-10;

pub(crate) fn matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let inner = b.len();
    let cols = b[0].len();
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).map(|k| row[k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

/// Reduced row echelon form in place; returns pivot columns.
fn rref(m: &mut [Vec<f64>]) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = m[0].len();
    let scale = m
        .iter()
        .flatten()
        .fold(0.0f64, |a, v| a.max(v.abs()))
        .max(1.0);
    let tol = PIVOT_TOLERANCE * scale;
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let p = (r..rows)
            .max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs()))
            .unwrap();
        if m[p][c].abs() <= tol {
            continue;
        }
        m.swap(r, p);
        let piv = m[r][c];
        for v in m[r].iter_mut() {
            *v /= piv;
        }
        for i in 0..rows {
            if i != r {
                let f = m[i][c];
                if f != 0.0 {
                    for j in 0..cols {
                        m[i][j] -= f * m[r][j];
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Rank of a matrix given by rows, with partial pivoting.
pub fn rank(m: &[Vec<f64>]) -> usize {
    let mut a = m.to_vec();
    rref(&mut a).len()
}

pub(crate) fn rank_rows(rows: &[Vec<f64>]) -> usize {
    rank(rows)
}

/// Basis of `{x : m x = 0}` for an `r × cols` matrix.
pub(crate) fn null_space(m: &[Vec<f64>], cols: usize) -> Vec<Vec<f64>> {
    if m.is_empty() {
        return (0..cols)
            .map(|i| (0..cols).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
    }
    let mut a = m.to_vec();
    let pivots = rref(&mut a);
    (0..cols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut x = vec![0.0; cols];
            x[free] = 1.0;
            for (r, &p) in pivots.iter().enumerate() {
                x[p] = -a[r][free];
            }
            x
        })
        .collect()
}

/// Independent columns spanning the column space.
pub(crate) fn column_space(m: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut a = m.to_vec();
    let pivots = rref(&mut a);
    pivots
        .iter()
        .map(|&c| m.iter().map(|row| row[c]).collect())
        .collect()
}

/// `min_x |m x − b|` via SVD.
pub(crate) fn least_squares_residual(m: &[Vec<f64>], b: &[f64]) -> f64 {
    let rows = m.len();
    let cols = m[0].len();
    let a = DMatrix::from_fn(rows, cols, |i, j| m[i][j]);
    let rhs = DVector::from_column_slice(b);
    let svd = a.clone().svd(true, true);
    match svd.solve(&rhs, PIVOT_TOLERANCE) {
        Ok(x) => (a * x - rhs).norm(),
        Err(_) => f64::INFINITY,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_of_dependent_rows() {
        let m = vec![vec![1.0, 2.0], vec![2.0, 4.0], vec![0.0, 1.0]];
        assert_eq!(rank(&m), 2);
    }

    #[test]
    fn null_space_is_annihilated() {
        let m = vec![vec![1.0, -1.0, 0.0], vec![0.0, 1.0, -1.0]];
        let n = null_space(&m, 3);
        assert_eq!(n.len(), 1);
        for row in &m {
            let dot: f64 = row.iter().zip(&n[0]).map(|(a, b)| a * b).sum();
            assert!(dot.abs() < 1e-14);
        }
    }

    #[test]
    fn least_squares_detects_inconsistency() {
        let m = vec![vec![1.0], vec![1.0]];
        assert!(least_squares_residual(&m, &[1.0, 1.0]) < 1e-12);
        assert!(least_squares_residual(&m, &[1.0, -1.0]) > 1.0);
    }
}
