//! Linear-algebra plumbing shared by the spectral and homological modules.
//!
//! Floating-point work goes through `faer` (sparse storage, Cholesky,
//! dense symmetric eigensolvers and SVD). Integer ranks used for
//! intersection homology are computed exactly in [`exact`].

pub mod exact;
pub mod pencil;
pub mod quadrature;

use faer::sparse::{SparseColMat, Triplet};
use faer::{Col, Mat, MatRef};

use crate::error::{Error, Result};

pub use pencil::{solve_pencil, solve_pencil_with, Eigenpairs, PencilMethod, PencilOptions};

/// Compressed sparse column matrix with `usize` indices.
pub type Csc = SparseColMat<usize, f64>;

/// Relative singular-value cutoff used for numerical ranks.
pub const RANK_CUTOFF: f64 = 1e-8;
/// Minimum ratio across the cutoff for a numerical rank to be accepted.
pub const RANK_GAP_RATIO: f64 = 1e3;

/// Builds a sparse matrix from `(row, col, value)` triplets; duplicates are summed.
pub fn csc_from_triplets(nrows: usize, ncols: usize, entries: &[(usize, usize, f64)]) -> Csc {
    let triplets: Vec<Triplet<usize, usize, f64>> = entries
        .iter()
        .map(|&(r, c, v)| Triplet::new(r, c, v))
        .collect();
    SparseColMat::try_new_from_triplets(nrows, ncols, &triplets)
        .expect("triplet indices are within bounds")
}

pub fn csc_zeros(nrows: usize, ncols: usize) -> Csc {
    csc_from_triplets(nrows, ncols, &[])
}

pub fn csc_identity(n: usize) -> Csc {
    let entries: Vec<_> = (0..n).map(|i| (i, i, 1.0)).collect();
    csc_from_triplets(n, n, &entries)
}

/// All stored entries of `m` as triplets.
pub fn csc_triplets(m: &Csc) -> Vec<(usize, usize, f64)> {
    m.triplet_iter().map(|t| (t.row, t.col, *t.val)).collect()
}

pub fn csc_transpose(m: &Csc) -> Csc {
    let entries: Vec<_> = csc_triplets(m).into_iter().map(|(r, c, v)| (c, r, v)).collect();
    csc_from_triplets(m.ncols(), m.nrows(), &entries)
}

/// Extracts the submatrix `m[rows, cols]` (index lists, in the given order).
pub fn csc_select(m: &Csc, rows: &[usize], cols: &[usize]) -> Csc {
    let mut row_map = vec![usize::MAX; m.nrows()];
    for (i, &r) in rows.iter().enumerate() {
        row_map[r] = i;
    }
    let mut col_map = vec![usize::MAX; m.ncols()];
    for (j, &c) in cols.iter().enumerate() {
        col_map[c] = j;
    }
    let entries: Vec<_> = csc_triplets(m)
        .into_iter()
        .filter_map(|(r, c, v)| {
            let (i, j) = (row_map[r], col_map[c]);
            (i != usize::MAX && j != usize::MAX).then_some((i, j, v))
        })
        .collect();
    csc_from_triplets(rows.len(), cols.len(), &entries)
}

/// `lhsᵀ · mid · lhs` for sparse operands.
pub fn csc_congruence(lhs: &Csc, mid: &Csc) -> Csc {
    let lt = csc_transpose(lhs);
    let tmp = mid * lhs;
    &lt * &tmp
}

pub fn csc_to_dense(m: &Csc) -> Mat<f64> {
    m.to_dense()
}

/// Infinity norm (maximum absolute row sum).
pub fn csc_inf_norm(m: &Csc) -> f64 {
    let mut sums = vec![0.0f64; m.nrows()];
    for t in m.triplet_iter() {
        sums[t.row] += t.val.abs();
    }
    sums.into_iter().fold(0.0, f64::max)
}

pub fn csc_matvec(m: &Csc, x: &Col<f64>) -> Col<f64> {
    m * x
}

/// Quadratic form `xᵀ m y`.
pub fn csc_inner(m: &Csc, x: &Col<f64>, y: &Col<f64>) -> f64 {
    let my = m * y;
    dot(x, &my)
}

pub fn dot(x: &Col<f64>, y: &Col<f64>) -> f64 {
    (0..x.nrows()).map(|i| x[i] * y[i]).sum()
}

pub fn col_from_slice(v: &[f64]) -> Col<f64> {
    Col::from_fn(v.len(), |i| v[i])
}

pub fn col_to_vec(v: &Col<f64>) -> Vec<f64> {
    (0..v.nrows()).map(|i| v[i]).collect()
}

/// Numerical rank with the relative cutoff [`RANK_CUTOFF`]; refuses when the
/// singular values straddling the cutoff are separated by less than
/// [`RANK_GAP_RATIO`].
pub fn numerical_rank(m: MatRef<'_, f64>) -> Result<usize> {
    numerical_rank_with(m, RANK_CUTOFF, RANK_GAP_RATIO)
}

pub fn numerical_rank_with(m: MatRef<'_, f64>, rel_cutoff: f64, gap_ratio: f64) -> Result<usize> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok(0);
    }
    let sv = m
        .singular_values()
        .map_err(|_| Error::NoConvergence { iterations: 0, residual: f64::NAN })?;
    let smax = sv.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return Ok(0);
    }
    let cutoff = rel_cutoff * smax;
    let rank = sv.iter().filter(|&&s| s > cutoff).count();
    if rank < sv.len() {
        let above = sv[rank - 1];
        let below = sv[rank];
        if below > 0.0 && above / below < gap_ratio {
            return Err(Error::AmbiguousRank { cutoff, below, above });
        }
    }
    Ok(rank)
}

/// Sorts values ascending and groups those agreeing within `rel_tol` (relative
/// to `max(|λ|, scale)`) into clusters `(mean value, multiplicity)`.
pub fn cluster_values(values: &[f64], rel_tol: f64, scale: f64) -> Vec<(f64, usize)> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut out: Vec<(f64, usize, f64)> = Vec::new();
    for v in sorted {
        match out.last_mut() {
            Some((sum, count, last)) if (v - *last).abs() <= rel_tol * v.abs().max(scale) => {
                *sum += v;
                *count += 1;
                *last = v;
            }
            _ => out.push((v, 1, v)),
        }
    }
    out.into_iter().map(|(s, c, _)| (s / c as f64, c)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn select_and_transpose() {
        let m = csc_from_triplets(3, 2, &[(0, 0, 1.0), (2, 1, 2.0), (1, 0, 3.0)]);
        let s = csc_select(&m, &[2, 1], &[1, 0]);
        let d = s.to_dense();
        assert_eq!(d[(0, 0)], 2.0);
        assert_eq!(d[(1, 1)], 3.0);
        let t = csc_transpose(&m).to_dense();
        assert_eq!(t[(1, 2)], 2.0);
    }

    #[test]
    fn rank_of_rank_one_matrix() {
        let m = Mat::from_fn(4, 3, |i, j| (i + 1) as f64 * (j + 2) as f64);
        assert_eq!(numerical_rank(m.as_ref()).unwrap(), 1);
    }

    #[test]
    fn rank_refuses_without_gap() {
        let m = Mat::from_fn(3, 3, |i, j| if i == j { [1.0, 2e-8, 5e-9][i] } else { 0.0 });
        assert!(matches!(numerical_rank(m.as_ref()), Err(Error::AmbiguousRank { .. })));
    }

    #[test]
    fn clustering_merges_close_values() {
        let c = cluster_values(&[1.0, 2.0, 1.0 + 1e-12, 0.0], 1e-9, 1.0);
        assert_eq!(c.len(), 3);
        assert_eq!(c[1].1, 2);
    }
}
