//! Exact rank over the rationals for sparse integer matrices.
//!
//! Rows are reduced fraction-free against pivot rows keyed by their leading
//! column; after every update the row is divided by the gcd of its entries,
//! which keeps coefficients small on boundary matrices.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Sparse integer row: `(column, value)` sorted by column, no zero values.
pub type SparseRow = Vec<(usize, BigInt)>;

/// Incremental exact row-echelon basis.
#[derive(Debug, Default)]
pub struct ExactEchelon {
    pivots: HashMap<usize, SparseRow>,
}

impl ExactEchelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Reduces `row` against the current basis and inserts the remainder.
    /// Returns `true` when the row was independent.
    pub fn insert(&mut self, row: SparseRow) -> bool {
        let mut row = normalize(row);
        while let Some((lead, _)) = row.first() {
            match self.pivots.get(lead) {
                Some(pivot) => row = normalize(eliminate(&row, pivot)),
                None => {
                    let lead = *lead;
                    self.pivots.insert(lead, row);
                    return true;
                }
            }
        }
        false
    }
}

/// `a·p0 − p·a0` where `a0`, `p0` are the leading coefficients; cancels the lead.
fn eliminate(row: &SparseRow, pivot: &SparseRow) -> SparseRow {
    let a0 = &row[0].1;
    let p0 = &pivot[0].1;
    let g = a0.gcd(p0);
    let fa = p0 / &g;
    let fp = a0 / &g;
    let mut out = Vec::with_capacity(row.len() + pivot.len());
    let (mut i, mut j) = (1, 1);
    while i < row.len() || j < pivot.len() {
        let ci = row.get(i).map(|e| e.0).unwrap_or(usize::MAX);
        let cj = pivot.get(j).map(|e| e.0).unwrap_or(usize::MAX);
        let (col, val) = if ci < cj {
            i += 1;
            (ci, &row[i - 1].1 * &fa)
        } else if cj < ci {
            j += 1;
            (cj, -(&pivot[j - 1].1 * &fp))
        } else {
            i += 1;
            j += 1;
            (ci, &row[i - 1].1 * &fa - &pivot[j - 1].1 * &fp)
        };
        if !val.is_zero() {
            out.push((col, val));
        }
    }
    out
}

fn normalize(mut row: SparseRow) -> SparseRow {
    row.retain(|(_, v)| !v.is_zero());
    if row.is_empty() {
        return row;
    }
    let mut g = BigInt::zero();
    for (_, v) in &row {
        g = g.gcd(v);
        if g.is_one() {
            break;
        }
    }
    if row[0].1.is_negative() {
        g = -g;
    }
    if !g.is_one() {
        for (_, v) in row.iter_mut() {
            *v = &*v / &g;
        }
    }
    row
}

/// Exact rank of a sparse integer matrix given as rows of `(column, value)`.
pub fn exact_rank(rows: impl IntoIterator<Item = Vec<(usize, i64)>>) -> usize {
    let mut ech = ExactEchelon::new();
    for r in rows {
        let mut row: SparseRow = r.into_iter().map(|(c, v)| (c, BigInt::from(v))).collect();
        row.sort_by_key(|e| e.0);
        ech.insert(row);
    }
    ech.rank()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dense_rank_f64(m: &[Vec<i64>]) -> usize {
        let mut a: Vec<Vec<f64>> = m.iter().map(|r| r.iter().map(|&v| v as f64).collect()).collect();
        let (rows, cols) = (a.len(), a.first().map_or(0, |r| r.len()));
        let mut rank = 0;
        for c in 0..cols {
            let Some(p) = (rank..rows).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())) else {
                break;
            };
            if a[p][c].abs() < 1e-9 {
                continue;
            }
            a.swap(rank, p);
            for i in 0..rows {
                if i != rank {
                    let f = a[i][c] / a[rank][c];
                    for k in 0..cols {
                        a[i][k] -= f * a[rank][k];
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    #[test]
    fn boundary_of_triangle() {
        // edges 01, 02, 12 as rows over vertices
        let rows = vec![vec![(0, -1), (1, 1)], vec![(0, -1), (2, 1)], vec![(1, -1), (2, 1)]];
        assert_eq!(exact_rank(rows), 2);
    }

    proptest! {
        #[test]
        fn matches_float_rank_on_small_matrices(
            m in proptest::collection::vec(proptest::collection::vec(-2i64..=2, 5), 1..6)
        ) {
            let rows = m.iter().map(|r| r.iter().enumerate().map(|(c, &v)| (c, v)).collect());
            prop_assert_eq!(exact_rank(rows), dense_rank_f64(&m));
        }
    }
}
