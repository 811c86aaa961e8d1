//! Exact simplicial homology of small complexes given by generators.

use std::collections::{BTreeSet, HashMap};

use crate::linalg::exact::exact_rank;
use crate::mesh::complex::closure;

/// Boundary columns `∂s` of the `d`-simplices in `level`, against an index of
/// the `(d−1)`-simplices. Faces missing from the index are dropped.
pub(crate) fn boundary_columns<'a>(
    level: impl IntoIterator<Item = &'a Vec<usize>>,
    faces: &HashMap<&Vec<usize>, usize>,
) -> Vec<Vec<(usize, i64)>> {
    level
        .into_iter()
        .map(|s| {
            (0..s.len())
                .filter_map(|k| {
                    let mut f = s.clone();
                    f.remove(k);
                    let sign = if k % 2 == 0 { 1 } else { -1 };
                    faces.get(&f).map(|&row| (row, sign))
                })
                .collect()
        })
        .collect()
}

fn index(level: &BTreeSet<Vec<usize>>) -> HashMap<&Vec<usize>, usize> {
    level.iter().enumerate().map(|(i, s)| (s, i)).collect()
}

/// Reduced Betti numbers over ℚ of the closure of `gens`; entry `d + 1`
/// holds `b̃_d`, so the empty complex gives `[1]` (the sphere `S^{−1}`).
pub fn reduced_betti(gens: &[Vec<usize>]) -> Vec<usize> {
    trim(reduced_full(gens))
}

fn reduced_full(gens: &[Vec<usize>]) -> Vec<usize> {
    let cl = closure(gens);
    let counts: Vec<usize> = cl.iter().map(BTreeSet::len).collect();
    // rank[d] = rank ∂_d : C_d → C_{d−1}, with ∂_0 the augmentation.
    let mut rank = vec![0usize; counts.len() + 1];
    if counts.first().is_some_and(|&c| c > 0) {
        rank[0] = 1;
    }
    for d in 1..cl.len() {
        let faces = index(&cl[d - 1]);
        rank[d] = exact_rank(boundary_columns(&cl[d], &faces));
    }
    let mut out = vec![1 - rank[0]];
    for d in 0..counts.len() {
        out.push(counts[d] - rank[d] - rank[d + 1]);
    }
    out
}

/// Unreduced Betti numbers `b_0, …, b_dim` of the closure of `gens`.
pub fn simplicial_betti(gens: &[Vec<usize>]) -> Vec<usize> {
    let mut b = reduced_full(gens);
    if b.len() < 2 {
        return Vec::new();
    }
    b.remove(0);
    b[0] += 1;
    trim(b)
}

pub(crate) fn trim(mut v: Vec<usize>) -> Vec<usize> {
    while v.len() > 1 && v.last() == Some(&0) {
        v.pop();
    }
    v
}

/// `true` when `reduced` (as returned by [`reduced_betti`]) is that of `S^m`,
/// `m ≥ −1`.
pub fn is_homology_sphere(reduced: &[usize], m: isize) -> bool {
    let pos = (m + 1) as usize;
    reduced.iter().enumerate().all(|(i, &b)| if i == pos { b == 1 } else { b == 0 }) && reduced.len() > pos
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spheres_and_points() {
        assert_eq!(reduced_betti(&[]), vec![1]);
        assert!(is_homology_sphere(&reduced_betti(&[]), -1));
        let two_points = reduced_betti(&[vec![0], vec![1]]);
        assert!(is_homology_sphere(&two_points, 0));
        let point = reduced_betti(&[vec![0]]);
        assert_eq!(point, vec![0]);
        assert!(!is_homology_sphere(&point, 0));
        let circle = reduced_betti(&[vec![0, 1], vec![1, 2], vec![0, 2]]);
        assert!(is_homology_sphere(&circle, 1));
        let tetra_boundary: Vec<Vec<usize>> = vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]];
        assert!(is_homology_sphere(&reduced_betti(&tetra_boundary), 2));
    }

    #[test]
    fn unreduced_counts() {
        let wedge = [vec![0, 1], vec![1, 2], vec![0, 2], vec![0, 3], vec![3, 4], vec![0, 4]];
        assert_eq!(simplicial_betti(&wedge), vec![1, 2]);
        assert_eq!(simplicial_betti(&[vec![0], vec![1], vec![2, 3]]), vec![3]);
        assert_eq!(simplicial_betti(&[vec![0]]), vec![1]);
    }
}
