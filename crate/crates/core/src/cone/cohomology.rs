//! Cohomology and intersection homology of truncated cones and of their
//! products with balls.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Degree → dimension maps for the four theories. IH maps are keyed by the
/// homological degree.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohomologyTable {
    /// Dimension of the space the table describes.
    pub dimension: usize,
    pub l2: BTreeMap<usize, usize>,
    pub l2_c: BTreeMap<usize, usize>,
    pub ih: BTreeMap<usize, usize>,
    pub ih_c: BTreeMap<usize, usize>,
}

fn zeros(k: usize) -> BTreeMap<usize, usize> {
    (0..=k).map(|i| (i, 0)).collect()
}

fn get(m: &BTreeMap<usize, usize>, i: usize) -> usize {
    m.get(&i).copied().unwrap_or(0)
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        return Err(invalid("cone dimension k must be at least 1"));
    }
    Ok(())
}

/// Reduced `H₀` of a finite base whose `H₀` (number of points) is `points`.
fn reduced_h0(points: usize) -> Result<usize> {
    if points == 0 {
        return Err(invalid("a finite base needs at least one point"));
    }
    Ok(points - 1)
}

/// L² cohomology and its compactly supported version for the cone `CY`
/// of dimension `k`. For `k = 1` the base is finite and `base_dims[0]` is its
/// number of points (reduced homology is taken here). For `k > 1`,
/// `base_dims` are the L² cohomology dimensions of `Y`.
pub fn cone_l2_cohomology(base_dims: &BTreeMap<usize, usize>, k: usize) -> Result<CohomologyTable> {
    check_k(k)?;
    let mut t = CohomologyTable { dimension: k, l2: zeros(k), l2_c: zeros(k), ..Default::default() };
    if k == 1 {
        t.l2.insert(0, reduced_h0(get(base_dims, 0))?);
        t.l2_c.insert(1, 1);
        return Ok(t);
    }
    let half = k as f64 / 2.0;
    for i in 0..=k {
        if (i as f64) < half {
            t.l2.insert(i, get(base_dims, i));
        }
        if i >= 1 && (i as f64) >= half + 1.0 {
            t.l2_c.insert(i, get(base_dims, i - 1));
        }
    }
    Ok(t)
}

/// Intersection homology and its compactly supported version for the cone,
/// from the base's intersection homology (for `k = 1`, `base_ih[0]` is the
/// number of points). The base is compact, so its compactly supported IH is
/// its IH.
pub fn cone_ih(base_ih: &BTreeMap<usize, usize>, k: usize) -> Result<CohomologyTable> {
    check_k(k)?;
    let mut t = CohomologyTable { dimension: k, ih: zeros(k), ih_c: zeros(k), ..Default::default() };
    if k == 1 {
        t.ih.insert(1, reduced_h0(get(base_ih, 0))?);
        t.ih_c.insert(0, 1);
        return Ok(t);
    }
    let half = k as f64 / 2.0;
    for i in 0..=k {
        if (i as f64) < half {
            t.ih.insert(k - i, get(base_ih, k - 1 - i));
        }
        if (i as f64) >= half + 1.0 {
            t.ih_c.insert(k - i, get(base_ih, k - i));
        }
    }
    Ok(t)
}

/// Both tables for a cone, given base L² cohomology and base IH.
pub fn cone_tables(base_l2: &BTreeMap<usize, usize>, base_ih: &BTreeMap<usize, usize>, k: usize) -> Result<CohomologyTable> {
    let a = cone_l2_cohomology(base_l2, k)?;
    let b = cone_ih(base_ih, k)?;
    Ok(CohomologyTable { dimension: k, l2: a.l2, l2_c: a.l2_c, ih: b.ih, ih_c: b.ih_c })
}

/// Tables of `B^{ball_dim} × CY`: L² cohomology unchanged, compactly
/// supported L² cohomology shifted up by `ball_dim`, IH shifted up by
/// `ball_dim`, compactly supported IH carried over unshifted.
pub fn kunneth_product(cone: &CohomologyTable, ball_dim: usize) -> CohomologyTable {
    let n = cone.dimension + ball_dim;
    let shift = |m: &BTreeMap<usize, usize>| {
        let mut out = zeros(n);
        for (&i, &d) in m {
            out.insert(i + ball_dim, d);
        }
        out
    };
    let pad = |m: &BTreeMap<usize, usize>| {
        let mut out = if m.is_empty() { BTreeMap::new() } else { zeros(n) };
        out.extend(m.iter().map(|(&i, &d)| (i, d)));
        out
    };
    CohomologyTable {
        dimension: n,
        l2: pad(&cone.l2),
        l2_c: if cone.l2_c.is_empty() { BTreeMap::new() } else { shift(&cone.l2_c) },
        ih: if cone.ih.is_empty() { BTreeMap::new() } else { shift(&cone.ih) },
        ih_c: pad(&cone.ih_c),
    }
}

/// Builds a degree map from a slice of dimensions starting at degree 0.
pub fn dims(values: &[usize]) -> BTreeMap<usize, usize> {
    values.iter().copied().enumerate().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finite_base() {
        let t = cone_l2_cohomology(&dims(&[3]), 1).unwrap();
        assert_eq!((t.l2[&0], t.l2[&1], t.l2_c[&0], t.l2_c[&1]), (2, 0, 0, 1));
        let t = cone_ih(&dims(&[2]), 1).unwrap();
        assert_eq!((t.ih[&1], t.ih[&0], t.ih_c[&1], t.ih_c[&0]), (1, 0, 0, 1));
    }

    #[test]
    fn circle_base() {
        let t = cone_l2_cohomology(&dims(&[1, 1]), 2).unwrap();
        assert_eq!((t.l2[&0], t.l2[&1], t.l2[&2]), (1, 0, 0));
        assert_eq!((t.l2_c[&0], t.l2_c[&1], t.l2_c[&2]), (0, 0, 1));
    }

    #[test]
    fn torus_base() {
        let t = cone_ih(&dims(&[1, 2, 1]), 3).unwrap();
        assert_eq!(t.ih[&2], 2);
        assert_eq!(t.ih[&1], 0);
        assert_eq!(t.ih[&3], 1);
    }

    #[test]
    fn kunneth_shifts() {
        let c = cone_tables(&dims(&[1, 1]), &dims(&[1, 1]), 2).unwrap();
        assert_eq!(kunneth_product(&c, 0), c);
        let p = kunneth_product(&c, 1);
        assert_eq!(p.l2_c[&3], 1);
        let t = cone_ih(&dims(&[1, 2, 1]), 3).unwrap();
        assert_eq!(kunneth_product(&t, 1).ih[&3], 2);
    }
}
