//! Cochain systems: coboundary and Whitney mass matrices per degree, with an
//! optional set of eliminated (relative) unknowns.

use std::collections::HashSet;

use super::complex::{closure, StratifiedComplex};
use super::whitney::{element_mass, local_faces};
use crate::error::{invalid, Error, Result};
use crate::linalg::{csc_congruence, csc_from_triplets, csc_select, Csc};

#[derive(Debug, Clone)]
pub struct CochainSystem {
    pub dim: usize,
    /// Simplices of the underlying complex, by dimension.
    pub simplices: Vec<Vec<Vec<usize>>>,
    /// Full coboundaries `d_p : C^p → C^{p+1}` with entries `±1`.
    pub coboundary: Vec<Csc>,
    /// Full Whitney mass matrices `M_p`.
    pub mass: Vec<Csc>,
    /// Unknowns kept per degree (all of them unless relative conditions apply).
    pub free: Vec<Vec<usize>>,
}

/// Integer coboundary entries `(row, col, ±1)` of `d_p`.
pub fn coboundary_entries(k: &StratifiedComplex, p: usize) -> Vec<(usize, usize, i64)> {
    let idx = k.index();
    let mut out = Vec::new();
    if let Some(level) = k.simplices.get(p + 1) {
        for (row, s) in level.iter().enumerate() {
            for a in 0..s.len() {
                let mut f = s.clone();
                f.remove(a);
                let col = idx.get(&f).expect("complex is closed under faces");
                out.push((row, col, if a % 2 == 0 { 1 } else { -1 }));
            }
        }
    }
    out
}

/// Assembles coboundaries and Whitney mass matrices for every degree.
pub fn build_complex(k: &StratifiedComplex) -> Result<CochainSystem> {
    k.validate()?;
    if !k.is_pure() {
        return Err(invalid("Whitney assembly needs a pure complex (every maximal simplex of top dimension)"));
    }
    let n = k.dim();
    let idx = k.index();
    let coboundary = (0..n)
        .map(|p| {
            let e: Vec<_> = coboundary_entries(k, p).into_iter().map(|(r, c, v)| (r, c, v as f64)).collect();
            csc_from_triplets(k.count(p + 1), k.count(p), &e)
        })
        .collect();
    let grams = k.grams(n);
    let mut mass_entries: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); n + 1];
    for (t, top) in k.simplices[n].iter().enumerate() {
        let gram = &grams[t];
        for (p, entries) in mass_entries.iter_mut().enumerate() {
            let local = element_mass(gram, p);
            let global: Vec<usize> = local_faces(n, p)
                .iter()
                .map(|f| {
                    let s: Vec<usize> = f.iter().map(|&i| top[i]).collect();
                    idx.get(&s).expect("face of a top simplex")
                })
                .collect();
            for (a, &ga) in global.iter().enumerate() {
                for (b, &gb) in global.iter().enumerate() {
                    entries.push((ga, gb, local[a][b]));
                }
            }
        }
    }
    let mass = mass_entries.iter().enumerate().map(|(p, e)| csc_from_triplets(k.count(p), k.count(p), e)).collect();
    Ok(CochainSystem {
        dim: n,
        simplices: k.simplices.clone(),
        coboundary,
        mass,
        free: (0..=n).map(|p| (0..k.count(p)).collect()).collect(),
    })
}

/// Eliminates every cochain unknown on the closure of `boundary`, which
/// imposes vanishing boundary traces in every degree.
pub fn apply_relative_bc(c: &CochainSystem, boundary: &[Vec<usize>]) -> Result<CochainSystem> {
    let cl = closure(boundary);
    let mut out = c.clone();
    for (d, level) in cl.iter().enumerate() {
        let present: HashSet<&Vec<usize>> = c.simplices.get(d).map(|l| l.iter().collect()).unwrap_or_default();
        if let Some(s) = level.iter().find(|s| !present.contains(s)) {
            return Err(Error::NotSubcomplex { simplex: s.clone() });
        }
        if d > c.dim {
            continue;
        }
        let pos: HashSet<usize> = c.simplices[d]
            .iter()
            .enumerate()
            .filter(|(_, s)| level.contains(*s))
            .map(|(i, _)| i)
            .collect();
        out.free[d].retain(|i| !pos.contains(i));
    }
    Ok(out)
}

impl CochainSystem {
    /// Number of unknowns in degree `p`.
    pub fn size(&self, p: usize) -> usize {
        self.free.get(p).map_or(0, Vec::len)
    }

    pub fn is_relative(&self) -> bool {
        self.free.iter().enumerate().any(|(p, f)| f.len() != self.simplices[p].len())
    }

    /// Constrained coboundary `d_p` (zero rows for `p = dim`).
    pub fn d(&self, p: usize) -> Csc {
        if p >= self.dim {
            return csc_from_triplets(0, self.size(p), &[]);
        }
        csc_select(&self.coboundary[p], &self.free[p + 1], &self.free[p])
    }

    /// Constrained mass matrix `M_p`.
    pub fn m(&self, p: usize) -> Csc {
        csc_select(&self.mass[p], &self.free[p], &self.free[p])
    }

    /// Stiffness `d_pᵀ M_{p+1} d_p` on the constrained space.
    pub fn stiffness(&self, p: usize) -> Csc {
        if p >= self.dim {
            return csc_from_triplets(self.size(p), self.size(p), &[]);
        }
        csc_congruence(&self.d(p), &self.m(p + 1))
    }

    /// Constrained coboundary as integer triplets.
    pub fn d_entries(&self, p: usize) -> Vec<(usize, usize, i64)> {
        if p >= self.dim {
            return Vec::new();
        }
        let mut rows = vec![usize::MAX; self.simplices[p + 1].len()];
        for (i, &r) in self.free[p + 1].iter().enumerate() {
            rows[r] = i;
        }
        let mut cols = vec![usize::MAX; self.simplices[p].len()];
        for (j, &c) in self.free[p].iter().enumerate() {
            cols[c] = j;
        }
        self.coboundary[p]
            .triplet_iter()
            .filter_map(|t| {
                let (i, j) = (rows[t.row], cols[t.col]);
                (i != usize::MAX && j != usize::MAX).then_some((i, j, t.val.round() as i64))
            })
            .collect()
    }

    /// Simplices carrying the free unknowns of degree `p`.
    pub fn free_simplices(&self, p: usize) -> Vec<&Vec<usize>> {
        self.free[p].iter().map(|&i| &self.simplices[p][i]).collect()
    }
}

impl StratifiedComplex {
    /// Cochain system of this complex; with `relative` the stored boundary
    /// subcomplex is eliminated.
    pub fn cochains(&self, relative: bool) -> Result<CochainSystem> {
        let c = build_complex(self)?;
        if relative {
            apply_relative_bc(&c, &self.boundary)
        } else {
            Ok(c)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::generators::{disk, flat_torus, interval, sphere};

    #[test]
    fn coboundary_squares_to_zero() {
        for k in [flat_torus(4, 4, 1.0, 1.0).unwrap(), sphere(2).unwrap(), disk(3).unwrap()] {
            let c = build_complex(&k).unwrap();
            let dd = &c.coboundary[1] * &c.coboundary[0];
            assert!(dd.triplet_iter().all(|t| *t.val == 0.0));
        }
    }

    #[test]
    fn interval_relative_conditions() {
        let c = interval(10).unwrap().cochains(true).unwrap();
        assert_eq!(c.size(0), 9);
        assert_eq!(c.size(1), 10);
        let none = apply_relative_bc(&build_complex(&interval(10).unwrap()).unwrap(), &[]).unwrap();
        assert_eq!(none.size(0), 11);
    }

    #[test]
    fn disk_relative_counts() {
        let k = disk(3).unwrap();
        let c = k.cochains(true).unwrap();
        assert_eq!(c.size(0), k.count(0) - 18);
        assert_eq!(c.size(1), k.count(1) - 18);
        assert_eq!(c.size(2), k.count(2));
    }

    #[test]
    fn mass_is_symmetric() {
        let c = build_complex(&disk(2).unwrap()).unwrap();
        for m in &c.mass {
            let d = m.to_dense();
            for i in 0..d.nrows() {
                for j in 0..d.ncols() {
                    assert!((d[(i, j)] - d[(j, i)]).abs() < 1e-14);
                }
            }
        }
    }
}
