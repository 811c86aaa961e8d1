//! Intrinsic stratification of a bare simplicial complex by link inspection.
//!
//! A simplex whose link is not a homology sphere of the complementary
//! dimension is singular; the closure of the singular simplices is the top
//! singular level. Inside a level `S` of dimension `m`, a simplex `τ` of
//! dimension `d` is regular when its link in `S` is a homology
//! `(m−d−1)`-sphere and its link in the whole complex has the homology of the
//! `(m−d)`-fold suspension of the common link of the `m`-simplices of `S`
//! around it. Irregular simplices generate the next level down.

use std::collections::{BTreeSet, HashMap};

use super::homology::{is_homology_sphere, reduced_betti};
use crate::error::{Error, Result};
use crate::mesh::complex::closure;
use crate::mesh::StratifiedComplex;

/// Maximal simplices of a complex with a vertex → maximal-simplex lookup.
struct Star {
    maximal: Vec<Vec<usize>>,
    by_vertex: HashMap<usize, Vec<usize>>,
}

impl Star {
    fn new(maximal: Vec<Vec<usize>>) -> Self {
        let mut by_vertex: HashMap<usize, Vec<usize>> = HashMap::new();
        for (i, s) in maximal.iter().enumerate() {
            for &v in s {
                by_vertex.entry(v).or_default().push(i);
            }
        }
        Self { maximal, by_vertex }
    }

    /// Maximal simplices containing `tau`.
    fn containing(&self, tau: &[usize]) -> Vec<&Vec<usize>> {
        let Some(first) = self.by_vertex.get(&tau[0]) else {
            return Vec::new();
        };
        first.iter().map(|&i| &self.maximal[i]).filter(|s| tau.iter().all(|v| s.binary_search(v).is_ok())).collect()
    }

    fn link(&self, tau: &[usize]) -> Vec<Vec<usize>> {
        self.containing(tau)
            .into_iter()
            .map(|s| s.iter().copied().filter(|v| tau.binary_search(v).is_err()).collect::<Vec<usize>>())
            .filter(|s| !s.is_empty())
            .collect()
    }
}

fn maximal_of(levels: &[BTreeSet<Vec<usize>>]) -> Vec<Vec<usize>> {
    let mut faces: BTreeSet<Vec<usize>> = BTreeSet::new();
    for level in levels {
        for s in level {
            for k in 0..s.len() {
                if s.len() > 1 {
                    let mut f = s.clone();
                    f.remove(k);
                    faces.insert(f);
                }
            }
        }
    }
    levels.iter().flatten().filter(|s| !faces.contains(*s)).cloned().collect()
}

fn shifted(b: &[usize], by: usize) -> Vec<usize> {
    let mut out = vec![0; by];
    out.extend_from_slice(b);
    out
}

/// Returns `k` with its strata computed from links when none are stored;
/// complexes that already carry strata are validated and returned as is.
pub fn stratify_multiconical(k: &StratifiedComplex) -> Result<StratifiedComplex> {
    k.validate()?;
    if !k.strata.is_empty() {
        return Ok(k.clone());
    }
    let n = k.dim();
    let whole = Star::new(k.maximal_simplices());
    if let Some(s) = whole.maximal.iter().find(|s| s.len() != n + 1) {
        return Err(Error::NonMulticonical { simplex: s.clone(), reason: format!("maximal simplex of dimension {} in a complex of dimension {n}", s.len() - 1) });
    }

    let mut link_homology: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
    let mut singular = Vec::new();
    for level in &k.simplices {
        for s in level {
            let b = reduced_betti(&whole.link(s));
            if !is_homology_sphere(&b, n as isize - s.len() as isize) {
                singular.push(s.clone());
            }
            link_homology.insert(s.clone(), b);
        }
    }

    let mut out = k.clone();
    out.strata = vec![Vec::new(); n.max(1)];
    let mut upper = n;
    let mut current = closure(&singular);
    while current.iter().any(|l| !l.is_empty()) {
        let m = current.iter().rposition(|l| !l.is_empty()).unwrap_or(0);
        let maximal = maximal_of(&current);
        for j in m..upper {
            out.strata[j] = maximal.clone();
        }
        upper = m;
        if m == 0 {
            break;
        }
        let star = Star::new(maximal);
        let mut irregular = Vec::new();
        for (d, level) in current.iter().enumerate() {
            for tau in level {
                let sphere = is_homology_sphere(&reduced_betti(&star.link(tau)), m as isize - d as isize - 1);
                let tops: Vec<&Vec<usize>> = star.containing(tau).into_iter().filter(|s| s.len() == m + 1).collect();
                let regular = sphere
                    && !tops.is_empty()
                    && tops.iter().all(|t| link_homology[*t] == link_homology[tops[0]])
                    && super::homology::trim(shifted(&link_homology[tops[0]], m - d)) == link_homology[tau];
                if !regular {
                    irregular.push(tau.clone());
                }
            }
        }
        current = closure(&irregular);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::builders::{figure_eight, star};
    use crate::mesh::generators::{cone_over, disk, flat_torus, from_graph, sphere};

    fn level(k: &StratifiedComplex, j: usize) -> BTreeSet<Vec<usize>> {
        k.stratum(j).into_iter().flatten().collect()
    }

    #[test]
    fn graph_vertices_of_valence_other_than_two() {
        let g = from_graph(&star(3, 1.0), 3).unwrap();
        let s = stratify_multiconical(&g).unwrap();
        let x0 = level(&s, 0);
        assert_eq!(x0, (0..4).map(|v| vec![v]).collect());
        let e = from_graph(&figure_eight(1.0, 1.0), 3).unwrap();
        assert_eq!(level(&stratify_multiconical(&e).unwrap(), 0), BTreeSet::from([vec![0]]));
    }

    #[test]
    fn closed_surfaces_have_no_strata() {
        for k in [flat_torus(4, 4, 1.0, 1.0).unwrap(), sphere(2).unwrap()] {
            let s = stratify_multiconical(&k).unwrap();
            assert!(level(&s, 0).is_empty() && level(&s, 1).is_empty());
        }
    }

    #[test]
    fn disk_boundary_is_codimension_one() {
        let d = disk(3).unwrap();
        let s = stratify_multiconical(&d).unwrap();
        assert_eq!(level(&s, 1), d.boundary_closure().into_iter().flatten().collect());
        assert!(level(&s, 0).is_empty());
    }

    #[test]
    fn cone_point_over_torus() {
        let mut c = cone_over(&flat_torus(3, 3, 1.0, 1.0).unwrap(), 1.0).unwrap();
        c.strata.clear();
        c.boundary.clear();
        let s = stratify_multiconical(&c).unwrap();
        let apex = vec![c.num_vertices() - 1];
        // The lid is a boundary, so it forms the codimension-one level and
        // the apex sits below it.
        assert_eq!(level(&s, 0), BTreeSet::from([apex.clone()]));
        assert!(level(&s, 2).contains(&apex));
        assert_eq!(level(&s, 2).iter().filter(|x| x.len() == 3).count(), 18);
    }

    #[test]
    fn non_pure_rejected() {
        let k = StratifiedComplex::from_top(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![2.0, 0.0]], &[vec![0, 1, 2], vec![1, 3]]).unwrap();
        assert!(matches!(stratify_multiconical(&k), Err(Error::NonMulticonical { .. })));
    }
}
