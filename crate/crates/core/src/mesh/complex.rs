//! Stratified simplicial complexes with piecewise-flat metrics.

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Edge length replacing the Euclidean distance between the coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LengthOverride {
    pub a: usize,
    pub b: usize,
    pub length: f64,
}

/// A simplicial complex with vertex coordinates, optional per-edge lengths,
/// a filtration by closed strata and a boundary subcomplex.
///
/// Simplices are ascending vertex lists; that order fixes their orientation.
/// `strata[j]` lists generating simplices of `X_j` for `j < dim`, and the
/// subcomplex is their closure; omitted upper levels repeat the last one
/// given. `boundary` works the same way.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StratifiedComplex {
    pub coords: Vec<Vec<f64>>,
    pub simplices: Vec<Vec<Vec<usize>>>,
    #[serde(default)]
    pub length_overrides: Vec<LengthOverride>,
    #[serde(default)]
    pub strata: Vec<Vec<Vec<usize>>>,
    #[serde(default)]
    pub boundary: Vec<Vec<usize>>,
}

/// Lookup from a simplex to its position in `simplices[dim]`.
#[derive(Debug, Clone, Default)]
pub struct SimplexIndex {
    maps: Vec<HashMap<Vec<usize>, usize>>,
}

impl SimplexIndex {
    pub fn get(&self, s: &[usize]) -> Option<usize> {
        let d = s.len().checked_sub(1)?;
        self.maps.get(d)?.get(s).copied()
    }
}

/// All faces (including `s` itself) of a sorted simplex.
pub fn faces_of(s: &[usize]) -> Vec<Vec<usize>> {
    let n = s.len();
    (1u64..(1u64 << n))
        .map(|mask| (0..n).filter(|i| mask >> i & 1 == 1).map(|i| s[i]).collect())
        .collect()
}

/// Closure of a set of simplices under taking faces, grouped by dimension.
pub fn closure(gens: &[Vec<usize>]) -> Vec<BTreeSet<Vec<usize>>> {
    let mut out: Vec<BTreeSet<Vec<usize>>> = Vec::new();
    for g in gens {
        let mut s = g.clone();
        s.sort_unstable();
        for f in faces_of(&s) {
            let d = f.len() - 1;
            if out.len() <= d {
                out.resize(d + 1, BTreeSet::new());
            }
            out[d].insert(f);
        }
    }
    out
}

/// Determinant of a small dense matrix by Gaussian elimination with pivoting.
pub fn small_det(mut a: Vec<Vec<f64>>) -> f64 {
    let n = a.len();
    let mut det = 1.0;
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        if a[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= a[c][c];
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= f * a[c][k];
            }
        }
    }
    det
}

/// Inverse of a small symmetric positive-definite matrix.
pub fn small_inverse(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs())).unwrap();
        m.swap(p, c);
        let piv = m[c][c];
        for v in m[c].iter_mut() {
            *v /= piv;
        }
        for r in 0..n {
            if r != c {
                let f = m[r][c];
                if f != 0.0 {
                    for k in 0..2 * n {
                        m[r][k] -= f * m[c][k];
                    }
                }
            }
        }
    }
    m.into_iter().map(|r| r[n..].to_vec()).collect()
}

impl StratifiedComplex {
    /// Builds the complex generated by `tops` (closure under faces), with no
    /// strata and no boundary.
    pub fn from_top(coords: Vec<Vec<f64>>, tops: &[Vec<usize>]) -> Result<Self> {
        let nv = coords.len();
        for (i, t) in tops.iter().enumerate() {
            if t.is_empty() {
                return Err(invalid(format!("simplex {i} is empty")));
            }
            if let Some(&v) = t.iter().find(|&&v| v >= nv) {
                return Err(invalid(format!("simplex {i} references vertex {v}, but only {nv} vertices exist")));
            }
            let set: BTreeSet<_> = t.iter().collect();
            if set.len() != t.len() {
                return Err(invalid(format!("simplex {i} repeats a vertex: {t:?}")));
            }
        }
        let mut simplices: Vec<Vec<Vec<usize>>> = closure(tops).into_iter().map(|s| s.into_iter().collect()).collect();
        if simplices.is_empty() {
            simplices.push(Vec::new());
        }
        // Vertices not used by any simplex still belong to the complex.
        let used: BTreeSet<usize> = simplices[0].iter().map(|v| v[0]).collect();
        if used.len() != nv {
            simplices[0] = (0..nv).map(|v| vec![v]).collect();
        }
        Ok(Self { coords, simplices, length_overrides: Vec::new(), strata: Vec::new(), boundary: Vec::new() })
    }

    pub fn dim(&self) -> usize {
        self.simplices.iter().rposition(|s| !s.is_empty()).unwrap_or(0)
    }

    pub fn num_vertices(&self) -> usize {
        self.coords.len()
    }

    pub fn count(&self, d: usize) -> usize {
        self.simplices.get(d).map_or(0, Vec::len)
    }

    pub fn index(&self) -> SimplexIndex {
        SimplexIndex {
            maps: self
                .simplices
                .iter()
                .map(|level| level.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect())
                .collect(),
        }
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.simplices.iter().enumerate().map(|(d, s)| if d % 2 == 0 { s.len() as i64 } else { -(s.len() as i64) }).sum()
    }

    /// Simplices that are not a face of any other simplex.
    pub fn maximal_simplices(&self) -> Vec<Vec<usize>> {
        let mut covered: BTreeSet<Vec<usize>> = BTreeSet::new();
        for level in self.simplices.iter().skip(1) {
            for s in level {
                for i in 0..s.len() {
                    let mut f = s.clone();
                    f.remove(i);
                    covered.insert(f);
                }
            }
        }
        self.simplices.iter().flatten().filter(|s| !covered.contains(*s)).cloned().collect()
    }

    pub fn is_pure(&self) -> bool {
        let n = self.dim();
        self.maximal_simplices().iter().all(|s| s.len() == n + 1)
    }

    fn override_map(&self) -> HashMap<(usize, usize), f64> {
        self.length_overrides.iter().map(|o| ((o.a.min(o.b), o.a.max(o.b)), o.length)).collect()
    }

    /// Length of the edge `{a, b}`.
    pub fn edge_length(&self, a: usize, b: usize) -> f64 {
        self.length_fn()(a, b)
    }

    /// Edge-length lookup with the overrides indexed once.
    fn length_fn(&self) -> impl Fn(usize, usize) -> f64 + '_ {
        let map = self.override_map();
        move |a: usize, b: usize| match map.get(&(a.min(b), a.max(b))) {
            Some(&l) => l,
            None => euclid(&self.coords[a], &self.coords[b]),
        }
    }

    /// Gram matrix of the edge vectors `v_i − v_0` of a simplex.
    pub fn simplex_gram(&self, s: &[usize]) -> Vec<Vec<f64>> {
        let len = self.length_fn();
        gram_from_lengths(s, &len)
    }

    /// Gram matrices of all simplices of dimension `d`, in order.
    pub fn grams(&self, d: usize) -> Vec<Vec<Vec<f64>>> {
        let len = self.length_fn();
        self.simplices.get(d).map_or(Vec::new(), |level| level.iter().map(|s| gram_from_lengths(s, &len)).collect())
    }

    /// `d`-dimensional volume of a simplex from its edge lengths.
    pub fn volume(&self, s: &[usize]) -> f64 {
        volume_from_gram(&self.simplex_gram(s))
    }

    /// Closure of the generators of `X_j`. Levels above the last stored one
    /// repeat it; with no strata stored every level is empty.
    pub fn stratum(&self, j: usize) -> Vec<BTreeSet<Vec<usize>>> {
        match self.strata.get(j).or(self.strata.last()) {
            Some(g) => closure(g),
            None => Vec::new(),
        }
    }

    /// Closure of the boundary generators.
    pub fn boundary_closure(&self) -> Vec<BTreeSet<Vec<usize>>> {
        closure(&self.boundary)
    }

    /// Checks closure under faces, vertex references, strata and boundary
    /// membership, strata nesting and non-degenerate simplex metrics.
    pub fn validate(&self) -> Result<()> {
        let nv = self.coords.len();
        if nv == 0 {
            return Err(invalid("complex has no vertices"));
        }
        let cdim = self.coords[0].len();
        if let Some(i) = self.coords.iter().position(|c| c.len() != cdim || c.iter().any(|x| !x.is_finite())) {
            return Err(invalid(format!("vertex {i} has malformed coordinates")));
        }
        let idx = self.index();
        for (d, level) in self.simplices.iter().enumerate() {
            for (i, s) in level.iter().enumerate() {
                if s.len() != d + 1 {
                    return Err(invalid(format!("simplex {i} of dimension {d} has {} vertices", s.len())));
                }
                if let Some(&v) = s.iter().find(|&&v| v >= nv) {
                    return Err(invalid(format!("simplex {s:?} references vertex {v}, but only {nv} vertices exist")));
                }
                if s.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(invalid(format!("simplex {s:?} is not strictly ascending")));
                }
                if d > 0 {
                    for k in 0..s.len() {
                        let mut f = s.clone();
                        f.remove(k);
                        if idx.get(&f).is_none() {
                            return Err(Error::NotSubcomplex { simplex: s.clone() });
                        }
                    }
                }
            }
        }
        for o in &self.length_overrides {
            if o.a >= nv || o.b >= nv || idx.get(&[o.a.min(o.b), o.a.max(o.b)]).is_none() {
                return Err(invalid(format!("length override refers to a missing edge ({}, {})", o.a, o.b)));
            }
            if !(o.length > 0.0 && o.length.is_finite()) {
                return Err(invalid(format!("length override ({}, {}) must be positive", o.a, o.b)));
            }
        }
        let check_sub = |gens: &[Vec<usize>]| -> Result<()> {
            for g in gens {
                let mut s = g.clone();
                s.sort_unstable();
                if idx.get(&s).is_none() {
                    return Err(Error::NotSubcomplex { simplex: s });
                }
            }
            Ok(())
        };
        for gens in &self.strata {
            check_sub(gens)?;
        }
        check_sub(&self.boundary)?;
        if self.strata.len() > self.dim().max(1) {
            return Err(invalid(format!("{} strata given for a complex of dimension {}", self.strata.len(), self.dim())));
        }
        for j in 1..self.strata.len() {
            let lower = self.stratum(j - 1);
            let upper = self.stratum(j);
            for (d, level) in lower.iter().enumerate() {
                for s in level {
                    if !upper.get(d).is_some_and(|u| u.contains(s)) {
                        return Err(invalid(format!("strata are not nested: {s:?} lies in X_{} but not in X_{j}", j - 1)));
                    }
                }
            }
            if lower.len() > j + 1 {
                return Err(invalid(format!("stratum X_{} has dimension above {}", j - 1, j - 1)));
            }
        }
        self.check_metric()
    }

    fn check_metric(&self) -> Result<()> {
        let len = self.length_fn();
        for level in self.simplices.iter().skip(1) {
            for s in level {
                let g = gram_from_lengths(s, &len);
                let scale = g.iter().enumerate().map(|(i, r)| r[i]).fold(0.0, f64::max);
                let det = small_det(g.clone());
                let d = g.len() as i32;
                if !(scale > 0.0) || !(det > 1e-12 * scale.powi(d)) {
                    return Err(Error::DegenerateSimplex {
                        simplex: s.clone(),
                        reason: format!("edge lengths give Gram determinant {det:e}"),
                    });
                }
            }
        }
        Ok(())
    }

    /// Orients the top simplices coherently across codimension-one faces of
    /// the regular part (faces with exactly two cofaces that are not in the
    /// singular strata). Returns one sign per top simplex.
    pub fn orient(&self) -> Result<Vec<i8>> {
        let n = self.dim();
        let tops = self.simplices.get(n).cloned().unwrap_or_default();
        if n == 0 {
            return Ok(vec![1; tops.len()]);
        }
        let singular = self.stratum(n - 1);
        let mut cofaces: HashMap<Vec<usize>, Vec<(usize, usize)>> = HashMap::new();
        for (t, s) in tops.iter().enumerate() {
            for k in 0..s.len() {
                let mut f = s.clone();
                f.remove(k);
                cofaces.entry(f).or_default().push((t, k));
            }
        }
        let mut sign = vec![0i8; tops.len()];
        for start in 0..tops.len() {
            if sign[start] != 0 {
                continue;
            }
            sign[start] = 1;
            let mut queue = VecDeque::from([start]);
            while let Some(t) = queue.pop_front() {
                let s = &tops[t];
                for k in 0..s.len() {
                    let mut f = s.clone();
                    f.remove(k);
                    let list = &cofaces[&f];
                    if list.len() != 2 || singular.get(n - 1).is_some_and(|l| l.contains(&f)) {
                        continue;
                    }
                    let &(u, ku) = list.iter().find(|&&(u, _)| u != t).unwrap();
                    // Induced orientations (−1)^k·sign must be opposite.
                    let induced_t = if k % 2 == 0 { sign[t] } else { -sign[t] };
                    let want = if ku % 2 == 0 { -induced_t } else { induced_t };
                    if sign[u] == 0 {
                        sign[u] = want;
                        queue.push_back(u);
                    } else if sign[u] != want {
                        return Err(Error::NonOrientable { simplex: f });
                    }
                }
            }
        }
        Ok(sign)
    }

    /// Sets every edge length to `factor(a, b)·length(a, b)`.
    pub fn scale_edges(&self, factor: impl Fn(usize, usize) -> f64) -> Self {
        let len = self.length_fn();
        let edges = self.simplices.get(1).cloned().unwrap_or_default();
        let length_overrides = edges
            .iter()
            .map(|e| LengthOverride { a: e[0], b: e[1], length: len(e[0], e[1]) * factor(e[0], e[1]) })
            .collect();
        Self { length_overrides, ..self.clone() }
    }

    /// One barycentric subdivision. New vertices are the simplices of `self`
    /// (ordered by dimension, then position) placed at their barycentres;
    /// strata and boundary are subdivided alongside. On one-dimensional
    /// complexes every edge is halved in length; in higher dimensions length
    /// overrides are not carried over.
    pub fn barycentric_subdivision(&self) -> Result<Self> {
        let mut id: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut coords = Vec::new();
        for level in &self.simplices {
            for s in level {
                id.insert(s.clone(), coords.len());
                let dim = self.coords[0].len();
                let c: Vec<f64> = (0..dim).map(|k| s.iter().map(|&v| self.coords[v][k]).sum::<f64>() / s.len() as f64).collect();
                coords.push(c);
            }
        }
        let flags = |gens: &[Vec<usize>]| -> Vec<Vec<usize>> {
            let mut out = Vec::new();
            let maximal = maximal_of(gens);
            for s in maximal {
                for perm in permutations(s.len()) {
                    let mut flag: Vec<usize> = (1..=s.len())
                        .map(|k| {
                            let mut f: Vec<usize> = perm[..k].iter().map(|&i| s[i]).collect();
                            f.sort_unstable();
                            id[&f]
                        })
                        .collect();
                    flag.sort_unstable();
                    out.push(flag);
                }
            }
            out
        };
        let mut out = Self::from_top(coords, &flags(&self.maximal_simplices()))?;
        out.strata = self.strata.iter().map(|g| flags(g)).collect();
        out.boundary = flags(&self.boundary);
        if self.dim() == 1 {
            let len = self.length_fn();
            let mut lengths: Vec<LengthOverride> = self.simplices[1]
                .iter()
                .flat_map(|e| {
                    let (m, half) = (id[e], len(e[0], e[1]) / 2.0);
                    [LengthOverride { a: id[&vec![e[0]]], b: m, length: half }, LengthOverride { a: id[&vec![e[1]]], b: m, length: half }]
                })
                .collect();
            lengths.sort_by_key(|o| (o.a, o.b));
            out.length_overrides = lengths;
        }
        Ok(out)
    }
}

fn maximal_of(gens: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let cl = closure(gens);
    let all: Vec<Vec<usize>> = cl.iter().flatten().cloned().collect();
    let mut covered: BTreeSet<Vec<usize>> = BTreeSet::new();
    for s in &all {
        for i in 0..s.len() {
            if s.len() > 1 {
                let mut f = s.clone();
                f.remove(i);
                covered.insert(f);
            }
        }
    }
    all.into_iter().filter(|s| !covered.contains(s)).collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn gram_from_lengths(s: &[usize], len: &impl Fn(usize, usize) -> f64) -> Vec<Vec<f64>> {
    let d = s.len() - 1;
    let sq = |a: usize, b: usize| {
        let l = len(a, b);
        l * l
    };
    (1..=d)
        .map(|i| {
            (1..=d)
                .map(|j| {
                    if i == j {
                        sq(s[0], s[i])
                    } else {
                        0.5 * (sq(s[0], s[i]) + sq(s[0], s[j]) - sq(s[i], s[j]))
                    }
                })
                .collect()
        })
        .collect()
}

pub(crate) fn volume_from_gram(g: &[Vec<f64>]) -> f64 {
    let d = g.len();
    let fact: f64 = (1..=d).map(|k| k as f64).product();
    small_det(g.to_vec()).max(0.0).sqrt() / fact
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> StratifiedComplex {
        StratifiedComplex::from_top(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]], &[vec![0, 1, 2]]).unwrap()
    }

    #[test]
    fn closure_counts() {
        let t = triangle();
        assert_eq!((t.count(0), t.count(1), t.count(2)), (3, 3, 1));
        assert_eq!(t.euler_characteristic(), 1);
        assert!((t.volume(&[0, 1, 2]) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn dangling_vertex_is_rejected() {
        let err = StratifiedComplex::from_top(vec![vec![0.0]; 2], &[vec![0, 5]]).unwrap_err();
        assert!(err.to_string().contains("vertex 5"));
    }

    #[test]
    fn degenerate_triangle_is_rejected() {
        let t = StratifiedComplex::from_top(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![2.0, 0.0]], &[vec![0, 1, 2]]).unwrap();
        assert!(matches!(t.validate(), Err(Error::DegenerateSimplex { .. })));
    }

    #[test]
    fn subdivision_of_a_triangle() {
        let s = triangle().barycentric_subdivision().unwrap();
        assert_eq!(s.count(2), 6);
        assert_eq!(s.count(0), 7);
        assert_eq!(s.euler_characteristic(), 1);
        s.validate().unwrap();
    }

    #[test]
    fn small_linear_algebra() {
        let a = vec![vec![4.0, 1.0], vec![1.0, 3.0]];
        assert!((small_det(a.clone()) - 11.0).abs() < 1e-14);
        let inv = small_inverse(&a);
        assert!((inv[0][0] - 3.0 / 11.0).abs() < 1e-15);
        assert!((inv[0][1] + 1.0 / 11.0).abs() < 1e-15);
    }
}
