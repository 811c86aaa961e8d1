//! Truncated metric cones `CY(ε)`: the cone metric, cohomology formulas and
//! separation-of-variables spectra with an absolute lid at `r = ε`.

pub mod bessel;
pub mod cohomology;
pub mod radial;
pub mod spectrum;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::graph::MetricGraph;

pub use cohomology::{cone_ih, cone_l2_cohomology, cone_tables, kunneth_product, CohomologyTable};
pub use radial::{radial_spectrum, radial_spectrum_in_dim};
pub use spectrum::cone_graph_spectrum;

/// Slack allowed when comparing base distances with `π`.
const PI_SLACK: f64 = 1e-12;

/// The base `Y` of a cone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ConeBase {
    Graph(MetricGraph),
    /// Finite metric space given by its distance matrix.
    Points { distances: Vec<Vec<f64>> },
    /// Abstract base spectrum `μ₀ ≤ μ₁ ≤ …` of a base of dimension `dim`.
    Spectrum { mu: Vec<f64>, dim: usize },
}

impl ConeBase {
    pub fn dimension(&self) -> usize {
        match self {
            ConeBase::Graph(_) => 1,
            ConeBase::Points { .. } => 0,
            ConeBase::Spectrum { dim, .. } => *dim,
        }
    }

    pub fn points(n: usize, d: f64) -> Self {
        let distances = (0..n).map(|i| (0..n).map(|j| if i == j { 0.0 } else { d }).collect()).collect();
        ConeBase::Points { distances }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ConeBase::Graph(g) => {
                g.validate()?;
                let d = graph_diameter(g);
                if d > std::f64::consts::PI + PI_SLACK {
                    return Err(invalid(format!("base diameter {d} exceeds pi")));
                }
            }
            ConeBase::Points { distances } => {
                let n = distances.len();
                if n == 0 {
                    return Err(invalid("point-set base is empty"));
                }
                for (i, row) in distances.iter().enumerate() {
                    if row.len() != n {
                        return Err(invalid("distance matrix must be square"));
                    }
                    for (j, &d) in row.iter().enumerate() {
                        if (i == j && d != 0.0) || (i != j && !(d > 0.0)) || d != distances[j][i] {
                            return Err(invalid(format!("invalid distance d({i},{j}) = {d}")));
                        }
                        if d > std::f64::consts::PI + PI_SLACK {
                            return Err(invalid(format!("base distance d({i},{j}) = {d} exceeds pi")));
                        }
                    }
                }
            }
            ConeBase::Spectrum { mu, .. } => {
                if mu.iter().any(|&m| !(m >= 0.0 && m.is_finite())) {
                    return Err(invalid("base eigenvalues must be nonnegative"));
                }
                if mu.windows(2).any(|w| w[1] < w[0]) {
                    return Err(invalid("base eigenvalues must be ascending"));
                }
                if mu.is_empty() {
                    return Err(invalid("base spectrum is empty"));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeSpace {
    pub base: ConeBase,
    pub eps: f64,
}

impl ConeSpace {
    pub fn new(base: ConeBase, eps: f64) -> Result<Self> {
        let c = Self { base, eps };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(invalid("cone radius eps must be finite and positive"));
        }
        self.base.validate()
    }

    /// Dimension `k` of the cone (base dimension plus one).
    pub fn dimension(&self) -> usize {
        self.base.dimension() + 1
    }
}

/// Distance between `(t1, y1)` and `(t2, y2)` in the cone, given
/// `d_Y(y1, y2)`: the law-of-cosines length `sqrt(t1² + t2² − 2 t1 t2 cos d_Y)`.
pub fn cone_distance(t1: f64, t2: f64, d_y: f64) -> Result<f64> {
    if !(t1 >= 0.0 && t2 >= 0.0 && t1.is_finite() && t2.is_finite()) {
        return Err(invalid("cone radii must be finite and nonnegative"));
    }
    if !(d_y >= 0.0) || d_y > std::f64::consts::PI + PI_SLACK {
        return Err(invalid(format!("base distance {d_y} exceeds pi")));
    }
    let sq = t1 * t1 + t2 * t2 - 2.0 * t1 * t2 * d_y.min(std::f64::consts::PI).cos();
    Ok(sq.max(0.0).sqrt())
}

/// As [`cone_distance`], with base points and a base metric.
pub fn cone_distance_with<Y>(t1: f64, y1: &Y, t2: f64, y2: &Y, d_y: impl Fn(&Y, &Y) -> f64) -> Result<f64> {
    cone_distance(t1, t2, d_y(y1, y2))
}

/// All-pairs shortest-path distances between vertices.
pub fn vertex_distances(g: &MetricGraph) -> Vec<Vec<f64>> {
    let n = g.num_vertices();
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for e in &g.edges {
        let l = e.length.min(d[e.tail][e.head]);
        d[e.tail][e.head] = l;
        d[e.head][e.tail] = l;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

/// Maximum of `min_i (a_i·(s,t) + b_i)` over a box with optional extra
/// half-plane constraints `c·(s,t) ≥ 0`, by enumerating vertices of the
/// feasible polytope in `(s, t, z)`.
fn max_min_affine(pieces: &[[f64; 3]], box_hi: [f64; 2], halfplanes: &[[f64; 2]]) -> f64 {
    // Constraints written as  α·s + β·t + γ·z ≤ δ.
    let mut cons: Vec<[f64; 4]> = Vec::new();
    for p in pieces {
        cons.push([-p[0], -p[1], 1.0, p[2]]);
    }
    cons.push([-1.0, 0.0, 0.0, 0.0]);
    cons.push([0.0, -1.0, 0.0, 0.0]);
    cons.push([1.0, 0.0, 0.0, box_hi[0]]);
    cons.push([0.0, 1.0, 0.0, box_hi[1]]);
    for h in halfplanes {
        cons.push([-h[0], -h[1], 0.0, 0.0]);
    }
    let feasible = |x: &[f64; 3]| cons.iter().all(|c| c[0] * x[0] + c[1] * x[1] + c[2] * x[2] <= c[3] + 1e-9);
    let mut best = f64::NEG_INFINITY;
    let m = cons.len();
    for a in 0..m {
        for b in a + 1..m {
            for c in b + 1..m {
                if let Some(x) = solve3(&cons[a], &cons[b], &cons[c]) {
                    if feasible(&x) && x[2] > best {
                        best = x[2];
                    }
                }
            }
        }
    }
    best
}

fn solve3(r0: &[f64; 4], r1: &[f64; 4], r2: &[f64; 4]) -> Option<[f64; 3]> {
    let det = |a: [f64; 3], b: [f64; 3], c: [f64; 3]| {
        a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) + a[2] * (b[0] * c[1] - b[1] * c[0])
    };
    let m = [[r0[0], r0[1], r0[2]], [r1[0], r1[1], r1[2]], [r2[0], r2[1], r2[2]]];
    let d = det(m[0], m[1], m[2]);
    if d.abs() < 1e-12 {
        return None;
    }
    let rhs = [r0[3], r1[3], r2[3]];
    let mut x = [0.0; 3];
    for (col, xi) in x.iter_mut().enumerate() {
        let mut mm = m;
        for row in 0..3 {
            mm[row][col] = rhs[row];
        }
        *xi = det(mm[0], mm[1], mm[2]) / d;
    }
    Some(x)
}

/// Exact diameter of a metric graph (over all points, not just vertices).
/// Disconnected graphs have infinite diameter.
pub fn graph_diameter(g: &MetricGraph) -> f64 {
    let d = vertex_distances(g);
    if d.iter().flatten().any(|x| x.is_infinite()) {
        return f64::INFINITY;
    }
    let mut best = 0.0f64;
    for (i, e1) in g.edges.iter().enumerate() {
        for (j, e2) in g.edges.iter().enumerate().skip(i) {
            let (l1, l2) = (e1.length, e2.length);
            // Distance from s on e1 to an endpoint: s + d(tail,·) or l1 − s + d(head,·).
            let ends1 = [([1.0, 0.0], 0.0, e1.tail), ([-1.0, 0.0], l1, e1.head)];
            let ends2 = [([0.0, 1.0], 0.0, e2.tail), ([0.0, -1.0], l2, e2.head)];
            let mut pieces = Vec::new();
            for (a1, b1, u) in ends1 {
                for (a2, b2, v) in ends2 {
                    pieces.push([a1[0] + a2[0], a1[1] + a2[1], b1 + b2 + d[u][v]]);
                }
            }
            if i == j {
                let mut p1 = pieces.clone();
                p1.push([1.0, -1.0, 0.0]);
                best = best.max(max_min_affine(&p1, [l1, l2], &[[1.0, -1.0]]));
                let mut p2 = pieces;
                p2.push([-1.0, 1.0, 0.0]);
                best = best.max(max_min_affine(&p2, [l1, l2], &[[-1.0, 1.0]]));
            } else {
                best = best.max(max_min_affine(&pieces, [l1, l2], &[]));
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::builders::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn distance_examples() {
        assert_eq!(cone_distance(0.7, 0.0, 1.0).unwrap(), 0.7);
        assert!((cone_distance(1.0, 1.0, PI / 2.0).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert!((cone_distance(1.0, 1.0, PI).unwrap() - 2.0).abs() < 1e-15);
        assert!(cone_distance(1.0, 1.0, 3.5).is_err());
    }

    #[test]
    fn diameters() {
        assert!((graph_diameter(&circle(2.0 * PI)) - PI).abs() < 1e-12);
        assert!((graph_diameter(&segment(1.5)) - 1.5).abs() < 1e-12);
        assert!((graph_diameter(&star(3, 1.0)) - 2.0).abs() < 1e-12);
        assert!((graph_diameter(&figure_eight(2.0, 4.0)) - 3.0).abs() < 1e-12);
        // Theta graph with unit edges: every pair of points is within 1.
        assert!((graph_diameter(&theta(1.0, 1.0, 1.0)) - 1.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn cone_metric_triangle_inequality(
            t in proptest::array::uniform3(0.0f64..1.0),
            a in proptest::array::uniform3(0.0f64..(2.0 * PI)),
        ) {
            // Points on a circle base of length 2π: d_Y is arc distance.
            let dy = |x: f64, y: f64| { let d = (x - y).abs(); d.min(2.0 * PI - d) };
            let d = |i: usize, j: usize| cone_distance(t[i], t[j], dy(a[i], a[j])).unwrap();
            prop_assert!(d(0, 2) <= d(0, 1) + d(1, 2) + 1e-12);
            prop_assert!((d(0, 1) - d(1, 0)).abs() < 1e-15);
        }
    }
}
