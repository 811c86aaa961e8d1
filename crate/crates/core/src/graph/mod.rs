//! Finite oriented metric graphs and the degree-0 form Laplacian on them.
//!
//! A function `f` lives edgewise; at each vertex the values flowing in must
//! balance those flowing out (`Σ_in f_e(v) = Σ_out f_e(v)`), and the
//! derivative `f_e'` takes one common value at every adjoining end, measured
//! in each edge's own oriented coordinate. A valence-one vertex therefore
//! carries a Dirichlet condition, and the kernel has dimension `b₁`.

pub mod adjoint;
pub mod fem;
pub mod orientation;
pub mod secular;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

pub use adjoint::{adjointness_defect, adjointness_defect_with, AdjointOptions, SignConvention};
pub use fem::{fem_spectrum_0, GraphFem};
pub use orientation::{reverse_edge, reverse_edge_graph, EdgeProfile};
pub use secular::{secular_lowest, secular_spectrum_0, SecularOptions};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub id: String,
    pub tail: usize,
    pub head: usize,
    pub length: f64,
}

/// Vertex condition used by the solvers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum VertexCondition {
    /// Balance of values plus a common oriented derivative.
    #[default]
    Balance,
    /// Vanishing derivative on every adjoining end (an absolute lid).
    Neumann,
}

/// Vertex-level diagnostics of a sampled function and 1-form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexData {
    pub vertex: String,
    /// `Σ_in f_e(v) − Σ_out f_e(v)`.
    pub balance_residual: f64,
    /// Common endpoint value of the 1-form in oriented coordinates.
    pub flux: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricGraph {
    pub vertices: Vec<String>,
    pub edges: Vec<Edge>,
    pub conditions: Vec<VertexCondition>,
}

/// One end of an edge at a vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeEnd {
    pub edge: usize,
    /// `true` when the vertex is the head (the edge is incoming there).
    pub at_head: bool,
}

impl EdgeEnd {
    /// Sign of this end in the balance equation: `+1` incoming, `−1` outgoing.
    pub fn balance_sign(&self) -> f64 {
        if self.at_head {
            1.0
        } else {
            -1.0
        }
    }
}

impl MetricGraph {
    /// Builds and validates a graph from vertex labels and
    /// `(id, tail, head, length)` edges given by vertex index.
    pub fn new(vertices: Vec<String>, edges: Vec<(String, usize, usize, f64)>) -> Result<Self> {
        let n = vertices.len();
        let g = Self {
            conditions: vec![VertexCondition::Balance; n],
            vertices,
            edges: edges
                .into_iter()
                .map(|(id, tail, head, length)| Edge { id, tail, head, length })
                .collect(),
        };
        g.validate()?;
        Ok(g)
    }

    /// Convenience constructor with numeric labels and edge ids.
    pub fn from_lengths(nv: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        Self::new(
            (0..nv).map(|i| i.to_string()).collect(),
            edges.iter().enumerate().map(|(i, &(t, h, l))| (format!("e{i}"), t, h, l)).collect(),
        )
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.vertices.len();
        if self.conditions.len() != n {
            return Err(invalid("one vertex condition per vertex is required"));
        }
        if self.edges.is_empty() {
            return Err(invalid("graph has no edges"));
        }
        let mut seen = std::collections::HashSet::new();
        for v in &self.vertices {
            if !seen.insert(v) {
                return Err(invalid(format!("duplicate vertex id {v}")));
            }
        }
        let mut seen = std::collections::HashSet::new();
        let mut degree = vec![0usize; n];
        for e in &self.edges {
            if !seen.insert(&e.id) {
                return Err(invalid(format!("duplicate edge id {}", e.id)));
            }
            if !(e.length.is_finite() && e.length > 0.0) {
                return Err(invalid(format!("edge {}: length must be positive and finite", e.id)));
            }
            if e.tail >= n || e.head >= n {
                return Err(invalid(format!("edge {}: endpoint references a missing vertex", e.id)));
            }
            degree[e.tail] += 1;
            degree[e.head] += 1;
        }
        if let Some(v) = degree.iter().position(|&d| d == 0) {
            return Err(invalid(format!("vertex {} is isolated", self.vertices[v])));
        }
        Ok(())
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn total_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length).sum()
    }

    pub fn min_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length).fold(f64::INFINITY, f64::min)
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.id == id)
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == id)
    }

    /// Edge ends at each vertex, in edge order (tail end before head end for loops).
    pub fn ends(&self) -> Vec<Vec<EdgeEnd>> {
        let mut ends = vec![Vec::new(); self.vertices.len()];
        for (i, e) in self.edges.iter().enumerate() {
            ends[e.tail].push(EdgeEnd { edge: i, at_head: false });
            ends[e.head].push(EdgeEnd { edge: i, at_head: true });
        }
        ends
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().map(|e| (e.tail == v) as usize + (e.head == v) as usize).sum()
    }

    pub fn with_condition(mut self, v: usize, c: VertexCondition) -> Self {
        self.conditions[v] = c;
        self
    }

    /// Connected-component label of every vertex.
    pub fn components(&self) -> Vec<usize> {
        let n = self.vertices.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for e in &self.edges {
            let (a, b) = (find(&mut parent, e.tail), find(&mut parent, e.head));
            parent[a] = b;
        }
        let mut label = vec![usize::MAX; n];
        let mut next = 0;
        (0..n)
            .map(|v| {
                let r = find(&mut parent, v);
                if label[r] == usize::MAX {
                    label[r] = next;
                    next += 1;
                }
                label[r]
            })
            .collect()
    }

    /// Samples vertex diagnostics from profiles `f` and a 1-form `omega`
    /// (both sampled on each edge's nodes in increasing `s`).
    pub fn vertex_data(&self, f: &[EdgeProfile], omega: &[EdgeProfile]) -> Vec<VertexData> {
        let ends = self.ends();
        (0..self.vertices.len())
            .map(|v| {
                let mut balance = 0.0;
                let mut flux = f64::NAN;
                for end in &ends[v] {
                    let fv = &f[end.edge].values;
                    let ov = &omega[end.edge].values;
                    let (fval, oval) = if end.at_head {
                        (fv[fv.len() - 1], ov[ov.len() - 1])
                    } else {
                        (fv[0], ov[0])
                    };
                    balance += end.balance_sign() * fval;
                    if flux.is_nan() {
                        flux = oval;
                    }
                }
                VertexData { vertex: self.vertices[v].clone(), balance_residual: balance, flux }
            })
            .collect()
    }
}

/// `(b0, b1)`: number of components and first Betti number `E − V + b0`.
pub fn betti_numbers(g: &MetricGraph) -> (usize, usize) {
    let b0 = g.components().into_iter().max().map_or(0, |m| m + 1);
    (b0, g.num_edges() + b0 - g.num_vertices())
}

/// Named test graphs.
pub mod builders {
    use super::*;

    pub fn segment(length: f64) -> MetricGraph {
        MetricGraph::from_lengths(2, &[(0, 1, length)]).expect("valid segment")
    }

    pub fn circle(length: f64) -> MetricGraph {
        MetricGraph::from_lengths(1, &[(0, 0, length)]).expect("valid circle")
    }

    pub fn figure_eight(l1: f64, l2: f64) -> MetricGraph {
        MetricGraph::from_lengths(1, &[(0, 0, l1), (0, 0, l2)]).expect("valid figure-eight")
    }

    /// Star with `legs` edges oriented from the centre (vertex 0) outwards.
    pub fn star(legs: usize, length: f64) -> MetricGraph {
        let edges: Vec<_> = (1..=legs).map(|i| (0, i, length)).collect();
        MetricGraph::from_lengths(legs + 1, &edges).expect("valid star")
    }

    /// Two vertices joined by three edges.
    pub fn theta(l1: f64, l2: f64, l3: f64) -> MetricGraph {
        MetricGraph::from_lengths(2, &[(0, 1, l1), (0, 1, l2), (1, 0, l3)]).expect("valid theta")
    }

    /// Disjoint union of two circles.
    pub fn two_circles(l1: f64, l2: f64) -> MetricGraph {
        MetricGraph::from_lengths(2, &[(0, 0, l1), (1, 1, l2)]).expect("valid circles")
    }

    /// Cycle on `n` vertices with unit edges.
    pub fn cycle(n: usize, length: f64) -> MetricGraph {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n, length)).collect();
        MetricGraph::from_lengths(n, &edges).expect("valid cycle")
    }

    /// Connected random graph: a random spanning tree on `nv` vertices plus
    /// `extra` random edges (so `b₁ = extra`), random orientations, and
    /// lengths in `[0.5, 2)`.
    pub fn random_connected(nv: usize, extra: usize, seed: u64) -> MetricGraph {
        assert!(nv >= 2 || extra > 0, "a random graph needs an edge");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut edges = Vec::new();
        let orient = |rng: &mut ChaCha8Rng, a: usize, b: usize| if rng.random::<bool>() { (a, b) } else { (b, a) };
        for v in 1..nv {
            let u = rng.random_range(0..v);
            let (t, h) = orient(&mut rng, u, v);
            edges.push((t, h, rng.random_range(0.5..2.0)));
        }
        for _ in 0..extra {
            let a = rng.random_range(0..nv);
            let b = rng.random_range(0..nv);
            let (t, h) = orient(&mut rng, a, b);
            edges.push((t, h, rng.random_range(0.5..2.0)));
        }
        MetricGraph::from_lengths(nv, &edges).expect("valid random graph")
    }
}

#[cfg(test)]
mod tests {
    use super::builders::*;
    use super::*;

    #[test]
    fn betti_examples() {
        assert_eq!(betti_numbers(&figure_eight(1.0, 1.0)), (1, 2));
        assert_eq!(betti_numbers(&segment(1.0)), (1, 0));
        assert_eq!(betti_numbers(&two_circles(1.0, 2.0)), (2, 2));
        assert_eq!(betti_numbers(&random_connected(6, 3, 7)), (1, 3));
    }

    #[test]
    fn validation_rejects_bad_graphs() {
        assert!(MetricGraph::from_lengths(2, &[(0, 1, -1.0)]).is_err());
        assert!(MetricGraph::from_lengths(2, &[(0, 2, 1.0)]).is_err());
        assert!(MetricGraph::from_lengths(3, &[(0, 1, 1.0)]).is_err());
    }
}
