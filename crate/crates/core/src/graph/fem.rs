//! Piecewise-linear finite elements for the degree-0 form Laplacian.
//!
//! Every edge carries its own nodes, endpoints included. At each balanced
//! vertex one endpoint unknown (the pivot) is eliminated through the balance
//! equation; the derivative condition is natural and is not imposed.

use faer::Col;

use super::{MetricGraph, VertexCondition};
use crate::error::{invalid, Error, Result};
use crate::linalg::{csc_congruence, csc_from_triplets, solve_pencil_with, Csc, PencilOptions};
use crate::spectrum::{SolverInfo, SpectralResult};

/// Assembled finite-element model of a metric graph.
#[derive(Debug, Clone)]
pub struct GraphFem {
    pub nodes_per_edge: usize,
    /// Offset of each edge's first node in the raw unknown vector.
    pub offsets: Vec<usize>,
    pub raw_dim: usize,
    /// Raw stiffness and mass (block diagonal over edges).
    pub stiffness_raw: Csc,
    pub mass_raw: Csc,
    /// Prolongation from the constrained space to raw nodal values.
    pub prolongation: Csc,
    pub stiffness: Csc,
    pub mass: Csc,
}

impl GraphFem {
    pub fn new(g: &MetricGraph, nodes_per_edge: usize) -> Result<Self> {
        g.validate()?;
        if nodes_per_edge < 2 {
            return Err(invalid("nodes_per_edge must be at least 2"));
        }
        let np = nodes_per_edge;
        let offsets: Vec<usize> = (0..g.num_edges()).map(|e| e * np).collect();
        let raw_dim = g.num_edges() * np;
        let mut a = Vec::new();
        let mut m = Vec::new();
        for (e, edge) in g.edges.iter().enumerate() {
            let h = edge.length / (np - 1) as f64;
            for i in 0..np - 1 {
                let (p, q) = (offsets[e] + i, offsets[e] + i + 1);
                for (r, c, sa, sm) in [(p, p, 1.0, 2.0), (q, q, 1.0, 2.0), (p, q, -1.0, 1.0), (q, p, -1.0, 1.0)] {
                    a.push((r, c, sa / h));
                    m.push((r, c, sm * h / 6.0));
                }
            }
        }
        let stiffness_raw = csc_from_triplets(raw_dim, raw_dim, &a);
        let mass_raw = csc_from_triplets(raw_dim, raw_dim, &m);

        // Pivot ends: value = −σ_p Σ_{j≠p} σ_j f_j with σ = ±1.
        let ends = g.ends();
        let node_of = |edge: usize, at_head: bool| offsets[edge] + if at_head { np - 1 } else { 0 };
        let mut pivot_of = vec![None; raw_dim];
        for (v, vends) in ends.iter().enumerate() {
            if g.conditions[v] == VertexCondition::Balance {
                let p = vends[0];
                let others: Vec<(usize, f64)> =
                    vends[1..].iter().map(|e| (node_of(e.edge, e.at_head), e.balance_sign())).collect();
                pivot_of[node_of(p.edge, p.at_head)] = Some((p.balance_sign(), others));
            }
        }
        let mut reduced_index = vec![usize::MAX; raw_dim];
        let mut nred = 0;
        for i in 0..raw_dim {
            if pivot_of[i].is_none() {
                reduced_index[i] = nred;
                nred += 1;
            }
        }
        let mut p = Vec::new();
        for i in 0..raw_dim {
            match &pivot_of[i] {
                None => p.push((i, reduced_index[i], 1.0)),
                Some((sp, others)) => {
                    for &(node, s) in others {
                        // Pivot nodes never appear among the other ends of
                        // their own vertex, and each node is a pivot of at
                        // most one vertex.
                        p.push((i, reduced_index[node], -sp * s));
                    }
                }
            }
        }
        let prolongation = csc_from_triplets(raw_dim, nred, &p);
        let stiffness = csc_congruence(&prolongation, &stiffness_raw);
        let mass = csc_congruence(&prolongation, &mass_raw);
        Ok(Self { nodes_per_edge, offsets, raw_dim, stiffness_raw, mass_raw, prolongation, stiffness, mass })
    }

    pub fn dim(&self) -> usize {
        self.prolongation.ncols()
    }

    /// Raw nodal values of a constrained coefficient vector.
    pub fn prolong(&self, g: &Col<f64>) -> Col<f64> {
        &self.prolongation * g
    }
}

/// Lowest `count` eigenvalues of the stiffness/mass pencil on the balanced
/// piecewise-linear space.
pub fn fem_spectrum_0(g: &MetricGraph, nodes_per_edge: usize, count: usize) -> Result<SpectralResult> {
    let fem = GraphFem::new(g, nodes_per_edge)?;
    if count > fem.dim() {
        return Err(Error::CountExceedsDimension { requested: count, available: fem.dim() });
    }
    let opts = PencilOptions::new(count);
    let pairs = solve_pencil_with(&fem.stiffness, &fem.mass, &opts)?;
    let info = SolverInfo::new(format!("fem-p1/{}", pairs.method), opts.tol)
        .with_param("nodes_per_edge", nodes_per_edge as f64)
        .with_param("dimension", fem.dim() as f64);
    let values = pairs.values.iter().zip(&pairs.residuals).map(|(&v, &r)| (v, r)).collect();
    Ok(SpectralResult::from_values(0, values, 1e-7, info))
}

#[cfg(test)]
mod tests {
    use super::super::builders::*;
    use super::super::secular::secular_lowest;
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn segment_dirichlet() {
        let r = fem_spectrum_0(&segment(1.0), 200, 3).unwrap();
        assert!((r.values()[0] / (PI * PI) - 1.0).abs() < 1e-4);
    }

    #[test]
    fn circle_periodic() {
        let r = fem_spectrum_0(&circle(2.0 * PI), 400, 5).unwrap();
        let v = r.values();
        assert!(v[0].abs() < 1e-9);
        assert!((v[1] - 1.0).abs() < 1e-3 && (v[2] - 1.0).abs() < 1e-3, "{v:?}");
    }

    #[test]
    fn star_agrees_with_secular() {
        let g = star(3, 1.0);
        let fem = fem_spectrum_0(&g, 300, 10).unwrap().values();
        let sec = secular_lowest(&g, 10, 1e-13).unwrap().values();
        for (f, s) in fem.iter().zip(&sec) {
            assert!((f - s).abs() <= 1e-3 * s, "{f} vs {s}");
        }
    }

    #[test]
    fn too_many_eigenvalues_is_an_error() {
        assert!(matches!(
            fem_spectrum_0(&segment(1.0), 3, 5),
            Err(Error::CountExceedsDimension { .. })
        ));
    }
}
