//! Discrete check that `d*` is the adjoint of `d` on the balanced domain.
//!
//! Functions are piecewise linear and balanced at every vertex; 1-forms are
//! piecewise linear with the common endpoint value `F_v` at every adjoining
//! end (zero at absolute lids). Both pairings are integrated exactly per
//! element, so the defect is pure round-off for the correct convention.

use faer::Col;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::fem::GraphFem;
use super::{MetricGraph, VertexCondition};
use crate::error::{invalid, Result};

/// Endpoint convention for the sampled 1-forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignConvention {
    /// `ω_e = F_v` at every end in the edge's own coordinate.
    Oriented,
    /// As `Oriented`, but the given edge's head value is `−F_v`.
    FlipIncoming(usize),
}

#[derive(Debug, Clone)]
pub struct AdjointOptions {
    pub trials: usize,
    pub seed: u64,
    pub nodes_per_edge: usize,
    pub convention: SignConvention,
}

impl AdjointOptions {
    pub fn new(trials: usize, seed: u64) -> Self {
        Self { trials, seed, nodes_per_edge: 9, convention: SignConvention::Oriented }
    }
}

/// Largest normalized defect `|⟨df, ω⟩ − ⟨f, d*ω⟩| / (‖f‖‖ω‖)` over random samples.
pub fn adjointness_defect(g: &MetricGraph, trials: usize, seed: u64) -> Result<f64> {
    adjointness_defect_with(g, &AdjointOptions::new(trials, seed))
}

pub fn adjointness_defect_with(g: &MetricGraph, opts: &AdjointOptions) -> Result<f64> {
    if opts.trials == 0 {
        return Err(invalid("trials must be at least 1"));
    }
    if let SignConvention::FlipIncoming(e) = opts.convention {
        if e >= g.num_edges() {
            return Err(invalid(format!("no edge with index {e}")));
        }
    }
    let fem = GraphFem::new(g, opts.nodes_per_edge)?;
    let np = opts.nodes_per_edge;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut worst = 0.0f64;
    for _ in 0..opts.trials {
        let coeffs = Col::<f64>::from_fn(fem.dim(), |_| rng.random_range(-1.0..1.0));
        let f = fem.prolong(&coeffs);
        let flux: Vec<f64> = g
            .conditions
            .iter()
            .map(|c| match c {
                VertexCondition::Balance => rng.random_range(-1.0..1.0),
                VertexCondition::Neumann => 0.0,
            })
            .collect();
        let mut omega = vec![0.0; fem.raw_dim];
        for (e, edge) in g.edges.iter().enumerate() {
            let o = fem.offsets[e];
            for i in 1..np - 1 {
                omega[o + i] = rng.random_range(-1.0..1.0);
            }
            omega[o] = flux[edge.tail];
            omega[o + np - 1] = flux[edge.head];
            if opts.convention == SignConvention::FlipIncoming(e) {
                omega[o + np - 1] = -flux[edge.head];
            }
        }
        let (mut lhs, mut rhs, mut nf, mut nw) = (0.0, 0.0, 0.0, 0.0);
        for (e, edge) in g.edges.iter().enumerate() {
            let h = edge.length / (np - 1) as f64;
            let o = fem.offsets[e];
            for i in 0..np - 1 {
                let (f0, f1) = (f[o + i], f[o + i + 1]);
                let (w0, w1) = (omega[o + i], omega[o + i + 1]);
                // df = (f1 − f0)/h on the element, d*ω = −(w1 − w0)/h.
                lhs += (f1 - f0) * (w0 + w1) / 2.0;
                rhs += -(w1 - w0) * (f0 + f1) / 2.0;
                nf += h * (f0 * f0 + f0 * f1 + f1 * f1) / 3.0;
                nw += h * (w0 * w0 + w0 * w1 + w1 * w1) / 3.0;
            }
        }
        let norm = (nf * nw).sqrt();
        if norm > 0.0 {
            worst = worst.max((lhs - rhs).abs() / norm);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::super::builders::*;
    use super::*;

    #[test]
    fn correct_convention_is_adjoint() {
        for g in [figure_eight(1.0, 2.0), star(3, 1.0), theta(1.0, 1.5, 2.0), random_connected(7, 3, 3)] {
            assert!(adjointness_defect(&g, 50, 1).unwrap() <= 1e-10);
        }
    }

    #[test]
    fn segment_defect_is_zero() {
        assert!(adjointness_defect(&segment(1.0), 20, 0).unwrap() < 1e-14);
    }

    #[test]
    fn flipped_sign_is_detected() {
        let g = star(3, 1.0).clone();
        // Edge 0 points away from the centre, so reverse it to make the
        // centre its head.
        let g = crate::graph::orientation::reverse_edge_graph(&g, 0);
        let mut opts = AdjointOptions::new(100, 4);
        opts.convention = SignConvention::FlipIncoming(0);
        assert!(adjointness_defect_with(&g, &opts).unwrap() >= 0.1);
    }
}
