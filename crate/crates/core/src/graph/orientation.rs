//! Edge reversal and the accompanying sign change of edge profiles.

use serde::{Deserialize, Serialize};

use super::MetricGraph;
use crate::error::{invalid, Result};

/// Values of a function (or 1-form coefficient) on an edge's nodes,
/// ordered by increasing oriented arclength.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeProfile {
    pub edge: String,
    pub values: Vec<f64>,
}

impl EdgeProfile {
    pub fn new(edge: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(invalid("an edge profile needs at least two nodes"));
        }
        Ok(Self { edge: edge.into(), values })
    }
}

/// `G` with edge `e` reversed.
pub fn reverse_edge_graph(g: &MetricGraph, e: usize) -> MetricGraph {
    let mut out = g.clone();
    let edge = &mut out.edges[e];
    std::mem::swap(&mut edge.tail, &mut edge.head);
    out
}

/// Reverses edge `id` and maps profiles so that they stay in the domain:
/// on the reversed edge `f' = −f`, read in the new orientation (node order
/// reversed); other edges are unchanged.
pub fn reverse_edge(g: &MetricGraph, id: &str, profiles: &[EdgeProfile]) -> Result<(MetricGraph, Vec<EdgeProfile>)> {
    let e = g.edge_index(id).ok_or_else(|| invalid(format!("no edge with id {id}")))?;
    let out = reverse_edge_graph(g, e);
    let mapped = profiles
        .iter()
        .map(|p| {
            if p.edge == id {
                EdgeProfile { edge: p.edge.clone(), values: p.values.iter().rev().map(|v| -v).collect() }
            } else {
                p.clone()
            }
        })
        .collect();
    Ok((out, mapped))
}

#[cfg(test)]
mod tests {
    use super::super::builders::*;
    use super::super::secular::secular_lowest;
    use super::*;

    #[test]
    fn reversal_is_an_involution() {
        let g = theta(1.0, 1.3, 0.7);
        let f = vec![EdgeProfile::new("e1", vec![1.0, 2.0, 3.0]).unwrap()];
        let (g1, f1) = reverse_edge(&g, "e1", &f).unwrap();
        assert_eq!(f1[0].values, vec![-3.0, -2.0, -1.0]);
        let (g2, f2) = reverse_edge(&g1, "e1", &f1).unwrap();
        assert_eq!(g2, g);
        assert_eq!(f2, f);
    }

    #[test]
    fn spectrum_is_orientation_invariant() {
        let g = theta(1.0, 1.3, 0.7);
        let (g1, _) = reverse_edge(&g, "e2", &[]).unwrap();
        let a = secular_lowest(&g, 8, 1e-13).unwrap().values();
        let b = secular_lowest(&g1, 8, 1e-13).unwrap().values();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() <= 1e-9 * x.max(1.0));
        }
    }
}
