//! Degree-0 spectrum of a truncated cone with an absolute lid, assembled
//! from the base spectrum and the radial problems.

use super::radial::{lid, lid_roots_below};
use super::{ConeBase, ConeSpace};
use crate::error::{invalid, Result};
use crate::graph::{secular_lowest, secular_spectrum_0, MetricGraph, VertexCondition};
use crate::spectrum::{SolverInfo, SpectralResult};

/// Eigenvalues on the cone that agree within this relative tolerance are
/// reported as one cluster.
pub const MERGE_TOL: f64 = 1e-9;
const ROOT_TOL: f64 = 1e-14;

/// Legs of length `eps` from the cone vertex to each base point, with an
/// absolute lid at the far ends.
pub fn point_cone_graph(points: usize, eps: f64) -> Result<MetricGraph> {
    let edges: Vec<_> = (1..=points).map(|i| (0, i, eps)).collect();
    let mut g = MetricGraph::from_lengths(points + 1, &edges)?;
    g.vertices[0] = "apex".into();
    for v in 1..=points {
        g.conditions[v] = VertexCondition::Neumann;
    }
    Ok(g)
}

/// Every `(μ, radial root)` value at or below `threshold`, for base
/// eigenvalues `mu` that must include all `μ ≤ threshold·ε²`.
fn merged_below(mu: &[f64], eps: f64, threshold: f64, cone_dim: usize) -> Result<Vec<(f64, f64)>> {
    let alpha = (cone_dim as f64 - 2.0) / 2.0;
    let x_max = threshold.sqrt() * eps;
    let mut out = Vec::new();
    for &m in mu {
        // λ ≥ μ/ε² on every branch, so larger μ cannot contribute.
        if m > threshold * eps * eps {
            continue;
        }
        if m == 0.0 {
            out.push((0.0, 0.0));
        }
        let nu = (m + alpha * alpha).sqrt();
        for x in lid_roots_below(nu, alpha, x_max, ROOT_TOL)? {
            out.push((x * x / (eps * eps), lid(nu, alpha, x)?.abs()));
        }
    }
    Ok(out)
}

/// Lowest `count` eigenvalues of the degree-0 Laplacian on `CY(ε)`.
pub fn cone_graph_spectrum(base: &ConeBase, eps: f64, count: usize) -> Result<SpectralResult> {
    let cone = ConeSpace::new(base.clone(), eps)?;
    if count == 0 {
        return Err(invalid("count must be at least 1"));
    }
    match &cone.base {
        ConeBase::Points { distances } => {
            let g = point_cone_graph(distances.len(), eps)?;
            let mut r = secular_lowest(&g, count, 1e-13)?;
            r.solver.method = "cone-point-base/secular".into();
            r.solver.parameters.insert("eps".into(), eps);
            r.solver.parameters.insert("points".into(), distances.len() as f64);
            Ok(r)
        }
        ConeBase::Graph(g) => {
            // Weyl-type starting guess for the threshold, doubled until enough
            // values are certified.
            let mut threshold = (count as f64 + 1.0) * 4.0 / (eps * eps) + 10.0 / (eps * eps);
            for _ in 0..40 {
                let base = secular_spectrum_0(g, (0.0, threshold * eps * eps), 1e-13)?;
                let values = merged_below(&base.values(), eps, threshold, 2)?;
                if let Some(r) = finish(values, count, "cone-graph-base/bessel", eps, threshold)? {
                    return Ok(r);
                }
                threshold *= 2.0;
            }
            Err(invalid("cone spectrum threshold search did not terminate"))
        }
        ConeBase::Spectrum { mu, dim } => {
            let cone_dim = dim + 1;
            if cone_dim < 2 {
                return Err(invalid("a zero-dimensional base must be given as a point set"));
            }
            let limit = mu.last().copied().unwrap_or(0.0) / (eps * eps);
            let values = merged_below(mu, eps, limit, cone_dim)?;
            match finish(values.clone(), count, "cone-spectrum-base/bessel", eps, limit)? {
                Some(r) => Ok(r),
                None => {
                    // The list runs out before `count` certified values.
                    let mut r = SpectralResult::from_values(0, values, MERGE_TOL, info("cone-spectrum-base/bessel", eps, limit));
                    r.solver.flag("base-spectrum-exhausted");
                    r.truncate(count);
                    Ok(r)
                }
            }
        }
    }
}

fn info(method: &str, eps: f64, threshold: f64) -> SolverInfo {
    SolverInfo::new(method, ROOT_TOL).with_param("eps", eps).with_param("threshold", threshold)
}

/// Returns the lowest `count` values if the cluster at position `count` is
/// complete below the threshold.
fn finish(values: Vec<(f64, f64)>, count: usize, method: &str, eps: f64, threshold: f64) -> Result<Option<SpectralResult>> {
    let mut r = SpectralResult::from_values(0, values, MERGE_TOL, info(method, eps, threshold));
    if r.len() < count {
        return Ok(None);
    }
    let cut = r.eigenvalues[count - 1].lambda;
    if cut * (1.0 + MERGE_TOL) >= threshold {
        return Ok(None);
    }
    r.truncate(count);
    Ok(Some(r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::builders::circle;
    use std::f64::consts::PI;

    #[test]
    fn cone_over_a_point() {
        let r = cone_graph_spectrum(&ConeBase::points(1, 0.0), 1.0, 4).unwrap();
        for (k, v) in r.values().iter().enumerate() {
            let e = ((2 * k + 1) as f64 * PI / 2.0).powi(2);
            assert!((v - e).abs() < 1e-9 * e);
        }
    }

    #[test]
    fn cone_over_two_antipodal_points() {
        let r = cone_graph_spectrum(&ConeBase::points(2, PI), 1.0, 5).unwrap();
        for (k, v) in r.values().iter().enumerate() {
            let e = (k as f64 * PI / 2.0).powi(2);
            assert!((v - e).abs() < 1e-9 * e.max(1.0), "{:?}", r.values());
        }
    }

    #[test]
    fn cone_over_circle_is_the_neumann_disk() {
        let r = cone_graph_spectrum(&ConeBase::Graph(circle(2.0 * PI)), 1.0, 6).unwrap();
        let v = r.values();
        assert_eq!(v[0], 0.0);
        // j'_{1,1}² twice, then j'_{2,1}² twice, then j'_{0,1}².
        assert!((v[1] - 1.841_183_781_340_659f64.powi(2)).abs() < 1e-8);
        assert_eq!(r.eigenvalues[1].multiplicity, 2);
        assert!((v[5] - 3.831_705_970_207_512f64.powi(2)).abs() < 1e-8);
    }
}
