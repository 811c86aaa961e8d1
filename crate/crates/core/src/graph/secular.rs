//! Exact degree-0 spectrum by root-finding on the vertex-condition matrix.
//!
//! On each edge `f = a·cos(ks) + b·sin(ks)/k`, so `f(0) = a` and `f'(0) = b`
//! and the basis stays regular at `k = 0`. Each vertex contributes as many
//! rows as it has edge ends, giving a square `2E × 2E` matrix `C(k)`.
//! Positive row and column scalings keep entries of order one without
//! changing the sign of `det C` or its nullity.

use faer::Mat;

use super::{MetricGraph, VertexCondition};
use crate::error::{invalid, Error, Result};
use crate::spectrum::{SolverInfo, SpectralResult};

/// Relative singular-value threshold for reading multiplicities.
pub const NULLITY_CUTOFF: f64 = 1e-8;
/// Roots closer than this (relative) are merged.
pub const MERGE_TOL: f64 = 1e-7;

#[derive(Debug, Clone)]
pub struct SecularOptions {
    /// Relative tolerance on each root in `k = √λ`.
    pub tol: f64,
    /// Scan step as a fraction of `π / L_total`.
    pub step_fraction: f64,
}

impl Default for SecularOptions {
    fn default() -> Self {
        Self { tol: 1e-13, step_fraction: 1.0 / 16.0 }
    }
}

/// Vertex-condition matrix at wavenumber `k ≥ 0`.
pub fn condition_matrix(g: &MetricGraph, k: f64) -> Mat<f64> {
    let ne = g.num_edges();
    let ends = g.ends();
    let lref = g.min_length();
    let dscale = 1.0 / k.max(1.0 / lref);
    let mut c = Mat::<f64>::zeros(2 * ne, 2 * ne);
    // Value and derivative of the two basis functions at an end, with the
    // b column already multiplied by its scale max(k, 1/L).
    let end_rows = |edge: usize, at_head: bool| -> ([f64; 2], [f64; 2]) {
        let l = g.edges[edge].length;
        let bs = k.max(1.0 / l);
        if !at_head {
            return ([1.0, 0.0], [0.0, bs]);
        }
        let (s, co) = (k * l).sin_cos();
        let sinc = if k * l < 1e-8 { l * (1.0 - (k * l).powi(2) / 6.0) } else { s / k };
        ([co, sinc * bs], [-k * s, co * bs])
    };
    let mut row = 0;
    for (v, vends) in ends.iter().enumerate() {
        match g.conditions[v] {
            VertexCondition::Balance => {
                for end in vends {
                    let (val, _) = end_rows(end.edge, end.at_head);
                    let sign = end.balance_sign();
                    c[(row, 2 * end.edge)] += sign * val[0];
                    c[(row, 2 * end.edge + 1)] += sign * val[1];
                }
                row += 1;
                let first = vends[0];
                let (_, d0) = end_rows(first.edge, first.at_head);
                for end in &vends[1..] {
                    let (_, d) = end_rows(end.edge, end.at_head);
                    c[(row, 2 * first.edge)] += d0[0] * dscale;
                    c[(row, 2 * first.edge + 1)] += d0[1] * dscale;
                    c[(row, 2 * end.edge)] -= d[0] * dscale;
                    c[(row, 2 * end.edge + 1)] -= d[1] * dscale;
                    row += 1;
                }
            }
            VertexCondition::Neumann => {
                for end in vends {
                    let (_, d) = end_rows(end.edge, end.at_head);
                    c[(row, 2 * end.edge)] += d[0] * dscale;
                    c[(row, 2 * end.edge + 1)] += d[1] * dscale;
                    row += 1;
                }
            }
        }
    }
    debug_assert_eq!(row, 2 * ne);
    c
}

fn singular_values(m: &Mat<f64>) -> Vec<f64> {
    m.singular_values().unwrap_or_default()
}

/// Reference scale for singular values. Entries of the scaled matrix are
/// bounded by one, but the whole matrix can vanish at a root (the circle), so
/// the largest singular value alone is not a usable reference.
fn reference_scale(sv: &[f64]) -> f64 {
    sv.first().copied().unwrap_or(0.0).max(1.0)
}

/// Smallest singular value of the condition matrix relative to the reference scale.
fn conditioning(g: &MetricGraph, k: f64) -> f64 {
    let sv = singular_values(&condition_matrix(g, k));
    sv.last().copied().unwrap_or(0.0) / reference_scale(&sv)
}

fn det(g: &MetricGraph, k: f64) -> f64 {
    let d = condition_matrix(g, k).determinant();
    if d.is_nan() {
        0.0
    } else {
        d
    }
}

/// Nullity and relative residual at `k`.
fn nullity(g: &MetricGraph, k: f64) -> (usize, f64) {
    let sv = singular_values(&condition_matrix(g, k));
    let scale = reference_scale(&sv);
    let null = sv.iter().filter(|&&s| s < NULLITY_CUTOFF * scale).count();
    (null, sv.last().copied().unwrap_or(0.0) / scale)
}

fn bisect(g: &MetricGraph, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let floor = tol * hi;
    let mut flo = det(g, lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= (tol * mid).max(floor) {
            return Ok(mid);
        }
        let fm = det(g, mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Err(Error::RootBracketing { lambda: (0.5 * (lo + hi)).powi(2), reason: "bisection did not contract".into() })
}

fn golden_min(g: &MetricGraph, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let mut f1 = conditioning(g, x1);
    let mut f2 = conditioning(g, x2);
    for _ in 0..300 {
        if b - a <= tol * b.abs().max(1e-300) {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = conditioning(g, x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = conditioning(g, x2);
        }
    }
    if f1 <= f2 {
        x1
    } else {
        x2
    }
}

/// All eigenvalues of the degree-0 Laplacian in `[lambda_lo, lambda_hi]`,
/// each listed with its multiplicity.
pub fn secular_spectrum_0(g: &MetricGraph, interval: (f64, f64), tol: f64) -> Result<SpectralResult> {
    let opts = SecularOptions { tol, ..SecularOptions::default() };
    secular_spectrum_with(g, interval, &opts)
}

pub fn secular_spectrum_with(g: &MetricGraph, interval: (f64, f64), opts: &SecularOptions) -> Result<SpectralResult> {
    g.validate()?;
    let (lam_lo, lam_hi) = interval;
    if !(lam_lo.is_finite() && lam_hi.is_finite() && lam_lo <= lam_hi) {
        return Err(invalid("search interval must be bounded and ordered"));
    }
    if !(opts.tol > 0.0) {
        return Err(invalid("tolerance must be positive"));
    }
    let k_lo = lam_lo.max(0.0).sqrt();
    let k_hi = lam_hi.max(0.0).sqrt();
    let step = opts.step_fraction * std::f64::consts::PI / g.total_length();
    let mut info = SolverInfo::new("secular-determinant", opts.tol)
        .with_param("scan_step_k", step)
        .with_param("nullity_cutoff", NULLITY_CUTOFF);

    // (k, nullity, residual)
    let mut roots: Vec<(f64, usize, f64)> = Vec::new();
    if lam_lo <= 0.0 && lam_hi >= 0.0 {
        let (null, res) = nullity(g, 0.0);
        if null > 0 {
            roots.push((0.0, null, res));
        }
    }

    let nsteps = (((k_hi - k_lo) / step).ceil() as usize).max(1);
    let grid: Vec<f64> = (0..=nsteps + 1).map(|i| k_lo + (k_hi - k_lo) * i as f64 / nsteps as f64).collect();
    let dets: Vec<f64> = grid.iter().map(|&k| det(g, k)).collect();
    let conds: Vec<f64> = grid.iter().map(|&k| conditioning(g, k)).collect();
    let mut candidates: Vec<f64> = Vec::new();
    for i in 0..nsteps {
        let (a, b) = (grid[i], grid[i + 1]);
        if a <= 0.0 && dets[i] == 0.0 {
            continue;
        }
        if dets[i] != 0.0 && dets[i + 1] != 0.0 && (dets[i] > 0.0) != (dets[i + 1] > 0.0) {
            candidates.push(bisect(g, a, b, opts.tol)?);
        } else if dets[i + 1] == 0.0 && b > 0.0 {
            candidates.push(b);
        }
    }
    for i in 1..=nsteps {
        if conds[i] < conds[i - 1] && conds[i] <= conds[i + 1] && grid[i] > 0.0 {
            let lo = grid[i - 1].max(1e-12);
            candidates.push(golden_min(g, lo, grid[i + 1], opts.tol));
        }
    }
    // Roots this close to zero are the k = 0 kernel, already read off above.
    let zero_band = 1e-6 * step;
    candidates.retain(|&k| k > zero_band);
    candidates.sort_by(f64::total_cmp);

    let mut merged: Vec<Vec<f64>> = Vec::new();
    for k in candidates {
        match merged.last_mut() {
            Some(cluster) if (k - cluster[0]).abs() <= MERGE_TOL * k => cluster.push(k),
            _ => merged.push(vec![k]),
        }
    }
    for cluster in merged {
        // Evaluate at the candidate with the smallest relative singular value.
        let (best, (null, res)) = cluster
            .iter()
            .map(|&k| (k, nullity(g, k)))
            .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
            .expect("cluster is non-empty");
        if null == 0 {
            continue;
        }
        let spread = cluster.iter().fold(0.0f64, |m, &k| m.max((k - best).abs()));
        if spread > 1e-10 * best {
            info.flag("clustered");
        }
        roots.push((best, null, res));
    }

    let mut values = Vec::new();
    for (k, null, res) in roots {
        let lambda = k * k;
        if lambda + 1e-12 < lam_lo || lambda > lam_hi {
            continue;
        }
        for _ in 0..null {
            values.push((lambda, res));
        }
    }
    Ok(SpectralResult::from_values(0, values, MERGE_TOL, info))
}

/// The lowest `count` eigenvalues (with multiplicity), widening the search
/// interval until enough have been found.
pub fn secular_lowest(g: &MetricGraph, count: usize, tol: f64) -> Result<SpectralResult> {
    let l = g.total_length();
    // Weyl: λ_k ≈ (πk/L)²; start a bit beyond that.
    let mut hi = (std::f64::consts::PI * (count as f64 + 2.0) / l).powi(2) * 1.5 + 1.0;
    for _ in 0..20 {
        let mut r = secular_spectrum_0(g, (0.0, hi), tol)?;
        if count == 0 {
            r.truncate(0);
            return Ok(r);
        }
        if r.len() > count {
            // The boundary cluster is complete once something lies beyond it.
            let cut = r.eigenvalues[count - 1].lambda;
            let last = r.eigenvalues[r.len() - 1].lambda;
            if last > cut * (1.0 + MERGE_TOL) {
                r.truncate(count);
                r.solver.parameters.insert("lambda_max_searched".into(), hi);
                return Ok(r);
            }
        }
        hi *= 2.0;
    }
    Err(Error::RootBracketing { lambda: hi, reason: format!("could not find {count} eigenvalues") })
}

#[cfg(test)]
mod tests {
    use super::super::builders::*;
    use super::*;
    use crate::spectrum::kernel_dimension;
    use std::f64::consts::PI;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(1e-12)
    }

    #[test]
    fn circle_periodic_spectrum() {
        let r = secular_lowest(&circle(2.0 * PI), 9, 1e-13).unwrap();
        let expect = [0.0, 1.0, 1.0, 4.0, 4.0, 9.0, 9.0, 16.0, 16.0];
        for (e, x) in r.values().iter().zip(expect) {
            assert!((e - x).abs() < 1e-9, "{:?}", r.values());
        }
        assert_eq!(r.eigenvalues[1].multiplicity, 2);
    }

    #[test]
    fn segment_dirichlet_spectrum() {
        let r = secular_lowest(&segment(1.0), 5, 1e-13).unwrap();
        for (i, v) in r.values().iter().enumerate() {
            let k = (i + 1) as f64;
            assert!(close(*v, k * k * PI * PI, 1e-10));
        }
    }

    #[test]
    fn figure_eight_kernel() {
        let r = secular_lowest(&figure_eight(2.0 * PI, 2.0 * PI), 6, 1e-13).unwrap();
        assert_eq!(kernel_dimension(&r, 1e-6).unwrap(), 2);
    }

    #[test]
    fn star_with_dirichlet_leaves() {
        // Three unit legs: the centre is balanced and the leaves are Dirichlet.
        // Hand analysis: cos k = 0 gives a 2-dim space (a_i summing to zero),
        // sin k = 0 a 1-dim space (common slope).
        let r = secular_lowest(&star(3, 1.0), 6, 1e-13).unwrap();
        let v = r.values();
        let expect = [0.25, 0.25, 1.0, 2.25, 2.25, 4.0].map(|c| c * PI * PI);
        for (x, e) in v.iter().zip(expect) {
            assert!(close(*x, e, 1e-10), "{v:?}");
        }
    }
}
