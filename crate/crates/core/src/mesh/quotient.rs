//! Spectra on the quotient `Ω^p / Ker d`, harmonic dimensions and the
//! assembly of full Hodge spectra.
//!
//! The positive part of the pencil `(d_pᵀ M_{p+1} d_p, M_p)` is the discrete
//! quotient spectrum: its null space is exactly `Ker d_p`, whose dimension is
//! computed exactly from the integer coboundary before the eigensolve, and
//! the eigenpairs above it are `M`-orthogonal to it.

use faer::{Mat, Side};

use super::cochain::CochainSystem;
use crate::error::{Error, Result};
use crate::linalg::exact::exact_rank;
use crate::linalg::{numerical_rank_with, solve_pencil_with, PencilMethod, PencilOptions, RANK_GAP_RATIO};
use crate::spectrum::{SolverInfo, SpectralResult};

/// Largest unknown count for the dense solves used in degrees `p ≥ 1`.
pub const DENSE_FORM_LIMIT: usize = 5000;
/// Largest matrix side for the singular-value ranks of [`harmonic_dim`].
pub const RANK_DENSE_LIMIT: usize = 6000;
/// The eigenvalue above `Ker d` must exceed the largest kernel value by this factor.
const KERNEL_SEPARATION: f64 = 1e3;

#[derive(Debug, Clone)]
pub struct QuotientOptions {
    pub tol: f64,
    pub seed: u64,
    /// Problems in degree 0 up to this size are solved densely.
    pub dense_limit: usize,
    /// Relative tolerance for grouping eigenvalues into clusters.
    pub cluster_tol: f64,
}

impl Default for QuotientOptions {
    fn default() -> Self {
        Self { tol: 1e-9, seed: 0, dense_limit: 800, cluster_tol: 1e-6 }
    }
}

/// Components of the free vertex graph that carry a constant in `Ker d_0`.
fn kernel_components(c: &CochainSystem) -> Vec<Vec<usize>> {
    let nv = c.simplices[0].len();
    let mut local = vec![usize::MAX; nv];
    for (i, &v) in c.free[0].iter().enumerate() {
        local[v] = i;
    }
    let n = c.size(0);
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut pinned = vec![false; n];
    if c.dim >= 1 {
        for &e in &c.free[1] {
            let s = &c.simplices[1][e];
            match (local[s[0]], local[s[1]]) {
                (usize::MAX, usize::MAX) => {}
                (a, usize::MAX) | (usize::MAX, a) => pinned[a] = true,
                (a, b) => {
                    let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                    parent[ra] = rb;
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, (Vec<usize>, bool)> = Default::default();
    for i in 0..n {
        let r = find(&mut parent, i);
        let g = groups.entry(r).or_default();
        g.0.push(i);
        g.1 |= pinned[i];
    }
    groups.into_values().filter(|(_, p)| !p).map(|(v, _)| v).collect()
}

/// Exact dimension of `Ker d_p` on the constrained space.
pub fn kernel_dim(c: &CochainSystem, p: usize) -> usize {
    if p == 0 {
        return kernel_components(c).len();
    }
    let n = c.size(p);
    if p >= c.dim {
        return n;
    }
    let mut rows: Vec<Vec<(usize, i64)>> = vec![Vec::new(); c.size(p + 1)];
    for (r, col, v) in c.d_entries(p) {
        rows[r].push((col, v));
    }
    for r in &mut rows {
        r.sort_unstable();
    }
    n - exact_rank(rows)
}

fn solve_options(c: &CochainSystem, p: usize, count: usize, opts: &QuotientOptions) -> Result<PencilOptions> {
    let n = c.size(p);
    let method = if p == 0 {
        if n <= opts.dense_limit {
            PencilMethod::Dense
        } else {
            PencilMethod::Krylov
        }
    } else if n <= DENSE_FORM_LIMIT {
        PencilMethod::Dense
    } else {
        return Err(Error::TooLarge { dimension: n, limit: DENSE_FORM_LIMIT });
    };
    Ok(PencilOptions { tol: opts.tol, seed: opts.seed, method, dense_limit: opts.dense_limit, ..PencilOptions::new(count) })
}

/// Lowest `count` positive eigenvalues in degree `p` with their
/// `M_p`-orthonormal eigenvectors (columns).
pub fn quotient_eigenpairs(c: &CochainSystem, p: usize, count: usize, opts: &QuotientOptions) -> Result<(SpectralResult, Mat<f64>)> {
    if p >= c.dim {
        return Err(Error::DegreeMismatch(format!("quotient spectrum needs p < {}, got {p}", c.dim)));
    }
    let n = c.size(p);
    let kappa = kernel_dim(c, p);
    if kappa + count > n {
        return Err(Error::CountExceedsDimension { requested: count, available: n - kappa });
    }
    let a = c.stiffness(p);
    let m = c.m(p);
    let popts = solve_options(c, p, kappa + count, opts)?;
    let pairs = solve_pencil_with(&a, &m, &popts)?;
    if let Some(&above) = pairs.values.get(kappa) {
        let below = if kappa > 0 { pairs.values[kappa - 1].abs() } else { 0.0 };
        if !(above > 0.0) || below * KERNEL_SEPARATION > above {
            return Err(Error::NoSpectralGap { gap_tol: above / KERNEL_SEPARATION, below, above });
        }
    }
    let values: Vec<(f64, f64)> = (kappa..kappa + count).map(|i| (pairs.values[i], pairs.residuals[i])).collect();
    let info = SolverInfo {
        seed: opts.seed,
        ..SolverInfo::new(format!("whitney-quotient/{}", pairs.method), opts.tol)
            .with_param("kernel_dim", kappa as f64)
            .with_param("unknowns", n as f64)
            .with_param("iterations", pairs.iterations as f64)
    };
    let vectors = pairs.vectors.subcols(kappa, count).to_owned();
    Ok((SpectralResult::from_values(p, values, opts.cluster_tol, info), vectors))
}

/// Lowest `count` positive eigenvalues `λ_{k,p}` of the quotient problem.
pub fn quotient_spectrum(c: &CochainSystem, p: usize, count: usize) -> Result<SpectralResult> {
    quotient_spectrum_with(c, p, count, &QuotientOptions::default())
}

pub fn quotient_spectrum_with(c: &CochainSystem, p: usize, count: usize, opts: &QuotientOptions) -> Result<SpectralResult> {
    Ok(quotient_eigenpairs(c, p, count, opts)?.0)
}

/// `dim Ker d_p − rank d_{p−1}` with singular-value ranks at relative cutoff
/// `gap_tol`, refusing ambiguous ranks.
pub fn harmonic_dim(c: &CochainSystem, p: usize, gap_tol: f64) -> Result<usize> {
    if p > c.dim {
        return Err(Error::DegreeMismatch(format!("degree {p} exceeds dimension {}", c.dim)));
    }
    let rank = |q: usize| -> Result<usize> {
        let d = c.d(q);
        if d.nrows().max(d.ncols()) > RANK_DENSE_LIMIT {
            return Err(Error::TooLarge { dimension: d.nrows().max(d.ncols()), limit: RANK_DENSE_LIMIT });
        }
        numerical_rank_with(d.to_dense().as_ref(), gap_tol, RANK_GAP_RATIO)
    };
    let ker = c.size(p) - if p < c.dim { rank(p)? } else { 0 };
    let im = if p > 0 { rank(p - 1)? } else { 0 };
    Ok(ker - im)
}

/// Full degree-`p` Hodge spectrum: `harmonic` zeros, the quotient spectrum of
/// degree `p` and that of degree `p − 1`. The merged list is cut where
/// either constituent ends, since values above that point may be missing.
pub fn hodge_assemble(p: usize, upper: Option<&SpectralResult>, lower: Option<&SpectralResult>, harmonic: usize) -> Result<SpectralResult> {
    if let Some(u) = upper {
        if u.degree != p {
            return Err(Error::DegreeMismatch(format!("expected degree {p}, got {}", u.degree)));
        }
    }
    if let Some(l) = lower {
        if p == 0 || l.degree + 1 != p {
            return Err(Error::DegreeMismatch(format!("expected degree {}, got {}", p as i64 - 1, l.degree)));
        }
    }
    let mut values: Vec<(f64, f64)> = vec![(0.0, 0.0); harmonic];
    let mut cut = f64::INFINITY;
    let mut tol: f64 = 1e-6;
    for r in [upper, lower].into_iter().flatten() {
        values.extend(r.eigenvalues.iter().map(|e| (e.lambda, e.residual)));
        if let Some(last) = r.eigenvalues.last() {
            cut = cut.min(last.lambda);
        }
        tol = tol.max(r.solver.tolerance);
    }
    values.retain(|v| v.0 <= cut * (1.0 + 1e-9));
    let info = SolverInfo::new("hodge-assembly", tol).with_param("harmonic_dim", harmonic as f64);
    Ok(SpectralResult::from_values(p, values, 1e-6, info))
}

/// `M_p`-orthonormal basis of `Ker d_p` on the constrained space.
pub fn kernel_basis(c: &CochainSystem, p: usize) -> Result<Mat<f64>> {
    let n = c.size(p);
    let m = c.m(p);
    if p == 0 {
        let comps = kernel_components(c);
        let mut b = Mat::zeros(n, comps.len());
        for (j, comp) in comps.iter().enumerate() {
            for &i in comp {
                b[(i, j)] = 1.0;
            }
            let mb = &m * b.col(j);
            let norm = (b.col(j).transpose() * &mb).sqrt();
            for &i in comp {
                b[(i, j)] /= norm;
            }
        }
        return Ok(b);
    }
    let kappa = kernel_dim(c, p);
    if kappa == 0 {
        return Ok(Mat::zeros(n, 0));
    }
    if n > DENSE_FORM_LIMIT {
        return Err(Error::TooLarge { dimension: n, limit: DENSE_FORM_LIMIT });
    }
    let opts = PencilOptions { method: PencilMethod::Dense, tol: 1e-8, ..PencilOptions::new(kappa) };
    Ok(solve_pencil_with(&c.stiffness(p), &m, &opts)?.vectors)
}

/// `ω − P_ker ω` for each column, with `P_ker` the `M_p`-orthogonal projection.
pub fn project_off_kernel(c: &CochainSystem, p: usize, forms: &Mat<f64>) -> Result<Mat<f64>> {
    let b = kernel_basis(c, p)?;
    if b.ncols() == 0 {
        return Ok(forms.clone());
    }
    let mf = &c.m(p) * forms;
    let coeffs = b.transpose() * &mf;
    Ok(forms - &b * &coeffs)
}

/// Largest Rayleigh quotient `‖dω‖² / ‖ω‖²_quotient` over the span of the
/// given cochains, which bounds `λ_{k,p}` from above for `k` = span size.
pub fn empirical_rayleigh(forms: &[Vec<f64>], c: &CochainSystem, p: usize) -> Result<f64> {
    let n = c.size(p);
    let k = forms.len();
    if k == 0 {
        return Err(Error::InvalidInput("empty subspace".into()));
    }
    if let Some(f) = forms.iter().find(|f| f.len() != n) {
        return Err(Error::InvalidInput(format!("cochain has {} entries, expected {n}", f.len())));
    }
    let f = Mat::from_fn(n, k, |i, j| forms[j][i]);
    let q = project_off_kernel(c, p, &f)?;
    let m = c.m(p);
    let g = q.transpose() * (&m * &q);
    let h = q.transpose() * (&c.stiffness(p) * &q);
    let raw = f.transpose() * (&m * &f);
    let g = Mat::from_fn(k, k, |i, j| 0.5 * (g[(i, j)] + g[(j, i)]));
    let h = Mat::from_fn(k, k, |i, j| 0.5 * (h[(i, j)] + h[(j, i)]));
    // Collapse test: smallest eigenvalue of the projected Gram matrix
    // relative to the largest squared norm before projection.
    let gs = g
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| Error::NoConvergence { iterations: 0, residual: f64::NAN })?;
    let scale = (0..k).map(|i| raw[(i, i)]).fold(0.0, f64::max);
    let ratio = gs[0] / scale;
    if !(ratio > 1e-10) {
        return Err(Error::SubspaceCollapse { ratio });
    }
    let llt = g.llt(Side::Lower).map_err(|_| Error::SubspaceCollapse { ratio })?;
    let l = llt.L();
    let mut x = h.clone();
    l.solve_lower_triangular_in_place(x.as_mut());
    let mut cm = x.transpose().to_owned();
    l.solve_lower_triangular_in_place(cm.as_mut());
    let cm = Mat::from_fn(k, k, |i, j| 0.5 * (cm[(i, j)] + cm[(j, i)]));
    let ev = cm
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| Error::NoConvergence { iterations: 0, residual: f64::NAN })?;
    Ok(ev[k - 1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::generators::{disk, flat_torus, interval, sphere};
    use std::f64::consts::PI;

    #[test]
    fn interval_relative_spectrum() {
        let c = interval(200).unwrap().cochains(true).unwrap();
        let r = quotient_spectrum(&c, 0, 4).unwrap();
        for (k, v) in r.values().iter().enumerate() {
            let e = ((k + 1) as f64 * PI).powi(2);
            assert!((v - e).abs() / e < 1e-3, "k={k}: {v} vs {e}");
        }
    }

    #[test]
    fn harmonic_dims() {
        let gap = 1e-8;
        let t = flat_torus(4, 4, 1.0, 1.0).unwrap().cochains(false).unwrap();
        assert_eq!((0..=2).map(|p| harmonic_dim(&t, p, gap).unwrap()).collect::<Vec<_>>(), vec![1, 2, 1]);
        let s = sphere(2).unwrap().cochains(false).unwrap();
        assert_eq!((0..=2).map(|p| harmonic_dim(&s, p, gap).unwrap()).collect::<Vec<_>>(), vec![1, 0, 1]);
        let d = disk(3).unwrap().cochains(true).unwrap();
        assert_eq!((0..=2).map(|p| harmonic_dim(&d, p, gap).unwrap()).collect::<Vec<_>>(), vec![0, 0, 1]);
    }

    #[test]
    fn exact_kernel_dims() {
        let t = flat_torus(4, 4, 1.0, 1.0).unwrap().cochains(false).unwrap();
        assert_eq!(kernel_dim(&t, 0), 1);
        // Ker d_1 = Im d_0 ⊕ H¹: (16 − 1) + 2.
        assert_eq!(kernel_dim(&t, 1), 17);
    }

    #[test]
    fn torus_degree_one_doubles_multiplicity() {
        // Degrees 0 and 1 approximate 4π² from opposite sides, so the
        // doubling holds up to discretization error.
        let c = flat_torus(16, 16, 1.0, 1.0).unwrap().cochains(false).unwrap();
        let q0 = quotient_spectrum(&c, 0, 6).unwrap();
        let q1 = quotient_spectrum(&c, 1, 6).unwrap();
        let h = hodge_assemble(1, Some(&q1), Some(&q0), 2).unwrap();
        let target = 4.0 * PI * PI;
        let near = |r: &SpectralResult| r.values().iter().filter(|v| (*v - target).abs() < 0.03 * target).count();
        assert_eq!(near(&q0), 4);
        assert_eq!(near(&h), 8);
        assert_eq!(h.values().iter().filter(|v| **v == 0.0).count(), 2);
    }

    #[test]
    fn rayleigh_of_eigenvectors_is_attained() {
        let c = flat_torus(6, 6, 1.0, 1.0).unwrap().cochains(false).unwrap();
        let (r, v) = quotient_eigenpairs(&c, 0, 5, &QuotientOptions::default()).unwrap();
        let forms: Vec<Vec<f64>> = (0..5).map(|j| (0..v.nrows()).map(|i| v[(i, j)]).collect()).collect();
        let val = empirical_rayleigh(&forms, &c, 0).unwrap();
        assert!((val - r.values()[4]).abs() < 1e-8 * val);
    }

    #[test]
    fn kernel_only_subspace_collapses() {
        let c = flat_torus(4, 4, 1.0, 1.0).unwrap().cochains(false).unwrap();
        let ones = vec![vec![1.0; 16]];
        assert!(matches!(empirical_rayleigh(&ones, &c, 0), Err(Error::SubspaceCollapse { .. })));
    }

    #[test]
    fn assembly_rejects_degree_mismatch() {
        let c = interval(20).unwrap().cochains(true).unwrap();
        let q0 = quotient_spectrum(&c, 0, 3).unwrap();
        assert!(hodge_assemble(0, Some(&q0), Some(&q0), 0).is_err());
        let h = hodge_assemble(1, None, Some(&q0), 1).unwrap();
        assert_eq!(h.values()[0], 0.0);
        assert_eq!(&h.values()[1..], &q0.values()[..]);
    }
}
