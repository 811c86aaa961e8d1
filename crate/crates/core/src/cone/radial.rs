//! Radial eigenproblems on a truncated cone with an absolute (Neumann) lid.
//!
//! On a cone of dimension `k` over a base eigenfunction with eigenvalue `μ`,
//! regular solutions are `r^{−α} J_ν(√λ r)` with `α = (k−2)/2` and
//! `ν = sqrt(μ + α²)`. The lid condition at `r = ε` becomes
//! `x J_ν'(x) − α J_ν(x) = 0` with `x = √λ ε`, so `λ = x²/ε²`.

use super::bessel::{bessel_j_pair, MAX_ORDER};
use crate::error::{invalid, Error, Result};
use crate::spectrum::{SolverInfo, SpectralResult};

/// Lid function `x J_ν'(x) − α J_ν(x) = (ν − α) J_ν(x) − x J_{ν+1}(x)`.
pub(super) fn lid(nu: f64, alpha: f64, x: f64) -> Result<f64> {
    let (j, j1) = bessel_j_pair(nu, x)?;
    Ok((nu - alpha) * j - x * j1)
}

/// First `count` positive roots `x` of the lid function.
pub fn lid_roots(nu: f64, alpha: f64, count: usize, tol: f64) -> Result<Vec<f64>> {
    scan_roots(nu, alpha, tol, |roots, _| roots.len() >= count)
}

/// All positive roots `x ≤ x_max` of the lid function.
pub fn lid_roots_below(nu: f64, alpha: f64, x_max: f64, tol: f64) -> Result<Vec<f64>> {
    let mut roots = scan_roots(nu, alpha, tol, |_, x| x > x_max)?;
    roots.retain(|&x| x <= x_max);
    Ok(roots)
}

fn scan_roots(nu: f64, alpha: f64, tol: f64, done: impl Fn(&[f64], f64) -> bool) -> Result<Vec<f64>> {
    if !(0.0..=MAX_ORDER).contains(&nu) {
        return Err(Error::BesselRange { order: nu, argument: 0.0 });
    }
    let mut roots = Vec::new();
    // Geometric grid near the origin (roots approach 0 as ν → α), then a
    // uniform grid well below the root spacing π.
    let grid: Vec<f64> = (0..60).map(|i| 1e-6 * 10f64.powf(i as f64 / 10.0)).collect();
    let step = 0.05;
    let mut x = 1.0;
    let mut prev_x = grid[0];
    let mut prev = lid(nu, alpha, prev_x)?;
    let mut i = 1;
    while !done(&roots, prev_x) {
        let cur_x = if i < grid.len() {
            grid[i]
        } else {
            x += step;
            x
        };
        i += 1;
        if cur_x > super::bessel::MAX_ARGUMENT {
            return Err(Error::BesselRange { order: nu, argument: cur_x });
        }
        let cur = lid(nu, alpha, cur_x)?;
        if prev != 0.0 && cur != 0.0 && (prev > 0.0) != (cur > 0.0) {
            roots.push(bisect(nu, alpha, prev_x, cur_x, prev, tol)?);
        } else if cur == 0.0 {
            roots.push(cur_x);
        }
        prev_x = cur_x;
        prev = cur;
    }
    Ok(roots)
}

fn bisect(nu: f64, alpha: f64, mut lo: f64, mut hi: f64, mut flo: f64, tol: f64) -> Result<f64> {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol * mid {
            return Ok(mid);
        }
        let fm = lid(nu, alpha, mid)?;
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
    Err(Error::RootBracketing { lambda: lo * lo, reason: "radial bisection did not contract".into() })
}

/// First `count` eigenvalues of the radial problem on a two-dimensional cone
/// (one-dimensional base), `λ = 0` included when `μ = 0`.
pub fn radial_spectrum(mu: f64, eps: f64, count: usize, tol: f64) -> Result<SpectralResult> {
    radial_spectrum_in_dim(mu, eps, count, tol, 2)
}

/// As [`radial_spectrum`] for a cone of dimension `cone_dim ≥ 2`.
pub fn radial_spectrum_in_dim(mu: f64, eps: f64, count: usize, tol: f64, cone_dim: usize) -> Result<SpectralResult> {
    if !(mu >= 0.0 && mu.is_finite()) {
        return Err(invalid("base eigenvalue must be nonnegative"));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(invalid("cone radius must be positive"));
    }
    if count == 0 {
        return Err(invalid("count must be at least 1"));
    }
    if cone_dim < 2 {
        return Err(invalid("radial problems need a cone of dimension at least 2"));
    }
    let alpha = (cone_dim as f64 - 2.0) / 2.0;
    let nu = (mu + alpha * alpha).sqrt();
    let mut values = Vec::with_capacity(count);
    if mu == 0.0 {
        values.push((0.0, 0.0));
    }
    let need = count - values.len();
    for x in lid_roots(nu, alpha, need, tol)? {
        let residual = lid(nu, alpha, x)?.abs();
        values.push((x * x / (eps * eps), residual));
    }
    let info = SolverInfo::new("bessel-lid-roots", tol)
        .with_param("mu", mu)
        .with_param("nu", nu)
        .with_param("eps", eps)
        .with_param("cone_dim", cone_dim as f64);
    Ok(SpectralResult::from_values(0, values, 1e-9, info))
}
