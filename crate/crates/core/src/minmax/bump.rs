//! Bump forms on the unit cube and their dyadic box families.
//!
//! The profile is `ψ = f dx_1 ∧ … ∧ dx_p` with `f(x) = s·Π_i b(x_i)`,
//! `b(t) = ((t − a)(β − t))³` on `[a, β]` and zero outside, a C² bump with
//! support strictly inside `(0, 1)`. The scale `s` normalizes `∫|ψ|² = 1`.

use faer::linalg::solvers::Solve;
use faer::{Col, Mat, Side};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::quadrature::{gauss_legendre, tensor_integrate};
use crate::mesh::generators::cube;
use crate::mesh::{CochainSystem, StratifiedComplex};

/// Support of the one-dimensional bump inside `(0, 1)`.
pub const SUPPORT: (f64, f64) = (0.1, 0.9);

/// How the quotient norm `N_ψ` is taken.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum QuotientConvention {
    /// Relative conditions on the chart: `Ker d` has no constants, `N_ψ = 1`
    /// in degree 0, and degree `p ≥ 1` projects off exact forms on the
    /// reference cube.
    Relative,
    /// Degree 0 on a closed space of the given volume: constants are in
    /// `Ker d`, so `N_ψ = 1 − (∫ψ)²/volume`.
    Closed { volume: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BumpProfile {
    pub n: usize,
    pub p: usize,
    /// Gauss–Legendre points per axis on the support.
    pub grid: usize,
    /// Cells per axis of the reference cube used for `N_ψ` when `p ≥ 1`.
    pub mesh_resolution: usize,
    pub scale: f64,
    /// `E_ψ = ∫|dψ|²`.
    pub energy: f64,
    /// `N_ψ`, the squared quotient norm of the normalized form.
    pub quotient_norm: f64,
    /// `∫|ψ|²` after normalization.
    pub mass: f64,
    pub normalized: bool,
    pub convention: QuotientConvention,
}

fn bump(t: f64) -> f64 {
    let (a, b) = SUPPORT;
    if t <= a || t >= b {
        0.0
    } else {
        ((t - a) * (b - t)).powi(3)
    }
}

fn bump_prime(t: f64) -> f64 {
    let (a, b) = SUPPORT;
    if t <= a || t >= b {
        0.0
    } else {
        let q = (t - a) * (b - t);
        3.0 * q * q * (a + b - 2.0 * t)
    }
}

impl BumpProfile {
    /// Coefficient `f(x)` of the normalized form at a point of the unit cube.
    pub fn coefficient(&self, x: &[f64]) -> f64 {
        self.scale * x.iter().map(|&t| bump(t)).product::<f64>()
    }

    /// `∂_j f(x)`.
    pub fn partial(&self, x: &[f64], j: usize) -> f64 {
        self.scale * x.iter().enumerate().map(|(i, &t)| if i == j { bump_prime(t) } else { bump(t) }).product::<f64>()
    }

    /// `|dψ|²(x) = Σ_{j ≥ p} (∂_j f)²`: only derivatives transverse to the
    /// first `p` axes survive the wedge with `dx_1 ∧ … ∧ dx_p`.
    pub fn energy_density(&self, x: &[f64]) -> f64 {
        (self.p..self.n).map(|j| self.partial(x, j).powi(2)).sum()
    }
}

/// Builds the normalized profile with `grid` quadrature points per axis, the
/// default reference mesh, and the given convention for `N_ψ`.
pub fn bump_profile(n: usize, p: usize, grid: usize, convention: QuotientConvention) -> Result<BumpProfile> {
    let res = if n <= 2 { 16 } else { 6 };
    bump_profile_with(n, p, grid, res, convention)
}

pub fn bump_profile_with(n: usize, p: usize, grid: usize, mesh_resolution: usize, convention: QuotientConvention) -> Result<BumpProfile> {
    if n == 0 {
        return Err(invalid("ambient dimension must be positive"));
    }
    if p >= n {
        return Err(invalid(format!("degree {p} must be below the dimension {n}, otherwise dψ vanishes")));
    }
    if grid < 2 {
        return Err(invalid("quadrature grid needs at least 2 points per axis"));
    }
    let (a, b) = SUPPORT;
    let lo = vec![a; n];
    let hi = vec![b; n];
    let mut prof = BumpProfile {
        n,
        p,
        grid,
        mesh_resolution,
        scale: 1.0,
        energy: 0.0,
        quotient_norm: 1.0,
        mass: 0.0,
        normalized: false,
        convention,
    };
    let raw = tensor_integrate(&lo, &hi, grid, |x| prof.coefficient(x).powi(2));
    prof.scale = 1.0 / raw.sqrt();
    prof.normalized = true;
    prof.mass = tensor_integrate(&lo, &hi, grid, |x| prof.coefficient(x).powi(2));
    prof.energy = tensor_integrate(&lo, &hi, grid, |x| prof.energy_density(x));
    if !(prof.energy > 0.0) {
        return Err(invalid("dψ vanishes on the quadrature grid"));
    }
    prof.quotient_norm = match (convention, p) {
        (QuotientConvention::Relative, 0) => 1.0,
        (QuotientConvention::Closed { volume }, 0) => {
            if !(volume >= 1.0) {
                return Err(invalid("closed space must contain the unit chart (volume ≥ 1)"));
            }
            let mean = tensor_integrate(&lo, &hi, grid, |x| prof.coefficient(x));
            1.0 - mean * mean / volume
        }
        (QuotientConvention::Relative, _) => relative_quotient_ratio(&prof, 1.0)?,
        (QuotientConvention::Closed { .. }, _) => {
            return Err(invalid("the closed-space convention is only available in degree 0"));
        }
    };
    Ok(prof)
}

/// Integral of the scaled form `λ^p f(λ(x − corner)) dx_1∧…∧dx_p` over an
/// oriented simplex, with `λ = 1/side`, using a collapsed tensor rule.
fn simplex_integral(prof: &BumpProfile, verts: &[Vec<f64>], side: f64, corner: &[f64]) -> f64 {
    let p = verts.len() - 1;
    let n = prof.n;
    let edges: Vec<Vec<f64>> = (1..=p).map(|i| (0..n).map(|k| verts[i][k] - verts[0][k]).collect()).collect();
    let minor: Vec<Vec<f64>> = (0..p).map(|r| (0..p).map(|c| edges[c][r]).collect()).collect();
    let det = crate::mesh::complex::small_det(minor);
    if det == 0.0 {
        return 0.0;
    }
    let lam = 1.0 / side;
    let (nodes, weights) = gauss_legendre(prof.grid.max(6) + 2);
    let m = nodes.len();
    let mut idx = vec![0usize; p];
    let mut total = 0.0;
    loop {
        // Duffy map from the cube to the reference simplex.
        let mut s = vec![0.0; p];
        let mut rest = 1.0;
        let mut jac = 1.0;
        let mut w = 1.0;
        for i in 0..p {
            let u = nodes[idx[i]];
            s[i] = rest * u;
            jac *= rest;
            rest *= 1.0 - u;
            w *= weights[idx[i]];
        }
        let x: Vec<f64> = (0..n)
            .map(|k| {
                let pos = verts[0][k] + (0..p).map(|i| s[i] * edges[i][k]).sum::<f64>();
                lam * (pos - corner[k])
            })
            .collect();
        total += w * jac * prof.coefficient(&x);
        let mut d = 0;
        loop {
            if d == p {
                return total * det * lam.powi(p as i32);
            }
            idx[d] += 1;
            if idx[d] < m {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

/// Cochain of the form on the free `p`-simplices (integrals over each).
fn interpolate(prof: &BumpProfile, k: &StratifiedComplex, c: &CochainSystem, side: f64, corner: &[f64]) -> Vec<f64> {
    c.free_simplices(prof.p)
        .iter()
        .map(|s| {
            let verts: Vec<Vec<f64>> = s.iter().map(|&v| k.coords[v].clone()).collect();
            simplex_integral(prof, &verts, side, corner)
        })
        .collect()
}

/// `(‖ψ_h‖², ‖ψ_h − P_exact ψ_h‖²)` for the interpolated form on the reference
/// cube of the given side, relative conditions, `M`-norms.
fn quotient_parts(prof: &BumpProfile, side: f64) -> Result<(f64, f64)> {
    let p = prof.p;
    let k = cube(prof.n, prof.mesh_resolution, side)?;
    let c = k.cochains(true)?;
    let corner = vec![0.0; prof.n];
    let psi = Col::from_fn(c.size(p), {
        let v = interpolate(prof, &k, &c, side, &corner);
        move |i| v[i]
    });
    let m = c.m(p);
    let mpsi = &m * &psi;
    let norm = psi.transpose() * &mpsi;
    // On the cube with relative conditions Ker d_p = Im d_{p−1} for p < n.
    let d = c.d(p - 1);
    let rhs = d.transpose() * &mpsi;
    let kmat = crate::linalg::csc_congruence(&d, &m);
    let u = if p == 1 {
        let llt = kmat.sp_cholesky(Side::Lower).map_err(|_| Error::NotPositiveDefinite)?;
        llt.solve(&rhs)
    } else {
        pseudo_solve(&kmat.to_dense(), &rhs)?
    };
    let proj = &d * &u;
    let pm = &m * &proj;
    let pnorm = proj.transpose() * &pm;
    Ok((norm, norm - pnorm))
}

fn pseudo_solve(a: &Mat<f64>, b: &Col<f64>) -> Result<Col<f64>> {
    let eig = a.self_adjoint_eigen(Side::Lower).map_err(|_| Error::NoConvergence { iterations: 0, residual: f64::NAN })?;
    let s = eig.S().column_vector();
    let u = eig.U();
    let smax = (0..s.nrows()).map(|i| s[i].abs()).fold(0.0, f64::max);
    let mut x = Col::zeros(a.nrows());
    for i in 0..s.nrows() {
        if s[i] > 1e-10 * smax {
            let coef = (u.col(i).transpose() * b) / s[i];
            x += u.col(i) * coef;
        }
    }
    Ok(x)
}

fn relative_quotient_ratio(prof: &BumpProfile, side: f64) -> Result<f64> {
    let (norm, quot) = quotient_parts(prof, side)?;
    Ok(quot / norm)
}

/// The `2^{nc}` rescaled copies of a profile on the dyadic boxes of side
/// `2^{−c}`, with energies and quotient norms measured on the first box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxFamily {
    pub level: u32,
    pub side: f64,
    /// Lower corners of the boxes, in lexicographic order.
    pub corners: Vec<Vec<f64>>,
    /// `∫|dψ_j|²` for one member.
    pub energy: f64,
    /// `∫|ψ_j|²` for one member.
    pub mass: f64,
    /// Squared quotient norm of one member.
    pub quotient_norm: f64,
    /// Measured ratios against the unit profile.
    pub energy_factor: f64,
    pub norm_factor: f64,
    pub profile: BumpProfile,
}

/// Builds the level-`c` family: `ψ_j = φ_j^* ψ` with `φ_j(x) = 2^c (x − corner_j)`.
pub fn box_family(psi: &BumpProfile, c: u32) -> Result<BoxFamily> {
    let n = psi.n;
    let per_axis = 1usize << c;
    let side = 1.0 / per_axis as f64;
    let count = per_axis.pow(n as u32);
    let corners: Vec<Vec<f64>> = (0..count)
        .map(|mut id| {
            (0..n)
                .map(|_| {
                    let i = id % per_axis;
                    id /= per_axis;
                    i as f64 * side
                })
                .collect()
        })
        .collect();
    let lam = per_axis as f64;
    let (a, b) = SUPPORT;
    let lo = vec![a * side; n];
    let hi = vec![b * side; n];
    let p = psi.p as i32;
    let scaled = |x: &[f64]| -> Vec<f64> { x.iter().map(|t| lam * t).collect() };
    let mass = tensor_integrate(&lo, &hi, psi.grid, |x| (lam.powi(p) * psi.coefficient(&scaled(x))).powi(2));
    let energy = tensor_integrate(&lo, &hi, psi.grid, |x| lam.powi(2 * p + 2) * psi.energy_density(&scaled(x)));
    let (quotient_norm, base_quot) = match (psi.convention, psi.p) {
        (QuotientConvention::Relative, 0) => (mass, psi.mass),
        (QuotientConvention::Closed { volume }, 0) => {
            let mean = tensor_integrate(&lo, &hi, psi.grid, |x| lam.powi(p) * psi.coefficient(&scaled(x)));
            (mass - mean * mean / volume, psi.quotient_norm * psi.mass)
        }
        _ => (quotient_parts(psi, side)?.1, quotient_parts(psi, 1.0)?.1),
    };
    Ok(BoxFamily {
        level: c,
        side,
        corners,
        energy,
        mass,
        quotient_norm,
        energy_factor: energy / psi.energy,
        norm_factor: quotient_norm / base_quot,
        profile: psi.clone(),
    })
}

impl BoxFamily {
    pub fn len(&self) -> usize {
        self.corners.len()
    }

    pub fn is_empty(&self) -> bool {
        self.corners.is_empty()
    }

    /// Coefficient of member `j` at `x`.
    pub fn coefficient(&self, j: usize, x: &[f64]) -> f64 {
        let lam = 1.0 / self.side;
        let y: Vec<f64> = x.iter().zip(&self.corners[j]).map(|(t, c)| lam * (t - c)).collect();
        if y.iter().any(|t| !(0.0..=1.0).contains(t)) {
            return 0.0;
        }
        lam.powi(self.profile.p as i32) * self.profile.coefficient(&y)
    }

    /// Nodal values of the first `count` degree-0 members on the free
    /// vertices of a mesh whose coordinates are chart coordinates.
    pub fn pullback_nodal(&self, k: &StratifiedComplex, c: &CochainSystem, count: usize) -> Result<Vec<Vec<f64>>> {
        if self.profile.p != 0 {
            return Err(invalid("nodal pullback is only defined in degree 0"));
        }
        if count > self.len() {
            return Err(Error::CountExceedsDimension { requested: count, available: self.len() });
        }
        if k.coords.first().map_or(0, Vec::len) != self.profile.n {
            return Err(invalid("mesh coordinates do not match the chart dimension"));
        }
        Ok((0..count)
            .map(|j| c.free[0].iter().map(|&v| self.coefficient(j, &k.coords[v])).collect())
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_is_normalized() {
        for (n, p) in [(1, 0), (2, 0), (2, 1), (3, 0)] {
            let b = bump_profile(n, p, 8, QuotientConvention::Relative).unwrap();
            assert!((b.mass - 1.0).abs() < 1e-13, "n={n} p={p}");
            assert!(b.energy > 0.0);
            assert!(b.quotient_norm > 0.0 && b.quotient_norm <= 1.0);
        }
    }

    #[test]
    fn degree_must_be_below_dimension() {
        assert!(bump_profile(2, 2, 8, QuotientConvention::Relative).is_err());
    }

    #[test]
    fn family_sizes() {
        let b = bump_profile(2, 0, 8, QuotientConvention::Relative).unwrap();
        assert_eq!(box_family(&b, 0).unwrap().len(), 1);
        assert_eq!(box_family(&b, 1).unwrap().len(), 4);
        assert_eq!(box_family(&b, 2).unwrap().len(), 16);
    }

    #[test]
    fn degree_one_quotient_norm_is_resolved() {
        let coarse = bump_profile_with(2, 1, 8, 16, QuotientConvention::Relative).unwrap();
        let fine = bump_profile_with(2, 1, 8, 32, QuotientConvention::Relative).unwrap();
        let change = (coarse.quotient_norm - fine.quotient_norm).abs() / fine.quotient_norm;
        assert!(change < 0.01, "{} vs {}", coarse.quotient_norm, fine.quotient_norm);
    }
}
