//! Rayleigh certificates, biLipschitz envelopes and Weyl-exponent fits.

use serde::{Deserialize, Serialize};

use super::bump::BumpProfile;
use crate::error::{invalid, Result};
use crate::spectrum::SpectralResult;

/// An upper bound `λ_{k,p} ≤ bound` for every space admitting a
/// `Λ`-biLipschitz chart from the unit cube.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RayleighCertificate {
    pub k: usize,
    pub p: usize,
    pub bound: f64,
    #[serde(rename = "Lambda")]
    pub lambda_chart: f64,
    /// Dyadic level: `2^{nc}` boxes with `2^{nc} ≥ k`.
    pub c: u32,
    #[serde(rename = "E_psi")]
    pub e_psi: f64,
    #[serde(rename = "N_psi")]
    pub n_psi: f64,
    /// Dimension of the witness subspace.
    pub witness_dim: usize,
    pub provenance: String,
}

/// Smallest `c` with `2^{nc} ≥ k`.
pub fn dyadic_level(n: usize, k: usize) -> u32 {
    let mut c = 0u32;
    while 2f64.powi((n as u32 * c) as i32) < k as f64 {
        c += 1;
    }
    c
}

/// `4·Λ^{4p+2n+2}·E_ψ/N_ψ·k̄^{2/n}` with `k̄ = 2^{nc}` the dyadic round-up of `k`.
pub fn certificate(lambda_chart: f64, n: usize, p: usize, k: usize, psi: &BumpProfile) -> Result<RayleighCertificate> {
    if !(lambda_chart >= 1.0 && lambda_chart.is_finite()) {
        return Err(invalid(format!("chart constant Λ = {lambda_chart} must be at least 1")));
    }
    if k == 0 {
        return Err(invalid("k must be at least 1"));
    }
    if psi.n != n || psi.p != p {
        return Err(invalid(format!("profile is for (n, p) = ({}, {}), not ({n}, {p})", psi.n, psi.p)));
    }
    let c = dyadic_level(n, k);
    let kbar = 2f64.powi((n as u32 * c) as i32);
    let exponent = (4 * p + 2 * n + 2) as i32;
    let bound = 4.0 * lambda_chart.powi(exponent) * psi.energy / psi.quotient_norm * kbar.powf(2.0 / n as f64);
    Ok(RayleighCertificate {
        k,
        p,
        bound,
        lambda_chart,
        c,
        e_psi: psi.energy,
        n_psi: psi.quotient_norm,
        witness_dim: k,
        provenance: format!(
            "bump box family: n={n}, p={p}, level c={c}, {} boxes of side 2^-{c}, profile grid {}",
            kbar as u64, psi.grid
        ),
    })
}

/// `[C^{−(2n+4p+2)}·λ, C^{2n+4p+2}·λ]`.
pub fn bilipschitz_envelope(c: f64, n: usize, p: usize, lambda: f64) -> Result<(f64, f64)> {
    if !(c >= 1.0 && c.is_finite()) {
        return Err(invalid(format!("biLipschitz constant {c} must be at least 1")));
    }
    if !(lambda >= 0.0) {
        return Err(invalid("eigenvalue must be nonnegative"));
    }
    let f = c.powi((2 * n + 4 * p + 2) as i32);
    Ok((lambda / f, lambda * f))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeylFit {
    pub exponent: f64,
    pub constant: f64,
}

/// Least-squares fit `λ_k ≈ constant·k^exponent` over `k ∈ [lo, hi]`
/// (1-based positions in the result).
pub fn weyl_fit(result: &SpectralResult, k_range: (usize, usize)) -> Result<WeylFit> {
    let (lo, hi) = k_range;
    if lo == 0 || hi < lo || hi - lo + 1 < 10 {
        return Err(invalid(format!("k range [{lo}, {hi}] must hold at least 10 values starting at 1 or above")));
    }
    if hi > result.len() {
        return Err(invalid(format!("k range ends at {hi} but only {} eigenvalues are available", result.len())));
    }
    let pts: Vec<(f64, f64)> = result.eigenvalues[lo - 1..hi].iter().map(|e| (e.k as f64, e.lambda)).collect();
    if let Some((k, l)) = pts.iter().find(|(_, l)| !(*l > 0.0)) {
        return Err(invalid(format!("eigenvalue λ_{k} = {l} is not positive")));
    }
    let xs: Vec<f64> = pts.iter().map(|(k, _)| k.ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|(_, l)| l.ln()).collect();
    let m = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / m, ys.iter().sum::<f64>() / m);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let exponent = sxy / sxx;
    Ok(WeylFit { exponent, constant: (my - exponent * mx).exp() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minmax::bump::{bump_profile, QuotientConvention};
    use crate::spectrum::SolverInfo;

    #[test]
    fn dyadic_rounding() {
        assert_eq!(dyadic_level(2, 1), 0);
        assert_eq!(dyadic_level(2, 4), 1);
        assert_eq!(dyadic_level(2, 5), 2);
        assert_eq!(dyadic_level(2, 16), 2);
        assert_eq!(dyadic_level(3, 9), 2);
    }

    #[test]
    fn certificate_constants() {
        let psi = bump_profile(2, 0, 8, QuotientConvention::Relative).unwrap();
        let c1 = certificate(1.0, 2, 0, 1, &psi).unwrap();
        assert!((c1.bound - 4.0 * psi.energy / psi.quotient_norm).abs() < 1e-12 * c1.bound);
        let c16 = certificate(1.0, 2, 0, 16, &psi).unwrap();
        assert!((c16.bound / c1.bound - 16.0).abs() < 1e-12);
        let c2 = certificate(1.5, 2, 0, 1, &psi).unwrap();
        assert!(c2.bound > c1.bound);
        assert!(certificate(0.9, 2, 0, 1, &psi).is_err());
        let json = serde_json::to_value(&c1).unwrap();
        for key in ["k", "p", "bound", "Lambda", "c", "E_psi", "N_psi", "provenance"] {
            assert!(json.get(key).is_some(), "missing {key}");
        }
    }

    #[test]
    fn envelopes() {
        assert_eq!(bilipschitz_envelope(1.0, 2, 1, 3.0).unwrap(), (3.0, 3.0));
        let (lo, hi) = bilipschitz_envelope(2.0, 1, 0, 1.0).unwrap();
        assert_eq!((lo, hi), (1.0 / 16.0, 16.0));
        let (a, b) = bilipschitz_envelope(1.2, 2, 0, 5.0).unwrap();
        let (c, d) = bilipschitz_envelope(1.3, 2, 0, 5.0).unwrap();
        assert!(c <= a && b <= d);
    }

    #[test]
    fn synthetic_weyl_fit() {
        let values = (1..=30).map(|k| ((k as f64).powf(2.0 / 3.0), 0.0)).collect();
        let r = SpectralResult::from_values(0, values, 1e-12, SolverInfo::new("synthetic", 0.0));
        let f = weyl_fit(&r, (1, 30)).unwrap();
        assert!((f.exponent - 2.0 / 3.0).abs() < 1e-12);
        assert!((f.constant - 1.0).abs() < 1e-12);
        assert!(weyl_fit(&r, (1, 5)).is_err());
    }
}
