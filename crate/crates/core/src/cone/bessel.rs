//! Bessel functions `J_ν` of real order `ν ≥ 0` for nonnegative arguments.
//!
//! Three evaluators cover the range: the ascending series near the origin,
//! Miller's backward recurrence normalized by the Neumann sum
//! `(x/2)^ν = Σ_k c_k J_{ν+2k}(x)` in the middle, and Hankel's asymptotic
//! expansion for large arguments.

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Largest supported order.
pub const MAX_ORDER: f64 = 400.0;
/// Largest supported argument.
pub const MAX_ARGUMENT: f64 = 1e6;

/// Below this argument the ascending series is used.
pub fn series_limit(nu: f64) -> f64 {
    let _ = nu;
    6.0
}

/// Above this argument Hankel's expansion is used.
pub fn asymptotic_limit(nu: f64) -> f64 {
    40.0 + 2.0 * nu * nu
}

fn check(nu: f64, x: f64) -> Result<()> {
    if !(0.0..=MAX_ORDER).contains(&nu) || !(0.0..=MAX_ARGUMENT).contains(&x) || !nu.is_finite() || !x.is_finite() {
        return Err(Error::BesselRange { order: nu, argument: x });
    }
    Ok(())
}

/// `(J_ν(x), J_{ν+1}(x))`.
pub fn bessel_j_pair(nu: f64, x: f64) -> Result<(f64, f64)> {
    check(nu, x)?;
    if x == 0.0 {
        return Ok((if nu == 0.0 { 1.0 } else { 0.0 }, 0.0));
    }
    if x <= series_limit(nu) {
        Ok((series(nu, x), series(nu + 1.0, x)))
    } else if x >= asymptotic_limit(nu) {
        Ok((hankel(nu, x), hankel(nu + 1.0, x)))
    } else {
        miller(nu, x)
    }
}

pub fn bessel_j(nu: f64, x: f64) -> Result<f64> {
    Ok(bessel_j_pair(nu, x)?.0)
}

/// `J_ν'(x) = (ν/x)·J_ν(x) − J_{ν+1}(x)`.
pub fn bessel_j_prime(nu: f64, x: f64) -> Result<f64> {
    if x == 0.0 {
        check(nu, x)?;
        // J_ν'(0): −0 for ν = 0, 1/2 for ν = 1, 0 for ν > 1, infinite for 0 < ν < 1.
        return Ok(if nu == 0.0 {
            0.0
        } else if nu == 1.0 {
            0.5
        } else if nu > 1.0 {
            0.0
        } else {
            f64::INFINITY
        });
    }
    let (j, j1) = bessel_j_pair(nu, x)?;
    Ok(nu / x * j - j1)
}

/// Ascending series `Σ (−1)^m (x/2)^{2m+ν} / (m! Γ(m+ν+1))`.
pub fn series(nu: f64, x: f64) -> f64 {
    let half = 0.5 * x;
    let lead = if nu == 0.0 { 0.0 } else { nu * half.ln() } - ln_gamma(nu + 1.0);
    let mut term = lead.exp();
    let mut sum = term;
    let q = half * half;
    for m in 1..500 {
        let mf = m as f64;
        term *= -q / (mf * (mf + nu));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// Hankel's expansion `sqrt(2/(πx))·(P cos χ − Q sin χ)`, `χ = x − (ν/2 + 1/4)π`.
pub fn hankel(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let (mut p, mut q) = (1.0, 0.0);
    let mut term = 1.0;
    let mut best = f64::INFINITY;
    for k in 1..60 {
        let kf = k as f64;
        term *= (mu - (2.0 * kf - 1.0).powi(2)) / (kf * 8.0 * x);
        if term.abs() > best {
            // The series is asymptotic; stop at its smallest term.
            break;
        }
        best = term.abs();
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    let chi = x - (0.5 * nu + 0.25) * std::f64::consts::PI;
    (2.0 / (std::f64::consts::PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// Miller's backward recurrence for `(J_ν, J_{ν+1})`.
pub fn miller(nu: f64, x: f64) -> Result<(f64, f64)> {
    check(nu, x)?;
    let start = (x + 40.0 + 2.0 * x.sqrt() * 6.0).ceil() as usize + 2;
    // f holds values proportional to J_{ν+j}, for j = start down to 0.
    let (mut f_next, mut f_cur) = (0.0f64, 1e-300f64);
    // Normalization sum Σ_k c_k/Γ(ν+1) f_{ν+2k}, accumulated on the fly.
    let coeff = |k: usize| -> f64 {
        if k == 0 {
            return 1.0;
        }
        // (ν+2k)·Π_{j=1}^{k−1}(ν+j)/k!  computed in logs.
        let mut l = (nu + 2.0 * k as f64).ln();
        for j in 1..k {
            l += (nu + j as f64).ln();
        }
        for j in 1..=k {
            l -= (j as f64).ln();
        }
        l.exp()
    };
    let mut norm = 0.0;
    let mut f1 = 0.0;
    let mut f0 = 0.0;
    for j in (0..=start).rev() {
        // f_cur ~ J_{ν+j}
        if j % 2 == 0 {
            norm += coeff(j / 2) * f_cur;
        }
        if j == 1 {
            f1 = f_cur;
        }
        if j == 0 {
            f0 = f_cur;
            break;
        }
        let order = nu + j as f64;
        let f_prev = 2.0 * order / x * f_cur - f_next;
        f_next = f_cur;
        f_cur = f_prev;
        if f_cur.abs() > 1e250 {
            f_cur *= 1e-250;
            f_next *= 1e-250;
            norm *= 1e-250;
            f1 *= 1e-250;
        }
    }
    let scale_ln = if nu == 0.0 { 0.0 } else { nu * (0.5 * x).ln() } - ln_gamma(nu + 1.0);
    let scale = scale_ln.exp() / norm;
    Ok((f0 * scale, f1 * scale))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        // Reference values of J_0 and J_1.
        assert!((bessel_j(0.0, 1.0).unwrap() - 0.765_197_686_557_966_6).abs() < 1e-14);
        assert!((bessel_j(1.0, 2.5).unwrap() - 0.497_094_102_464_274_2).abs() < 1e-13);
        assert!((bessel_j(0.0, 30.0).unwrap() - (-0.086_367_983_581_040_23)).abs() < 1e-12);
        assert!((bessel_j(0.0, 100.0).unwrap() - 0.019_985_850_304_223_12).abs() < 1e-13);
        // J_{1/2}(x) = sqrt(2/(πx)) sin x
        for x in [0.5, 3.0, 9.0, 20.0, 70.0] {
            let exact = (2.0 / (std::f64::consts::PI * x)).sqrt() * x.sin();
            assert!((bessel_j(0.5, x).unwrap() - exact).abs() < 1e-12, "x = {x}");
        }
    }

    #[test]
    fn evaluators_agree_at_the_seams() {
        for nu in [0.0, 0.3, 1.0, 1.7, 2.5, 4.0] {
            let xs = series_limit(nu);
            let (m0, m1) = miller(nu, xs).unwrap();
            assert!((series(nu, xs) - m0).abs() < 1e-10, "series seam nu={nu}");
            assert!((series(nu + 1.0, xs) - m1).abs() < 1e-10);
            let xa = asymptotic_limit(nu);
            let (m0, _) = miller(nu, xa).unwrap();
            assert!((hankel(nu, xa) - m0).abs() < 1e-10, "asymptotic seam nu={nu}");
        }
    }

    #[test]
    fn out_of_range_is_reported() {
        assert!(matches!(bessel_j(1e4, 1.0), Err(Error::BesselRange { .. })));
    }
}
