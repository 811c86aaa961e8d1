//! Gauss–Legendre rules on intervals and tensor boxes.

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[0, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "quadrature needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Newton iteration on P_n starting from the Chebyshev-like guess.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = 0.5 * (1.0 - x);
        nodes[n - 1 - i] = 0.5 * (1.0 + x);
        weights[i] = 0.5 * w;
        weights[n - 1 - i] = 0.5 * w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

/// Integrates `f` over the box `[lo, hi]` with an `m`-point rule per axis.
pub fn tensor_integrate(lo: &[f64], hi: &[f64], m: usize, f: impl Fn(&[f64]) -> f64) -> f64 {
    let n = lo.len();
    let (x, w) = gauss_legendre(m);
    let mut idx = vec![0usize; n];
    let mut point = vec![0.0; n];
    let jac: f64 = lo.iter().zip(hi).map(|(a, b)| b - a).product();
    let mut total = 0.0;
    loop {
        let mut weight = jac;
        for d in 0..n {
            point[d] = lo[d] + (hi[d] - lo[d]) * x[idx[d]];
            weight *= w[idx[d]];
        }
        total += weight * f(&point);
        let mut d = 0;
        loop {
            if d == n {
                return total;
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

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_polynomials_up_to_degree_2n_minus_1() {
        let (x, w) = gauss_legendre(5);
        for deg in 0..10 {
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg)).sum();
            assert!((q - 1.0 / (deg as f64 + 1.0)).abs() < 1e-14, "degree {deg}");
        }
    }

    #[test]
    fn tensor_rule_on_box() {
        let v = tensor_integrate(&[0.0, 1.0], &[2.0, 3.0], 4, |p| p[0] * p[1] * p[1]);
        // ∫0^2 x dx · ∫1^3 y² dy = 2 · 26/3
        assert!((v - 52.0 / 3.0).abs() < 1e-12);
    }
}
