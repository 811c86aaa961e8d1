//! Element mass matrices of lowest-order Whitney forms.
//!
//! On a `d`-simplex with barycentric coordinates `λ_0 … λ_d`, the Whitney
//! form of the face `[i_0 … i_p]` is
//! `p! Σ_k (−1)^k λ_{i_k} dλ_{i_0} ∧ … ∧ (omit i_k) ∧ … ∧ dλ_{i_p}`.
//! Products of two barycentric coordinates integrate exactly to
//! `vol·(1 + δ_ab)/((d+1)(d+2))`, and inner products of wedge products of
//! gradients are Gram determinants, so the element matrices are exact.

use super::complex::{small_det, small_inverse, volume_from_gram};

/// Ascending `(p+1)`-subsets of `0..=d` in lexicographic order.
pub fn local_faces(d: usize, p: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, d: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..=d {
            if d + 1 - i < left {
                break;
            }
            cur.push(i);
            rec(i + 1, d, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, d, p + 1, &mut Vec::new(), &mut out);
    out
}

/// Inner products `⟨∇λ_i, ∇λ_j⟩` of the barycentric gradients, from the Gram
/// matrix of the edge vectors `v_i − v_0`.
pub fn gradient_gram(gram: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let d = gram.len();
    let inv = small_inverse(gram);
    let mut g = vec![vec![0.0; d + 1]; d + 1];
    for i in 1..=d {
        for j in 1..=d {
            g[i][j] = inv[i - 1][j - 1];
        }
    }
    // ∇λ_0 = −Σ_i ∇λ_i.
    for i in 1..=d {
        let s: f64 = (1..=d).map(|j| g[i][j]).sum();
        g[i][0] = -s;
        g[0][i] = -s;
    }
    g[0][0] = (1..=d).map(|i| -g[0][i]).sum();
    g
}

/// Element mass matrix for degree `p` on a simplex with edge Gram matrix
/// `gram`, indexed by [`local_faces`]`(d, p)`.
pub fn element_mass(gram: &[Vec<f64>], p: usize) -> Vec<Vec<f64>> {
    let d = gram.len();
    assert!(p <= d, "form degree exceeds simplex dimension");
    let vol = volume_from_gram(gram);
    let grad = if d > 0 { gradient_gram(gram) } else { vec![vec![0.0]] };
    let faces = local_faces(d, p);
    let fact: f64 = (1..=p).map(|k| k as f64).product();
    let bary = |a: usize, b: usize| {
        let base = if d == 0 { 1.0 } else { vol / ((d + 1) * (d + 2)) as f64 };
        if d == 0 {
            base
        } else if a == b {
            2.0 * base
        } else {
            base
        }
    };
    let wedge = |s: &[usize], t: &[usize]| -> f64 {
        if s.is_empty() {
            return 1.0;
        }
        small_det(s.iter().map(|&i| t.iter().map(|&j| grad[i][j]).collect()).collect())
    };
    let n = faces.len();
    let mut m = vec![vec![0.0; n]; n];
    for (a, s) in faces.iter().enumerate() {
        for (b, t) in faces.iter().enumerate().skip(a) {
            let mut total = 0.0;
            for k in 0..=p {
                let mut sk = s.clone();
                let vk = sk.remove(k);
                for l in 0..=p {
                    let mut tl = t.clone();
                    let wl = tl.remove(l);
                    let sign = if (k + l) % 2 == 0 { 1.0 } else { -1.0 };
                    total += sign * bary(vk, wl) * wedge(&sk, &tl);
                }
            }
            m[a][b] = fact * fact * total;
            m[b][a] = m[a][b];
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn right_triangle() -> Vec<Vec<f64>> {
        vec![vec![1.0, 0.0], vec![0.0, 1.0]]
    }

    #[test]
    fn p1_mass_of_unit_right_triangle() {
        // ∫λ_aλ_b = |T|(1+δ_ab)/12 with |T| = 1/2, computed by hand.
        let m = element_mass(&right_triangle(), 0);
        for a in 0..3 {
            for b in 0..3 {
                let e = if a == b { 1.0 / 12.0 } else { 1.0 / 24.0 };
                assert!((m[a][b] - e).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn top_form_mass_is_inverse_volume() {
        let m = element_mass(&right_triangle(), 2);
        assert!((m[0][0] - 2.0).abs() < 1e-14);
        let tet = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
        assert!((element_mass(&tet, 3)[0][0] - 6.0).abs() < 1e-13);
    }

    #[test]
    fn edge_element_on_a_segment() {
        // 1-forms on a segment of length h: W = dλ_1, ‖W‖² = 1/h.
        let m = element_mass(&[vec![4.0]], 1);
        assert!((m[0][0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn whitney_edge_mass_on_right_triangle() {
        // Edge [0,1]: W = λ_0 dλ_1 − λ_1 dλ_0 with ∇λ_0 = (−1,−1), ∇λ_1 = (1,0);
        // hand integration gives ‖W‖² = 1/3.
        let m = element_mass(&right_triangle(), 1);
        assert!((m[0][0] - 1.0 / 3.0).abs() < 1e-14);
        // Symmetric positive definite.
        assert!(small_det(m.clone()) > 0.0);
    }
}
