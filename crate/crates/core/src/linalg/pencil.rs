//! Lowest eigenpairs of a symmetric-definite pencil `A x = λ M x`.
//!
//! Small problems are reduced to a standard symmetric problem through the
//! Cholesky factor of `M`. Large sparse problems use a thick-restarted block
//! Krylov iteration on the shift-inverted operator `T = (A + sM)⁻¹ M`, which
//! is self-adjoint in the `M` inner product. The basis is kept
//! `M`-orthonormal with two rounds of classical Gram–Schmidt per vector.

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::Llt as SparseLlt;
use faer::{Col, Mat, Side};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{csc_inf_norm, Csc};
use crate::error::{Error, Result};

/// Which algorithm `solve_pencil` should use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PencilMethod {
    /// Dense below `dense_limit`, Krylov above.
    Auto,
    Dense,
    Krylov,
}

#[derive(Debug, Clone)]
pub struct PencilOptions {
    pub count: usize,
    /// Bound on the normwise backward error of every returned pair.
    pub tol: f64,
    pub seed: u64,
    pub method: PencilMethod,
    pub dense_limit: usize,
    pub max_iterations: usize,
}

impl PencilOptions {
    pub fn new(count: usize) -> Self {
        Self {
            count,
            tol: 1e-9,
            seed: 0,
            method: PencilMethod::Auto,
            dense_limit: 800,
            max_iterations: 2000,
        }
    }
}

/// Eigenpairs sorted by ascending eigenvalue; columns of `vectors` are
/// `M`-orthonormal.
#[derive(Debug, Clone)]
pub struct Eigenpairs {
    pub values: Vec<f64>,
    pub vectors: Mat<f64>,
    /// Normwise backward errors `‖Ax − λMx‖ / ((‖A‖ + |λ|‖M‖)‖x‖)`.
    pub residuals: Vec<f64>,
    pub method: &'static str,
    pub iterations: usize,
    pub shift: f64,
}

/// Lowest `count` eigenpairs of `A x = λ M x` with default options.
pub fn solve_pencil(a: &Csc, m: &Csc, count: usize, tol: f64, seed: u64) -> Result<Eigenpairs> {
    let opts = PencilOptions { tol, seed, ..PencilOptions::new(count) };
    solve_pencil_with(a, m, &opts)
}

pub fn solve_pencil_with(a: &Csc, m: &Csc, opts: &PencilOptions) -> Result<Eigenpairs> {
    let n = a.nrows();
    if a.ncols() != n || m.nrows() != n || m.ncols() != n {
        return Err(Error::InvalidInput(format!(
            "pencil shapes differ: A is {}x{}, M is {}x{}",
            a.nrows(),
            a.ncols(),
            m.nrows(),
            m.ncols()
        )));
    }
    if opts.count > n {
        return Err(Error::CountExceedsDimension { requested: opts.count, available: n });
    }
    let dense = match opts.method {
        PencilMethod::Dense => true,
        PencilMethod::Krylov => false,
        PencilMethod::Auto => n <= opts.dense_limit,
    };
    let pairs = if dense { dense_pencil(a, m, opts)? } else { krylov_pencil(a, m, opts)? };
    let worst = pairs.residuals.iter().copied().fold(0.0, f64::max);
    if worst > opts.tol {
        return Err(Error::NoConvergence { iterations: pairs.iterations, residual: worst });
    }
    Ok(pairs)
}

fn backward_errors(a: &Csc, m: &Csc, values: &[f64], x: &Mat<f64>) -> Vec<f64> {
    let (na, nm) = (csc_inf_norm(a), csc_inf_norm(m));
    let ax = a * x;
    let mx = m * x;
    values
        .iter()
        .enumerate()
        .map(|(j, &lam)| {
            let r = ax.col(j) - mx.col(j) * lam;
            let denom = (na + lam.abs() * nm) * x.col(j).norm_l2();
            if denom == 0.0 {
                0.0
            } else {
                r.norm_l2() / denom
            }
        })
        .collect()
}

fn dense_pencil(a: &Csc, m: &Csc, opts: &PencilOptions) -> Result<Eigenpairs> {
    let n = a.nrows();
    let count = opts.count;
    if count == 0 {
        return Ok(empty(n, "dense"));
    }
    let ad = a.to_dense();
    let md = m.to_dense();
    let llt = md.llt(Side::Lower).map_err(|_| Error::NotPositiveDefinite)?;
    let l = llt.L();
    // C = L⁻¹ A L⁻ᵀ, using the symmetry of A.
    let mut x = ad.clone();
    l.solve_lower_triangular_in_place(x.as_mut());
    let mut c = x.transpose().to_owned();
    l.solve_lower_triangular_in_place(c.as_mut());
    let c = Mat::from_fn(n, n, |i, j| 0.5 * (c[(i, j)] + c[(j, i)]));
    let eig = c
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| Error::NoConvergence { iterations: 0, residual: f64::NAN })?;
    let s = eig.S().column_vector();
    let values: Vec<f64> = (0..count).map(|i| s[i]).collect();
    let mut vectors = eig.U().subcols(0, count).to_owned();
    l.transpose().solve_upper_triangular_in_place(vectors.as_mut());
    let residuals = backward_errors(a, m, &values, &vectors);
    Ok(Eigenpairs { values, vectors, residuals, method: "dense-cholesky", iterations: 1, shift: 0.0 })
}

fn empty(n: usize, method: &'static str) -> Eigenpairs {
    Eigenpairs {
        values: vec![],
        vectors: Mat::zeros(n, 0),
        residuals: vec![],
        method,
        iterations: 0,
        shift: 0.0,
    }
}

fn trace(m: &Csc) -> f64 {
    m.triplet_iter().filter(|t| t.row == t.col).map(|t| *t.val).sum()
}

/// Growing `M`-orthonormal basis with the images `MQ` and `Z = TQ`.
struct Basis {
    q: Mat<f64>,
    mq: Mat<f64>,
    z: Mat<f64>,
    h: Mat<f64>,
    len: usize,
}

impl Basis {
    fn new(n: usize, cap: usize) -> Self {
        Self {
            q: Mat::zeros(n, cap),
            mq: Mat::zeros(n, cap),
            z: Mat::zeros(n, cap),
            h: Mat::zeros(cap, cap),
            len: 0,
        }
    }

    /// Orthogonalizes `v` against the basis; returns `None` if it collapses.
    fn orthonormalize(&self, m: &Csc, mut v: Col<f64>) -> Option<(Col<f64>, Col<f64>)> {
        let j = self.len;
        let norm0 = {
            let mv = m * &v;
            (v.transpose() * &mv).sqrt()
        };
        if !(norm0 > 0.0) {
            return None;
        }
        for _ in 0..2 {
            if j > 0 {
                let coeffs = self.mq.subcols(0, j).transpose() * &v;
                v -= self.q.subcols(0, j) * &coeffs;
            }
        }
        let mv = m * &v;
        let norm = (v.transpose() * &mv).max(0.0).sqrt();
        if norm <= 1e-10 * norm0 {
            return None;
        }
        Some((v / norm, mv / norm))
    }

    fn push(&mut self, q: Col<f64>, mq: Col<f64>, z: Col<f64>) {
        let j = self.len;
        self.q.col_mut(j).copy_from(&q);
        self.mq.col_mut(j).copy_from(&mq);
        self.z.col_mut(j).copy_from(&z);
        let hz = self.mq.subcols(0, j + 1).transpose() * &z;
        for i in 0..=j {
            self.h[(i, j)] = hz[i];
            self.h[(j, i)] = hz[i];
        }
        self.len += 1;
    }

    /// Replaces the basis by `Q·Y` for the given Ritz coefficient columns.
    fn compress(&mut self, y: &Mat<f64>, theta: &[f64]) {
        let j = self.len;
        let k = y.ncols();
        let q = self.q.subcols(0, j) * y;
        let mq = self.mq.subcols(0, j) * y;
        let z = self.z.subcols(0, j) * y;
        self.q.subcols_mut(0, k).copy_from(&q);
        self.mq.subcols_mut(0, k).copy_from(&mq);
        self.z.subcols_mut(0, k).copy_from(&z);
        self.h.fill(0.0);
        for (i, &t) in theta.iter().enumerate() {
            self.h[(i, i)] = t;
        }
        self.len = k;
    }
}

struct ShiftInvert {
    llt: SparseLlt<usize, f64>,
    shift: f64,
}

impl ShiftInvert {
    fn new(a: &Csc, m: &Csc) -> Result<Self> {
        let tm = trace(m);
        if !(tm > 0.0) {
            return Err(Error::NotPositiveDefinite);
        }
        let ta = trace(a);
        let mut shift = if ta > 0.0 { 1e-4 * ta / tm } else { 1.0 };
        for _ in 0..8 {
            let k = a + &(m * faer::Scale(shift));
            if let Ok(llt) = k.sp_cholesky(Side::Lower) {
                return Ok(Self { llt, shift });
            }
            shift *= 10.0;
        }
        Err(Error::NotPositiveDefinite)
    }

    fn apply(&self, mv: &Col<f64>) -> Col<f64> {
        self.llt.solve(mv)
    }
}

fn krylov_pencil(a: &Csc, m: &Csc, opts: &PencilOptions) -> Result<Eigenpairs> {
    let n = a.nrows();
    let count = opts.count;
    if count == 0 {
        return Ok(empty(n, "shift-invert-block-krylov"));
    }
    let op = ShiftInvert::new(a, m)?;
    let block = 8.max(count.div_ceil(4)).min(n);
    let cap = n.min((count + 3 * block).max(2 * count + 2 * block));
    let keep_on_restart = (count + block).min(cap.saturating_sub(block)).max(count);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let random_col = |rng: &mut ChaCha8Rng| Col::<f64>::from_fn(n, |_| rng.random::<f64>() * 2.0 - 1.0);

    let mut basis = Basis::new(n, cap);
    let mut pending: Vec<Col<f64>> = (0..block).map(|_| random_col(&mut rng)).collect();
    let mut last_worst = f64::INFINITY;

    for iteration in 1..=opts.max_iterations {
        // Expand the basis with the pending block.
        let mut added = 0;
        for v in pending.drain(..) {
            if basis.len == cap {
                break;
            }
            let mut candidate = Some(v);
            for _ in 0..4 {
                let Some(v) = candidate.take() else { break };
                match basis.orthonormalize(m, v) {
                    Some((q, mq)) => {
                        let z = op.apply(&mq);
                        basis.push(q, mq, z);
                        added += 1;
                        break;
                    }
                    None => candidate = Some(random_col(&mut rng)),
                }
            }
        }
        if added == 0 && basis.len < count {
            return Err(Error::NoConvergence { iterations: iteration, residual: f64::INFINITY });
        }

        // Rayleigh–Ritz on the projected operator.
        let j = basis.len;
        let h = basis.h.submatrix(0, 0, j, j).to_owned();
        let eig = h
            .self_adjoint_eigen(Side::Lower)
            .map_err(|_| Error::NoConvergence { iterations: iteration, residual: f64::NAN })?;
        let s = eig.S().column_vector();
        // Largest θ first, i.e. smallest λ first.
        let order: Vec<usize> = (0..j).rev().collect();
        let theta: Vec<f64> = order.iter().map(|&i| s[i]).collect();
        let y = Mat::from_fn(j, j, |r, c| eig.U()[(r, order[c])]);
        let ncheck = count.min(j);
        let lambdas: Vec<f64> = theta[..ncheck]
            .iter()
            .map(|&t| if t > 0.0 { 1.0 / t - op.shift } else { f64::INFINITY })
            .collect();
        let x = basis.q.subcols(0, j) * y.subcols(0, ncheck);
        let residuals = backward_errors(a, m, &lambdas, &x);
        let worst = residuals.iter().copied().fold(0.0, f64::max);

        if j >= count && worst <= opts.tol * 0.5 {
            return Ok(Eigenpairs {
                values: lambdas,
                vectors: x,
                residuals,
                method: "shift-invert-block-krylov",
                iterations: iteration,
                shift: op.shift,
            });
        }
        if j == n {
            // The basis spans the space; Ritz pairs are as exact as they get.
            if worst <= opts.tol {
                return Ok(Eigenpairs {
                    values: lambdas,
                    vectors: x,
                    residuals,
                    method: "shift-invert-block-krylov",
                    iterations: iteration,
                    shift: op.shift,
                });
            }
            return Err(Error::NoConvergence { iterations: iteration, residual: worst });
        }
        last_worst = worst;

        // Next block: T applied to the leading unconverged Ritz vectors.
        let mut chosen: Vec<usize> = (0..ncheck).filter(|&i| residuals[i] > opts.tol * 0.5).collect();
        let mut extra = ncheck;
        while chosen.len() < block && extra < j {
            chosen.push(extra);
            extra += 1;
        }
        chosen.truncate(block);
        let ysel = Mat::from_fn(j, chosen.len(), |r, c| y[(r, chosen[c])]);
        let next = basis.z.subcols(0, j) * &ysel;
        pending = (0..next.ncols()).map(|c| next.col(c).to_owned()).collect();
        while pending.len() < block {
            pending.push(random_col(&mut rng));
        }

        if basis.len + block > cap {
            let keep = keep_on_restart.min(j);
            basis.compress(&y.subcols(0, keep).to_owned(), &theta[..keep]);
        }
    }
    Err(Error::NoConvergence { iterations: opts.max_iterations, residual: last_worst })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{csc_from_triplets, csc_identity};

    fn diag(v: &[f64]) -> Csc {
        let e: Vec<_> = v.iter().enumerate().map(|(i, &x)| (i, i, x)).collect();
        csc_from_triplets(v.len(), v.len(), &e)
    }

    #[test]
    fn diagonal_pencil() {
        let r = solve_pencil(&diag(&[3.0, 1.0, 2.0]), &csc_identity(3), 3, 1e-10, 0).unwrap();
        for (v, e) in r.values.iter().zip([1.0, 2.0, 3.0]) {
            assert!((v - e).abs() < 1e-12);
        }
    }

    #[test]
    fn two_by_two() {
        let a = csc_from_triplets(2, 2, &[(0, 0, 2.0), (0, 1, -1.0), (1, 0, -1.0), (1, 1, 2.0)]);
        let r = solve_pencil(&a, &csc_identity(2), 2, 1e-10, 0).unwrap();
        assert!((r.values[0] - 1.0).abs() < 1e-12 && (r.values[1] - 3.0).abs() < 1e-12);
    }

    fn path_laplacian(n: usize) -> (Csc, Csc) {
        let mut a = vec![];
        let mut m = vec![];
        for i in 0..n {
            a.push((i, i, 2.0));
            m.push((i, i, 4.0 / 6.0));
            if i + 1 < n {
                a.push((i, i + 1, -1.0));
                a.push((i + 1, i, -1.0));
                m.push((i, i + 1, 1.0 / 6.0));
                m.push((i + 1, i, 1.0 / 6.0));
            }
        }
        (csc_from_triplets(n, n, &a), csc_from_triplets(n, n, &m))
    }

    #[test]
    fn krylov_matches_dense_with_multiplicity() {
        // Two disjoint copies produce every eigenvalue twice.
        let (a1, m1) = path_laplacian(150);
        let shift = |m: &Csc| {
            let e: Vec<_> = m.triplet_iter().map(|t| (t.row + 150, t.col + 150, *t.val)).collect();
            e
        };
        let mut ea: Vec<_> = a1.triplet_iter().map(|t| (t.row, t.col, *t.val)).collect();
        ea.extend(shift(&a1));
        let mut em: Vec<_> = m1.triplet_iter().map(|t| (t.row, t.col, *t.val)).collect();
        em.extend(shift(&m1));
        let a = csc_from_triplets(300, 300, &ea);
        let m = csc_from_triplets(300, 300, &em);
        let mut opts = PencilOptions::new(12);
        opts.method = PencilMethod::Dense;
        let d = solve_pencil_with(&a, &m, &opts).unwrap();
        opts.method = PencilMethod::Krylov;
        let k = solve_pencil_with(&a, &m, &opts).unwrap();
        for (x, y) in d.values.iter().zip(&k.values) {
            assert!((x - y).abs() <= 1e-8 * x.abs().max(1.0), "{x} vs {y}");
        }
        assert!((k.values[0] - k.values[1]).abs() < 1e-10);
    }
}
