//! Goresky–MacPherson intersection homology from allowable simplicial chains.
//!
//! After one barycentric subdivision every stratum is a full subcomplex, so
//! `|σ| ∩ X_{n−k}` is the face of `σ` spanned by its vertices in `X_{n−k}`.
//! Ranks are exact over the rationals.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::homology::boundary_columns;
use super::perversity::Perversity;
use crate::error::{invalid, Result};
use crate::linalg::exact::exact_rank;
use crate::mesh::complex::faces_of;
use crate::mesh::StratifiedComplex;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IHResult {
    pub perversity: Perversity,
    /// Degree → Betti number over ℚ, for degrees `0..=n`.
    pub betti: BTreeMap<usize, usize>,
    /// Simplex counts of the subdivided strata, e.g. `n=2;simplices=..;X=[..]`.
    pub fingerprint: String,
}

impl IHResult {
    pub fn get(&self, degree: usize) -> usize {
        self.betti.get(&degree).copied().unwrap_or(0)
    }

    pub fn as_vec(&self) -> Vec<usize> {
        self.betti.values().copied().collect()
    }

    /// Plain-text table with one row per degree.
    pub fn table(&self) -> String {
        let mut out = String::from("degree  IH\n");
        for (d, b) in &self.betti {
            out.push_str(&format!("{d:>6}  {b}\n"));
        }
        out
    }
}

/// The closed strata `X_{n−k}`, `k = 1..=n`, as simplex sets.
struct StrataSets {
    n: usize,
    by_codim: Vec<HashSet<Vec<usize>>>,
}

impl StrataSets {
    fn new(k: &StratifiedComplex) -> Self {
        let n = k.dim();
        let by_codim = (0..=n)
            .map(|c| if c == 0 { HashSet::new() } else { k.stratum(n - c).into_iter().flatten().collect() })
            .collect();
        Self { n, by_codim }
    }

    /// `dim(|σ| ∩ X_{n−k})`, or `None` when empty.
    fn meet_dim(&self, sigma: &[usize], codim: usize) -> Option<usize> {
        let x = &self.by_codim[codim];
        if x.is_empty() {
            return None;
        }
        faces_of(sigma).into_iter().filter(|f| x.contains(f)).map(|f| f.len() - 1).max()
    }

    fn allows(&self, sigma: &[usize], pv: &Perversity) -> bool {
        let i = sigma.len() as i64 - 1;
        (1..=self.n).all(|k| match self.meet_dim(sigma, k) {
            None => true,
            Some(d) => d as i64 <= i - k as i64 + pv.at(k) as i64,
        })
    }
}

fn check_perversity(n: usize, pv: &Perversity) -> Result<()> {
    if pv.max_codim() < n {
        return Err(invalid(format!("perversity covers codimension {} but the complex has dimension {n}", pv.max_codim())));
    }
    Ok(())
}

/// Whether every simplex of the chain support satisfies
/// `dim(|σ| ∩ X_{n−k}) ≤ i − k + p̄(k)` for all `k ≥ 1`, with `i` the simplex
/// dimension. Intersections are taken on the given triangulation.
pub fn allowable(chain: &[Vec<usize>], k: &StratifiedComplex, pv: &Perversity) -> bool {
    let sets = StrataSets::new(k);
    if pv.max_codim() < sets.n {
        return false;
    }
    chain.iter().all(|s| {
        let mut s = s.clone();
        s.sort_unstable();
        sets.allows(&s, pv)
    })
}

/// Intersection homology of `k` with perversity `pv` and rational
/// coefficients, computed on one barycentric subdivision.
pub fn ih_betti(k: &StratifiedComplex, pv: &Perversity) -> Result<IHResult> {
    ih_impl(k, pv, false)
}

/// Intersection homology of `k` relative to its boundary subcomplex.
pub fn ih_betti_relative(k: &StratifiedComplex, pv: &Perversity) -> Result<IHResult> {
    ih_impl(k, pv, true)
}

fn ih_impl(k: &StratifiedComplex, pv: &Perversity, relative: bool) -> Result<IHResult> {
    k.validate()?;
    let n = k.dim();
    check_perversity(n, pv)?;
    // Only the trivial orientation system is supported.
    k.orient()?;
    let sub = k.barycentric_subdivision()?;
    let sets = StrataSets::new(&sub);
    let lid: HashSet<Vec<usize>> = if relative { sub.boundary_closure().into_iter().flatten().collect() } else { HashSet::new() };

    // Chain groups of K'/L' split into allowable and non-allowable simplices.
    let mut allowed: Vec<Vec<&Vec<usize>>> = Vec::new();
    let mut row_all: Vec<HashMap<&Vec<usize>, usize>> = Vec::new();
    let mut row_bad: Vec<HashMap<&Vec<usize>, usize>> = Vec::new();
    for level in &sub.simplices {
        let (mut good, mut all, mut bad) = (Vec::new(), HashMap::new(), HashMap::new());
        for s in level.iter().filter(|s| !lid.contains(*s)) {
            let next = all.len();
            all.insert(s, next);
            if sets.allows(s, pv) {
                good.push(s);
            } else {
                let next = bad.len();
                bad.insert(s, next);
            }
        }
        allowed.push(good);
        row_all.push(all);
        row_bad.push(bad);
    }
    let rank_all = |i: usize| if i == 0 || i > n { 0 } else { exact_rank(boundary_columns(allowed[i].iter().copied(), &row_all[i - 1])) };
    let rank_bad = |i: usize| if i == 0 || i > n { 0 } else { exact_rank(boundary_columns(allowed[i].iter().copied(), &row_bad[i - 1])) };

    let r_all: Vec<usize> = (0..=n + 1).map(rank_all).collect();
    let r_bad: Vec<usize> = (0..=n + 1).map(rank_bad).collect();
    let betti = (0..=n)
        .map(|i| (i, allowed[i].len() + r_bad[i + 1] - r_all[i] - r_all[i + 1]))
        .collect();

    let levels: Vec<String> = (0..n).map(|j| sub.stratum(j).iter().map(BTreeSet::len).sum::<usize>().to_string()).collect();
    let total: usize = sub.simplices.iter().map(Vec::len).sum();
    let mut fingerprint = format!("n={n};simplices={total};X=[{}]", levels.join(","));
    if relative {
        fingerprint.push_str(&format!(";rel={}", lid.len()));
    }
    Ok(IHResult { perversity: pv.clone(), betti, fingerprint })
}
