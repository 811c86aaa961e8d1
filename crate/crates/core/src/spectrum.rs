//! Spectral results shared by every solver.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One eigenvalue, listed once per unit of multiplicity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Eigenvalue {
    /// 1-based position in the ascending list.
    pub k: usize,
    pub lambda: f64,
    /// Size of the numerical cluster this eigenvalue belongs to.
    pub multiplicity: usize,
    pub residual: f64,
}

/// Provenance of a spectral computation.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SolverInfo {
    pub method: String,
    pub parameters: BTreeMap<String, f64>,
    pub tolerance: f64,
    pub seed: u64,
    /// Diagnostic flags such as `"clustered"`.
    pub flags: Vec<String>,
}

impl SolverInfo {
    pub fn new(method: impl Into<String>, tolerance: f64) -> Self {
        Self { method: method.into(), tolerance, ..Self::default() }
    }

    pub fn with_param(mut self, key: &str, value: f64) -> Self {
        self.parameters.insert(key.to_string(), value);
        self
    }

    pub fn flag(&mut self, flag: impl Into<String>) {
        let flag = flag.into();
        if !self.flags.contains(&flag) {
            self.flags.push(flag);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralResult {
    pub degree: usize,
    pub eigenvalues: Vec<Eigenvalue>,
    pub solver: SolverInfo,
}

impl SpectralResult {
    /// Builds a result from `(value, residual)` pairs; values are sorted and
    /// clusters agreeing within `cluster_tol` (relative) share a multiplicity.
    pub fn from_values(degree: usize, mut values: Vec<(f64, f64)>, cluster_tol: f64, solver: SolverInfo) -> Self {
        values.sort_by(|a, b| a.0.total_cmp(&b.0));
        let scale = values.iter().map(|v| v.0.abs()).fold(0.0, f64::max).max(1.0) * 1e-12;
        let mut eigenvalues = Vec::with_capacity(values.len());
        let mut start = 0;
        while start < values.len() {
            let mut end = start + 1;
            while end < values.len() {
                let (prev, cur) = (values[end - 1].0, values[end].0);
                if (cur - prev).abs() <= cluster_tol * cur.abs().max(scale) {
                    end += 1;
                } else {
                    break;
                }
            }
            for (i, &(lambda, residual)) in values[start..end].iter().enumerate() {
                eigenvalues.push(Eigenvalue { k: start + i + 1, lambda, multiplicity: end - start, residual });
            }
            start = end;
        }
        Self { degree, eigenvalues, solver }
    }

    pub fn values(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|e| e.lambda).collect()
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Number of eigenvalues (with multiplicity) at or below `threshold`.
    pub fn count_below(&self, threshold: f64) -> usize {
        self.eigenvalues.iter().filter(|e| e.lambda <= threshold).count()
    }

    /// Keeps the first `count` eigenvalues.
    pub fn truncate(&mut self, count: usize) {
        self.eigenvalues.truncate(count);
    }
}

/// Ratio the first eigenvalue above the gap must exceed the zero cluster by.
pub const KERNEL_GAP_RATIO: f64 = 1e3;

/// Counts eigenvalues below `gap_tol`, refusing when the cutoff does not sit
/// in a clear spectral gap.
pub fn kernel_dimension(result: &SpectralResult, gap_tol: f64) -> Result<usize> {
    let values = result.values();
    let dim = values.iter().filter(|&&v| v < gap_tol).count();
    let below = if dim > 0 { values[dim - 1].abs() } else { 0.0 };
    match values.get(dim) {
        Some(&above) => {
            if above < gap_tol || (below > 0.0 && above / below < KERNEL_GAP_RATIO) {
                return Err(Error::NoSpectralGap { gap_tol, below, above });
            }
        }
        None => {
            // Nothing above the cutoff was computed, so the gap is unverified.
            return Err(Error::NoSpectralGap { gap_tol, below, above: f64::NAN });
        }
    }
    Ok(dim)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn result(v: &[f64]) -> SpectralResult {
        SpectralResult::from_values(0, v.iter().map(|&x| (x, 0.0)).collect(), 1e-7, SolverInfo::new("test", 1e-9))
    }

    #[test]
    fn multiplicities_from_clusters() {
        let r = result(&[1.0, 0.0, 1.0 + 1e-12, 4.0]);
        assert_eq!(r.eigenvalues[1].multiplicity, 2);
        assert_eq!(r.eigenvalues[2].k, 3);
    }

    #[test]
    fn kernel_dimension_counts_zero_cluster() {
        assert_eq!(kernel_dimension(&result(&[1e-13, 2e-13, 1.0]), 1e-6).unwrap(), 2);
        assert_eq!(kernel_dimension(&result(&[9.8, 39.4]), 1e-6).unwrap(), 0);
    }

    #[test]
    fn kernel_dimension_refuses_without_gap() {
        assert!(matches!(
            kernel_dimension(&result(&[1e-7, 2e-6, 1.0]), 1e-6),
            Err(Error::NoSpectralGap { .. })
        ));
    }
}
