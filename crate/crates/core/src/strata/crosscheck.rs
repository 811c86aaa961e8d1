//! Harmonic dimensions against intersection homology, degree by degree:
//! `dim Ker Δ_p = IH_{n−p}`.

use serde::{Deserialize, Serialize};

use super::ih::{ih_betti, IHResult};
use super::perversity::{gm_perversity, Perversity};
use super::stratify::stratify_multiconical;
use crate::error::Result;
use crate::graph::secular::secular_lowest;
use crate::graph::{betti_numbers, MetricGraph};
use crate::mesh::generators::from_graph;
use crate::mesh::quotient::harmonic_dim;
use crate::mesh::StratifiedComplex;
use crate::spectrum::kernel_dimension;

#[derive(Debug, Clone, Copy)]
pub enum CrossCheckSpace<'a> {
    Graph(&'a MetricGraph),
    Mesh(&'a StratifiedComplex),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossCheckOptions {
    /// Zero-cluster cutoff for graph spectra and relative rank cutoff for
    /// mesh coboundaries.
    pub gap_tol: f64,
    /// Root tolerance of the graph secular solver.
    pub tol: f64,
}

impl Default for CrossCheckOptions {
    fn default() -> Self {
        Self { gap_tol: 1e-6, tol: 1e-12 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeCheck {
    /// Form degree `p`.
    pub degree: usize,
    pub kernel_dim: usize,
    /// How the kernel dimension was obtained.
    pub source: String,
    pub ih_degree: usize,
    pub ih: usize,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossCheckReport {
    pub dimension: usize,
    pub degrees: Vec<DegreeCheck>,
    pub ih: IHResult,
    pub pass: bool,
}

impl CrossCheckReport {
    /// Builds the per-degree comparison from kernel dimensions indexed by
    /// form degree.
    pub fn compare(kernels: &[(usize, String)], ih: IHResult) -> Self {
        let n = kernels.len().saturating_sub(1);
        let degrees: Vec<DegreeCheck> = kernels
            .iter()
            .enumerate()
            .map(|(p, (dim, source))| {
                let b = ih.get(n - p);
                DegreeCheck { degree: p, kernel_dim: *dim, source: source.clone(), ih_degree: n - p, ih: b, pass: *dim == b }
            })
            .collect();
        let pass = degrees.iter().all(|d| d.pass);
        Self { dimension: n, degrees, ih, pass }
    }

    pub fn table(&self) -> String {
        let mut out = String::from("p  dim Ker  IH degree  IH  verdict\n");
        for d in &self.degrees {
            out.push_str(&format!(
                "{}  {:>7}  {:>9}  {:>2}  {}\n",
                d.degree,
                d.kernel_dim,
                d.ih_degree,
                d.ih,
                if d.pass { "pass" } else { "FAIL" }
            ));
        }
        out
    }
}

/// Computes both sides on the same space and compares them with the upper
/// middle perversity.
pub fn hodge_cross_check(space: CrossCheckSpace<'_>, opts: &CrossCheckOptions) -> Result<CrossCheckReport> {
    hodge_cross_check_with(space, None, opts)
}

/// As [`hodge_cross_check`], with an optional perversity override.
pub fn hodge_cross_check_with(space: CrossCheckSpace<'_>, pv: Option<&Perversity>, opts: &CrossCheckOptions) -> Result<CrossCheckReport> {
    match space {
        CrossCheckSpace::Graph(g) => {
            g.validate()?;
            // b₁ ≤ E, so E + 1 values always reach past the kernel.
            let r = secular_lowest(g, g.num_edges() + 1, opts.tol)?;
            let ker0 = kernel_dimension(&r, opts.gap_tol)?;
            let (b0, _) = betti_numbers(g);
            let k = stratify_multiconical(&from_graph(g, 3)?)?;
            let ih = ih_betti(&k, pv.unwrap_or(&gm_perversity(1)))?;
            let kernels = vec![(ker0, "secular-determinant".to_string()), (b0, "constant 1-forms per component".to_string())];
            Ok(CrossCheckReport::compare(&kernels, ih))
        }
        CrossCheckSpace::Mesh(k) => {
            let strat = stratify_multiconical(k)?;
            let n = k.dim();
            let c = k.cochains(!k.boundary.is_empty())?;
            let kernels = (0..=n)
                .map(|p| Ok((harmonic_dim(&c, p, opts.gap_tol)?, "whitney-harmonic".to_string())))
                .collect::<Result<Vec<_>>>()?;
            let ih = ih_betti(&strat, pv.unwrap_or(&gm_perversity(n)))?;
            Ok(CrossCheckReport::compare(&kernels, ih))
        }
    }
}
