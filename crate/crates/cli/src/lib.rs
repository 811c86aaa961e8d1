//! Command dispatch for the `formlap` tool: loads a space document, runs one
//! analysis, and writes a JSON report plus CSV/JSON artifacts.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use formlap_core::cone::{cone_graph_spectrum, cone_ih, ConeBase};
use formlap_core::graph::secular_lowest;
use formlap_core::io::{format_sig, load_space, to_report_json, SpaceDocument, SpaceKind};
use formlap_core::mesh::generators::from_graph;
use formlap_core::mesh::{harmonic_dim, hodge_assemble, quotient_spectrum_with, QuotientOptions, StratifiedComplex};
use formlap_core::minmax::{box_family, bump_profile, certificate, empirical_rayleigh, weyl_fit, QuotientConvention};
use formlap_core::strata::crosscheck::hodge_cross_check_with;
use formlap_core::strata::{gm_perversity, ih_betti, stratify_multiconical, CrossCheckOptions, CrossCheckSpace, IHResult, Perversity};
use formlap_core::{Error, SpectralResult};

pub const EXIT_OK: i32 = 0;
/// `hodge-check` ran and found a disagreement.
pub const EXIT_CHECK_FAILED: i32 = 1;
/// Command-line usage error (reported by the argument parser).
pub const EXIT_USAGE: i32 = 2;
/// Unreadable, malformed or incompatible input.
pub const EXIT_INPUT: i32 = 3;
/// A numerical method failed or refused (no gap, no convergence, …).
pub const EXIT_NUMERICAL: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "formlap", version, about = "Form Laplacians, minmax certificates and intersection homology on singular spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lowest eigenvalues of the form Laplacian.
    Spectrum(Invocation),
    /// Rayleigh certificate for λ_k against the computed value.
    Certify(Invocation),
    /// Intersection homology Betti numbers.
    Ih(Invocation),
    /// Harmonic dimensions against intersection homology, degree by degree.
    HodgeCheck(Invocation),
    /// Weyl-exponent fit of the eigenvalue growth.
    Weyl(Invocation),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Spectrum(_) => "spectrum",
            Command::Certify(_) => "certify",
            Command::Ih(_) => "ih",
            Command::HodgeCheck(_) => "hodge-check",
            Command::Weyl(_) => "weyl",
        }
    }

    pub fn invocation(&self) -> &Invocation {
        match self {
            Command::Spectrum(i) | Command::Certify(i) | Command::Ih(i) | Command::HodgeCheck(i) | Command::Weyl(i) => i,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct Invocation {
    /// Space document (JSON, or the OFF-like mesh format for .off/.soff/.mesh).
    pub input: PathBuf,
    /// Form degree p.
    #[arg(long, default_value_t = 0)]
    pub degree: usize,
    /// Number of eigenvalues (weyl: upper end of the fit range, default 100).
    #[arg(long)]
    pub count: Option<usize>,
    /// Solver tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Seed for iterative solvers.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory for artifacts.
    #[arg(long, default_value = "formlap-out")]
    pub out: PathBuf,
    /// Chart Lipschitz constant (overrides the document metadata).
    #[arg(long = "Lambda")]
    pub lambda: Option<f64>,
    /// Eigenvalue index (certify) or lower end of the fit range (weyl, default 10).
    #[arg(long)]
    pub k: Option<usize>,
    /// Comma-separated perversity p(0),p(1),… replacing the upper middle one.
    #[arg(long)]
    pub perversity: Option<String>,
    /// spectrum on meshes: full Hodge spectrum instead of the quotient spectrum.
    #[arg(long)]
    pub hodge: bool,
}

/// What a run produced.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    pub tool_version: String,
    pub input: String,
    pub input_digest: String,
    pub kind: SpaceKind,
    pub seed: u64,
    pub parameters: BTreeMap<String, Value>,
    pub results: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<bool>,
}

#[derive(Debug)]
pub struct Outcome {
    pub report: RunReport,
    /// Human-readable summary for standard output.
    pub summary: String,
    pub exit_code: i32,
    pub artifacts: Vec<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
#[error("{message}")]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        Self { code: EXIT_INPUT, message: message.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::RootBracketing { .. }
            | Error::NoSpectralGap { .. }
            | Error::AmbiguousRank { .. }
            | Error::NoConvergence { .. }
            | Error::NotPositiveDefinite
            | Error::SubspaceCollapse { .. }
            | Error::BesselRange { .. } => EXIT_NUMERICAL,
            _ => EXIT_INPUT,
        };
        Self { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::input(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        Self::input(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn incompatible(command: &str, kind: SpaceKind, detail: &str) -> CliError {
    CliError::input(format!("{command} is not available for {kind} documents{detail}"))
}

/// SHA-256 of the input bytes, as `sha256:<hex>`.
pub fn digest(bytes: &[u8]) -> String {
    let hash = Sha256::digest(bytes);
    let hex: String = hash.iter().map(|b| format!("{b:02x}")).collect();
    format!("sha256:{hex}")
}

struct Context<'a> {
    inv: &'a Invocation,
    doc: SpaceDocument,
    params: BTreeMap<String, Value>,
    artifacts: Vec<PathBuf>,
}

impl Context<'_> {
    fn param(&mut self, key: &str, value: impl Serialize) {
        self.params.insert(key.to_string(), serde_json::to_value(value).unwrap_or(Value::Null));
    }

    fn write(&mut self, name: &str, contents: &str) -> CliResult<()> {
        let path = self.inv.out.join(name);
        std::fs::write(&path, contents)?;
        self.artifacts.push(path);
        Ok(())
    }

    fn write_spectrum_csv(&mut self, name: &str, r: &SpectralResult) -> CliResult<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["p", "k", "lambda", "multiplicity", "residual"])?;
        for e in &r.eigenvalues {
            w.write_record([
                r.degree.to_string(),
                e.k.to_string(),
                format_sig(e.lambda),
                e.multiplicity.to_string(),
                format_sig(e.residual),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::input(e.to_string()))?;
        self.write(name, &String::from_utf8_lossy(&bytes))
    }

    fn perversity(&mut self, n: usize) -> CliResult<Perversity> {
        let pv = match &self.inv.perversity {
            Some(list) => Perversity::parse(list)?,
            None => gm_perversity(n),
        };
        self.param("perversity", &pv.values);
        Ok(pv)
    }

    fn quotient_options(&self) -> QuotientOptions {
        QuotientOptions { tol: self.inv.tol.unwrap_or(1e-9), seed: self.inv.seed, ..QuotientOptions::default() }
    }
}

/// Loads the input, runs the command and writes every artifact (including
/// `report.json`) into the output directory.
pub fn run(cli: &Cli) -> CliResult<Outcome> {
    let inv = cli.command.invocation();
    let bytes = std::fs::read(&inv.input).map_err(|e| CliError::input(format!("{}: {e}", inv.input.display())))?;
    let doc = load_space(&inv.input)?;
    std::fs::create_dir_all(&inv.out)?;
    let mut ctx = Context { inv, doc, params: BTreeMap::new(), artifacts: Vec::new() };
    let (results, summary, verdict) = match &cli.command {
        Command::Spectrum(_) => spectrum(&mut ctx)?,
        Command::Certify(_) => certify(&mut ctx)?,
        Command::Ih(_) => ih(&mut ctx)?,
        Command::HodgeCheck(_) => hodge_check(&mut ctx)?,
        Command::Weyl(_) => weyl(&mut ctx)?,
    };
    let report = RunReport {
        command: cli.command.name().to_string(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        input: file_name(&inv.input),
        input_digest: digest(&bytes),
        kind: ctx.doc.kind,
        seed: inv.seed,
        parameters: ctx.params.clone(),
        results,
        verdict,
    };
    ctx.write("report.json", &to_report_json(&report)?)?;
    let exit_code = if verdict == Some(false) { EXIT_CHECK_FAILED } else { EXIT_OK };
    Ok(Outcome { report, summary, exit_code, artifacts: ctx.artifacts })
}

fn file_name(p: &Path) -> String {
    p.file_name().map_or_else(|| p.display().to_string(), |n| n.to_string_lossy().into_owned())
}

type Produced = (Value, String, Option<bool>);

fn spectrum_table(r: &SpectralResult) -> String {
    let mut s = format!("{:>4}  {:>20}  {:>4}  {:>10}\n", "k", "lambda", "mult", "residual");
    for e in &r.eigenvalues {
        s.push_str(&format!("{:>4}  {:>20.12}  {:>4}  {:>10.2e}\n", e.k, e.lambda, e.multiplicity, e.residual));
    }
    s
}

fn mesh_quotient(ctx: &Context<'_>, k: &StratifiedComplex, p: usize, count: usize) -> CliResult<SpectralResult> {
    let c = k.cochains(!k.boundary.is_empty())?;
    Ok(quotient_spectrum_with(&c, p, count, &ctx.quotient_options())?)
}

fn compute_spectrum(ctx: &mut Context<'_>, count: usize) -> CliResult<SpectralResult> {
    let p = ctx.inv.degree;
    let tol = ctx.inv.tol;
    match ctx.doc.kind {
        SpaceKind::Graph => {
            if p != 0 {
                return Err(incompatible("spectrum", SpaceKind::Graph, " in degrees above 0 (use hodge-check for the degree-1 kernel)"));
            }
            let g = ctx.doc.as_graph()?;
            ctx.param("tol", tol.unwrap_or(1e-12));
            Ok(secular_lowest(&g, count, tol.unwrap_or(1e-12))?)
        }
        SpaceKind::Cone => {
            if p != 0 {
                return Err(incompatible("spectrum", SpaceKind::Cone, " in degrees above 0"));
            }
            let (base, eps) = ctx.doc.as_cone()?;
            Ok(cone_graph_spectrum(&base, eps, count)?)
        }
        SpaceKind::Mesh => {
            let k = ctx.doc.as_mesh()?.clone();
            let n = k.dim();
            if p > n {
                return Err(CliError::input(format!("degree {p} exceeds the mesh dimension {n}")));
            }
            ctx.param("relative", !k.boundary.is_empty());
            ctx.param("tol", ctx.quotient_options().tol);
            if !ctx.inv.hodge {
                if p == n {
                    return Err(CliError::input(format!("the quotient spectrum is defined for degrees below {n}; pass --hodge for degree {n}")));
                }
                return mesh_quotient(ctx, &k, p, count);
            }
            ctx.param("hodge", true);
            let c = k.cochains(!k.boundary.is_empty())?;
            let opts = ctx.quotient_options();
            let upper = if p < n { Some(quotient_spectrum_with(&c, p, count, &opts)?) } else { None };
            let lower = if p > 0 { Some(quotient_spectrum_with(&c, p - 1, count, &opts)?) } else { None };
            let harmonic = harmonic_dim(&c, p, 1e-8)?;
            let mut r = hodge_assemble(p, upper.as_ref(), lower.as_ref(), harmonic)?;
            r.truncate(count);
            Ok(r)
        }
    }
}

fn spectrum(ctx: &mut Context<'_>) -> CliResult<Produced> {
    let count = ctx.inv.count.unwrap_or(10);
    ctx.param("degree", ctx.inv.degree);
    ctx.param("count", count);
    let r = compute_spectrum(ctx, count)?;
    ctx.write_spectrum_csv("spectrum.csv", &r)?;
    let summary = spectrum_table(&r);
    Ok((serde_json::to_value(&r).map_err(Error::from)?, summary, None))
}

fn certify(ctx: &mut Context<'_>) -> CliResult<Produced> {
    let k = ctx.doc.as_mesh().map_err(|_| incompatible("certify", ctx.doc.kind, "; it needs a mesh with a unit-cube chart"))?.clone();
    let n = k.dim();
    let p = ctx.inv.degree;
    let kk = ctx.inv.k.unwrap_or(1);
    let lambda_chart = ctx.inv.lambda.or(ctx.doc.metadata.lambda_chart).unwrap_or(1.0);
    let relative = !k.boundary.is_empty();
    let convention = if relative || p > 0 {
        QuotientConvention::Relative
    } else {
        let volume = k.simplices[n].iter().map(|s| k.volume(s)).sum();
        QuotientConvention::Closed { volume }
    };
    ctx.param("degree", p);
    ctx.param("k", kk);
    ctx.param("Lambda", lambda_chart);
    ctx.param("convention", convention);
    let psi = bump_profile(n, p, 24, convention)?;
    let cert = certificate(lambda_chart, n, p, kk, &psi)?;
    let c = k.cochains(relative)?;
    let r = quotient_spectrum_with(&c, p, kk, &ctx.quotient_options())?;
    let computed = r.eigenvalues.get(kk - 1).map(|e| e.lambda).ok_or_else(|| CliError::input("spectrum too short"))?;
    // Witness Rayleigh quotient of the pulled-back box family (identity
    // chart from the unit cube onto the mesh coordinates, degree 0).
    let rayleigh = if p == 0 {
        let family = box_family(&psi, cert.c)?;
        family.pullback_nodal(&k, &c, kk).and_then(|forms| empirical_rayleigh(&forms, &c, p)).ok()
    } else {
        None
    };
    let holds = cert.bound >= computed;
    let comparison = json!({
        "k": kk,
        "p": p,
        "computed_lambda": computed,
        "certificate_bound": cert.bound,
        "margin": cert.bound / computed - 1.0,
        "empirical_rayleigh": rayleigh,
        "holds": holds,
    });
    ctx.write("certificate.json", &to_report_json(&cert)?)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["k", "p", "computed_lambda", "certificate_bound", "empirical_rayleigh", "holds"])?;
    w.write_record([
        kk.to_string(),
        p.to_string(),
        format_sig(computed),
        format_sig(cert.bound),
        rayleigh.map_or_else(String::new, format_sig),
        holds.to_string(),
    ])?;
    let bytes = w.into_inner().map_err(|e| CliError::input(e.to_string()))?;
    ctx.write("comparison.csv", &String::from_utf8_lossy(&bytes))?;
    let summary = format!(
        "{:>4}  {:>2}  {:>18}  {:>18}  {:>18}  {}\n{:>4}  {:>2}  {:>18.10}  {:>18.10}  {:>18}  {}\n",
        "k",
        "p",
        "computed lambda",
        "certificate",
        "empirical Rayleigh",
        "holds",
        kk,
        p,
        computed,
        cert.bound,
        rayleigh.map_or_else(|| "-".to_string(), |x| format!("{x:.10}")),
        holds
    );
    Ok((json!({"certificate": cert, "comparison": comparison}), summary, None))
}

fn graph_ih(g: &formlap_core::graph::MetricGraph, pv: &Perversity) -> CliResult<IHResult> {
    let k = stratify_multiconical(&from_graph(g, 3)?)?;
    Ok(ih_betti(&k, pv)?)
}

fn ih(ctx: &mut Context<'_>) -> CliResult<Produced> {
    match ctx.doc.kind {
        SpaceKind::Graph => {
            let g = ctx.doc.as_graph()?;
            let pv = ctx.perversity(1)?;
            let r = graph_ih(&g, &pv)?;
            ctx.write("ih.json", &to_report_json(&r)?)?;
            Ok((serde_json::to_value(&r).map_err(Error::from)?, r.table(), None))
        }
        SpaceKind::Mesh => {
            let k = stratify_multiconical(ctx.doc.as_mesh()?)?;
            let pv = ctx.perversity(k.dim())?;
            let r = ih_betti(&k, &pv)?;
            ctx.write("ih.json", &to_report_json(&r)?)?;
            Ok((serde_json::to_value(&r).map_err(Error::from)?, r.table(), None))
        }
        SpaceKind::Cone => {
            let (base, _) = ctx.doc.as_cone()?;
            let (base_ih, k) = match &base {
                ConeBase::Points { distances } => (BTreeMap::from([(0, distances.len())]), 1),
                ConeBase::Graph(g) => (graph_ih(g, &ctx.perversity(1)?)?.betti, 2),
                ConeBase::Spectrum { .. } => return Err(incompatible("ih", SpaceKind::Cone, " over a spectrum-only base")),
            };
            let t = cone_ih(&base_ih, k)?;
            ctx.write("ih.json", &to_report_json(&t)?)?;
            let mut summary = String::from("degree  IH  IH_c\n");
            for d in 0..=k {
                summary.push_str(&format!("{d:>6}  {:>2}  {:>4}\n", t.ih[&d], t.ih_c[&d]));
            }
            Ok((serde_json::to_value(&t).map_err(Error::from)?, summary, None))
        }
    }
}

fn hodge_check(ctx: &mut Context<'_>) -> CliResult<Produced> {
    let mut opts = CrossCheckOptions::default();
    let graph;
    let space = match ctx.doc.kind {
        SpaceKind::Graph => {
            graph = ctx.doc.as_graph()?;
            if let Some(t) = ctx.inv.tol {
                opts.tol = t;
            }
            CrossCheckSpace::Graph(&graph)
        }
        SpaceKind::Mesh => {
            opts.gap_tol = ctx.inv.tol.unwrap_or(1e-8);
            CrossCheckSpace::Mesh(ctx.doc.as_mesh()?)
        }
        SpaceKind::Cone => return Err(incompatible("hodge-check", SpaceKind::Cone, "")),
    };
    let n = if matches!(space, CrossCheckSpace::Graph(_)) { 1 } else { ctx.doc.as_mesh()?.dim() };
    let pv = match &ctx.inv.perversity {
        Some(list) => Some(Perversity::parse(list)?),
        None => None,
    };
    let report = hodge_cross_check_with(space, pv.as_ref(), &opts)?;
    ctx.param("perversity", pv.map_or_else(|| gm_perversity(n).values, |p| p.values));
    ctx.param("gap_tol", opts.gap_tol);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["p", "kernel_dim", "ih_degree", "ih", "pass"])?;
    for d in &report.degrees {
        w.write_record([d.degree.to_string(), d.kernel_dim.to_string(), d.ih_degree.to_string(), d.ih.to_string(), d.pass.to_string()])?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::input(e.to_string()))?;
    ctx.write("hodge_check.csv", &String::from_utf8_lossy(&bytes))?;
    let mut summary = report.table();
    summary.push_str(if report.pass { "overall: pass\n" } else { "overall: FAIL\n" });
    Ok((serde_json::to_value(&report).map_err(Error::from)?, summary, Some(report.pass)))
}

fn weyl(ctx: &mut Context<'_>) -> CliResult<Produced> {
    let hi = ctx.inv.count.unwrap_or(100);
    let lo = ctx.inv.k.unwrap_or(10);
    let n = match ctx.doc.kind {
        SpaceKind::Graph => 1,
        SpaceKind::Mesh => ctx.doc.as_mesh()?.dim(),
        SpaceKind::Cone => return Err(incompatible("weyl", SpaceKind::Cone, "")),
    };
    ctx.param("degree", ctx.inv.degree);
    ctx.param("k_range", [lo, hi]);
    let r = compute_spectrum(ctx, hi)?;
    let fit = weyl_fit(&r, (lo, hi))?;
    let expected = 2.0 / n as f64;
    let deviation = (fit.exponent - expected).abs() / expected;
    ctx.write_spectrum_csv("spectrum.csv", &r)?;
    let summary = format!(
        "fitted exponent {:.6} (2/n = {:.6}, relative deviation {:.3}), constant {:.6}\n",
        fit.exponent, expected, deviation, fit.constant
    );
    Ok((json!({"fit": fit, "expected_exponent": expected, "relative_deviation": deviation, "spectrum": r}), summary, None))
}
