use std::path::{Path, PathBuf};

use clap::Parser;
use formlap_cli::{run, Cli, Outcome, EXIT_CHECK_FAILED, EXIT_INPUT, EXIT_OK, EXIT_USAGE};
use formlap_core::io::{emit, SpaceDocument};
use formlap_core::mesh::generators::{disk, flat_torus};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn invoke(args: &[&str], out: &Path) -> Result<Outcome, formlap_cli::CliError> {
    let mut argv = vec!["formlap"];
    argv.extend_from_slice(args);
    let out = out.to_str().unwrap().to_string();
    argv.extend_from_slice(&["--out", &out]);
    run(&Cli::try_parse_from(argv).expect("valid arguments"))
}

#[test]
fn spectrum_writes_one_row_per_eigenvalue() {
    let dir = tempfile::tempdir().unwrap();
    let input = data("circle.json");
    let o = invoke(&["spectrum", "--degree", "0", "--count", "10", input.to_str().unwrap()], dir.path()).unwrap();
    assert_eq!(o.exit_code, EXIT_OK);
    let csv = std::fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "p,k,lambda,multiplicity,residual");
    assert_eq!(lines.len(), 11);
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["command"], "spectrum");
    assert_eq!(report["seed"], 0);
    assert!(report["input_digest"].as_str().unwrap().starts_with("sha256:"));
}

#[test]
fn hodge_check_on_figure_eight_passes() {
    let dir = tempfile::tempdir().unwrap();
    let input = data("eight.json");
    let o = invoke(&["hodge-check", input.to_str().unwrap()], dir.path()).unwrap();
    assert_eq!(o.exit_code, EXIT_OK);
    assert_eq!(o.report.verdict, Some(true));
    let csv = std::fs::read_to_string(dir.path().join("hodge_check.csv")).unwrap();
    assert!(csv.contains("0,2,1,2,true") && csv.contains("1,1,0,1,true"), "{csv}");
}

#[test]
fn hodge_check_exit_status_reflects_failure() {
    // Absolute conditions on a disk whose boundary is declared singular:
    // harmonic dims (1,0,0) against IH reversed (0,0,1).
    let dir = tempfile::tempdir().unwrap();
    let mut k = disk(2).unwrap();
    k.strata = vec![Vec::new(), k.boundary.clone()];
    k.boundary.clear();
    let input = dir.path().join("disk.json");
    std::fs::write(&input, emit(&SpaceDocument::mesh(k)).unwrap()).unwrap();
    let o = invoke(&["hodge-check", input.to_str().unwrap()], dir.path()).unwrap();
    assert_eq!(o.report.verdict, Some(false));
    assert_eq!(o.exit_code, EXIT_CHECK_FAILED);
}

#[test]
fn certify_emits_certificate_and_comparison() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("torus.json");
    let doc = SpaceDocument::mesh(flat_torus(16, 16, 1.0, 1.0).unwrap()).with_lambda(1.0);
    std::fs::write(&input, emit(&doc).unwrap()).unwrap();
    let o = invoke(&["certify", "--Lambda", "1.5", "--k", "16", "--degree", "0", input.to_str().unwrap()], dir.path()).unwrap();
    assert_eq!(o.exit_code, EXIT_OK);
    let cert: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("certificate.json")).unwrap()).unwrap();
    for key in ["k", "p", "bound", "Lambda", "c", "E_psi", "N_psi", "provenance"] {
        assert!(cert.get(key).is_some(), "missing {key}");
    }
    assert_eq!(cert["Lambda"], 1.5);
    let cmp = std::fs::read_to_string(dir.path().join("comparison.csv")).unwrap();
    assert!(cmp.lines().nth(1).unwrap().ends_with("true"), "{cmp}");
}

#[test]
fn ih_and_weyl_commands() {
    let dir = tempfile::tempdir().unwrap();
    let eight = data("eight.json");
    let o = invoke(&["ih", eight.to_str().unwrap()], dir.path()).unwrap();
    assert_eq!(o.report.results["betti"]["1"], 2);
    let cone = data("disk_cone.json");
    let o = invoke(&["ih", cone.to_str().unwrap()], dir.path()).unwrap();
    assert_eq!(o.report.results["ih"]["2"], 1);
    let circle = data("circle.json");
    let o = invoke(&["weyl", circle.to_str().unwrap()], dir.path()).unwrap();
    let dev = o.report.results["relative_deviation"].as_f64().unwrap();
    assert!(dev < 0.2, "{dev}");
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let input = data("disk.soff");
    for dir in [&a, &b] {
        invoke(&["spectrum", "--count", "6", "--seed", "7", input.to_str().unwrap()], dir.path()).unwrap();
    }
    let ra = std::fs::read(a.path().join("report.json")).unwrap();
    let rb = std::fs::read(b.path().join("report.json")).unwrap();
    assert_eq!(ra, rb);
}

#[test]
fn input_errors_use_the_input_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let eight = data("eight.json");
    let e = invoke(&["certify", eight.to_str().unwrap()], dir.path()).unwrap_err();
    assert_eq!(e.code, EXIT_INPUT);
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"kind":"graph","graph":{"vertices":["a"],"edges":[{"id":"e","tail":"a","head":"a","length":-1}]}}"#).unwrap();
    let e = invoke(&["spectrum", bad.to_str().unwrap()], dir.path()).unwrap_err();
    assert_eq!(e.code, EXIT_INPUT);
    assert!(e.message.contains("length must be positive"));
    let missing = dir.path().join("missing.json");
    assert_eq!(invoke(&["ih", missing.to_str().unwrap()], dir.path()).unwrap_err().code, EXIT_INPUT);
}

#[test]
fn unknown_command_is_a_usage_error() {
    let err = Cli::try_parse_from(["formlap", "frobnicate", "x.json"]).unwrap_err();
    assert_eq!(err.exit_code(), EXIT_USAGE);
}
