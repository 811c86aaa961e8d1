//! Space documents on disk and deterministic report serialization.

pub mod document;
pub mod off;

use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};

pub use document::{ConeBaseDoc, ConeDoc, EdgeDoc, GraphDoc, Metadata, SpaceDocument, SpaceKind};
pub use off::{emit_off, parse_off};

/// Significant digits kept for floating values in reports.
pub const REPORT_DIGITS: usize = 12;

/// Parses a JSON space document and enforces its invariants.
pub fn parse_document(source: &str, text: &str) -> Result<SpaceDocument> {
    let doc: SpaceDocument = serde_json::from_str(text).map_err(|e| Error::Parse {
        location: format!("{source}:{}:{}", e.line(), e.column()),
        message: e.to_string(),
    })?;
    doc.validate()?;
    Ok(doc)
}

/// Loads a space from `path`: JSON documents by default, the OFF-like mesh
/// format for `.off`, `.soff` and `.mesh` files.
pub fn load_space(path: impl AsRef<Path>) -> Result<SpaceDocument> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    let source = path.display().to_string();
    match path.extension().and_then(|e| e.to_str()) {
        Some("off" | "soff" | "mesh") => parse_off(&source, &text),
        _ => parse_document(&source, &text),
    }
}

/// JSON text of a document; [`parse_document`] reads it back unchanged.
pub fn emit(doc: &SpaceDocument) -> Result<String> {
    Ok(serde_json::to_string_pretty(doc)?)
}

/// Rounds `x` to [`REPORT_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", REPORT_DIGITS - 1, x).parse().unwrap_or(x)
}

/// Text form of [`round_sig`]: plain decimals for moderate magnitudes,
/// exponent notation for very small or very large ones.
pub fn format_sig(x: f64) -> String {
    let r = round_sig(x);
    let a = r.abs();
    if r == 0.0 || !r.is_finite() || (1e-4..1e12).contains(&a) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64() {
                if let Some(r) = serde_json::Number::from_f64(round_sig(x)) {
                    *n = r;
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Serializes `value` as pretty JSON with every float rounded to
/// [`REPORT_DIGITS`] significant digits. Non-finite floats become `null`.
pub fn to_report_json<T: Serialize>(value: &T) -> Result<String> {
    let mut v = serde_json::to_value(value)?;
    round_value(&mut v);
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::builders::figure_eight;
    use crate::mesh::generators::disk;

    #[test]
    fn significant_digits() {
        assert_eq!(round_sig(1.234_567_890_123_456), 1.234_567_890_12);
        assert_eq!(round_sig(-3.0e-20), -3.0e-20);
        assert_eq!(round_sig(0.0), 0.0);
        assert_eq!(format_sig(1.951_454_096_33e-15), "1.95145409633e-15");
        assert_eq!(format_sig(39.436_166_135_449_2), "39.4361661354");
        let s = to_report_json(&serde_json::json!({"a": [std::f64::consts::PI], "b": 2})).unwrap();
        assert!(s.contains("3.14159265359"), "{s}");
    }

    #[test]
    fn json_round_trip() {
        let docs = [
            SpaceDocument::graph(&figure_eight(1.0, 2.5)).with_lambda(1.5),
            SpaceDocument::mesh(disk(2).unwrap()),
            SpaceDocument::cone(ConeDoc { base: ConeBaseDoc::Points { distances: vec![vec![0.0, 3.0], vec![3.0, 0.0]] }, eps: 1.0 }),
        ];
        for d in docs {
            let back = parse_document("mem", &emit(&d).unwrap()).unwrap();
            assert_eq!(back, d);
        }
    }

    #[test]
    fn off_round_trip() {
        let mut k = disk(2).unwrap();
        k.strata = vec![Vec::new(), k.boundary.clone()];
        let d = SpaceDocument::mesh(k).with_lambda(1.25);
        let text = emit_off(&d).unwrap();
        assert_eq!(parse_off("mem", &text).unwrap(), d);
    }

    #[test]
    fn rejects_negative_length() {
        let text = r#"{"kind":"graph","graph":{"vertices":["a"],"edges":[{"id":"e","tail":"a","head":"a","length":-1}]}}"#;
        let err = parse_document("mem", text).unwrap_err().to_string();
        assert!(err.contains("length must be positive"), "{err}");
    }

    #[test]
    fn rejects_dangling_simplex() {
        let text = "SOFF\n3 1\n0 0\n1 0\n0 1\n3 0 1 7\n";
        let err = parse_off("mem", text).unwrap_err().to_string();
        assert!(err.contains('7') && err.contains("mem:2"), "{err}");
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = parse_document("mem", "{\n\"kind\": \"graph\",\n\"graph\": 3}").unwrap_err().to_string();
        assert!(err.contains("mem:3"), "{err}");
    }
}
