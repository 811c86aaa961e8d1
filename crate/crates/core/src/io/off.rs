//! OFF-like text format for stratified complexes.
//!
//! ```text
//! # comments run to the end of the line
//! SOFF
//! <vertices> <simplices> [<coordinate width>]
//! <x> <y> ...                 one line per vertex
//! <k> <v_1> ... <v_k>         one line per maximal simplex
//! lengths <m>                 optional; m lines "<a> <b> <length>"
//! strata <j> <m>              optional, per level; m simplex lines
//! boundary <m>                optional; m simplex lines
//! lambda <value>              optional chart constant
//! label <key> <value>         optional, repeatable
//! ```

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::mesh::{LengthOverride, StratifiedComplex};

use super::document::{Metadata, SpaceDocument};

struct Lines<'a> {
    source: &'a str,
    items: Vec<(usize, Vec<&'a str>)>,
    pos: usize,
}

impl<'a> Lines<'a> {
    fn new(source: &'a str, text: &'a str) -> Self {
        let items = text
            .lines()
            .enumerate()
            .filter_map(|(i, l)| {
                let l = l.split('#').next().unwrap_or("");
                let toks: Vec<&str> = l.split_whitespace().collect();
                (!toks.is_empty()).then_some((i + 1, toks))
            })
            .collect();
        Self { source, items, pos: 0 }
    }

    fn err(&self, line: usize, message: impl Into<String>) -> Error {
        Error::Parse { location: format!("{}:{line}", self.source), message: message.into() }
    }

    fn next(&mut self, what: &str) -> Result<(usize, Vec<&'a str>)> {
        let last = self.items.last().map_or(0, |l| l.0);
        let item = self.items.get(self.pos).cloned().ok_or_else(|| self.err(last, format!("unexpected end of input, expected {what}")))?;
        self.pos += 1;
        Ok(item)
    }

    fn peek(&self) -> Option<&(usize, Vec<&'a str>)> {
        self.items.get(self.pos)
    }

    fn num<T: std::str::FromStr>(&self, line: usize, tok: &str, what: &str) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        tok.parse::<T>().map_err(|e| self.err(line, format!("{what} {tok:?}: {e}")))
    }

    fn simplex(&mut self) -> Result<Vec<usize>> {
        let (line, toks) = self.next("a simplex line")?;
        let k: usize = self.num(line, toks[0], "vertex count")?;
        if toks.len() != k + 1 {
            return Err(self.err(line, format!("simplex line declares {k} vertices but lists {}", toks.len() - 1)));
        }
        toks[1..].iter().map(|t| self.num::<usize>(line, t, "vertex index")).collect()
    }
}

/// Parses the text format into a mesh document (validated).
pub fn parse_off(source: &str, text: &str) -> Result<SpaceDocument> {
    let mut lines = Lines::new(source, text);
    if lines.peek().is_some_and(|(_, t)| t[0] == "SOFF" || t[0] == "OFF") {
        lines.pos += 1;
    }
    let (hline, header) = lines.next("the counts header")?;
    if header.len() < 2 || header.len() > 3 {
        return Err(lines.err(hline, "header must read \"<vertices> <simplices> [<coordinate width>]\""));
    }
    let nv: usize = lines.num(hline, header[0], "vertex count")?;
    let ns: usize = lines.num(hline, header[1], "simplex count")?;
    let mut width: Option<usize> = header.get(2).map(|t| lines.num(hline, t, "coordinate width")).transpose()?;
    let mut coords = Vec::with_capacity(nv);
    if width != Some(0) {
        for _ in 0..nv {
            let (line, toks) = lines.next("a vertex coordinate line")?;
            let w = *width.get_or_insert(toks.len());
            if toks.len() != w {
                return Err(lines.err(line, format!("vertex has {} coordinates, expected {w}", toks.len())));
            }
            coords.push(toks.iter().map(|t| lines.num::<f64>(line, t, "coordinate")).collect::<Result<Vec<_>>>()?);
        }
    } else {
        coords = vec![Vec::new(); nv];
    }
    let mut tops = Vec::with_capacity(ns);
    for _ in 0..ns {
        tops.push(lines.simplex()?);
    }
    let mut k = StratifiedComplex::from_top(coords, &tops).map_err(|e| lines.err(hline, e.to_string()))?;
    let mut metadata = Metadata::default();
    while let Some((line, toks)) = lines.peek().cloned() {
        lines.pos += 1;
        match toks[0] {
            "lengths" if toks.len() == 2 => {
                let m: usize = lines.num(line, toks[1], "length count")?;
                for _ in 0..m {
                    let (l, t) = lines.next("a length line")?;
                    if t.len() != 3 {
                        return Err(lines.err(l, "length line must read \"<a> <b> <length>\""));
                    }
                    let (a, b): (usize, usize) = (lines.num(l, t[0], "vertex index")?, lines.num(l, t[1], "vertex index")?);
                    k.length_overrides.push(LengthOverride { a: a.min(b), b: a.max(b), length: lines.num(l, t[2], "length")? });
                }
            }
            "strata" if toks.len() == 3 => {
                let j: usize = lines.num(line, toks[1], "stratum level")?;
                let m: usize = lines.num(line, toks[2], "simplex count")?;
                if k.strata.len() <= j {
                    k.strata.resize(j + 1, Vec::new());
                }
                for _ in 0..m {
                    let s = lines.simplex()?;
                    k.strata[j].push(s);
                }
            }
            "boundary" if toks.len() == 2 => {
                let m: usize = lines.num(line, toks[1], "simplex count")?;
                for _ in 0..m {
                    let s = lines.simplex()?;
                    k.boundary.push(s);
                }
            }
            "lambda" if toks.len() == 2 => metadata.lambda_chart = Some(lines.num(line, toks[1], "Lambda")?),
            "label" if toks.len() >= 3 => {
                metadata.labels.insert(toks[1].to_string(), toks[2..].join(" "));
            }
            other => return Err(lines.err(line, format!("unknown or malformed block {other:?}"))),
        }
    }
    let doc = SpaceDocument { metadata, ..SpaceDocument::mesh(k) };
    doc.validate().map_err(|e| match e {
        Error::Parse { .. } => e,
        other => Error::Parse { location: source.to_string(), message: other.to_string() },
    })?;
    Ok(doc)
}

fn write_simplex(out: &mut String, s: &[usize]) {
    let _ = write!(out, "{}", s.len());
    for v in s {
        let _ = write!(out, " {v}");
    }
    out.push('\n');
}

/// Writes a mesh document in the text format.
pub fn emit_off(doc: &SpaceDocument) -> Result<String> {
    let k = doc.as_mesh()?;
    let tops = k.maximal_simplices();
    let width = k.coords.first().map_or(0, Vec::len);
    let mut out = String::from("SOFF\n");
    let _ = writeln!(out, "{} {} {width}", k.num_vertices(), tops.len());
    if width > 0 {
        for c in &k.coords {
            let line: Vec<String> = c.iter().map(|x| format!("{x:?}")).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
    }
    for s in &tops {
        write_simplex(&mut out, s);
    }
    if !k.length_overrides.is_empty() {
        let _ = writeln!(out, "lengths {}", k.length_overrides.len());
        for o in &k.length_overrides {
            let _ = writeln!(out, "{} {} {:?}", o.a, o.b, o.length);
        }
    }
    for (j, gens) in k.strata.iter().enumerate() {
        let _ = writeln!(out, "strata {j} {}", gens.len());
        for s in gens {
            write_simplex(&mut out, s);
        }
    }
    if !k.boundary.is_empty() {
        let _ = writeln!(out, "boundary {}", k.boundary.len());
        for s in &k.boundary {
            write_simplex(&mut out, s);
        }
    }
    if let Some(l) = doc.metadata.lambda_chart {
        let _ = writeln!(out, "lambda {l:?}");
    }
    for (key, value) in &doc.metadata.labels {
        let _ = writeln!(out, "label {key} {value}");
    }
    Ok(out)
}
