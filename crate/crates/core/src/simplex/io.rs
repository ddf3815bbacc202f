//! Plain-text mesh files.
//!
//! ```text
//! d L M
//! <L lines with d coordinates>
//! <M lines with d + 1 zero-based vertex indices>
//! ```
//!
//! Fields are whitespace separated and blank lines are ignored. Coordinates are
//! written with Rust's shortest round-trip formatting, so a written mesh reads
//! back bit-identically.

use std::io::{BufRead, Write};

use super::Triangulation;
use crate::error::{Error, Result};

pub fn write_mesh<W: Write>(tri: &Triangulation, mut out: W) -> Result<()> {
    writeln!(out, "{} {} {}", tri.dim(), tri.vertex_count(), tri.simplex_count())?;
    for v in tri.vertices() {
        let line: Vec<String> = v.iter().map(|c| c.to_string()).collect();
        writeln!(out, "{}", line.join(" "))?;
    }
    for s in tri.simplices() {
        let line: Vec<String> = s.iter().map(|k| k.to_string()).collect();
        writeln!(out, "{}", line.join(" "))?;
    }
    Ok(())
}

pub fn read_mesh<R: BufRead>(input: R) -> Result<Triangulation> {
    let mut lines = Vec::new();
    for line in input.lines() {
        lines.push(line?);
    }
    parse_mesh(&lines.join("\n"))
}

pub fn parse_mesh(text: &str) -> Result<Triangulation> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let (line_no, header) =
        lines.next().ok_or(Error::Parse { line: 1, message: "empty mesh file".into() })?;
    let header: Vec<usize> = parse_fields(line_no, header)?;
    let [dim, l, m] = header[..] else {
        return Err(Error::Parse { line: line_no, message: "header must be `d L M`".into() });
    };

    let eof = text.lines().count() + 1;
    let mut vertices = Vec::with_capacity(l);
    for _ in 0..l {
        let (line_no, line) =
            lines.next().ok_or(Error::Parse { line: eof, message: format!("expected {l} vertex lines") })?;
        let v: Vec<f64> = parse_fields(line_no, line)?;
        if v.len() != dim {
            return Err(Error::Parse {
                line: line_no,
                message: format!("vertex has {} coordinates, expected {dim}", v.len()),
            });
        }
        vertices.push(v);
    }
    let mut simplices = Vec::with_capacity(m);
    for _ in 0..m {
        let (line_no, line) =
            lines.next().ok_or(Error::Parse { line: eof, message: format!("expected {m} simplex lines") })?;
        simplices.push(parse_fields(line_no, line)?);
    }
    if let Some((line_no, _)) = lines.next() {
        return Err(Error::Parse { line: line_no, message: "trailing content after simplices".into() });
    }
    Triangulation::new(dim, vertices, simplices)
}

fn parse_fields<T: std::str::FromStr>(line_no: usize, line: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    line.split_whitespace()
        .map(|f| f.parse::<T>().map_err(|e| Error::Parse { line: line_no, message: format!("{f:?}: {e}") }))
        .collect()
}
