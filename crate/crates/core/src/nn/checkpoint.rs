//! Plain-text network checkpoints.
//!
//! ```text
//! lifting-network 1
//! input <width>
//! layers <count>
//! dense <in> <out> bias|nobias
//! relu
//! maxout <group>
//! lift standard clamp|error <L> <t_1> ... <t_L>
//! lift scaled <L> <t_1> ... <t_L>
//! params
//! <per dense layer, in order: `out` lines of `in` weights, then one bias line if present>
//! end
//! ```
//!
//! Numbers use Rust's shortest round-trip formatting, so a reloaded network
//! reproduces the saved one bit for bit.

use std::fmt::Write as _;

use super::layer::{Dense, Layer, Lifting, LiftingKind};
use super::Network;
use crate::error::{Error, Result};
use crate::lifting::{KnotSequence, OutOfRange};

const MAGIC: &str = "lifting-network 1";

pub fn to_checkpoint(net: &Network) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{MAGIC}");
    let _ = writeln!(s, "input {}", net.input_width());
    let _ = writeln!(s, "layers {}", net.layers().len());
    for layer in net.layers() {
        match layer {
            Layer::Dense(d) => {
                let bias = if d.bias().is_some() { "bias" } else { "nobias" };
                let _ = writeln!(s, "dense {} {} {bias}", d.inputs(), d.outputs());
            }
            Layer::Relu => s.push_str("relu\n"),
            Layer::Maxout { group } => {
                let _ = writeln!(s, "maxout {group}");
            }
            Layer::Lifting(l) => {
                let kind = match l.kind() {
                    LiftingKind::Standard(OutOfRange::Clamp) => "standard clamp",
                    LiftingKind::Standard(OutOfRange::Error) => "standard error",
                    LiftingKind::Scaled => "scaled",
                };
                let knots = join(l.knots().as_slice());
                let _ = writeln!(s, "lift {kind} {} {knots}", l.knots().len());
            }
        }
    }
    s.push_str("params\n");
    for layer in net.layers() {
        if let Layer::Dense(d) = layer {
            for row in d.weight().chunks(d.inputs()) {
                let _ = writeln!(s, "{}", join(row));
            }
            if let Some(b) = d.bias() {
                let _ = writeln!(s, "{}", join(b));
            }
        }
    }
    s.push_str("end\n");
    s
}

fn join(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Result<(usize, Vec<&'a str>)> {
        for (i, line) in self.inner.by_ref() {
            self.last = i + 1;
            let fields: Vec<&str> = line.split_whitespace().collect();
            if !fields.is_empty() {
                return Ok((i + 1, fields));
            }
        }
        Err(Error::Parse { line: self.last + 1, message: "unexpected end of checkpoint".into() })
    }
}

fn parse<T: std::str::FromStr>(line: usize, field: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    field.parse().map_err(|e| Error::Parse { line, message: format!("{field:?}: {e}") })
}

fn bad(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

pub fn from_checkpoint(text: &str) -> Result<Network> {
    let mut lines = Lines { inner: text.lines().enumerate(), last: 0 };
    let (line, magic) = lines.next()?;
    if magic.join(" ") != MAGIC {
        return Err(bad(line, format!("expected `{MAGIC}`")));
    }
    let (line, fields) = lines.next()?;
    let input: usize = match fields.as_slice() {
        ["input", w] => parse(line, w)?,
        _ => return Err(bad(line, "expected `input <width>`")),
    };
    let (line, fields) = lines.next()?;
    let count: usize = match fields.as_slice() {
        ["layers", n] => parse(line, n)?,
        _ => return Err(bad(line, "expected `layers <count>`")),
    };

    let mut layers = Vec::with_capacity(count);
    for _ in 0..count {
        let (line, fields) = lines.next()?;
        let layer = match fields.as_slice() {
            ["dense", i, o, bias] => {
                let (i, o): (usize, usize) = (parse(line, i)?, parse(line, o)?);
                let with_bias = match *bias {
                    "bias" => true,
                    "nobias" => false,
                    other => return Err(bad(line, format!("unknown bias flag {other:?}"))),
                };
                Layer::Dense(Dense::zeros(i, o, with_bias))
            }
            ["relu"] => Layer::Relu,
            ["maxout", k] => Layer::Maxout { group: parse(line, k)? },
            ["lift", "standard", policy, n, rest @ ..] => {
                let policy = match *policy {
                    "clamp" => OutOfRange::Clamp,
                    "error" => OutOfRange::Error,
                    other => return Err(bad(line, format!("unknown range policy {other:?}"))),
                };
                let knots = parse_knots(line, n, rest)?;
                Layer::Lifting(Lifting::new(knots, LiftingKind::Standard(policy)))
            }
            ["lift", "scaled", n, rest @ ..] => {
                Layer::Lifting(Lifting::new(parse_knots(line, n, rest)?, LiftingKind::Scaled))
            }
            _ => return Err(bad(line, format!("unknown layer descriptor {:?}", fields.join(" ")))),
        };
        layers.push(layer);
    }
    let (line, fields) = lines.next()?;
    if fields != ["params"] {
        return Err(bad(line, "expected `params`"));
    }
    for layer in &mut layers {
        if let Layer::Dense(d) = layer {
            let (inputs, outputs) = (d.inputs(), d.outputs());
            let mut weight = Vec::with_capacity(inputs * outputs);
            for _ in 0..outputs {
                weight.extend(read_row(&mut lines, inputs)?);
            }
            let bias = match d.bias() {
                Some(_) => Some(read_row(&mut lines, outputs)?),
                None => None,
            };
            *d = Dense::from_parts(inputs, outputs, weight, bias)?;
        }
    }
    let (line, fields) = lines.next()?;
    if fields != ["end"] {
        return Err(bad(line, "expected `end`"));
    }
    Network::new(input, layers)
}

fn parse_knots(line: usize, count: &str, values: &[&str]) -> Result<KnotSequence> {
    let count: usize = parse(line, count)?;
    if values.len() != count {
        return Err(bad(line, format!("expected {count} knots, found {}", values.len())));
    }
    let knots = values.iter().map(|v| parse(line, v)).collect::<Result<Vec<f64>>>()?;
    KnotSequence::new(knots)
}

fn read_row(lines: &mut Lines<'_>, width: usize) -> Result<Vec<f64>> {
    let (line, fields) = lines.next()?;
    if fields.len() != width {
        return Err(bad(line, format!("expected {width} values, found {}", fields.len())));
    }
    fields.iter().map(|f| parse(line, f)).collect()
}
