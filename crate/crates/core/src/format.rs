//! The `mlpr-tensor v1` text format.
//!
//! ```text
//! mlpr-tensor v1
//! order <m>
//! dim <n>
//! <n lines of n^(m-1) whitespace-separated values>
//! ```
//!
//! Values are written with 17 significant digits so they parse back to the
//! same `f64`. Blank lines and lines starting with `#` are ignored.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::numeric;
use crate::tensor::TransitionTensor;

pub const HEADER: &str = "mlpr-tensor v1";

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// Splits a line into `(1-based column, token)` pairs.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push((s + 1, &line[s..i]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}

fn keyed_value(line_no: usize, line: &str, key: &str) -> Result<usize> {
    let toks = tokens(line);
    match toks.as_slice() {
        [(_, k), (col, v)] if *k == key => v
            .parse::<usize>()
            .map_err(|_| parse_err(line_no, *col, format!("expected an integer {key}, got {v:?}"))),
        [(col, _), ..] => Err(parse_err(line_no, *col, format!("expected `{key} <value>`"))),
        [] => Err(parse_err(line_no, 1, format!("expected `{key} <value>`"))),
    }
}

/// Parses a tensor, validating shape and stochasticity.
pub fn parse(text: &str) -> Result<TransitionTensor> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        });

    let (ln, header) = lines.next().ok_or_else(|| parse_err(1, 1, "empty input"))?;
    if header.trim() != HEADER {
        return Err(parse_err(ln, 1, format!("expected header {HEADER:?}")));
    }
    let (ln, l) = lines.next().ok_or_else(|| parse_err(ln + 1, 1, "missing order line"))?;
    let order = keyed_value(ln, l, "order")?;
    if order < 3 {
        return Err(parse_err(ln, 1, format!("order {order} is below 3")));
    }
    let (ln, l) = lines.next().ok_or_else(|| parse_err(ln + 1, 1, "missing dim line"))?;
    let dim = keyed_value(ln, l, "dim")?;
    if dim == 0 {
        return Err(parse_err(ln, 1, "dim must be at least 1"));
    }
    let cols = numeric::checked_pow(dim, order - 1)
        .ok_or_else(|| parse_err(ln, 1, "column count overflows"))?;

    let mut flat = Vec::with_capacity(dim * cols);
    let mut last = ln;
    for row in 0..dim {
        let (ln, l) = lines.next().ok_or_else(|| {
            Error::Dimension(format!("expected {dim} rows, found {row} (after line {last})"))
        })?;
        last = ln;
        let toks = tokens(l);
        if toks.len() != cols {
            return Err(Error::Dimension(format!(
                "line {ln}: expected {cols} columns for dim {dim}, order {order}; found {}",
                toks.len()
            )));
        }
        for (col, tok) in toks {
            let v: f64 = tok
                .parse()
                .map_err(|_| parse_err(ln, col, format!("not a number: {tok:?}")))?;
            flat.push(v);
        }
    }
    if let Some((ln, _)) = lines.next() {
        return Err(parse_err(ln, 1, format!("unexpected data after {dim} rows")));
    }
    TransitionTensor::new(order, dim, flat)
}

/// Serializes a tensor with 17 significant digits per value.
pub fn serialize(tensor: &TransitionTensor) -> String {
    let mut out = String::new();
    writeln!(out, "{HEADER}").unwrap();
    writeln!(out, "order {}", tensor.order()).unwrap();
    writeln!(out, "dim {}", tensor.dim()).unwrap();
    for i in 0..tensor.dim() {
        let row: Vec<String> = tensor.row(i).iter().map(|v| format_value(*v)).collect();
        writeln!(out, "{}", row.join(" ")).unwrap();
    }
    out
}

/// Formats a value so that it parses back exactly.
pub fn format_value(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else if v == 1.0 {
        "1".to_string()
    } else {
        format!("{v:.16e}")
    }
}

/// Parses a whitespace- or comma-separated vector file.
pub fn parse_vector(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("");
        let cleaned = body.replace(',', " ");
        for (col, tok) in tokens(&cleaned) {
            out.push(
                tok.parse()
                    .map_err(|_| parse_err(i + 1, col, format!("not a number: {tok:?}")))?,
            );
        }
    }
    Ok(out)
}
