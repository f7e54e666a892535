//! Bundled test tensors.
//!
//! The 29 binary tensors `R3_1..R3_5`, `R4_1..R4_19`, `R6_1..R6_5` are stored
//! as 0/1 literals and column-normalized at load time. `R1` and `R2` are the
//! two illustration problems, stored with their printed fractions.

mod data;

use crate::error::{Error, Result};
use crate::tensor::TransitionTensor;

/// A named bundled tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemRecord {
    pub name: String,
    pub tensor: TransitionTensor,
    pub provenance: String,
}

impl ProblemRecord {
    pub fn dim(&self) -> usize {
        self.tensor.dim()
    }
}

/// Divides each column of a nonnegative row-major `rows × cols` matrix by
/// its sum.
pub fn normalize_binary(raw: &[f64], rows: usize, cols: usize) -> Result<Vec<f64>> {
    if raw.len() != rows * cols {
        return Err(Error::Dimension(format!(
            "{} values for a {rows} x {cols} matrix",
            raw.len()
        )));
    }
    if raw.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::NotStochastic("negative or non-finite entry".into()));
    }
    let mut out = raw.to_vec();
    for c in 0..cols {
        let s = crate::numeric::sum(&(0..rows).map(|i| raw[i * cols + c]).collect::<Vec<_>>());
        if s <= 0.0 {
            return Err(Error::ZeroColumn { code: c });
        }
        for i in 0..rows {
            out[i * cols + c] /= s;
        }
    }
    Ok(out)
}

const THIRD: f64 = 1.0 / 3.0;

#[rustfmt::skip]
const R1_ROWS: [[f64; 9]; 3] = [
    [THIRD, THIRD, THIRD, THIRD, 0.0, 0.0, 0.0, 0.0, 0.0],
    [THIRD, THIRD, THIRD, THIRD, 0.0, 0.5, 1.0, 0.0, 1.0],
    [THIRD, THIRD, THIRD, THIRD, 1.0, 0.5, 0.0, 1.0, 0.0],
];

#[rustfmt::skip]
const R2_ROWS: [[f64; 16]; 4] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.5],
    [0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0, 0.5, 0.0, 0.0, 0.0, 0.5, 0.0, 0.0],
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.5, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0],
    [1.0, 1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.5, 1.0, 0.5],
];

fn binary_record(name: &str, n: usize, bits: &[u8]) -> ProblemRecord {
    let raw: Vec<f64> = bits.iter().map(|&b| f64::from(b)).collect();
    let flat = normalize_binary(&raw, n, n * n).expect("bundled data has no zero column");
    ProblemRecord {
        name: name.to_string(),
        tensor: TransitionTensor::new(3, n, flat).expect("bundled data is stochastic"),
        provenance: format!("binary {n}x{n}x{n} test tensor, column-normalized"),
    }
}

fn literal_record(name: &str, rows: Vec<Vec<f64>>, provenance: &str) -> ProblemRecord {
    ProblemRecord {
        name: name.to_string(),
        tensor: TransitionTensor::from_rows(&rows).expect("bundled data is stochastic"),
        provenance: provenance.to_string(),
    }
}

/// All 31 bundled problem names: `R1`, `R2`, then the binary set in order.
pub fn list() -> Vec<&'static str> {
    let mut names = vec!["R1", "R2"];
    names.extend(data::BINARY.iter().map(|(name, _, _)| *name));
    names
}

/// Names of the 29 binary problems, in table order.
pub fn binary_names() -> Vec<&'static str> {
    data::BINARY.iter().map(|(name, _, _)| *name).collect()
}

/// Raw 0/1 flattening of a binary problem, before normalization.
pub fn raw_binary(name: &str) -> Result<(usize, Vec<f64>)> {
    data::BINARY
        .iter()
        .find(|(n, _, _)| *n == name)
        .map(|(_, n, bits)| (*n, bits.iter().map(|&b| f64::from(b)).collect()))
        .ok_or_else(|| Error::UnknownProblem(name.to_string()))
}

/// Loads one of the 31 bundled problems.
pub fn load(name: &str) -> Result<ProblemRecord> {
    match name {
        "R1" => Ok(literal_record(
            "R1",
            R1_ROWS.iter().map(|r| r.to_vec()).collect(),
            "3x3x3 illustration problem (same tensor as R3_1)",
        )),
        "R2" => Ok(literal_record(
            "R2",
            R2_ROWS.iter().map(|r| r.to_vec()).collect(),
            "4x4x4 illustration problem (same tensor as R4_11)",
        )),
        _ => data::BINARY
            .iter()
            .find(|(n, _, _)| *n == name)
            .map(|(name, n, bits)| binary_record(name, *n, bits))
            .ok_or_else(|| Error::UnknownProblem(name.to_string())),
    }
}

/// Loads every bundled problem in [`list`] order.
pub fn load_all() -> Vec<ProblemRecord> {
    list()
        .into_iter()
        .map(|n| load(n).expect("listed names load"))
        .collect()
}

/// Names accepted by [`example`].
pub const EXAMPLES: [&str; 2] = ["example31", "nonunique"];

/// Additional small tensors used by the examples and tests:
///
/// * `example31`: the 3-state second-order chain with a printed 9 × 9
///   reduced matrix.
/// * `nonunique`: a 3-state tensor with two solutions at `α = 0.99`,
///   `v = e_2`.
pub fn example(name: &str) -> Result<ProblemRecord> {
    match name {
        "example31" => Ok(ProblemRecord {
            name: name.into(),
            tensor: higher_order_example(),
            provenance: "3-state second-order chain example".into(),
        }),
        "nonunique" => Ok(ProblemRecord {
            name: name.into(),
            tensor: nonunique_example(),
            provenance: "3-state tensor with two solutions at alpha = 0.99, v = e_2".into(),
        }),
        _ => Err(Error::UnknownProblem(name.to_string())),
    }
}

/// Looks a name up among the bundled problems, then the examples.
pub fn resolve(name: &str) -> Result<ProblemRecord> {
    load(name).or_else(|_| example(name))
}

/// The 3-state second-order example chain.
pub fn higher_order_example() -> TransitionTensor {
    TransitionTensor::from_rows(&[
        vec![0.0, 0.5, 0.0, 0.5, 0.0, 1.0, 0.5, 0.5, 0.0],
        vec![0.0, 0.0, 0.0, 0.0, 0.5, 0.0, 0.0, 0.5, 0.0],
        vec![1.0, 0.5, 1.0, 0.5, 0.5, 0.0, 0.5, 0.0, 1.0],
    ])
    .expect("example is stochastic")
}

/// The 3-state tensor with two multilinear PageRank solutions.
pub fn nonunique_example() -> TransitionTensor {
    TransitionTensor::from_rows(&[
        vec![0.0, 0.0, 0.0, 0.0, 0.0, 0.0, THIRD, 1.0, 0.0],
        vec![0.0, 0.0, 0.0, 0.0, 1.0, 0.0, THIRD, 0.0, 1.0],
        vec![1.0, 1.0, 1.0, 1.0, 0.0, 1.0, THIRD, 0.0, 0.0],
    ])
    .expect("example is stochastic")
}
