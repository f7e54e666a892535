//! Stochastic transition tensors and the tensor-apply kernel.
//!
//! An order-`m`, dimension-`n` tensor `P` is stored as its mode-1 flattening
//! `R`, a dense row-major `n × n^(m-1)` matrix. Column `c` of `R` holds the
//! distribution of the next state given the trailing subscripts
//! `(i_2, ..., i_m)`, with
//!
//! ```text
//! c = sum_{t=2..m} (i_t - 1) * n^(t-2)        (0-based c, 1-based i_t)
//! ```
//!
//! so the second subscript varies fastest. For `m = 3` the column of `(j, k)`
//! is `(k - 1) n + (j - 1)`, and `R (x ⊗ x)` equals `P x²`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::numeric::{self, CompensatedSum};

/// Column-sum tolerance used when constructing tensors and vectors.
pub const STOCHASTIC_TOL: f64 = 1e-12;

/// A nonnegative vector summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    /// Validates nonnegativity and unit sum within [`STOCHASTIC_TOL`].
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Dimension("empty probability vector".into()));
        }
        if let Some((i, v)) = entries
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(Error::NotStochastic(format!("entry {i} is {v}")));
        }
        let total = numeric::sum(&entries);
        if (total - 1.0).abs() > STOCHASTIC_TOL {
            return Err(Error::NotStochastic(format!("entries sum to {total}")));
        }
        Ok(Self(entries))
    }

    /// Divides a nonnegative vector by its sum.
    pub fn normalized(mut entries: Vec<f64>) -> Result<Self> {
        if entries.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::NotStochastic("negative or non-finite entry".into()));
        }
        let total = numeric::sum(&entries);
        if total <= 0.0 {
            return Err(Error::NotStochastic("zero vector".into()));
        }
        entries.iter_mut().for_each(|v| *v /= total);
        Ok(Self(entries))
    }

    /// Wraps entries already known to be stochastic up to rounding.
    pub(crate) fn from_raw(entries: Vec<f64>) -> Self {
        Self(entries)
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n > 0, "uniform vector needs n >= 1");
        Self(vec![1.0 / n as f64; n])
    }

    /// Unit basis vector `e_j` (0-based `j`).
    pub fn basis(n: usize, j: usize) -> Self {
        assert!(j < n);
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        Self(e)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl AsRef<[f64]> for ProbabilityVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Encodes 1-based trailing subscripts `(i_2, ..., i_m)` as a 0-based column.
pub fn column_code(indices: &[usize], n: usize) -> Result<usize> {
    let mut code = 0;
    let mut scale = 1;
    for &i in indices {
        if i == 0 || i > n {
            return Err(Error::IndexOutOfRange { index: i, dim: n });
        }
        code += (i - 1) * scale;
        scale *= n;
    }
    Ok(code)
}

/// Inverse of [`column_code`]: the `count` 1-based subscripts of `code`.
pub fn decode_column(code: usize, n: usize, count: usize) -> Result<Vec<usize>> {
    let total = numeric::checked_pow(n, count)
        .ok_or_else(|| Error::Dimension("column space overflows usize".into()))?;
    if code >= total {
        return Err(Error::IndexOutOfRange {
            index: code,
            dim: total,
        });
    }
    let mut rem = code;
    Ok((0..count)
        .map(|_| {
            let d = rem % n;
            rem /= n;
            d + 1
        })
        .collect())
}

/// One column whose sum or entries fall outside tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnViolation {
    pub code: usize,
    pub sum: f64,
    pub min_entry: f64,
}

/// Outcome of [`validate_stochastic`].
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticReport {
    pub dim: usize,
    pub order: usize,
    pub violations: Vec<ColumnViolation>,
}

impl StochasticReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn offending_columns(&self) -> Vec<usize> {
        self.violations.iter().map(|v| v.code).collect()
    }
}

/// Infers the order `m` from an `n × cols` shape with `cols = n^(m-1)`.
pub fn infer_order(rows: usize, cols: usize) -> Result<usize> {
    if rows == 0 {
        return Err(Error::Dimension("matrix has no rows".into()));
    }
    if rows == 1 {
        return if cols == 1 {
            Ok(3)
        } else {
            Err(Error::Dimension(format!("{cols} columns for 1 row")))
        };
    }
    let mut power = rows;
    let mut m = 2;
    while power < cols {
        power = power
            .checked_mul(rows)
            .ok_or_else(|| Error::Dimension("column count overflow".into()))?;
        m += 1;
    }
    if power != cols || m < 3 {
        return Err(Error::Dimension(format!(
            "{cols} columns is not a power n^(m-1) of {rows} rows with m >= 3"
        )));
    }
    Ok(m)
}

/// Checks a row-major `rows × cols` flattening for column stochasticity.
pub fn validate_stochastic(
    flat: &[f64],
    rows: usize,
    cols: usize,
    tol: f64,
) -> Result<StochasticReport> {
    if flat.len() != rows * cols {
        return Err(Error::Dimension(format!(
            "{} values for a {rows} x {cols} matrix",
            flat.len()
        )));
    }
    let order = infer_order(rows, cols)?;
    let mut violations = Vec::new();
    for c in 0..cols {
        let mut acc = CompensatedSum::new();
        let mut min_entry = f64::INFINITY;
        for i in 0..rows {
            let v = flat[i * cols + c];
            acc.add(v);
            min_entry = min_entry.min(v);
        }
        let sum = acc.value();
        if !sum.is_finite() || (sum - 1.0).abs() > tol || min_entry < -tol {
            violations.push(ColumnViolation {
                code: c,
                sum,
                min_entry,
            });
        }
    }
    Ok(StochasticReport {
        dim: rows,
        order,
        violations,
    })
}

/// An order-`m` stochastic tensor stored as its mode-1 flattening.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionTensor {
    order: usize,
    dim: usize,
    cols: usize,
    flat: Vec<f64>,
}

impl TransitionTensor {
    /// Builds a tensor from a row-major flattening, rejecting any column that
    /// is not stochastic within [`STOCHASTIC_TOL`].
    pub fn new(order: usize, dim: usize, flat: Vec<f64>) -> Result<Self> {
        if order < 3 {
            return Err(Error::Order(order));
        }
        if dim == 0 {
            return Err(Error::Dimension("dimension must be >= 1".into()));
        }
        let cols = numeric::checked_pow(dim, order - 1)
            .ok_or_else(|| Error::Dimension("column space overflows usize".into()))?;
        if flat.len() != dim * cols {
            return Err(Error::Dimension(format!(
                "expected {} values for order {order}, dim {dim}; got {}",
                dim * cols,
                flat.len()
            )));
        }
        let report = validate_stochastic(&flat, dim, cols, STOCHASTIC_TOL)?;
        if let Some(bad) = report.violations.first() {
            return Err(Error::NotStochastic(format!(
                "column {} sums to {} (min entry {}); {} offending columns",
                bad.code,
                bad.sum,
                bad.min_entry,
                report.violations.len()
            )));
        }
        if flat.iter().any(|v| *v < 0.0 || *v > 1.0 + STOCHASTIC_TOL) {
            return Err(Error::NotStochastic("entry outside [0, 1]".into()));
        }
        Ok(Self {
            order,
            dim,
            cols,
            flat,
        })
    }

    /// Builds a tensor from flattening rows; the order is inferred.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        let m = infer_order(n, cols)?;
        Self::new(m, n, rows.concat())
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of flattening columns, `n^(m-1)`.
    pub fn columns(&self) -> usize {
        self.cols
    }

    /// Row-major flattening.
    pub fn flattening(&self) -> &[f64] {
        &self.flat
    }

    /// Flattening entry at 0-based row `i` and column code `c`.
    #[inline]
    pub fn get(&self, i: usize, c: usize) -> f64 {
        self.flat[i * self.cols + c]
    }

    /// Tensor entry `P(i, i_2, ..., i_m)` with 1-based subscripts.
    pub fn entry(&self, i: usize, trailing: &[usize]) -> Result<f64> {
        if trailing.len() != self.order - 1 {
            return Err(Error::Dimension(format!(
                "expected {} trailing subscripts",
                self.order - 1
            )));
        }
        if i == 0 || i > self.dim {
            return Err(Error::IndexOutOfRange {
                index: i,
                dim: self.dim,
            });
        }
        Ok(self.get(i - 1, column_code(trailing, self.dim)?))
    }

    pub fn column(&self, c: usize) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, c)).collect()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.flat[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.dim, self.cols, &self.flat)
    }

    fn check_len(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::Dimension(format!(
                "vector of length {} for a tensor of dimension {}",
                x.len(),
                self.dim
            )));
        }
        Ok(())
    }

    /// Weights `w[c] = prod_t x[i_t]` over all column codes, i.e. the
    /// `(m-1)`-fold Kronecker power of `x` in column-code order.
    pub fn kron_power(&self, x: &[f64]) -> Vec<f64> {
        let mut w = vec![1.0];
        for _ in 0..self.order - 1 {
            let mut next = Vec::with_capacity(w.len() * self.dim);
            for &xd in x {
                next.extend(w.iter().map(|wc| xd * wc));
            }
            w = next;
        }
        w
    }

    /// `R (x ⊗ ... ⊗ x)` for any vector of the right length.
    pub(crate) fn apply_slice(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.dim);
        let w = self.kron_power(x);
        (0..self.dim)
            .map(|i| numeric::dot(self.row(i), &w))
            .collect()
    }

    /// `P x^(m-1)` for a stochastic `x`; the image is stochastic.
    pub fn apply(&self, x: &ProbabilityVector) -> Result<ProbabilityVector> {
        self.check_len(x.as_slice())?;
        Ok(ProbabilityVector(self.apply_slice(x.as_slice())))
    }

    /// `P x^(m-1)` for an arbitrary real vector (used by pure Newton).
    pub fn apply_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_len(x)?;
        Ok(self.apply_slice(x))
    }

    /// `R (x ⊗ .. ⊗ I ⊗ .. ⊗ x)` with the identity in trailing slot
    /// `position` (0 = second tensor subscript).
    pub fn placement(&self, x: &[f64], position: usize) -> Result<DMatrix<f64>> {
        self.check_len(x)?;
        if position >= self.order - 1 {
            return Err(Error::Dimension(format!(
                "placement {position} for order {}",
                self.order
            )));
        }
        Ok(self.placement_unchecked(x, position))
    }

    fn placement_unchecked(&self, x: &[f64], position: usize) -> DMatrix<f64> {
        let n = self.dim;
        let stride = numeric::checked_pow(n, position).expect("checked at construction");
        let mut out = DMatrix::zeros(n, n);
        for c in 0..self.cols {
            let mut rem = c;
            let mut weight = 1.0;
            for t in 0..self.order - 1 {
                if t != position {
                    weight *= x[rem % n];
                }
                rem /= n;
            }
            if weight == 0.0 {
                continue;
            }
            let j = (c / stride) % n;
            for i in 0..n {
                out[(i, j)] += self.get(i, c) * weight;
            }
        }
        out
    }

    /// Sum over all `m-1` identity placements; `α·sum - I` is the Jacobian
    /// of `x ↦ α R x^(m-1)` minus the identity.
    pub fn placement_sum(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        self.check_len(x)?;
        let mut total = DMatrix::zeros(self.dim, self.dim);
        for t in 0..self.order - 1 {
            total += self.placement_unchecked(x, t);
        }
        Ok(total)
    }
}
