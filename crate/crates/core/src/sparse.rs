//! Sparse sub-stochastic tensors completed by a dangling correction.
//!
//! A sparse flattening `S` may have columns that sum to less than one. The
//! stochastic operator is `R = S + u dᵀ` with `dᵀ = eᵀ - eᵀS`, and
//! `R (x ⊗ ... ⊗ x) = z + (1 - eᵀz) u` where `z = S (x ⊗ ... ⊗ x)`, which
//! never forms `R` or the Kronecker power.

use crate::error::{Error, Result};
use crate::numeric::{self, CompensatedSum};
use crate::tensor::{ProbabilityVector, TransitionTensor, STOCHASTIC_TOL};

/// Nonzeros of `S` as `(row, column code, value)` triples, plus the fill `u`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseTransitionData {
    dim: usize,
    order: usize,
    nonzeros: Vec<(usize, usize, f64)>,
    u: ProbabilityVector,
}

impl SparseTransitionData {
    pub fn new(
        order: usize,
        dim: usize,
        nonzeros: Vec<(usize, usize, f64)>,
        u: ProbabilityVector,
    ) -> Result<Self> {
        if order < 3 {
            return Err(Error::Order(order));
        }
        if u.len() != dim {
            return Err(Error::Dimension(format!(
                "fill vector has length {}, expected {dim}",
                u.len()
            )));
        }
        let cols = numeric::checked_pow(dim, order - 1)
            .ok_or_else(|| Error::Dimension("column space overflows usize".into()))?;
        let mut col_sums = vec![CompensatedSum::new(); cols];
        for &(i, c, v) in &nonzeros {
            if i >= dim {
                return Err(Error::IndexOutOfRange { index: i, dim });
            }
            if c >= cols {
                return Err(Error::IndexOutOfRange {
                    index: c,
                    dim: cols,
                });
            }
            if !v.is_finite() || v < 0.0 {
                return Err(Error::NotStochastic(format!(
                    "negative value {v} at ({i}, {c})"
                )));
            }
            col_sums[c].add(v);
        }
        if let Some((c, s)) = col_sums
            .iter()
            .map(CompensatedSum::value)
            .enumerate()
            .find(|(_, s)| *s > 1.0 + STOCHASTIC_TOL)
        {
            return Err(Error::NotStochastic(format!("column {c} sums to {s} > 1")));
        }
        Ok(Self {
            dim,
            order,
            nonzeros,
            u,
        })
    }

    /// Drops the exact zeros of a dense tensor's flattening.
    pub fn from_dense(tensor: &TransitionTensor, u: ProbabilityVector) -> Result<Self> {
        let cols = tensor.columns();
        let nonzeros = (0..tensor.dim())
            .flat_map(|i| (0..cols).map(move |c| (i, c)))
            .filter_map(|(i, c)| {
                let v = tensor.get(i, c);
                (v != 0.0).then_some((i, c, v))
            })
            .collect();
        Self::new(tensor.order(), tensor.dim(), nonzeros, u)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn nonzeros(&self) -> &[(usize, usize, f64)] {
        &self.nonzeros
    }

    pub fn fill(&self) -> &ProbabilityVector {
        &self.u
    }

    /// `z = S (x ⊗ ... ⊗ x)`, one product of `m-1` entries per nonzero.
    fn sparse_apply(&self, x: &[f64]) -> Vec<f64> {
        let mut acc = vec![CompensatedSum::new(); self.dim];
        for &(i, c, v) in &self.nonzeros {
            let mut rem = c;
            let mut w = v;
            for _ in 0..self.order - 1 {
                w *= x[rem % self.dim];
                rem /= self.dim;
            }
            acc[i].add(w);
        }
        acc.iter().map(CompensatedSum::value).collect()
    }

    /// `R (x ⊗ ... ⊗ x)` with `R = S + u dᵀ`.
    pub fn dangling_apply(&self, x: &ProbabilityVector) -> Result<ProbabilityVector> {
        if x.len() != self.dim {
            return Err(Error::Dimension(format!(
                "vector of length {} for dimension {}",
                x.len(),
                self.dim
            )));
        }
        let mut z = self.sparse_apply(x.as_slice());
        let deficit = 1.0 - numeric::sum(&z);
        for (zi, ui) in z.iter_mut().zip(self.u.as_slice()) {
            *zi += deficit * ui;
        }
        // The deficit can be slightly negative from rounding; clamp tiny
        // negatives so the result stays on the simplex.
        for zi in z.iter_mut() {
            if *zi < 0.0 && *zi > -1e-15 {
                *zi = 0.0;
            }
        }
        Ok(ProbabilityVector::from_raw(z))
    }

    /// Dense `R = S + u dᵀ`.
    pub fn densify(&self) -> Result<TransitionTensor> {
        let cols = numeric::checked_pow(self.dim, self.order - 1)
            .ok_or_else(|| Error::Dimension("column space overflows usize".into()))?;
        let mut flat = vec![0.0; self.dim * cols];
        let mut col_sums = vec![CompensatedSum::new(); cols];
        for &(i, c, v) in &self.nonzeros {
            flat[i * cols + c] += v;
            col_sums[c].add(v);
        }
        for (c, s) in col_sums.iter().enumerate() {
            let d = (1.0 - s.value()).max(0.0);
            for i in 0..self.dim {
                flat[i * cols + c] += self.u.as_slice()[i] * d;
            }
        }
        TransitionTensor::new(self.order, self.dim, flat)
    }
}
