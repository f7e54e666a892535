//! Higher-order PageRank through the reduced first-order chain.
//!
//! A history state `s` lists the last `m-1` visited states, current first,
//! and is encoded as `s = sum_t (i_t - 1) n^(t-1)` with the current index
//! fastest. From history `(j, ..., l, k)` the chain can only move to
//! `(i, j, ..., l)`, with probability `α P(i, j, ..., l, k) + (1-α) v_i`.
//! With this encoding the history code of `(j, ..., k)` equals the
//! flattening column code of the same subscripts.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::numeric;
use crate::tensor::{ProbabilityVector, TransitionTensor};

/// Default bound on the number of reduced-chain states.
pub const DEFAULT_STATE_LIMIT: usize = 10_000;

/// The reduced chain `M = α P + (1-α) V` on `n^(m-1)` history states.
#[derive(Debug, Clone)]
pub struct ReducedChain {
    dim: usize,
    order: usize,
    alpha: f64,
    v: ProbabilityVector,
    chain: DMatrix<f64>,
    teleport: DMatrix<f64>,
    matrix: DMatrix<f64>,
}

impl ReducedChain {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn teleportation(&self) -> &ProbabilityVector {
        &self.v
    }

    pub fn states(&self) -> usize {
        self.matrix.nrows()
    }

    /// The chain part `P`.
    pub fn chain(&self) -> &DMatrix<f64> {
        &self.chain
    }

    /// The teleportation part `V`.
    pub fn teleport(&self) -> &DMatrix<f64> {
        &self.teleport
    }

    /// `M = α P + (1-α) V`.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }
}

/// Encodes a 1-based history `(current, previous, ...)` as a state index.
pub fn history_state(history: &[usize], n: usize) -> Result<usize> {
    crate::tensor::column_code(history, n)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::Parameter(format!("alpha {alpha} outside [0, 1)")));
    }
    Ok(())
}

/// Builds the reduced chain with the default state guard.
pub fn build_reduced(
    tensor: &TransitionTensor,
    alpha: f64,
    v: &ProbabilityVector,
) -> Result<ReducedChain> {
    build_reduced_with_limit(tensor, alpha, v, DEFAULT_STATE_LIMIT)
}

pub fn build_reduced_with_limit(
    tensor: &TransitionTensor,
    alpha: f64,
    v: &ProbabilityVector,
    state_limit: usize,
) -> Result<ReducedChain> {
    check_alpha(alpha)?;
    let n = tensor.dim();
    if v.len() != n {
        return Err(Error::Dimension(format!(
            "teleportation vector of length {} for dimension {n}",
            v.len()
        )));
    }
    let states = tensor.columns();
    if states > state_limit {
        return Err(Error::SizeGuard {
            states,
            limit: state_limit,
        });
    }
    let keep = states / n;
    let mut chain = DMatrix::zeros(states, states);
    let mut teleport = DMatrix::zeros(states, states);
    for s in 0..states {
        let shifted = n * (s % keep);
        for i in 0..n {
            chain[(i + shifted, s)] = tensor.get(i, s);
            teleport[(i + shifted, s)] = v.as_slice()[i];
        }
    }
    let matrix = &chain * alpha + &teleport * (1.0 - alpha);
    Ok(ReducedChain {
        dim: n,
        order: tensor.order(),
        alpha,
        v: v.clone(),
        chain,
        teleport,
        matrix,
    })
}

/// Stationary distribution of the reduced chain, reshaped as an order
/// `m-1` array indexed `(current, previous, ...)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryTensor {
    dim: usize,
    order: usize,
    entries: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    pub residual: f64,
}

impl StationaryTensor {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of tensor indices, `m - 1`.
    pub fn order(&self) -> usize {
        self.order
    }

    /// `vec(X)` in history-state order.
    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }

    /// `X(i_1, ..., i_{m-1})` with 1-based subscripts.
    pub fn get(&self, indices: &[usize]) -> Result<f64> {
        if indices.len() != self.order {
            return Err(Error::Dimension(format!(
                "expected {} subscripts",
                self.order
            )));
        }
        Ok(self.entries[history_state(indices, self.dim)?])
    }

    /// For `m = 3`, the `n × n` matrix `X` with `X[(i, j)] = X(i, j)`.
    pub fn matrix(&self) -> Option<DMatrix<f64>> {
        (self.order == 2).then(|| DMatrix::from_column_slice(self.dim, self.dim, &self.entries))
    }
}

/// Power iteration on `M` from `vec(v ⊗ ... ⊗ v)` until
/// `‖M vec(X) - vec(X)‖₁ ≤ tol`. Returns the last iterate flagged
/// non-converged if `max_iter` is reached.
pub fn stationary(chain: &ReducedChain, tol: f64, max_iter: usize) -> Result<StationaryTensor> {
    if tol <= 0.0 {
        return Err(Error::Parameter(format!("tolerance {tol} must be positive")));
    }
    let factors: Vec<&[f64]> = vec![chain.v.as_slice(); chain.order - 1];
    let mut x = DVector::from_vec(numeric::kron(&factors));
    let mut iterations = 0;
    loop {
        let y = chain.matrix() * &x;
        let residual = numeric::l1_distance(y.as_slice(), x.as_slice());
        let converged = residual <= tol;
        if converged || iterations >= max_iter {
            return Ok(StationaryTensor {
                dim: chain.dim,
                order: chain.order - 1,
                entries: x.as_slice().to_vec(),
                converged,
                iterations,
                residual,
            });
        }
        let total = numeric::sum(y.as_slice());
        x = y / total;
        iterations += 1;
    }
}

/// The standard PageRank problem `(α_pr, P_pr, v ⊗ ... ⊗ v)` whose solution
/// is `vec(X)`.
#[derive(Debug, Clone)]
pub struct EquivalentPageRank {
    pub alpha: f64,
    pub matrix: DMatrix<f64>,
    pub v: ProbabilityVector,
}

pub fn equivalent_pagerank(
    tensor: &TransitionTensor,
    alpha: f64,
    v: &ProbabilityVector,
) -> Result<EquivalentPageRank> {
    let chain = build_reduced(tensor, alpha, v)?;
    let k = chain.order - 1;
    let alpha_pr = 1.0 - (1.0 - alpha).powi(k as i32);
    let mk = chain.matrix().pow(k as u32 - 1) * chain.matrix();
    let factors: Vec<&[f64]> = vec![v.as_slice(); k];
    let v_pr = numeric::kron(&factors);
    let matrix = if alpha_pr == 0.0 {
        mk
    } else {
        let vk = DMatrix::from_fn(v_pr.len(), v_pr.len(), |r, _| v_pr[r]);
        (mk - vk * (1.0 - alpha).powi(k as i32)) / alpha_pr
    };
    Ok(EquivalentPageRank {
        alpha: alpha_pr,
        matrix,
        v: ProbabilityVector::from_raw(v_pr),
    })
}

/// Sums `X` over every index but the first (current state).
pub fn marginal(x: &StationaryTensor) -> ProbabilityVector {
    let n = x.dim;
    let mut acc = vec![numeric::CompensatedSum::new(); n];
    for (s, value) in x.entries.iter().enumerate() {
        acc[s % n].add(*value);
    }
    ProbabilityVector::from_raw(acc.iter().map(|a| a.value()).collect())
}

/// Richardson iteration `x ← αPx + (1-α)v` from `x = v` until the residual
/// `‖αPx + (1-α)v - x‖₁` is at most `tol`.
pub fn pagerank(
    p: &DMatrix<f64>,
    alpha: f64,
    v: &ProbabilityVector,
    tol: f64,
    max_iter: usize,
) -> Result<ProbabilityVector> {
    check_alpha(alpha)?;
    if !p.is_square() || p.nrows() != v.len() {
        return Err(Error::Dimension(format!(
            "{} x {} matrix with a vector of length {}",
            p.nrows(),
            p.ncols(),
            v.len()
        )));
    }
    let v = DVector::from_column_slice(v.as_slice());
    let mut x = v.clone();
    for iteration in 0..=max_iter {
        let y = p * &x * alpha + &v * (1.0 - alpha);
        let residual = numeric::l1_distance(y.as_slice(), x.as_slice());
        if residual <= tol {
            return Ok(ProbabilityVector::from_raw(x.as_slice().to_vec()));
        }
        if iteration == max_iter {
            return Err(Error::NotConverged {
                iterations: max_iter,
                residual,
            });
        }
        x = y;
    }
    unreachable!()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::higher_order_example;

    #[test]
    fn reduced_chain_of_example_matches_printed_pattern() {
        let t = higher_order_example();
        let v = ProbabilityVector::uniform(3);
        let c = build_reduced(&t, 0.85, &v).unwrap();
        let st = |h: [usize; 2]| history_state(&h, 3).unwrap();
        assert_eq!(c.chain()[(st([3, 1]), st([1, 1]))], 1.0);
        assert_eq!(c.chain()[(st([1, 2]), st([2, 1]))], 0.5);
        // From (2, 1) the chain can only reach histories (i, 2).
        for i in 1..=3 {
            for j in [1, 3] {
                assert_eq!(c.chain()[(st([i, j]), st([2, 1]))], 0.0);
            }
        }
        for s in 0..9 {
            let sum: f64 = c.matrix().column(s).iter().sum();
            assert!((sum - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn teleport_only_chain() {
        let t = higher_order_example();
        let v = ProbabilityVector::new(vec![0.2, 0.3, 0.5]).unwrap();
        let c = build_reduced(&t, 0.0, &v).unwrap();
        assert_eq!(c.matrix(), c.teleport());
        for s in 0..9 {
            let col: Vec<f64> = c.matrix().column(s).iter().copied().filter(|x| *x != 0.0).collect();
            assert_eq!(col, v.as_slice());
        }
        let x = stationary(&c, 1e-14, 10).unwrap();
        assert!(x.converged);
        assert_eq!(marginal(&x).as_slice().len(), 3);
    }

    #[test]
    fn size_guard() {
        let t = crate::problems::load("R6_1").unwrap().tensor;
        let v = ProbabilityVector::uniform(6);
        assert_eq!(
            build_reduced_with_limit(&t, 0.5, &v, 35).unwrap_err(),
            Error::SizeGuard { states: 36, limit: 35 }
        );
        assert!(build_reduced(&t, 1.0, &v).is_err());
    }

    #[test]
    fn equivalent_alpha_closed_form() {
        let t = higher_order_example();
        let v = ProbabilityVector::uniform(3);
        let eq = equivalent_pagerank(&t, 0.85, &v).unwrap();
        assert!((eq.alpha - 0.9775).abs() < 1e-15);
        let eq0 = equivalent_pagerank(&t, 0.0, &v).unwrap();
        assert_eq!(eq0.alpha, 0.0);
        let x = pagerank(&eq0.matrix, 0.0, &eq0.v, 1e-14, 10).unwrap();
        assert_eq!(x.as_slice(), eq0.v.as_slice());
    }

    #[test]
    fn pagerank_trivial_cases() {
        let v = ProbabilityVector::new(vec![0.1, 0.2, 0.7]).unwrap();
        let id = DMatrix::identity(3, 3);
        let x = pagerank(&id, 0.9, &v, 1e-15, 10).unwrap();
        assert_eq!(x, v);
        assert!(pagerank(&DMatrix::identity(2, 2), 0.5, &v, 1e-9, 10).is_err());
    }
}
