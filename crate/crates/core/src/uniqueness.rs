//! Uniqueness conditions: the `α < 1/(m-1)` regime and the Li–Ng `β`.
//!
//! For a third-order tensor and a nonempty proper subset `S` with
//! complement `S̄`,
//!
//! ```text
//! β₁(S) = min_k [ min_{j∈S} Σ_{i∈S̄} P_ijk + min_{j∈S̄} Σ_{i∈S} P_ijk ]
//! β₂(S) = min_j [ min_{k∈S} Σ_{i∈S̄} P_ijk + min_{k∈S̄} Σ_{i∈S} P_ijk ]
//! β     = min_S  β₁(S) + β₂(S)
//! ```
//!
//! Both components are unchanged when `S` and `S̄` swap, so only subsets
//! that omit the last state are enumerated.

use crate::error::{Error, Result};
use crate::oracle;
use crate::tensor::{ProbabilityVector, TransitionTensor};

/// Largest dimension accepted by the exhaustive subset search.
pub const MAX_BETA_DIM: usize = 20;

/// `α < 1/(m-1)`.
pub fn unique_regime(alpha: f64, order: usize) -> bool {
    assert!(order >= 3, "order must be at least 3");
    alpha * ((order - 1) as f64) < 1.0
}

#[derive(Debug, Clone, PartialEq)]
pub struct BetaResult {
    pub beta: f64,
    pub beta1: f64,
    pub beta2: f64,
    /// Minimizing subset, 1-based and sorted.
    pub witness: Vec<usize>,
}

/// `β` of a stochastic third-order tensor.
pub fn li_ng_beta(tensor: &TransitionTensor) -> Result<BetaResult> {
    if tensor.order() != 3 {
        return Err(Error::Order(tensor.order()));
    }
    beta_of_flattening(tensor.flattening(), tensor.dim())
}

/// `β` of any nonnegative `n × n²` flattening (no stochasticity required,
/// so scaled tensors can be compared).
pub fn beta_of_flattening(flat: &[f64], n: usize) -> Result<BetaResult> {
    if flat.len() != n * n * n {
        return Err(Error::Dimension(format!(
            "{} values for an n = {n} third-order flattening",
            flat.len()
        )));
    }
    if n < 2 {
        return Err(Error::Parameter("beta needs n >= 2".into()));
    }
    if n > MAX_BETA_DIM {
        return Err(Error::Parameter(format!(
            "beta enumerates 2^n subsets; n = {n} exceeds {MAX_BETA_DIM}"
        )));
    }
    let cols = n * n;
    let mut best: Option<(f64, f64, f64, u32)> = None;
    let mut inside = vec![0.0; cols];
    for mask in 1u32..(1u32 << (n - 1)) {
        // inside[c] = Σ_{i∈S} P[i, c]; the complement sum is total - inside.
        for (c, slot) in inside.iter_mut().enumerate() {
            *slot = (0..n)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| flat[i * cols + c])
                .sum();
        }
        let total = |c: usize| -> f64 { (0..n).map(|i| flat[i * cols + c]).sum() };
        let in_s = |j: usize| mask >> j & 1 == 1;
        let outside = |c: usize| total(c) - inside[c];
        // Column code of (j, k) is j + n k.
        let component = |code: &dyn Fn(usize, usize) -> usize| -> f64 {
            (0..n)
                .map(|fixed| {
                    let a = (0..n)
                        .filter(|&free| in_s(free))
                        .map(|free| outside(code(free, fixed)))
                        .fold(f64::INFINITY, f64::min);
                    let b = (0..n)
                        .filter(|&free| !in_s(free))
                        .map(|free| inside[code(free, fixed)])
                        .fold(f64::INFINITY, f64::min);
                    a + b
                })
                .fold(f64::INFINITY, f64::min)
        };
        let b1 = component(&|j, k| j + n * k);
        let b2 = component(&|k, j| j + n * k);
        let b = b1 + b2;
        if best.is_none_or(|(bb, _, _, _)| b < bb) {
            best = Some((b, b1, b2, mask));
        }
    }
    let (beta, beta1, beta2, mask) = best.expect("n >= 2 leaves one subset");
    Ok(BetaResult {
        beta,
        beta1,
        beta2,
        witness: (0..n).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).collect(),
    })
}

/// Flattening of `α P + (1-α) v eᵀ`.
pub fn pagerank_tensor(tensor: &TransitionTensor, alpha: f64, v: &ProbabilityVector) -> Result<TransitionTensor> {
    if v.len() != tensor.dim() {
        return Err(Error::Dimension("teleportation vector length".into()));
    }
    let cols = tensor.columns();
    let flat = (0..tensor.dim())
        .flat_map(|i| (0..cols).map(move |c| (i, c)))
        .map(|(i, c)| alpha * tensor.get(i, c) + (1.0 - alpha) * v.as_slice()[i])
        .collect();
    TransitionTensor::new(tensor.order(), tensor.dim(), flat)
}

#[derive(Debug, Clone, PartialEq)]
pub struct UniquenessReport {
    pub alpha: f64,
    pub unique_regime: bool,
    /// `β` of `α P + (1-α) v eᵀ`.
    pub beta: BetaResult,
    /// `β > 1`.
    pub beta_certifies: bool,
    /// Number of distinct solutions found by the oracle, when requested.
    pub solutions_found: Option<usize>,
}

/// Regime test, `β` of the PageRank-modified tensor and, with
/// `oracle_starts`, a solution count.
pub fn uniqueness_report(
    tensor: &TransitionTensor,
    alpha: f64,
    v: &ProbabilityVector,
    oracle_starts: Option<usize>,
) -> Result<UniquenessReport> {
    if tensor.order() != 3 {
        return Err(Error::Order(tensor.order()));
    }
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::Parameter(format!("alpha {alpha} outside [0, 1)")));
    }
    let regime = unique_regime(alpha, 3);
    let beta = li_ng_beta(&pagerank_tensor(tensor, alpha, v)?)?;
    let certifies = beta.beta > 1.0;
    debug_assert!(!regime || certifies, "alpha < 1/2 must give beta > 1");
    let solutions_found = oracle_starts
        .map(|starts| oracle::enumerate_solutions(tensor, alpha, v, starts, 0).map(|s| s.solutions.len()))
        .transpose()?;
    Ok(UniquenessReport {
        alpha,
        unique_regime: regime,
        beta,
        beta_certifies: certifies,
        solutions_found,
    })
}
