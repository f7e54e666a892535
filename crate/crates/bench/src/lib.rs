//! Fixtures shared by the benchmarks.

use mlpr_core::{problems, ProbabilityVector, SparseTransitionData, TransitionTensor};

/// Deterministic dense stochastic tensor with every entry positive.
pub fn dense_tensor(order: usize, n: usize) -> TransitionTensor {
    let cols = n.pow(order as u32 - 1);
    let mut flat = vec![0.0; n * cols];
    for c in 0..cols {
        let weights: Vec<f64> = (0..n).map(|i| 1.0 + ((i * 7 + c * 13) % 11) as f64).collect();
        let s: f64 = weights.iter().sum();
        for i in 0..n {
            flat[i * cols + c] = weights[i] / s;
        }
    }
    TransitionTensor::new(order, n, flat).expect("columns are normalized")
}

pub fn problem(name: &str) -> TransitionTensor {
    problems::load(name).expect("bundled problem").tensor
}

/// A sparse version of `tensor` with every fourth column emptied.
pub fn sparse_with_dangling(tensor: &TransitionTensor) -> SparseTransitionData {
    let cols = tensor.columns();
    let nonzeros = (0..tensor.dim())
        .flat_map(|i| (0..cols).map(move |c| (i, c)))
        .filter(|&(_, c)| c % 4 != 0)
        .map(|(i, c)| (i, c, tensor.get(i, c)))
        .filter(|&(_, _, v)| v != 0.0)
        .collect();
    SparseTransitionData::new(tensor.order(), tensor.dim(), nonzeros, ProbabilityVector::uniform(tensor.dim()))
        .expect("sub-stochastic")
}
