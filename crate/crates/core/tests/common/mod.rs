#![allow(dead_code)]

use mlpr_core::{ProbabilityVector, TransitionTensor};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Uniform weights in `[0, 1)`, normalized; zero entries with probability `sparsity`.
pub fn random_stochastic(n: usize, sparsity: f64, rng: &mut ChaCha20Rng) -> Vec<f64> {
    loop {
        let x: Vec<f64> = (0..n)
            .map(|_| if rng.random::<f64>() < sparsity { 0.0 } else { rng.random::<f64>() })
            .collect();
        let s: f64 = x.iter().sum();
        if s > 0.0 {
            return x.into_iter().map(|xi| xi / s).collect();
        }
    }
}

pub fn random_vector(n: usize, rng: &mut ChaCha20Rng) -> ProbabilityVector {
    ProbabilityVector::new(random_stochastic(n, 0.0, rng)).unwrap()
}

/// Random stochastic tensor with independently drawn columns.
pub fn random_tensor(order: usize, n: usize, sparsity: f64, rng: &mut ChaCha20Rng) -> TransitionTensor {
    let cols = n.pow(order as u32 - 1);
    let columns: Vec<Vec<f64>> = (0..cols).map(|_| random_stochastic(n, sparsity, rng)).collect();
    let flat = (0..n)
        .flat_map(|i| columns.iter().map(move |c| c[i]))
        .collect();
    TransitionTensor::new(order, n, flat).unwrap()
}

pub fn linf(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}
