//! Multi-start enumeration of solutions.
//!
//! Projected Newton is run from `v`, every basis vector, and `starts` points
//! drawn from the symmetric Dirichlet(1) distribution. Endpoints whose
//! residual is at most [`ACCEPT_RESIDUAL`] are kept, merging any within
//! [`DEDUP_RADIUS`] (∞-norm) of an earlier one. The search is not
//! exhaustive: an empty or short list only means no other root was hit.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;

use crate::error::Result;
use crate::numeric;
use crate::solvers::{self, SolverOptions, X0Policy};
use crate::tensor::{ProbabilityVector, TransitionTensor};

pub const DEDUP_RADIUS: f64 = 1e-6;
pub const ACCEPT_RESIDUAL: f64 = 1e-10;

/// Newton stopping threshold for each start; tighter than acceptance so
/// endpoints are polished.
const START_TOL: f64 = 1e-13;
const START_MAX_ITER: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionSet {
    pub solutions: Vec<ProbabilityVector>,
    pub residuals: Vec<f64>,
    /// Index of the start that first reached each solution.
    pub first_start: Vec<usize>,
    /// Starts attempted, including `v` and the basis vectors.
    pub starts_used: usize,
    /// Starts whose endpoint passed the residual check.
    pub accepted_starts: usize,
    pub dedup_radius: f64,
}

/// Symmetric Dirichlet(1) sample: normalized standard exponentials.
pub fn dirichlet_point(n: usize, rng: &mut ChaCha20Rng) -> Vec<f64> {
    let mut x: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let s = numeric::sum(&x);
    x.iter_mut().for_each(|xi| *xi /= s);
    x
}

/// The deterministic list of starting points.
pub fn start_points(n: usize, v: &ProbabilityVector, starts: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut points = vec![v.as_slice().to_vec()];
    points.extend((0..n).map(|j| ProbabilityVector::basis(n, j).into_vec()));
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    points.extend((0..starts).map(|_| dirichlet_point(n, &mut rng)));
    points
}

pub fn enumerate_solutions(
    tensor: &TransitionTensor,
    alpha: f64,
    v: &ProbabilityVector,
    starts: usize,
    seed: u64,
) -> Result<SolutionSet> {
    let base = SolverOptions::new(alpha, v.clone()).tol(START_TOL).max_iter(START_MAX_ITER);
    base.validate()?;
    let points = start_points(tensor.dim(), v, starts, seed);
    let endpoints: Vec<Option<(Vec<f64>, f64)>> = points
        .par_iter()
        .map(|x0| {
            let opts = base.clone().x0(X0Policy::Custom(x0.clone()));
            let out = solvers::solve_newton_projected(tensor, &opts).ok()?;
            let r = solvers::residual(tensor, alpha, v.as_slice(), &out.x).ok()?;
            (r <= ACCEPT_RESIDUAL).then_some((out.x, r))
        })
        .collect();

    let mut set = SolutionSet {
        solutions: Vec::new(),
        residuals: Vec::new(),
        first_start: Vec::new(),
        starts_used: points.len(),
        accepted_starts: 0,
        dedup_radius: DEDUP_RADIUS,
    };
    for (index, (x, r)) in endpoints
        .into_iter()
        .enumerate()
        .filter_map(|(i, e)| e.map(|e| (i, e)))
    {
        set.accepted_starts += 1;
        let known = set
            .solutions
            .iter()
            .any(|s| numeric::linf_distance(s.as_slice(), &x) <= DEDUP_RADIUS);
        if !known {
            set.solutions.push(ProbabilityVector::from_raw(x));
            set.residuals.push(r);
            set.first_start.push(index);
        }
    }
    Ok(set)
}
