//! Monte Carlo simulation of the spacey random surfer.
//!
//! The surfer keeps a count `w_k = 1 + #{r ≤ t : S_r = k}` of its visits.
//! At each step it draws a remembered state `Y ~ w / (t + n)`, then moves
//! with probability `α` along column `(S_t, Y)` of the tensor and otherwise
//! teleports according to `v`. The first state is drawn from `v` and counts
//! as step 1, so `Σ w = t + n` throughout.
//!
//! For order `m > 3` the `m - 2` remembered states are drawn independently
//! from the same distribution. That generalization is experimental.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};
use crate::tensor::{ProbabilityVector, TransitionTensor};

/// Generator used by every simulation, recorded in CSV metadata.
pub const GENERATOR: &str = "ChaCha20 (rand_chacha 0.9, seed_from_u64)";

#[derive(Debug, Clone)]
pub struct SurferState {
    /// Current state, 0-based.
    pub current: usize,
    /// Visit counts including the unit pseudo-count.
    pub counts: Vec<u64>,
    pub steps: u64,
    rng: ChaCha20Rng,
}

impl SurferState {
    /// Replays a list of 0-based visited states.
    pub fn from_visits(n: usize, visits: &[usize], seed: u64) -> Result<Self> {
        if n == 0 || visits.is_empty() {
            return Err(Error::Parameter("need n >= 1 and at least one visit".into()));
        }
        let mut counts = vec![1; n];
        for &s in visits {
            if s >= n {
                return Err(Error::IndexOutOfRange { index: s, dim: n });
            }
            counts[s] += 1;
        }
        Ok(Self {
            current: *visits.last().expect("nonempty"),
            counts,
            steps: visits.len() as u64,
            rng: ChaCha20Rng::seed_from_u64(seed),
        })
    }

    /// A state with no visits yet; only the pseudo-counts.
    pub fn empty(n: usize, seed: u64) -> Self {
        Self {
            current: 0,
            counts: vec![1; n],
            steps: 0,
            rng: ChaCha20Rng::seed_from_u64(seed),
        }
    }

    /// Draws `S_1 ~ v` and counts it.
    pub fn start(v: &ProbabilityVector, seed: u64) -> Result<Self> {
        let mut state = Self::empty(v.len(), seed);
        let dist = weighted(v.as_slice())?;
        let s = dist.sample(&mut state.rng);
        state.current = s;
        state.counts[s] += 1;
        state.steps = 1;
        Ok(state)
    }

    pub fn dim(&self) -> usize {
        self.counts.len()
    }

    fn total(&self) -> u64 {
        self.steps + self.dim() as u64
    }

    /// Draws a remembered state from `w / (t + n)`.
    fn draw_history(&mut self) -> usize {
        let mut r = self.rng.random_range(0..self.total());
        for (k, &w) in self.counts.iter().enumerate() {
            if r < w {
                return k;
            }
            r -= w;
        }
        unreachable!("counts sum to t + n")
    }
}

/// `w / (t + n)`.
pub fn history_distribution(state: &SurferState) -> ProbabilityVector {
    let total = state.total() as f64;
    ProbabilityVector::from_raw(state.counts.iter().map(|&w| w as f64 / total).collect())
}

fn weighted(p: &[f64]) -> Result<WeightedIndex<f64>> {
    WeightedIndex::new(p).map_err(|e| Error::NotStochastic(format!("cannot sample: {e}")))
}

/// Precomputed samplers for one `(tensor, α, v)`.
pub struct Surfer<'a> {
    tensor: &'a TransitionTensor,
    alpha: f64,
    v: WeightedIndex<f64>,
    columns: Vec<WeightedIndex<f64>>,
}

impl<'a> Surfer<'a> {
    pub fn new(tensor: &'a TransitionTensor, alpha: f64, v: &ProbabilityVector) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::Parameter(format!("alpha {alpha} outside [0, 1]")));
        }
        if v.len() != tensor.dim() {
            return Err(Error::Dimension("teleportation vector length".into()));
        }
        let columns = (0..tensor.columns())
            .map(|c| weighted(&tensor.column(c)))
            .collect::<Result<_>>()?;
        Ok(Self {
            tensor,
            alpha,
            v: weighted(v.as_slice())?,
            columns,
        })
    }

    /// One transition: updates `current`, the new state's count, and `t`.
    pub fn step(&self, state: &mut SurferState) {
        let n = self.tensor.dim();
        let mut code = state.current;
        let mut scale = n;
        for _ in 0..self.tensor.order() - 2 {
            code += scale * state.draw_history();
            scale *= n;
        }
        let follow = self.alpha >= 1.0 || state.rng.random::<f64>() < self.alpha;
        let next = if follow {
            self.columns[code].sample(&mut state.rng)
        } else {
            self.v.sample(&mut state.rng)
        };
        state.current = next;
        state.counts[next] += 1;
        state.steps += 1;
    }
}

/// Free-function form of [`Surfer::step`].
pub fn step(tensor: &TransitionTensor, alpha: f64, v: &ProbabilityVector, state: &mut SurferState) -> Result<()> {
    Surfer::new(tensor, alpha, v)?.step(state);
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationResult {
    /// `w / (t + n)` at termination.
    pub frequency: ProbabilityVector,
    pub steps: u64,
    pub seed: u64,
}

/// Runs the surfer until `t = steps`.
pub fn simulate(
    tensor: &TransitionTensor,
    alpha: f64,
    v: &ProbabilityVector,
    steps: u64,
    seed: u64,
) -> Result<SimulationResult> {
    if steps == 0 {
        return Err(Error::Parameter("steps must be at least 1".into()));
    }
    let surfer = Surfer::new(tensor, alpha, v)?;
    let mut state = SurferState::start(v, seed)?;
    while state.steps < steps {
        surfer.step(&mut state);
    }
    Ok(SimulationResult {
        frequency: history_distribution(&state),
        steps,
        seed,
    })
}
