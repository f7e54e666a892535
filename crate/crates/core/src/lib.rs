//! Multilinear and higher-order PageRank for stochastic transition tensors.
//!
//! The central problem is to find a stochastic `x` with
//! `x = α R (x ⊗ ... ⊗ x) + (1-α) v`, where `R` is the mode-1 flattening of
//! an order-`m` stochastic tensor. See [`solvers`] for the iterative methods,
//! [`higher_order`] for the exact reduced-chain formulation, and
//! [`problems`] for the bundled test tensors.

pub mod error;
pub mod format;
pub mod higher_order;
pub mod numeric;
pub mod oracle;
pub mod problems;
pub mod solvers;
pub mod sparse;
pub mod surfer;
pub mod tensor;
pub mod uniqueness;

pub use error::{Error, Result};
pub use higher_order::{EquivalentPageRank, ReducedChain, StationaryTensor};
pub use oracle::SolutionSet;
pub use problems::ProblemRecord;
pub use solvers::{Method, NewtonTrace, SolverOptions, SolverOutcome, X0Policy};
pub use sparse::SparseTransitionData;
pub use surfer::{SimulationResult, SurferState};
pub use tensor::{ProbabilityVector, TransitionTensor, STOCHASTIC_TOL};
pub use uniqueness::BetaResult;
