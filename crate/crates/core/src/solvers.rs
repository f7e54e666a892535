//! Iterative solvers for `x = α R (x ⊗ ... ⊗ x) + (1-α) v`.
//!
//! Every method evaluates the residual `‖α R x^(m-1) + (1-α) v - x‖₁` at the
//! current iterate before each update and stops once it is at most `tol`.
//! Running out of iterations is reported through
//! [`SolverOutcome::converged`], not as an error.
//!
//! The fixed-point, shifted, inner-outer and inverse updates leave the
//! simplex only through rounding, and the map `x ↦ eᵀx` they induce is
//! unstable for `α > 1/(m-1)`. Each update is therefore followed by
//! `x ← x / eᵀx`.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::numeric;
use crate::tensor::{ProbabilityVector, TransitionTensor};

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_INNER_MAX_ITER: usize = 10_000;

/// The solver variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    FixedPoint,
    Shifted,
    InnerOuter,
    Inverse,
    /// Newton's method with simplex projection.
    Newton,
    /// Unprojected Newton's method from `x = 0`.
    NewtonPure,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::FixedPoint,
        Method::Shifted,
        Method::InnerOuter,
        Method::Inverse,
        Method::Newton,
        Method::NewtonPure,
    ];

    /// Iteration budget used when [`SolverOptions::max_iter`] is unset.
    pub fn default_max_iter(self) -> usize {
        match self {
            Method::FixedPoint | Method::Shifted => 10_000,
            _ => 1_000,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::FixedPoint => "fixed",
            Method::Shifted => "shifted",
            Method::InnerOuter => "innerouter",
            Method::Inverse => "inverse",
            Method::Newton => "newton",
            Method::NewtonPure => "newton-pure",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Parameter(format!("unknown method {s:?}")))
    }
}

/// Starting point of an iteration.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum X0Policy {
    /// `(1-α) v` for projected Newton, `0` for pure Newton, `v` otherwise.
    #[default]
    Default,
    TeleportV,
    Zero,
    ScaledV,
    Custom(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    pub alpha: f64,
    pub v: ProbabilityVector,
    /// Shift of the shifted iteration.
    pub gamma: f64,
    pub tol: f64,
    /// `None` selects [`Method::default_max_iter`].
    pub max_iter: Option<usize>,
    /// Inner-outer stopping threshold on `‖y⁽ʲ⁺¹⁾ - y⁽ʲ⁾‖₁`; `None` is `tol / 10`.
    pub inner_tol: Option<f64>,
    pub inner_max_iter: usize,
    pub x0: X0Policy,
    pub record_iterates: bool,
}

impl SolverOptions {
    pub fn new(alpha: f64, v: ProbabilityVector) -> Self {
        Self {
            alpha,
            v,
            gamma: 1.0,
            tol: DEFAULT_TOL,
            max_iter: None,
            inner_tol: None,
            inner_max_iter: DEFAULT_INNER_MAX_ITER,
            x0: X0Policy::Default,
            record_iterates: false,
        }
    }

    /// `v = e/n`.
    pub fn uniform(alpha: f64, n: usize) -> Self {
        Self::new(alpha, ProbabilityVector::uniform(n))
    }

    pub fn gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = Some(max_iter);
        self
    }

    pub fn inner_tol(mut self, inner_tol: f64) -> Self {
        self.inner_tol = Some(inner_tol);
        self
    }

    pub fn x0(mut self, x0: X0Policy) -> Self {
        self.x0 = x0;
        self
    }

    pub fn record_iterates(mut self, on: bool) -> Self {
        self.record_iterates = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.alpha) {
            return Err(Error::Parameter(format!(
                "alpha {} outside [0, 1)",
                self.alpha
            )));
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(Error::Parameter(format!("gamma {} must be >= 0", self.gamma)));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::Parameter(format!("tol {} must be > 0", self.tol)));
        }
        if let Some(t) = self.inner_tol {
            if t.is_nan() || t <= 0.0 {
                return Err(Error::Parameter(format!("inner_tol {t} must be > 0")));
            }
        }
        Ok(())
    }

    fn effective_max_iter(&self, method: Method) -> usize {
        self.max_iter.unwrap_or_else(|| method.default_max_iter())
    }

    fn effective_inner_tol(&self) -> f64 {
        self.inner_tol.unwrap_or(self.tol / 10.0)
    }

    fn start(&self, method: Method, n: usize) -> Result<Vec<f64>> {
        let v = self.v.as_slice();
        Ok(match &self.x0 {
            X0Policy::Default => match method {
                Method::Newton => v.iter().map(|vi| (1.0 - self.alpha) * vi).collect(),
                Method::NewtonPure => vec![0.0; n],
                _ => v.to_vec(),
            },
            X0Policy::TeleportV => v.to_vec(),
            X0Policy::Zero => vec![0.0; n],
            X0Policy::ScaledV => v.iter().map(|vi| (1.0 - self.alpha) * vi).collect(),
            X0Policy::Custom(x) => {
                if x.len() != n {
                    return Err(Error::Dimension(format!(
                        "starting vector of length {} for dimension {n}",
                        x.len()
                    )));
                }
                if x.iter().any(|xi| !xi.is_finite() || *xi < 0.0) {
                    return Err(Error::Parameter("starting vector must be nonnegative".into()));
                }
                x.clone()
            }
        })
    }
}

/// Result of one solver run.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverOutcome {
    pub method: Method,
    /// Final iterate; stochastic except for pure Newton.
    pub x: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    /// Residual of iterates `0..=iterations`.
    pub residual_history: Vec<f64>,
    pub iterate_history: Option<Vec<Vec<f64>>>,
}

impl SolverOutcome {
    pub fn final_residual(&self) -> f64 {
        *self.residual_history.last().expect("history holds the start")
    }

    /// The final iterate as a probability vector, if it is one.
    pub fn probability(&self) -> Result<ProbabilityVector> {
        ProbabilityVector::new(self.x.clone())
    }
}

/// Sums along the pure Newton iterates, indexed by iteration.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NewtonTrace {
    /// `f_k = eᵀ f(x⁽ᵏ⁾)`.
    pub f: Vec<f64>,
    /// `z_k = eᵀ x⁽ᵏ⁾`.
    pub z: Vec<f64>,
    /// `eᵀ p⁽ᵏ⁾` for each step taken.
    pub step_sums: Vec<f64>,
}

fn check_vector(tensor: &TransitionTensor, len: usize, what: &str) -> Result<()> {
    if len != tensor.dim() {
        return Err(Error::Dimension(format!(
            "{what} of length {len} for dimension {}",
            tensor.dim()
        )));
    }
    Ok(())
}

/// `f(x) = α R x^(m-1) + (1-α) v - x`.
pub fn defect(tensor: &TransitionTensor, alpha: f64, v: &[f64], x: &[f64]) -> Result<Vec<f64>> {
    check_vector(tensor, v.len(), "teleportation vector")?;
    let y = tensor.apply_vec(x)?;
    Ok(defect_from(&y, alpha, v, x))
}

fn defect_from(y: &[f64], alpha: f64, v: &[f64], x: &[f64]) -> Vec<f64> {
    y.iter()
        .zip(v)
        .zip(x)
        .map(|((yi, vi), xi)| {
            let mut s = numeric::CompensatedSum::new();
            s.add(alpha * yi);
            s.add((1.0 - alpha) * vi);
            s.add(-xi);
            s.value()
        })
        .collect()
}

/// `‖α R x^(m-1) + (1-α) v - x‖₁`.
pub fn residual(tensor: &TransitionTensor, alpha: f64, v: &[f64], x: &[f64]) -> Result<f64> {
    Ok(numeric::l1_norm(&defect(tensor, alpha, v, x)?))
}

/// Jacobian of `f`: `α R (sum of identity placements) - I`.
pub fn jacobian(tensor: &TransitionTensor, alpha: f64, x: &[f64]) -> Result<DMatrix<f64>> {
    let n = tensor.dim();
    Ok(tensor.placement_sum(x)? * alpha - DMatrix::identity(n, n))
}

/// Predicted `f_{k+1}` for pure Newton: `α f² / ((1-2α)² + 4α f)`.
pub fn newton_recurrence_predict(f: f64, alpha: f64) -> f64 {
    if f == 0.0 {
        return 0.0;
    }
    let d = 1.0 - 2.0 * alpha;
    alpha * f * f / (d * d + 4.0 * alpha * f)
}

fn normalize(x: &mut [f64]) {
    let s = numeric::sum(x);
    if s > 0.0 {
        x.iter_mut().for_each(|xi| *xi /= s);
    }
}

/// Shared driver: evaluate the residual, stop or update, repeat.
struct Run<'a> {
    tensor: &'a TransitionTensor,
    alpha: f64,
    v: &'a [f64],
    tol: f64,
    max_iter: usize,
    record: bool,
}

impl Run<'_> {
    fn drive(
        &self,
        method: Method,
        mut x: Vec<f64>,
        mut update: impl FnMut(usize, &[f64], &[f64]) -> Result<Vec<f64>>,
    ) -> Result<SolverOutcome> {
        let mut history = Vec::with_capacity(self.max_iter.min(1 << 16) + 1);
        let mut iterates = self.record.then(Vec::new);
        let mut k = 0;
        loop {
            let y = self.tensor.apply_slice(&x);
            let f = defect_from(&y, self.alpha, self.v, &x);
            let r = numeric::l1_norm(&f);
            history.push(r);
            if let Some(it) = iterates.as_mut() {
                it.push(x.clone());
            }
            if r <= self.tol || k == self.max_iter || !r.is_finite() {
                return Ok(SolverOutcome {
                    method,
                    converged: r <= self.tol,
                    x,
                    iterations: k,
                    residual_history: history,
                    iterate_history: iterates,
                });
            }
            x = update(k, &x, &y)?;
            k += 1;
        }
    }
}

fn prepare<'a>(
    tensor: &'a TransitionTensor,
    options: &'a SolverOptions,
    method: Method,
) -> Result<(Run<'a>, Vec<f64>)> {
    options.validate()?;
    check_vector(tensor, options.v.len(), "teleportation vector")?;
    let x0 = options.start(method, tensor.dim())?;
    Ok((
        Run {
            tensor,
            alpha: options.alpha,
            v: options.v.as_slice(),
            tol: options.tol,
            max_iter: options.effective_max_iter(method),
            record: options.record_iterates,
        },
        x0,
    ))
}

fn shifted_update(alpha: f64, gamma: f64, v: &[f64], x: &[f64], y: &[f64]) -> Vec<f64> {
    let mut next: Vec<f64> = y
        .iter()
        .zip(v)
        .zip(x)
        .map(|((yi, vi), xi)| (alpha * yi + (1.0 - alpha) * vi + gamma * xi) / (1.0 + gamma))
        .collect();
    normalize(&mut next);
    next
}

/// `x ← α R x^(m-1) + (1-α) v`.
pub fn solve_fixed_point(tensor: &TransitionTensor, options: &SolverOptions) -> Result<SolverOutcome> {
    let (run, x0) = prepare(tensor, options, Method::FixedPoint)?;
    let (alpha, v) = (run.alpha, run.v);
    run.drive(Method::FixedPoint, x0, |_, x, y| {
        Ok(shifted_update(alpha, 0.0, v, x, y))
    })
}

/// `x ← (α R x^(m-1) + (1-α) v + γ x) / (1 + γ)`.
pub fn solve_shifted(tensor: &TransitionTensor, options: &SolverOptions) -> Result<SolverOutcome> {
    let (run, x0) = prepare(tensor, options, Method::Shifted)?;
    let (alpha, gamma, v) = (run.alpha, options.gamma, run.v);
    run.drive(Method::Shifted, x0, |_, x, y| {
        Ok(shifted_update(alpha, gamma, v, x, y))
    })
}

/// Each outer step solves
/// `y = (α/(m-1)) R̄ y^(m-1) + (1 - α/(m-1)) x⁽ᵏ⁾` with `R̄ = αR + (1-α) v eᵀ`
/// by a fixed-point iteration, which contracts since `α/(m-1) < 1/(m-1)`.
pub fn solve_inner_outer(tensor: &TransitionTensor, options: &SolverOptions) -> Result<SolverOutcome> {
    let (run, x0) = prepare(tensor, options, Method::InnerOuter)?;
    let (alpha, v) = (run.alpha, run.v);
    let a_in = alpha / (tensor.order() - 1) as f64;
    let inner_tol = options.effective_inner_tol();
    let inner_max = options.inner_max_iter;
    run.drive(Method::InnerOuter, x0, |k, x, _| {
        let mut y = x.to_vec();
        for _ in 0..inner_max {
            let ry = tensor.apply_slice(&y);
            // On the simplex, R̄ y^(m-1) = α R y^(m-1) + (1-α) v.
            let mut next: Vec<f64> = ry
                .iter()
                .zip(v)
                .zip(x)
                .map(|((ri, vi), xi)| {
                    a_in * (alpha * ri + (1.0 - alpha) * vi) + (1.0 - a_in) * xi
                })
                .collect();
            normalize(&mut next);
            let step = numeric::l1_distance(&next, &y);
            y = next;
            if step < inner_tol {
                return Ok(y);
            }
        }
        Err(Error::InnerSolve { iteration: k })
    })
}

/// `S(x) = (1/(m-1)) R (sum of identity placements)`, a stochastic matrix
/// for stochastic `x` with `S(x) x = R x^(m-1)`.
pub fn inverse_operator(tensor: &TransitionTensor, x: &[f64]) -> Result<DMatrix<f64>> {
    Ok(tensor.placement_sum(x)? / (tensor.order() - 1) as f64)
}

/// Each step solves `(I - α S(x⁽ᵏ⁾)) x = (1-α) v` directly.
pub fn solve_inverse(tensor: &TransitionTensor, options: &SolverOptions) -> Result<SolverOutcome> {
    let (run, x0) = prepare(tensor, options, Method::Inverse)?;
    let (alpha, v) = (run.alpha, run.v);
    let n = tensor.dim();
    let rhs = DVector::from_iterator(n, v.iter().map(|vi| (1.0 - alpha) * vi));
    run.drive(Method::Inverse, x0, |k, x, _| {
        let a = DMatrix::identity(n, n) - tensor.placement_sum(x)? * (alpha / (tensor.order() - 1) as f64);
        let sol = a
            .lu()
            .solve(&rhs)
            .ok_or(Error::SingularSystem { iteration: k })?;
        let mut next = sol.as_slice().to_vec();
        normalize(&mut next);
        Ok(next)
    })
}

/// Solves `J(x) p = -f(x)`, i.e. `(I - α R Σ) p = f(x)`.
fn newton_step(
    tensor: &TransitionTensor,
    alpha: f64,
    x: &[f64],
    f: &[f64],
    iteration: usize,
) -> Result<Vec<f64>> {
    let n = tensor.dim();
    let a = DMatrix::identity(n, n) - tensor.placement_sum(x)? * alpha;
    let p = a
        .lu()
        .solve(&DVector::from_column_slice(f))
        .ok_or(Error::SingularJacobian { iteration })?;
    if p.iter().any(|pi| !pi.is_finite()) {
        return Err(Error::SingularJacobian { iteration });
    }
    Ok(p.as_slice().to_vec())
}

/// `proj(x) = max(x, 0) / eᵀ max(x, 0)`.
pub fn project_simplex(x: &[f64], iteration: usize) -> Result<Vec<f64>> {
    let mut y: Vec<f64> = x.iter().map(|xi| xi.max(0.0)).collect();
    let s = numeric::sum(&y);
    if !s.is_finite() || s <= 0.0 {
        return Err(Error::NonpositiveProjection { iteration });
    }
    y.iter_mut().for_each(|yi| *yi /= s);
    Ok(y)
}

/// Newton's method with projection onto the simplex after every step.
pub fn solve_newton_projected(
    tensor: &TransitionTensor,
    options: &SolverOptions,
) -> Result<SolverOutcome> {
    let (run, x0) = prepare(tensor, options, Method::Newton)?;
    let (alpha, v) = (run.alpha, run.v);
    run.drive(Method::Newton, x0, |k, x, y| {
        let f = defect_from(y, alpha, v, x);
        let p = newton_step(tensor, alpha, x, &f, k)?;
        let stepped: Vec<f64> = x.iter().zip(&p).map(|(xi, pi)| xi + pi).collect();
        project_simplex(&stepped, k)
    })
}

/// Unprojected Newton's method, default start `x = 0`, with its trace.
pub fn solve_newton_pure(
    tensor: &TransitionTensor,
    options: &SolverOptions,
) -> Result<(SolverOutcome, NewtonTrace)> {
    let (run, x0) = prepare(tensor, options, Method::NewtonPure)?;
    let (alpha, v) = (run.alpha, run.v);
    let mut trace = NewtonTrace::default();
    let outcome = run.drive(Method::NewtonPure, x0, |k, x, y| {
        let f = defect_from(y, alpha, v, x);
        trace.f.push(numeric::sum(&f));
        trace.z.push(numeric::sum(x));
        let p = newton_step(tensor, alpha, x, &f, k)?;
        trace.step_sums.push(numeric::sum(&p));
        Ok(x.iter().zip(&p).map(|(xi, pi)| xi + pi).collect())
    })?;
    let last = defect(tensor, alpha, v, &outcome.x)?;
    trace.f.push(numeric::sum(&last));
    trace.z.push(numeric::sum(&outcome.x));
    Ok((outcome, trace))
}

/// Runs `method` with `options`.
pub fn solve(tensor: &TransitionTensor, method: Method, options: &SolverOptions) -> Result<SolverOutcome> {
    match method {
        Method::FixedPoint => solve_fixed_point(tensor, options),
        Method::Shifted => solve_shifted(tensor, options),
        Method::InnerOuter => solve_inner_outer(tensor, options),
        Method::Inverse => solve_inverse(tensor, options),
        Method::Newton => solve_newton_projected(tensor, options),
        Method::NewtonPure => solve_newton_pure(tensor, options).map(|(o, _)| o),
    }
}
