//! Experiment harness behind the `mlpr` binary: reliability tables, shift
//! sweeps and CSV writers.
//!
//! Every CSV starts with `#` metadata lines that echo the configuration
//! (and nothing else, so identical flags give identical files).

use std::io::{self, Write};

use mlpr_core::problems::{self, ProblemRecord};
use mlpr_core::solvers::{self, Method, SolverOptions, SolverOutcome};
use mlpr_core::{oracle, surfer, uniqueness, ProbabilityVector, TransitionTensor};
use rayon::prelude::*;

pub const TABLE_ALPHAS: [f64; 5] = [0.70, 0.85, 0.90, 0.95, 0.99];
pub const TABLE_GAMMAS: [f64; 7] = [0.0, 0.25, 0.5, 0.75, 1.0, 2.0, 10.0];
pub const TABLE_METHODS: [Method; 5] = [
    Method::FixedPoint,
    Method::Shifted,
    Method::InnerOuter,
    Method::Inverse,
    Method::Newton,
];
pub const SIZES: [usize; 3] = [3, 4, 6];

/// Short column labels used in the method table.
pub fn method_label(m: Method) -> &'static str {
    match m {
        Method::FixedPoint => "F",
        Method::Shifted => "S",
        Method::InnerOuter => "IO",
        Method::Inverse => "Inv",
        Method::Newton => "N",
        Method::NewtonPure => "NP",
    }
}

/// The 29 binary problems the tables are computed over.
pub fn table_problems() -> Vec<ProblemRecord> {
    problems::binary_names()
        .into_iter()
        .map(|n| problems::load(n).expect("bundled"))
        .collect()
}

/// Solved-problem counts for sizes 3, 4, 6.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GroupCounts(pub [usize; 3]);

impl GroupCounts {
    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    fn add(&mut self, n: usize) {
        if let Some(g) = SIZES.iter().position(|s| *s == n) {
            self.0[g] += 1;
        }
    }
}

/// Options for one table cell: `v = e/n`, default tolerance, the method's
/// default budget times `multiplier`.
pub fn cell_options(method: Method, alpha: f64, gamma: f64, n: usize, multiplier: usize) -> SolverOptions {
    SolverOptions::uniform(alpha, n)
        .gamma(gamma)
        .max_iter(method.default_max_iter() * multiplier)
}

/// Whether `method` solves the problem. Solver errors count as failures.
pub fn cell_solved(tensor: &TransitionTensor, method: Method, opts: &SolverOptions) -> bool {
    solvers::solve(tensor, method, opts).is_ok_and(|o| o.converged)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftCell {
    pub alpha: f64,
    pub gamma: f64,
    pub counts: GroupCounts,
    pub failed: Vec<String>,
}

/// Shifted-iteration reliability over the `alphas × gammas` grid.
pub fn table_shift(problems: &[ProblemRecord], alphas: &[f64], gammas: &[f64], max_iter: usize) -> Vec<ShiftCell> {
    let jobs: Vec<(f64, f64, usize)> = alphas
        .iter()
        .flat_map(|&a| gammas.iter().map(move |&g| (a, g)))
        .flat_map(|(a, g)| (0..problems.len()).map(move |p| (a, g, p)))
        .collect();
    let solved: Vec<bool> = jobs
        .par_iter()
        .map(|&(a, g, p)| {
            let rec = &problems[p];
            let opts = SolverOptions::uniform(a, rec.dim()).gamma(g).max_iter(max_iter);
            cell_solved(&rec.tensor, Method::Shifted, &opts)
        })
        .collect();
    let mut cells = Vec::new();
    for (chunk, ok) in jobs.chunks(problems.len()).zip(solved.chunks(problems.len())) {
        let (alpha, gamma, _) = chunk[0];
        let mut cell = ShiftCell {
            alpha,
            gamma,
            counts: GroupCounts::default(),
            failed: Vec::new(),
        };
        for (&(_, _, p), &s) in chunk.iter().zip(ok) {
            if s {
                cell.counts.add(problems[p].dim());
            } else {
                cell.failed.push(problems[p].name.clone());
            }
        }
        cells.push(cell);
    }
    cells
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodCell {
    pub alpha: f64,
    pub method: Method,
    pub multiplier: usize,
    pub counts: GroupCounts,
    pub failed: Vec<String>,
}

/// Reliability of each method at its default settings (shift `γ = 1`) with
/// the iteration budget scaled by `multiplier`.
pub fn table_methods(
    problems: &[ProblemRecord],
    alphas: &[f64],
    methods: &[Method],
    multiplier: usize,
) -> Vec<MethodCell> {
    let jobs: Vec<(f64, Method, usize)> = alphas
        .iter()
        .flat_map(|&a| methods.iter().map(move |&m| (a, m)))
        .flat_map(|(a, m)| (0..problems.len()).map(move |p| (a, m, p)))
        .collect();
    let solved: Vec<bool> = jobs
        .par_iter()
        .map(|&(a, m, p)| {
            let rec = &problems[p];
            cell_solved(&rec.tensor, m, &cell_options(m, a, 1.0, rec.dim(), multiplier))
        })
        .collect();
    let mut cells = Vec::new();
    for (chunk, ok) in jobs.chunks(problems.len()).zip(solved.chunks(problems.len())) {
        let (alpha, method, _) = chunk[0];
        let mut cell = MethodCell {
            alpha,
            method,
            multiplier,
            counts: GroupCounts::default(),
            failed: Vec::new(),
        };
        for (&(_, _, p), &s) in chunk.iter().zip(ok) {
            if s {
                cell.counts.add(problems[p].dim());
            } else {
                cell.failed.push(problems[p].name.clone());
            }
        }
        cells.push(cell);
    }
    cells
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub gamma: f64,
    pub outcome: SolverOutcome,
}

/// Shifted iteration on one problem for each shift in `gammas`.
pub fn sweep_shift(
    tensor: &TransitionTensor,
    alpha: f64,
    v: &ProbabilityVector,
    gammas: &[f64],
    max_iter: usize,
    tol: f64,
) -> mlpr_core::Result<Vec<SweepPoint>> {
    gammas
        .par_iter()
        .map(|&gamma| {
            let opts = SolverOptions::new(alpha, v.clone()).gamma(gamma).max_iter(max_iter).tol(tol);
            solvers::solve_shifted(tensor, &opts).map(|outcome| SweepPoint { gamma, outcome })
        })
        .collect()
}

/// `# key=value` metadata lines.
pub fn write_metadata<W: Write>(out: &mut W, pairs: &[(&str, String)]) -> io::Result<()> {
    for (k, v) in pairs {
        writeln!(out, "# {k}={v}")?;
    }
    Ok(())
}

fn x_header(n: usize) -> String {
    (1..=n).map(|i| format!("x{i}")).collect::<Vec<_>>().join(",")
}

fn join(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v:e}")).collect::<Vec<_>>().join(",")
}

/// `iter,residual,x1,...,xn`, one row per iterate from iteration 0.
pub fn write_trace<W: Write>(out: &mut W, outcome: &SolverOutcome, n: usize) -> io::Result<()> {
    writeln!(out, "iter,residual,{}", x_header(n))?;
    let iterates = outcome.iterate_history.as_deref();
    for (k, r) in outcome.residual_history.iter().enumerate() {
        let x = iterates.map_or_else(
            || if k == outcome.iterations { outcome.x.clone() } else { vec![f64::NAN; n] },
            |it| it[k].clone(),
        );
        writeln!(out, "{k},{r:e},{}", join(&x))?;
    }
    Ok(())
}

pub fn write_shift_table<W: Write>(out: &mut W, cells: &[ShiftCell]) -> io::Result<()> {
    writeln!(out, "alpha,gamma,n3,n4,n6,total")?;
    for c in cells {
        let [a, b, d] = c.counts.0;
        writeln!(out, "{},{},{a},{b},{d},{}", c.alpha, c.gamma, c.counts.total())?;
    }
    Ok(())
}

pub fn write_method_table<W: Write>(out: &mut W, cells: &[MethodCell]) -> io::Result<()> {
    writeln!(out, "alpha,budget,method,n3,n4,n6,total")?;
    for c in cells {
        let [a, b, d] = c.counts.0;
        let budget = if c.multiplier == 1 { "default".to_string() } else { format!("x{}", c.multiplier) };
        writeln!(
            out,
            "{},{budget},{},{a},{b},{d},{}",
            c.alpha,
            method_label(c.method),
            c.counts.total()
        )?;
    }
    Ok(())
}

pub fn write_sweep<W: Write>(out: &mut W, points: &[SweepPoint]) -> io::Result<()> {
    writeln!(out, "gamma,converged,iterations,residual")?;
    for p in points {
        writeln!(
            out,
            "{},{},{},{:e}",
            p.gamma,
            p.outcome.converged,
            p.outcome.iterations,
            p.outcome.final_residual()
        )?;
    }
    Ok(())
}

/// Long-format residual traces of a sweep: `gamma,iter,residual`.
pub fn write_sweep_traces<W: Write>(out: &mut W, points: &[SweepPoint]) -> io::Result<()> {
    writeln!(out, "gamma,iter,residual")?;
    for p in points {
        for (k, r) in p.outcome.residual_history.iter().enumerate() {
            writeln!(out, "{},{k},{r:e}", p.gamma)?;
        }
    }
    Ok(())
}

pub fn write_simulations<W: Write>(out: &mut W, runs: &[surfer::SimulationResult]) -> io::Result<()> {
    let n = runs.first().map_or(0, |r| r.frequency.len());
    writeln!(out, "seed,steps,{}", x_header(n))?;
    for r in runs {
        writeln!(out, "{},{},{}", r.seed, r.steps, join(r.frequency.as_slice()))?;
    }
    Ok(())
}

pub fn write_oracle<W: Write>(out: &mut W, problem: &str, alpha: f64, set: &oracle::SolutionSet) -> io::Result<()> {
    let n = set.solutions.first().map_or(0, |s| s.len());
    writeln!(out, "problem,alpha,residual,{}", x_header(n))?;
    for (x, r) in set.solutions.iter().zip(&set.residuals) {
        writeln!(out, "{problem},{alpha},{r:e},{}", join(x.as_slice()))?;
    }
    Ok(())
}

pub fn write_beta<W: Write>(out: &mut W, problem: &str, report: &uniqueness::UniquenessReport) -> io::Result<()> {
    writeln!(out, "problem,alpha,unique_regime,beta,beta1,beta2,witness,beta_gt_1")?;
    let witness = report.beta.witness.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ");
    writeln!(
        out,
        "{problem},{},{},{},{},{},{witness},{}",
        report.alpha, report.unique_regime, report.beta.beta, report.beta.beta1, report.beta.beta2, report.beta_certifies
    )
}
