use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use mlpr_cli::{self as harness, TABLE_ALPHAS, TABLE_GAMMAS, TABLE_METHODS};
use mlpr_core::solvers::{self, Method, SolverOptions};
use mlpr_core::{format, oracle, problems, surfer, uniqueness, ProbabilityVector, TransitionTensor};

const EXIT_NOT_CONVERGED: u8 = 2;

#[derive(Parser)]
#[command(name = "mlpr", version, about = "Multilinear PageRank solvers and experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one problem and write the residual trace.
    Solve(SolveArgs),
    /// Shifted-iteration reliability as the shift varies.
    TableShift(TableArgs),
    /// Reliability of every method at default and extra budgets.
    TableMethods(TableArgs),
    /// Shifted iteration on one problem over a grid of shifts.
    SweepShift(SweepArgs),
    /// Spacey random surfer simulation.
    Simulate(SimulateArgs),
    /// Uniqueness regime and beta of the PageRank-modified tensor.
    Beta(BetaArgs),
    /// Multi-start enumeration of solutions.
    Oracle(OracleArgs),
    /// Write every bundled problem as an mlpr-tensor v1 file.
    Export(ExportArgs),
}

#[derive(Args, Clone)]
struct Source {
    /// Bundled problem (R1, R2, R3_1 ..., or an example: example31, nonunique).
    #[arg(long, alias = "example", conflicts_with = "tensor_file")]
    problem: Option<String>,
    /// Tensor in mlpr-tensor v1 format.
    #[arg(long)]
    tensor_file: Option<PathBuf>,
    /// Teleportation vector file (default e/n).
    #[arg(long)]
    v_file: Option<PathBuf>,
}

impl Source {
    fn load(&self) -> Result<(String, TransitionTensor, ProbabilityVector)> {
        let (name, tensor) = match (&self.problem, &self.tensor_file) {
            (Some(p), _) => (p.clone(), problems::resolve(p)?.tensor),
            (None, Some(path)) => {
                let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                let t = format::parse(&text).with_context(|| format!("parsing {}", path.display()))?;
                (path.display().to_string(), t)
            }
            (None, None) => bail!("one of --problem or --tensor-file is required"),
        };
        let v = match &self.v_file {
            Some(path) => {
                let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                ProbabilityVector::new(format::parse_vector(&text)?)?
            }
            None => ProbabilityVector::uniform(tensor.dim()),
        };
        if v.len() != tensor.dim() {
            bail!("v has length {} but the tensor has dimension {}", v.len(), tensor.dim());
        }
        Ok((name, tensor, v))
    }

    fn describe(&self) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        if let Some(p) = &self.problem {
            out.push(("problem", p.clone()));
        }
        if let Some(f) = &self.tensor_file {
            out.push(("tensor_file", f.display().to_string()));
        }
        out.push((
            "v",
            self.v_file.as_ref().map_or("uniform".into(), |f| f.display().to_string()),
        ));
        out
    }
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    source: Source,
    /// fixed, shifted, innerouter, inverse, newton or newton-pure.
    #[arg(long, default_value = "shifted")]
    method: Method,
    #[arg(long)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[arg(long, default_value_t = solvers::DEFAULT_TOL)]
    tol: f64,
    /// Iteration budget (default depends on the method).
    #[arg(long)]
    max_iter: Option<usize>,
    /// Multiplier on the default iteration budget.
    #[arg(long, default_value_t = 1)]
    extra: usize,
    /// Trace CSV path (default stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TableArgs {
    /// Extra-budget multiplier (table-methods adds a block when > 1).
    #[arg(long, default_value_t = 1)]
    extra: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long)]
    alpha: f64,
    /// Comma-separated shifts.
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.5, 0.554, 0.5545, 0.6, 0.75, 1.0, 2.0])]
    gamma: Vec<f64>,
    #[arg(long, default_value_t = 10_000)]
    max_iter: usize,
    #[arg(long, default_value_t = solvers::DEFAULT_TOL)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Long-format residual traces `gamma,iter,residual`.
    #[arg(long)]
    trace_out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long)]
    alpha: f64,
    #[arg(long, default_value_t = 1_000_000)]
    steps: u64,
    /// First seed.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Number of consecutive seeds to run.
    #[arg(long, default_value_t = 1)]
    seeds: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BetaArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long)]
    alpha: f64,
    /// Also count solutions with this many random oracle starts.
    #[arg(long)]
    oracle_starts: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long)]
    alpha: f64,
    #[arg(long, default_value_t = 200)]
    starts: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExportArgs {
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..1.0).contains(&alpha) {
        bail!("--alpha must be in [0, 1), got {alpha}");
    }
    Ok(())
}

fn meta(command: &str) -> Vec<(&'static str, String)> {
    vec![
        ("command", command.to_string()),
        ("version", env!("CARGO_PKG_VERSION").to_string()),
    ]
}

fn solve(args: &SolveArgs) -> Result<u8> {
    check_alpha(args.alpha)?;
    if args.extra == 0 {
        bail!("--extra must be at least 1");
    }
    let (name, tensor, v) = args.source.load()?;
    let max_iter = args
        .max_iter
        .unwrap_or(args.method.default_max_iter() * args.extra);
    let opts = SolverOptions::new(args.alpha, v)
        .gamma(args.gamma)
        .tol(args.tol)
        .max_iter(max_iter)
        .record_iterates(true);
    let outcome = solvers::solve(&tensor, args.method, &opts)?;
    let mut out = open_out(args.out.as_deref())?;
    let mut m = meta("solve");
    m.extend(args.source.describe());
    m.extend([
        ("method", args.method.to_string()),
        ("alpha", args.alpha.to_string()),
        ("gamma", args.gamma.to_string()),
        ("tol", args.tol.to_string()),
        ("max_iter", max_iter.to_string()),
    ]);
    harness::write_metadata(&mut out, &m)?;
    harness::write_trace(&mut out, &outcome, tensor.dim())?;
    out.flush()?;
    eprintln!(
        "{name}: {} after {} iterations, residual {:e}",
        if outcome.converged { "converged" } else { "did not converge" },
        outcome.iterations,
        outcome.final_residual()
    );
    Ok(if outcome.converged { 0 } else { EXIT_NOT_CONVERGED })
}

fn table_shift(args: &TableArgs) -> Result<u8> {
    if args.extra == 0 {
        bail!("--extra must be at least 1");
    }
    let max_iter = 10_000 * args.extra;
    let cells = harness::table_shift(&harness::table_problems(), &TABLE_ALPHAS, &TABLE_GAMMAS, max_iter);
    let mut out = open_out(args.out.as_deref())?;
    let mut m = meta("table-shift");
    m.extend([
        ("problems", "29 binary test tensors".to_string()),
        ("v", "uniform".into()),
        ("tol", solvers::DEFAULT_TOL.to_string()),
        ("max_iter", max_iter.to_string()),
    ]);
    harness::write_metadata(&mut out, &m)?;
    harness::write_shift_table(&mut out, &cells)?;
    out.flush()?;
    Ok(0)
}

fn table_methods(args: &TableArgs) -> Result<u8> {
    if args.extra == 0 {
        bail!("--extra must be at least 1");
    }
    let problems = harness::table_problems();
    let mut cells = harness::table_methods(&problems, &TABLE_ALPHAS, &TABLE_METHODS, 1);
    if args.extra > 1 {
        cells.extend(harness::table_methods(&problems, &TABLE_ALPHAS, &TABLE_METHODS, args.extra));
    }
    let mut out = open_out(args.out.as_deref())?;
    let mut m = meta("table-methods");
    m.extend([
        ("problems", "29 binary test tensors".to_string()),
        ("v", "uniform".into()),
        ("tol", solvers::DEFAULT_TOL.to_string()),
        ("gamma", "1".into()),
        ("extra", args.extra.to_string()),
    ]);
    harness::write_metadata(&mut out, &m)?;
    harness::write_method_table(&mut out, &cells)?;
    out.flush()?;
    Ok(0)
}

fn sweep_shift(args: &SweepArgs) -> Result<u8> {
    check_alpha(args.alpha)?;
    let (_, tensor, v) = args.source.load()?;
    let points = harness::sweep_shift(&tensor, args.alpha, &v, &args.gamma, args.max_iter, args.tol)?;
    let mut m = meta("sweep-shift");
    m.extend(args.source.describe());
    m.extend([
        ("alpha", args.alpha.to_string()),
        ("max_iter", args.max_iter.to_string()),
        ("tol", args.tol.to_string()),
    ]);
    let mut out = open_out(args.out.as_deref())?;
    harness::write_metadata(&mut out, &m)?;
    harness::write_sweep(&mut out, &points)?;
    out.flush()?;
    if let Some(path) = &args.trace_out {
        let mut t = open_out(Some(path))?;
        harness::write_metadata(&mut t, &m)?;
        harness::write_sweep_traces(&mut t, &points)?;
        t.flush()?;
    }
    Ok(0)
}

fn simulate(args: &SimulateArgs) -> Result<u8> {
    if !(0.0..=1.0).contains(&args.alpha) {
        bail!("--alpha must be in [0, 1], got {}", args.alpha);
    }
    if args.seeds == 0 {
        bail!("--seeds must be at least 1");
    }
    let (_, tensor, v) = args.source.load()?;
    let runs = (args.seed..args.seed + args.seeds)
        .into_par_iter()
        .map(|seed| surfer::simulate(&tensor, args.alpha, &v, args.steps, seed))
        .collect::<mlpr_core::Result<Vec<_>>>()?;
    let mut m = meta("simulate");
    m.extend(args.source.describe());
    m.extend([
        ("alpha", args.alpha.to_string()),
        ("steps", args.steps.to_string()),
        ("seed", args.seed.to_string()),
        ("seeds", args.seeds.to_string()),
        ("generator", surfer::GENERATOR.to_string()),
        ("estimate", "w/(t+n) including unit pseudo-counts".into()),
    ]);
    let mut out = open_out(args.out.as_deref())?;
    harness::write_metadata(&mut out, &m)?;
    harness::write_simulations(&mut out, &runs)?;
    out.flush()?;
    Ok(0)
}

fn beta(args: &BetaArgs) -> Result<u8> {
    check_alpha(args.alpha)?;
    let (name, tensor, v) = args.source.load()?;
    let report = uniqueness::uniqueness_report(&tensor, args.alpha, &v, args.oracle_starts)?;
    let mut m = meta("beta");
    m.extend(args.source.describe());
    m.push(("alpha", args.alpha.to_string()));
    if let Some(s) = args.oracle_starts {
        m.push(("oracle_starts", s.to_string()));
    }
    let mut out = open_out(args.out.as_deref())?;
    harness::write_metadata(&mut out, &m)?;
    harness::write_beta(&mut out, &name, &report)?;
    out.flush()?;
    if let Some(count) = report.solutions_found {
        eprintln!("{name}: oracle found {count} solution(s)");
    }
    Ok(0)
}

fn run_oracle(args: &OracleArgs) -> Result<u8> {
    check_alpha(args.alpha)?;
    let (name, tensor, v) = args.source.load()?;
    let set = oracle::enumerate_solutions(&tensor, args.alpha, &v, args.starts, args.seed)?;
    let mut m = meta("oracle");
    m.extend(args.source.describe());
    m.extend([
        ("alpha", args.alpha.to_string()),
        ("starts", args.starts.to_string()),
        ("seed", args.seed.to_string()),
        ("starts_used", set.starts_used.to_string()),
        ("accepted_starts", set.accepted_starts.to_string()),
        ("dedup_radius", set.dedup_radius.to_string()),
    ]);
    let mut out = open_out(args.out.as_deref())?;
    harness::write_metadata(&mut out, &m)?;
    harness::write_oracle(&mut out, &name, args.alpha, &set)?;
    out.flush()?;
    eprintln!("{name}: {} solution(s)", set.solutions.len());
    Ok(0)
}

fn export(args: &ExportArgs) -> Result<u8> {
    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    for rec in problems::load_all() {
        let path = args.out.join(format!("{}.mlpr", rec.name));
        fs::write(&path, format::serialize(&rec.tensor)).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(0)
}

fn run(cli: &Cli) -> Result<u8> {
    match &cli.command {
        Command::Solve(a) => solve(a),
        Command::TableShift(a) => table_shift(a),
        Command::TableMethods(a) => table_methods(a),
        Command::SweepShift(a) => sweep_shift(a),
        Command::Simulate(a) => simulate(a),
        Command::Beta(a) => beta(a),
        Command::Oracle(a) => run_oracle(a),
        Command::Export(a) => export(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
