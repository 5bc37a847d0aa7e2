//! Command-line front end. The `mirrorcode` binary forwards to [`run`].
//!
//! Environment overrides: `MIRRORCODE_PIECES` sets the default piece count
//! for `assign`; `MIRRORCODE_TOLERANCE` sets the relative tolerance used to
//! call two optima equal.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::assign::build_manifest;
use crate::error::Error;
use crate::gap::{analyze_gap, GapAnalysis, GapMethod};
use crate::harness::{self, run_experiment, solve_pinned_subset, ExperimentConfig, StoragePin};
use crate::lp::{LpStatus, Solvable, OBJECTIVE_TOLERANCE};
use crate::network::{parse_network, NetworkInstance};
use crate::problems::{self, ProblemKind};
use crate::scalar::{fmt6, parse_rational, Rational, Scalar};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_SOLVER: i32 = 4;

pub const PIECES_ENV: &str = "MIRRORCODE_PIECES";
pub const TOLERANCE_ENV: &str = "MIRRORCODE_TOLERANCE";

#[derive(Parser, Debug)]
#[command(
    name = "mirrorcode",
    version,
    about = "Minimum-cost mirror placement: uncoded versus coded storage"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve one program on an instance file.
    Solve(SolveArgs),
    /// Compare coded and uncoded optima and bound the gap.
    Gap(GapArgs),
    /// Piece manifest from the uncoded optimum.
    Assign(AssignArgs),
    /// Random coded-versus-uncoded study.
    Experiment(ExperimentArgs),
    /// Demo on a built-in instance.
    Example(ExampleArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ProblemArg {
    Subset,
    Coded,
    AtomSubset,
    AtomCoded,
}

impl From<ProblemArg> for ProblemKind {
    fn from(p: ProblemArg) -> Self {
        match p {
            ProblemArg::Subset => ProblemKind::Subset,
            ProblemArg::Coded => ProblemKind::Coded,
            ProblemArg::AtomSubset => ProblemKind::AtomSubset,
            ProblemArg::AtomCoded => ProblemKind::AtomCoded,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Lp,
    Greedy,
    Both,
}

impl From<MethodArg> for GapMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Lp => GapMethod::Lp,
            MethodArg::Greedy => GapMethod::Greedy,
            MethodArg::Both => GapMethod::Both,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Text,
    Records,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FixtureArg {
    Butterfly,
    Fig5,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long, value_enum)]
    problem: ProblemArg,
    #[arg(long)]
    input: PathBuf,
    /// Solve in exact rational arithmetic (small instances only).
    #[arg(long)]
    exact: bool,
}

#[derive(Args, Debug)]
struct GapArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "both")]
    method: MethodArg,
    #[arg(long)]
    exact: bool,
}

#[derive(Args, Debug)]
struct AssignArgs {
    #[arg(long)]
    input: PathBuf,
    /// Piece count Q [default: $MIRRORCODE_PIECES or 1000].
    #[arg(long)]
    pieces: Option<usize>,
    #[arg(long)]
    exact: bool,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    /// File of `key value` lines; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    nodes: Option<usize>,
    #[arg(long)]
    edges: Option<usize>,
    #[arg(long)]
    sources: Option<usize>,
    #[arg(long)]
    terminals: Option<usize>,
    #[arg(long)]
    entropy: Option<String>,
    #[arg(long, value_enum, default_value = "text")]
    format: FormatArg,
}

#[derive(Args, Debug)]
struct ExampleArgs {
    #[arg(long, value_enum)]
    name: FixtureArg,
}

/// A failure carrying its exit code.
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Parse { .. } => EXIT_PARSE,
            Error::InvalidArgument(_) => EXIT_USAGE,
            Error::NotOptimal(LpStatus::Infeasible)
            | Error::InfeasibleInput(_)
            | Error::NotSubsetFeasible { .. } => EXIT_INFEASIBLE,
            Error::NotOptimal(_)
            | Error::UnboundedFlow
            | Error::SolverFailure(_)
            | Error::TooLarge { .. } => EXIT_SOLVER,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn read_instance(path: &PathBuf) -> Result<NetworkInstance, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    parse_network(&text).map_err(|e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    })
}

fn env_value<T: std::str::FromStr>(name: &str) -> Result<Option<T>, Failure> {
    match std::env::var(name) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| usage(format!("{name} is not a valid number: `{v}`"))),
        Err(_) => Ok(None),
    }
}

fn tolerance() -> Result<f64, Failure> {
    let tol = env_value::<f64>(TOLERANCE_ENV)?.unwrap_or(OBJECTIVE_TOLERANCE);
    if !(tol >= 0.0 && tol.is_finite()) {
        return Err(usage(format!(
            "{TOLERANCE_ENV} must be a nonnegative number"
        )));
    }
    Ok(tol)
}

fn solve_report<T: Solvable>(kind: ProblemKind, net: &NetworkInstance) -> Result<String, Failure> {
    Ok(problems::solve::<T>(kind, net)?.report())
}

fn gap_report<T: Solvable>(net: &NetworkInstance, method: GapMethod) -> Result<String, Failure> {
    let analysis = analyze_gap::<T>(net, method)?;
    let mut out = String::new();
    out.push_str(&format!("sources={}\n", net.source_count()));
    out.push_str(&analysis.report());
    out.push_str(&chain_line(&analysis, tolerance()?));
    Ok(out)
}

/// `coded ≤ subset ≤ coded + gap_lp ≤ coded + greedy`, checked at `tol`.
fn chain_line<T: Scalar>(a: &GapAnalysis<T>, tol: f64) -> String {
    let coded = a.coded.objective.to_f64_lossy();
    let subset = a.subset.objective.to_f64_lossy();
    let slack = tol * coded.abs().max(subset.abs()).max(1.0);
    let mut holds = coded <= subset + slack;
    if let Some(lp) = &a.gap_lp {
        holds &= subset <= coded + lp.objective.to_f64_lossy() + slack;
        if let Some(g) = &a.greedy {
            holds &= lp.objective.to_f64_lossy() <= g.delta.to_f64_lossy() + slack;
        }
    }
    format!("chain={holds}\n")
}

fn assign_report<T: Solvable>(net: &NetworkInstance, pieces: usize) -> Result<String, Failure> {
    let subset = problems::solve::<T>(ProblemKind::Subset, net)?;
    let atoms = subset.atoms.as_ref().expect("subset atoms");
    let manifest = build_manifest(atoms, pieces)?;
    Ok(format!("objective={}\n{manifest}", fmt6(&subset.objective)))
}

fn experiment(args: &ExperimentArgs) -> Result<String, Failure> {
    let mut cfg = ExperimentConfig {
        tolerance: tolerance()?,
        ..ExperimentConfig::default()
    };
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
        cfg = cfg.apply_text(&text)?;
    }
    macro_rules! set {
        ($($field:ident),*) => { $(if let Some(v) = args.$field { cfg.$field = v; })* };
    }
    set!(seed, trials, nodes, edges, sources, terminals);
    if let Some(h) = &args.entropy {
        cfg.entropy =
            parse_rational(h).ok_or_else(|| usage(format!("--entropy is not a number: `{h}`")))?;
    }
    let report = run_experiment(&cfg)?;
    Ok(match args.format {
        FormatArg::Text => report.text(),
        FormatArg::Records => report.records(),
    })
}

fn example(name: FixtureArg) -> Result<String, Failure> {
    let name = match name {
        FixtureArg::Butterfly => "butterfly",
        FixtureArg::Fig5 => "fig5",
    };
    let net = harness::fixture(name)?;
    let mut out = format!("example={name}\n");
    let atom_subset = problems::solve::<f64>(ProblemKind::AtomSubset, &net)?;
    out.push_str(&format!("atom_subset={}\n", fmt6(&atom_subset.objective)));
    let analysis = analyze_gap::<f64>(&net, GapMethod::Both)?;
    out.push_str(&analysis.report());
    out.push_str(&chain_line(&analysis, tolerance()?));
    if name == "butterfly" {
        let independent = solve_pinned_subset::<f64>(&net, StoragePin::Independent)?;
        let replicated = solve_pinned_subset::<f64>(&net, StoragePin::FullReplication)?;
        out.push_str(&format!("independent={}\n", fmt6(&independent.objective)));
        out.push_str(&format!(
            "full_replication={}\n",
            fmt6(&replicated.objective)
        ));
        out.push_str(&format!(
            "partial_replication={}\n",
            fmt6(&analysis.subset.objective)
        ));
    }
    out.push_str("subset_solution:\n");
    out.push_str(&analysis.subset.report());
    Ok(out)
}

fn dispatch(command: Command) -> Result<String, Failure> {
    match command {
        Command::Solve(a) => {
            let net = read_instance(&a.input)?;
            if a.exact {
                solve_report::<Rational>(a.problem.into(), &net)
            } else {
                solve_report::<f64>(a.problem.into(), &net)
            }
        }
        Command::Gap(a) => {
            let net = read_instance(&a.input)?;
            if a.exact {
                gap_report::<Rational>(&net, a.method.into())
            } else {
                gap_report::<f64>(&net, a.method.into())
            }
        }
        Command::Assign(a) => {
            let pieces = match a.pieces {
                Some(q) => q,
                None => env_value::<usize>(PIECES_ENV)?.unwrap_or(1000),
            };
            if pieces == 0 {
                return Err(usage("piece count must be positive"));
            }
            let net = read_instance(&a.input)?;
            if a.exact {
                assign_report::<Rational>(&net, pieces)
            } else {
                assign_report::<f64>(&net, pieces)
            }
        }
        Command::Experiment(a) => experiment(&a),
        Command::Example(a) => example(a.name),
    }
}

/// Runs one invocation, writing the report to `out` and diagnostics to `err`.
/// Returns the process exit code.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let first = e
                        .to_string()
                        .lines()
                        .next()
                        .unwrap_or("usage error")
                        .to_string();
                    let _ = writeln!(err, "{first}");
                    EXIT_USAGE
                }
            };
        }
    };
    match dispatch(cli.command) {
        Ok(report) => {
            let _ = out.write_all(report.as_bytes());
            EXIT_OK
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}
