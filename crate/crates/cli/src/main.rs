//! `kerreg` command-line front end.
//!
//! Exit codes: 0 success, 2 invalid flags, 3 unknown case, 4 I/O or file
//! format error, 5 solver or validation failure.

mod cases;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kerreg::formulations::{compare_formulations, condition_estimate, solve};
use kerreg::harness::{coupled_sweep, eta_sweep, h_sweep, EtaRule, SweepOptions};
use kerreg::{Formulation, FormulationConfig};

use cases::CaseArgs;
use output::{emit, Format};

#[derive(Debug, Parser)]
#[command(name = "kerreg", version, about = "Solvers and convergence studies for kernel-degenerate quadratic problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve one problem with one formulation.
    #[command(allow_negative_numbers = true)]
    Solve(SolveArgs),
    /// Run all formulations and compare them against the projected solution.
    #[command(allow_negative_numbers = true)]
    Compare(CompareArgs),
    /// Perturbative error against eta on a fixed problem.
    #[command(allow_negative_numbers = true)]
    SweepEta(SweepEtaArgs),
    /// Mesh refinement study with eta fixed or tied to h.
    #[command(allow_negative_numbers = true)]
    SweepH(SweepHArgs),
    /// Mesh refinement study with eta = c h.
    #[command(allow_negative_numbers = true)]
    SweepCoupled(SweepCoupledArgs),
    /// Spectral condition estimate of one formulation's system matrix.
    #[command(allow_negative_numbers = true)]
    Condition(ConditionArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormulationArg {
    Projected,
    Saddle,
    Penalty,
    Perturbative,
}

impl From<FormulationArg> for Formulation {
    fn from(f: FormulationArg) -> Self {
        match f {
            FormulationArg::Projected => Formulation::Projected,
            FormulationArg::Saddle => Formulation::SaddlePoint,
            FormulationArg::Penalty => Formulation::Penalty,
            FormulationArg::Perturbative => Formulation::Perturbative,
        }
    }
}

#[derive(Debug, Args)]
struct SolverArgs {
    /// Relative residual tolerance of the iterative solvers.
    #[arg(long, env = "KERREG_TOL", default_value = "1e-12")]
    tol: f64,
    /// CG iteration cap (default 20 n).
    #[arg(long, env = "KERREG_MAX_ITER")]
    max_iter: Option<usize>,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Report file; the report goes to standard output when omitted.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[command(flatten)]
    case: CaseArgs,
    /// Element count (1D) or grid count per side (2D).
    #[arg(long, default_value_t = 32)]
    n: usize,
    /// Formulation to solve.
    #[arg(long, value_enum)]
    formulation: FormulationArg,
    /// Regularization weight (perturbative).
    #[arg(long, default_value = "1e-6")]
    eta: f64,
    /// Penalty parameter.
    #[arg(long, default_value = "1e-6")]
    eps: f64,
    /// Also run the perturbative solver on inconsistent loads.
    #[arg(long)]
    allow_inconsistent: bool,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[command(flatten)]
    case: CaseArgs,
    /// Element count (1D) or grid count per side (2D).
    #[arg(long, default_value_t = 32)]
    n: usize,
    /// Regularization weight (perturbative).
    #[arg(long, default_value = "1e-6")]
    eta: f64,
    /// Penalty parameters, one penalty solve each.
    #[arg(long, value_delimiter = ',', default_value = "1e-6")]
    eps: Vec<f64>,
    /// Add spectral condition estimates of every system matrix.
    #[arg(long)]
    conditions: bool,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct SweepEtaArgs {
    #[command(flatten)]
    case: CaseArgs,
    /// Element count (1D) or grid count per side (2D).
    #[arg(long, default_value_t = 257)]
    n: usize,
    /// Eta grid.
    #[arg(long, value_delimiter = ',', default_value = "1e-1,1e-2,1e-3,1e-4,1e-5,1e-6,1e-7,1e-8")]
    etas: Vec<f64>,
    /// Worker threads for the sweep rows; the report does not depend on it.
    #[arg(long, env = "KERREG_JOBS", default_value_t = 1)]
    jobs: usize,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct SweepHArgs {
    #[command(flatten)]
    case: CaseArgs,
    /// Mesh counts, strictly increasing.
    #[arg(long, value_delimiter = ',', required = true)]
    ns: Vec<usize>,
    /// Coupling `eta = c h^k`, written `k=2` or `c=0.5,k=2`.
    #[arg(long, conflicts_with = "eta", required_unless_present = "eta")]
    couple: Option<String>,
    /// Fixed eta on every mesh.
    #[arg(long)]
    eta: Option<f64>,
    /// Worker threads for the sweep rows.
    #[arg(long, env = "KERREG_JOBS", default_value_t = 1)]
    jobs: usize,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct SweepCoupledArgs {
    #[command(flatten)]
    case: CaseArgs,
    /// Mesh counts, strictly increasing.
    #[arg(long, value_delimiter = ',', required = true)]
    ns: Vec<usize>,
    /// Coupling constant in `eta = c h`.
    #[arg(long, short = 'c', default_value_t = 1.0)]
    c: f64,
    /// Worker threads for the sweep rows.
    #[arg(long, env = "KERREG_JOBS", default_value_t = 1)]
    jobs: usize,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct ConditionArgs {
    #[command(flatten)]
    case: CaseArgs,
    /// Element count (1D) or grid count per side (2D).
    #[arg(long, default_value_t = 32)]
    n: usize,
    /// Formulation to solve.
    #[arg(long, value_enum)]
    formulation: FormulationArg,
    /// Regularization weight (perturbative).
    #[arg(long, default_value = "1e-6")]
    eta: f64,
    /// Penalty parameter.
    #[arg(long, default_value = "1e-6")]
    eps: f64,
    #[command(flatten)]
    out: OutputArgs,
}

/// Failure categories, each with its own exit status.
#[derive(Debug)]
enum Failure {
    Usage(String),
    UnknownCase(String),
    Io(String),
    Solver(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::UnknownCase(_) => 3,
            Failure::Io(_) => 4,
            Failure::Solver(_) => 5,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::UnknownCase(m) | Failure::Io(m) | Failure::Solver(m) => m,
        }
    }
}

impl From<kerreg::Error> for Failure {
    fn from(e: kerreg::Error) -> Self {
        use kerreg::Error as E;
        match e {
            E::Io(_) | E::Json(_) | E::Format(_) => Failure::Io(e.to_string()),
            other => Failure::Solver(other.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

fn config(solver: &SolverArgs) -> FormulationConfig {
    FormulationConfig {
        tol: solver.tol,
        max_iter: solver.max_iter,
        ..FormulationConfig::default()
    }
}

fn parse_coupling(text: &str) -> Result<EtaRule, Failure> {
    let (mut c, mut k) = (1.0, None);
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| Failure::Usage(format!("--couple: expected key=value, got `{part}`")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("--couple: `{value}` is not a number")))?;
        match key.trim() {
            "c" => c = value,
            "k" => k = Some(value),
            other => return Err(Failure::Usage(format!("--couple: unknown key `{other}`"))),
        }
    }
    let k = k.ok_or_else(|| Failure::Usage("--couple needs k=..".into()))?;
    Ok(EtaRule::Coupled { c, k })
}

fn run_solve(args: &SolveArgs) -> Outcome {
    let problem = args.case.problem(args.n)?;
    let formulation = Formulation::from(args.formulation);
    let cfg = FormulationConfig {
        eta: args.eta,
        eps: args.eps,
        reject_inconsistent: !args.allow_inconsistent,
        ..config(&args.solver)
    };
    if let (false, Some((component, value, tolerance))) = (args.allow_inconsistent, problem.first_inconsistency()) {
        return Err(kerreg::Error::InconsistentLoad {
            component,
            value,
            tolerance,
        }
        .into());
    }
    let solution = solve(&problem, formulation, &cfg)?;
    if !solution.consistent {
        eprintln!("kerreg: warning: load is inconsistent (Z^T F != 0), so V has no minimizer");
    }
    emit(&args.out, output::solution_csv(&solution), output::json(&solution))?;
    let shown = if solution.u.len() <= 8 {
        let parts: Vec<String> = solution.u.iter().map(|v| format!("{v:.5}")).collect();
        format!("u = ({})", parts.join(", "))
    } else {
        format!("u has {} entries", solution.u.len())
    };
    println!(
        "{} {}: {shown}; iterations {}, residual {:.3e}, V(u) = {:.12e}",
        problem.label(),
        formulation,
        solution.iterations,
        solution.residual,
        solution.value
    );
    Ok(())
}

fn run_compare(args: &CompareArgs) -> Outcome {
    let problem = args.case.problem(args.n)?;
    let report = compare_formulations(&problem, args.eta, &args.eps, &config(&args.solver), args.conditions)?;
    emit(&args.out, report.to_csv(), output::json(&report))?;
    let relative = report.max_pairwise_difference / report.reference_h_norm.max(f64::MIN_POSITIVE);
    println!(
        "{}: max pairwise diff {:.3e} (relative {:.3e}, {} 1e-8); perturbative error {:.3e}, C = {:.3e}",
        report.label,
        report.max_pairwise_difference,
        relative,
        if report.equivalent { "<=" } else { ">" },
        report.perturbative_error,
        report.perturbative_constant
    );
    Ok(())
}

fn run_sweep_eta(args: &SweepEtaArgs) -> Outcome {
    let problem = args.case.problem(args.n)?;
    let opts = SweepOptions::from(config(&args.solver)).with_jobs(args.jobs);
    let report = eta_sweep(&problem, &args.etas, &opts)?;
    emit(&args.out, report.to_csv(), report.to_json())?;
    println!("{}: {}", problem.label(), report.summary());
    Ok(())
}

fn run_sweep_h(args: &SweepHArgs) -> Outcome {
    let (case, degree) = args.case.manufactured()?;
    let rule = match (&args.couple, args.eta) {
        (Some(text), None) => parse_coupling(text)?,
        (None, Some(eta)) => EtaRule::Fixed(eta),
        _ => return Err(Failure::Usage("give exactly one of --couple and --eta".into())),
    };
    let opts = SweepOptions::from(config(&args.solver)).with_jobs(args.jobs);
    let report = h_sweep(&case, &args.ns, degree, rule, &opts)?;
    emit(&args.out, report.to_csv(), report.to_json())?;
    println!("{} degree {degree}, {rule}: {}", case.name, report.summary());
    Ok(())
}

fn run_sweep_coupled(args: &SweepCoupledArgs) -> Outcome {
    let (case, degree) = args.case.manufactured()?;
    let opts = SweepOptions::from(config(&args.solver)).with_jobs(args.jobs);
    let report = coupled_sweep(&case, &args.ns, degree, args.c, &opts)?;
    emit(&args.out, report.to_csv(), report.to_json())?;
    println!("{} degree {degree}, eta = {} h: {}", case.name, args.c, report.summary());
    Ok(())
}

fn run_condition(args: &ConditionArgs) -> Outcome {
    let problem = args.case.problem(args.n)?;
    let formulation = Formulation::from(args.formulation);
    let param = match formulation {
        Formulation::Perturbative => args.eta,
        Formulation::Penalty => args.eps,
        _ => 0.0,
    };
    let estimate = condition_estimate(&problem, formulation, param)?;
    emit(
        &args.out,
        output::condition_csv(formulation, param, &estimate),
        output::json(&estimate),
    )?;
    println!(
        "{} {formulation} ({param:e}): cond {:.6e} = {:.6e} / {:.6e}{}",
        problem.label(),
        estimate.condition,
        estimate.largest.abs(),
        estimate.smallest.abs(),
        if estimate.converged { "" } else { " (not converged)" }
    );
    Ok(())
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Solve(a) => run_solve(a),
        Command::Compare(a) => run_compare(a),
        Command::SweepEta(a) => run_sweep_eta(a),
        Command::SweepH(a) => run_sweep_h(a),
        Command::SweepCoupled(a) => run_sweep_coupled(a),
        Command::Condition(a) => run_condition(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("kerreg: {}", failure.message());
            ExitCode::from(failure.code())
        }
    }
}
