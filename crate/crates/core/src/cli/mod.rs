//! Command-line front end. Every command produces an [`Outcome`] which is
//! rendered either as text or as the JSON envelope described by
//! `schema/report.schema.json`.

mod commands;
mod render;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use geoquant::dynamics::{Method, Picture};
use geoquant::kahler::Direction;
use geoquant::report::VerificationReport;
use serde_json::{json, Map, Value};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "geoquant",
    version,
    about = "Geometric quantum mechanics on finite-level systems: identity suites, flows and eigensolving",
    after_help = "Exit codes: 0 success, 1 verification or convergence failure, 2 usage or input error."
)]
pub struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// Emit the JSON envelope instead of text
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for trial-parallel suites [default: all cores]
    #[arg(long, global = true, env = "GEOQUANT_THREADS", value_parser = positive_usize)]
    threads: Option<usize>,
    /// Write the report to this file instead of standard output
    #[arg(long, short = 'o', global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the Jordan-Lie, dual-geometry, distribution and momentum-map suites
    Verify(VerifyArgs),
    /// Propagate a state and write its trajectory as CSV
    Evolve(EvolveArgs),
    /// Extremal eigenpair by gradient flow of the expectation function
    Eigen(EigenArgs),
    /// Evaluate the star product of two observables at a dual element
    Star(StarArgs),
    /// Ranks of the Lambda, R, zero and one distributions and orbit invariants
    Distributions(DistributionsArgs),
    /// Print the su(2) tables and check the worked star and bracket values
    Su2demo,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Hilbert space dimension
    #[arg(long, default_value_t = 4, value_parser = positive_usize)]
    dim: usize,
    /// Random trials per suite
    #[arg(long, default_value_t = 100, value_parser = positive_usize)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Relative residual tolerance
    #[arg(long, default_value_t = 1e-9, value_parser = positive_f64)]
    tol: f64,
}

#[derive(Args, Debug)]
struct EvolveArgs {
    /// schrodinger, heisenberg or vonneumann
    #[arg(long, default_value = "schrodinger")]
    picture: Picture,
    /// Hamiltonian in matrix JSON
    #[arg(long)]
    hamiltonian: PathBuf,
    /// Initial vector (schrodinger) or matrix (heisenberg, vonneumann) in matrix JSON
    #[arg(long)]
    initial: PathBuf,
    /// Final time
    #[arg(long, default_value_t = 1.0, value_parser = finite_f64)]
    t: f64,
    /// Number of time steps; the trajectory has steps + 1 rows
    #[arg(long, default_value_t = 100, value_parser = positive_usize)]
    steps: usize,
    #[arg(long, default_value_t = 1.0, value_parser = positive_f64)]
    hbar: f64,
    /// exact or rk4
    #[arg(long, default_value = "exact")]
    method: Method,
    /// Also check that the flow projects to the von Neumann flow (schrodinger only)
    #[arg(long)]
    check_mu: bool,
    /// Observable used by --check-mu [default: random, from --seed]
    #[arg(long)]
    observable: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the CSV here; otherwise it goes to standard output and the report to standard error
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-9, value_parser = positive_f64)]
    tol: f64,
}

#[derive(Args, Debug)]
struct EigenArgs {
    /// Hermitian operator in matrix JSON
    #[arg(long)]
    operator: PathBuf,
    /// ascent (largest eigenvalue) or descent (smallest)
    #[arg(long, default_value = "ascent")]
    direction: Direction,
    /// Seed of the random starting vector
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Stop when the eigen-residual drops to this value
    #[arg(long, default_value_t = 1e-9, value_parser = positive_f64)]
    tol: f64,
    /// Flow step [default: 0.1 / Frobenius norm]
    #[arg(long, value_parser = positive_f64)]
    step: Option<f64>,
    #[arg(long, default_value_t = 100_000, value_parser = positive_usize)]
    max_iter: usize,
    /// Allowed gap to the oracle eigenvalue and allowed final dispersion
    #[arg(long, default_value_t = 1e-8, value_parser = positive_f64)]
    oracle_tol: f64,
}

#[derive(Args, Debug)]
struct StarArgs {
    /// Left observable in matrix JSON
    #[arg(long)]
    a: PathBuf,
    /// Right observable in matrix JSON
    #[arg(long)]
    b: PathBuf,
    /// Dual element in matrix JSON
    #[arg(long)]
    xi: PathBuf,
    #[arg(long, default_value_t = 1e-9, value_parser = positive_f64)]
    tol: f64,
}

#[derive(Args, Debug)]
struct DistributionsArgs {
    /// Point of the dual space in matrix JSON [default: random, from --dim and --seed]
    #[arg(long)]
    xi: Option<PathBuf>,
    #[arg(long, default_value_t = 3, value_parser = positive_usize)]
    dim: usize,
    /// Random points for the involutivity evidence
    #[arg(long, default_value_t = 100, value_parser = positive_usize)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-9, value_parser = positive_f64)]
    tol: f64,
}

fn positive_usize(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

fn finite_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e: std::num::ParseFloatError| e.to_string())?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err("must be finite".into())
    }
}

fn positive_f64(s: &str) -> Result<f64, String> {
    let v = finite_f64(s)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err("must be positive".into())
    }
}

/// Bad input: exit code 2.
#[derive(Debug)]
pub struct InputError(pub String);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<geoquant::Error> for InputError {
    fn from(e: geoquant::Error) -> Self {
        InputError(e.to_string())
    }
}

/// Result of a command before rendering.
#[derive(Debug)]
pub struct Outcome {
    pub command: &'static str,
    pub passed: bool,
    pub reports: Vec<VerificationReport>,
    pub data: Map<String, Value>,
    pub warnings: Vec<String>,
    /// Trajectory CSV destined for standard output.
    pub stdout_csv: Option<String>,
}

impl Outcome {
    fn new(command: &'static str) -> Self {
        Self {
            command,
            passed: true,
            reports: Vec::new(),
            data: Map::new(),
            warnings: Vec::new(),
            stdout_csv: None,
        }
    }

    fn push_report(&mut self, r: VerificationReport) {
        self.passed &= r.passed;
        self.reports.push(r);
    }

    fn set(&mut self, key: &str, value: Value) {
        self.data.insert(key.to_string(), value);
    }

    pub fn to_json(&self) -> Value {
        json!({
            "command": self.command,
            "passed": self.passed,
            "exit_code": self.exit_code(),
            "reports": self.reports.iter().map(VerificationReport::to_json).collect::<Vec<_>>(),
            "data": Value::Object(self.data.clone()),
            "warnings": self.warnings,
        })
    }

    pub fn exit_code(&self) -> u8 {
        if self.passed {
            EXIT_OK
        } else {
            EXIT_FAILURE
        }
    }
}

pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_OK });
        }
    };
    if let Some(threads) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("warning: could not size the thread pool: {e}");
        }
    }
    let outcome = match run(&cli.command) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }
    let rendered = if cli.global.json {
        let mut s = serde_json::to_string_pretty(&outcome.to_json()).expect("envelope serializes");
        s.push('\n');
        s
    } else {
        render::text(&outcome)
    };
    if let Err(e) = emit(&cli.global, &outcome, &rendered) {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_USAGE);
    }
    ExitCode::from(outcome.exit_code())
}

fn run(command: &Command) -> Result<Outcome, InputError> {
    match command {
        Command::Verify(a) => commands::verify(a),
        Command::Evolve(a) => commands::evolve(a),
        Command::Eigen(a) => commands::eigen(a),
        Command::Star(a) => commands::star(a),
        Command::Distributions(a) => commands::distributions(a),
        Command::Su2demo => Ok(commands::su2demo()),
    }
}

fn emit(global: &GlobalArgs, outcome: &Outcome, rendered: &str) -> Result<(), InputError> {
    let mut stdout = std::io::stdout().lock();
    let io = |e: std::io::Error| InputError(format!("writing output: {e}"));
    if let Some(csv) = &outcome.stdout_csv {
        stdout.write_all(csv.as_bytes()).map_err(io)?;
    }
    match &global.output {
        Some(path) => fs::write(path, rendered)
            .map_err(|e| InputError(format!("{}: {e}", path.display())))?,
        None if outcome.stdout_csv.is_some() => eprint!("{rendered}"),
        None => stdout.write_all(rendered.as_bytes()).map_err(io)?,
    }
    stdout.flush().map_err(io)
}
