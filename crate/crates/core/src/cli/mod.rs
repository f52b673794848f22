//! Command-line front end. Reports go to stdout as JSON, a short summary
//! goes to stderr.
//!
//! Exit codes: 0 on success (including unstable verdicts), 2 for input
//! errors, 3 for numerical failures.

mod commands;
pub mod examples;
pub mod input;
pub mod table1;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::Error;
use crate::mc::DEFAULT_SEED;
use crate::norm::NormKind;
use crate::sdesim::Scheme;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "slognorm",
    version,
    about = "Logarithmic norms and mean-square stability of linear Itô SDEs"
)]
pub struct Cli {
    /// Worker threads for Monte Carlo loops; results do not depend on it.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    pub workers: u16,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Logarithmic norm μ_p of a matrix.
    Lognorm(LognormArgs),
    /// Stochastic logarithmic norm ν_p^l of a system, with bounds.
    Slognorm(SlognormArgs),
    /// Ensemble simulation of E‖X_t‖_p^l.
    Simulate(SimulateArgs),
    /// Benchmark systems a–i against their reference values.
    Table1(Table1Args),
    /// Inverted pendulum or nonnormal drift example.
    Examples(ExamplesArgs),
}

fn parse_norm(s: &str) -> Result<NormKind, String> {
    s.parse::<NormKind>().map_err(|e| e.to_string())
}

fn parse_scheme(s: &str) -> Result<Scheme, String> {
    s.parse::<Scheme>().map_err(|e| e.to_string())
}

#[derive(Debug, Args, Serialize)]
pub struct LognormArgs {
    /// Matrix file.
    pub matrix: PathBuf,
    /// Norm: 1, 2 or inf.
    #[arg(long, default_value = "2", value_parser = parse_norm)]
    pub p: NormKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Direct,
    Definitional,
    Both,
}

#[derive(Debug, Args, Serialize)]
pub struct SlognormArgs {
    /// System file.
    pub system: PathBuf,
    #[arg(long, default_value = "2", value_parser = parse_norm)]
    pub p: NormKind,
    /// Moment order.
    #[arg(long, default_value_t = 2)]
    pub l: u32,
    #[arg(long, value_enum, default_value_t = Method::Both)]
    pub method: Method,
    /// Monte Carlo samples (antithetic pairs); defaults by dimension.
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long, env = "SLOGNORM_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Largest step of the definitional ladder.
    #[arg(long)]
    pub h0: Option<f64>,
    /// Number of halvings in the definitional ladder.
    #[arg(long, default_value_t = crate::slognorm::DEFAULT_H_STEPS)]
    pub hsteps: usize,
    /// Stability cut-off.
    #[arg(long, default_value_t = 0.0)]
    pub tol: f64,
    /// Disable antithetic pairing.
    #[arg(long)]
    pub no_antithetic: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    /// System file.
    pub system: PathBuf,
    /// Initial state, comma separated; complex entries as re:im.
    /// Defaults to all ones.
    #[arg(long)]
    pub x0: Option<String>,
    #[arg(long, default_value_t = 1e-3)]
    pub h: f64,
    #[arg(long = "t-end", default_value_t = 1.0)]
    pub t_end: f64,
    #[arg(long, default_value_t = 10_000)]
    pub paths: u64,
    /// Recording intervals; must divide the step count. Defaults to the
    /// largest divisor not above 100.
    #[arg(long)]
    pub checkpoints: Option<usize>,
    /// euler_maruyama or milstein.
    #[arg(long, default_value = "milstein", value_parser = parse_scheme)]
    pub scheme: Scheme,
    #[arg(long, default_value = "2", value_parser = parse_norm)]
    pub p: NormKind,
    #[arg(long, default_value_t = 2)]
    pub l: u32,
    #[arg(long, env = "SLOGNORM_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// CSV file for the moment trajectory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct Table1Args {
    #[arg(long, env = "SLOGNORM_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Samples per case; defaults by dimension. The random case is capped
    /// at 256.
    #[arg(long)]
    pub samples: Option<u64>,
    /// Subset of cases, e.g. "bcf".
    #[arg(long)]
    pub cases: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Example {
    Pendulum,
    Nonnormal,
}

#[derive(Debug, Args, Serialize)]
pub struct ExamplesArgs {
    #[arg(long, value_enum)]
    pub which: Example,
    /// Pendulum g/l.
    #[arg(long = "g-over-l", default_value_t = 10.0)]
    pub g_over_l: f64,
    /// Pendulum noise amplitude on θ, in (0, 1).
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    /// Pendulum noise amplitude on v (default 50) or the nonnormal
    /// off-diagonal entry (default 1).
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<f64>,
    /// Nonnormal σ² (negative for imaginary σ).
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub sigma2: f64,
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long, env = "SLOGNORM_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Numeric(_) => EXIT_NUMERIC,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Numeric(m) => m,
        }
    }
}

fn is_numeric(e: &Error) -> bool {
    match e {
        Error::Convergence { .. } | Error::NotHermitian { .. } | Error::TooFewPoints(_) => true,
        Error::Sample { source, .. } => is_numeric(source),
        _ => false,
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if is_numeric(&e) {
            CliError::Numeric(e.to_string())
        } else {
            CliError::Input(e.to_string())
        }
    }
}

#[derive(Serialize)]
struct Invocation<'a, F: Serialize> {
    command: &'a str,
    flags: &'a F,
    version: &'static str,
}

#[derive(Serialize)]
struct Report<'a, F: Serialize, R: Serialize> {
    invocation: Invocation<'a, F>,
    results: R,
    warnings: Vec<String>,
}

/// What a command hands back: the report body, warnings and a stderr
/// summary.
pub(crate) struct Outcome<R> {
    pub results: R,
    pub warnings: Vec<String>,
    pub summary: String,
}

fn emit<F: Serialize, R: Serialize>(
    command: &str,
    flags: &F,
    outcome: Outcome<R>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    let report = Report {
        invocation: Invocation {
            command,
            flags,
            version: env!("CARGO_PKG_VERSION"),
        },
        results: outcome.results,
        warnings: outcome.warnings.clone(),
    };
    let text = serde_json::to_string_pretty(&report).map_err(|e| CliError::Numeric(e.to_string()))?;
    let io = |e: std::io::Error| CliError::Input(format!("cannot write output: {e}"));
    writeln!(stdout, "{text}").map_err(io)?;
    write!(stderr, "{}", outcome.summary).map_err(io)?;
    for w in &outcome.warnings {
        writeln!(stderr, "warning: {w}").map_err(io)?;
    }
    Ok(())
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render();
            if code == 0 {
                let _ = write!(stdout, "{rendered}");
            } else {
                let _ = write!(stderr, "{}", rendered.ansi());
            }
            return if code == 0 { EXIT_OK } else { EXIT_INPUT };
        }
    };
    let workers = usize::from(cli.workers);
    let result = match &cli.command {
        Command::Lognorm(a) => commands::lognorm(a).and_then(|o| emit("lognorm", a, o, stdout, stderr)),
        Command::Slognorm(a) => commands::slognorm(a, workers).and_then(|o| emit("slognorm", a, o, stdout, stderr)),
        Command::Simulate(a) => commands::simulate(a, workers).and_then(|o| emit("simulate", a, o, stdout, stderr)),
        Command::Table1(a) => commands::table1(a, workers).and_then(|o| emit("table1", a, o, stdout, stderr)),
        Command::Examples(a) => commands::examples(a, workers).and_then(|o| emit("examples", a, o, stdout, stderr)),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message());
            e.exit_code()
        }
    }
}
