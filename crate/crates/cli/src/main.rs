mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Exit status 2.
const EXIT_CONFIG: u8 = 2;
/// Exit status 3.
const EXIT_NUMERICAL: u8 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Numerical(_) => EXIT_NUMERICAL,
            CliError::Io(_) => 1,
        }
    }

    pub fn numerical(e: fracsub::Error) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "fracsub", version, about = "Multi-term time-fractional subdiffusion solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve one problem from a config file or the example catalog.
    Solve(SolveArgs),
    /// Reproduce an error table of the example catalog.
    Table(TableArgs),
    /// Run one problem for a list of nu1 values.
    Sweep(SweepArgs),
    /// Error and empirical order under grid refinement.
    Convergence(ConvergenceArgs),
    /// Sample the aggregated kernel N(t) and report its sign change.
    KernelSign(KernelSignArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OnOff {
    On,
    Off,
}

impl OnOff {
    pub fn enabled(self) -> bool {
        self == OnOff::On
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Nu2Rule {
    /// nu2 = nu1 / 2
    Half,
    /// nu2 = nu1 / 3
    Third,
}

impl Nu2Rule {
    pub fn apply(self, nu1: f64) -> f64 {
        match self {
            Nu2Rule::Half => nu1 / 2.0,
            Nu2Rule::Third => nu1 / 3.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AxisArg {
    Time,
    Space,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    /// Spatial intervals (1D), or both Kx and Ky (2D).
    #[arg(long = "K")]
    pub k: Option<usize>,
    #[arg(long = "Kx")]
    pub kx: Option<usize>,
    #[arg(long = "Ky")]
    pub ky: Option<usize>,
    /// Time levels.
    #[arg(long = "J")]
    pub j: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct OutArgs {
    /// Output directory; relative paths resolve against $FRACSUB_OUT_DIR when set.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[arg(long, conflicts_with = "example", required_unless_present = "example")]
    pub config: Option<PathBuf>,
    /// Catalog case: ex1i, ex1ii, ex2, ex3, ex4.
    #[arg(long)]
    pub example: Option<String>,
    #[arg(long)]
    pub nu1: Option<f64>,
    #[arg(long, value_enum)]
    pub nu2_rule: Option<Nu2Rule>,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, value_enum)]
    pub richardson: Option<OnOff>,
    #[command(flatten)]
    pub out: OutArgs,
    /// Validate and print the resolved parameters without solving.
    #[arg(long)]
    pub dry_run: bool,
}

#[derive(Debug, Clone, Args)]
pub struct TableArgs {
    /// ex1i, ex1ii, ex1ext, ex2, ex3 or ex4.
    pub example: String,
    /// Comma-separated nu1 values; defaults to the published rows.
    #[arg(long, value_delimiter = ',')]
    pub nu1: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    pub nu2_rule: Option<Nu2Rule>,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, value_enum, default_value = "on")]
    pub richardson: OnOff,
    /// Concurrent solves.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long, conflicts_with = "example", required_unless_present = "example")]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub example: Option<String>,
    /// Comma-separated nu1 values.
    #[arg(long, value_delimiter = ',', required = true)]
    pub nu1: Vec<f64>,
    #[arg(long, value_enum)]
    pub nu2_rule: Option<Nu2Rule>,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, value_enum)]
    pub richardson: Option<OnOff>,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ConvergenceArgs {
    pub example: String,
    #[arg(long, value_enum)]
    pub axis: AxisArg,
    /// Number of grids, each halving the step of the previous one.
    #[arg(long, default_value_t = 3)]
    pub levels: usize,
    #[arg(long, default_value_t = 0.5)]
    pub nu1: f64,
    #[arg(long, value_enum)]
    pub nu2_rule: Option<Nu2Rule>,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, value_enum, default_value = "off")]
    pub richardson: OnOff,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args)]
pub struct KernelSignArgs {
    #[arg(long, default_value_t = 1.0)]
    pub rho1: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub rho2: f64,
    #[arg(long)]
    pub nu1: f64,
    #[arg(long)]
    pub nu2: f64,
    #[arg(long = "T", default_value_t = 1.0)]
    pub final_time: f64,
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    #[command(flatten)]
    pub out: OutArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(a) => commands::solve(&a),
        Command::Table(a) => commands::table(&a),
        Command::Sweep(a) => commands::sweep(&a),
        Command::Convergence(a) => commands::convergence(&a),
        Command::KernelSign(a) => commands::kernel_sign(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let kind = match e {
                CliError::Config(_) => "configuration error",
                CliError::Numerical(_) => "numerical failure",
                CliError::Io(_) => "i/o error",
            };
            eprintln!("fracsub: {kind}: {e}");
            ExitCode::from(e.code())
        }
    }
}
