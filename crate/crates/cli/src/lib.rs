//! `fjm` command-line front end.

mod commands;
pub mod config;

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use fjm_core::FjmError;

pub use config::{parse_config, validate_config, ConfigError, ToolConfig, Violation};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "fjm",
    version,
    about = "Design and analysis of fiber jamming modules"
)]
pub struct Cli {
    /// JSON tool configuration
    #[arg(long, global = true, env = "FJM_CONFIG", value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Seed for the packing heuristics (overrides the config)
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Pack equal fibers into a circle, or find the smallest circle holding a count
    Pack(PackArgs),
    /// Predict stiffness and a force-deflection curve for one configuration
    Predict(PredictArgs),
    /// Extract stiffness from measured curves
    Fit(FitArgs),
    /// Fit the friction model from measured variation ratios
    Calibrate(CalibrateArgs),
    /// Sweep fiber diameter x packing density and optionally pick an optimum
    Sweep(SweepArgs),
    /// Fiber counts per bundle fraction and fiber diameter
    Table(TableArgs),
    /// Print the fully defaulted configuration
    Config,
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("target").required(true).args(["container_radius", "count"]))]
pub struct PackArgs {
    #[arg(long)]
    pub container_radius: Option<f64>,
    /// Number of fibers to enclose as tightly as possible
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long)]
    pub fiber_radius: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PredictArgs {
    /// Defaults to fiber.radius_mm from the config
    #[arg(long)]
    pub fiber_radius: Option<f64>,
    #[arg(long)]
    pub fiber_count: usize,
    #[arg(long)]
    pub bundle_radius: f64,
    #[arg(long, default_value = "jammed")]
    pub state: String,
    /// Vacuum applied in the jammed state (metadata only; required when jammed)
    #[arg(long)]
    pub vacuum_kpa: Option<f64>,
    /// Friction coefficient; taken from the friction model when omitted
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long, default_value_t = 10.0)]
    pub max_deflection: f64,
    #[arg(long, default_value_t = 0.1)]
    pub step: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("input").required(true).args(["curve", "manifest"]))]
pub struct FitArgs {
    /// Single curve CSV (deflection_mm,force_N)
    #[arg(long, requires = "state")]
    pub curve: Option<PathBuf>,
    #[arg(long)]
    pub state: Option<String>,
    #[arg(long)]
    pub vacuum_kpa: Option<f64>,
    /// JSON manifest of repeated runs
    #[arg(long, conflicts_with_all = ["state", "vacuum_kpa"])]
    pub manifest: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CalibrateArgs {
    /// CSV with columns fiber_radius_mm,fiber_count,bundle_radius_mm,zeta
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(long, value_delimiter = ',')]
    pub diameters: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub densities: Option<Vec<f64>>,
    /// Effective length, mm (defaults to the membrane's)
    #[arg(long)]
    pub length: Option<f64>,
    #[arg(long)]
    pub min_jammed_stiffness: Option<f64>,
    #[arg(long)]
    pub min_variation_ratio: Option<f64>,
    #[arg(long)]
    pub max_density: Option<f64>,
    /// Report the optimal point even without constraints
    #[arg(long)]
    pub select: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TableArgs {
    #[arg(long)]
    pub membrane_diameter: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub fractions: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub diameters: Option<Vec<f64>>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Config(ConfigError),
    Core(FjmError),
    Io(PathBuf, std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(
                FjmError::InsufficientData(_)
                | FjmError::DegenerateCurve(_)
                | FjmError::OutOfModel(_)
                | FjmError::NoFeasibleDesign { .. },
            ) => EXIT_INFEASIBLE,
            _ => EXIT_INVALID,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Config(e) => e.fmt(f),
            CliError::Core(e) => e.fmt(f),
            CliError::Io(path, e) => write!(f, "{}: {e}", path.display()),
        }
    }
}

impl From<FjmError> for CliError {
    fn from(e: FjmError) -> Self {
        CliError::Core(e)
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

/// Parses the arguments, runs the subcommand and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    EXIT_OK
                }
                _ => EXIT_INVALID,
            };
        }
    };
    match commands::dispatch(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
