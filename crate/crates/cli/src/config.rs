//! Argument parsing and the resolved run configuration.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "vortexhom",
    version,
    about = "Homology, Stokes and vortex-theorem checks on analytic flow scenarios",
    arg_required_else_help = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Betti numbers of a cubical complex (`--complex NAME|PATH`)
    Homology,
    /// Stokes residuals on shipped (form, chain) pairs or a scenario's covelocity
    Stokes,
    /// Closed/exact classification of the covelocity from probe integrals
    Derham,
    /// Integral-invariant classification of a form carried by the flow
    Invariant,
    /// Circulation goldens, winding numbers and homology invariance
    Circulation,
    /// Vorticity flux goldens and the coboundary identity
    Flux,
    /// Circulation drift of an advected cycle
    Kelvin,
    /// Vorticity-flux drift of an advected surface
    Helmholtz,
    /// Sweeps a cap along vortex lines and compares the end fluxes
    Tube,
    /// Continuity residual and mass balance
    Continuity,
    /// Euler momentum residual
    Euler,
    /// Total head along streamlines
    Bernoulli,
    /// Power balance residual
    Power,
    /// Magnus force and its balance form
    Magnus,
    /// Barotropic wedge test
    Barotropic,
    /// Full check matrix over every builtin (or the one selected)
    Suite,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Homology => "homology",
            Command::Stokes => "stokes",
            Command::Derham => "derham",
            Command::Invariant => "invariant",
            Command::Circulation => "circulation",
            Command::Flux => "flux",
            Command::Kelvin => "kelvin",
            Command::Helmholtz => "helmholtz",
            Command::Tube => "tube",
            Command::Continuity => "continuity",
            Command::Euler => "euler",
            Command::Bernoulli => "bernoulli",
            Command::Power => "power",
            Command::Magnus => "magnus",
            Command::Barotropic => "barotropic",
            Command::Suite => "suite",
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FormChoice {
    /// The covelocity 1-form carried around a cycle
    #[default]
    Covelocity,
    /// The volume form over a disc or ball
    Area,
    /// The vorticity 2-form over a disc
    Vorticity,
}

#[derive(Args, Debug, Clone)]
pub struct Options {
    /// Builtin scenario name
    #[arg(long, global = true, value_name = "NAME")]
    pub builtin: Option<String>,
    /// Scenario file
    #[arg(long, global = true, value_name = "PATH", conflicts_with = "builtin")]
    pub scenario: Option<PathBuf>,
    /// Grid points per axis for residual sweeps
    #[arg(long, global = true, value_name = "N", value_parser = positive_usize)]
    pub grid: Option<usize>,
    /// Gauss-Legendre points per axis
    #[arg(long = "quad-order", global = true, value_name = "Q", default_value_t = 8, value_parser = positive_usize)]
    pub quad_order: usize,
    /// RK4 steps for advection and streamlines
    #[arg(long, global = true, value_name = "S", default_value_t = 256, value_parser = positive_usize)]
    pub steps: usize,
    /// Absolute residual tolerance
    #[arg(long, global = true, value_parser = positive_f64)]
    pub atol: Option<f64>,
    /// Relative residual tolerance
    #[arg(long, global = true, value_parser = positive_f64)]
    pub rtol: Option<f64>,
    /// Seed for random probes and sample points
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Writes a CSV table or time series here
    #[arg(long, global = true, value_name = "PATH")]
    pub csv: Option<PathBuf>,
    /// Complex for `homology`: a golden name or a complex file
    #[arg(long, global = true, value_name = "NAME|PATH")]
    pub complex: Option<String>,
    /// End time for advection (default: one revolution of the probe circle)
    #[arg(long, global = true, value_parser = positive_f64)]
    pub t1: Option<f64>,
    /// Form tracked by `invariant`
    #[arg(long, global = true, value_enum, default_value_t = FormChoice::Covelocity)]
    pub form: FormChoice,
}

fn positive_usize(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(v) if v > 0 => Ok(v),
        Ok(_) => Err("must be positive".into()),
        Err(e) => Err(e.to_string()),
    }
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        Ok(_) => Err("must be positive and finite".into()),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioSource {
    Builtin(String),
    File(PathBuf),
    None,
}

/// Everything a subcommand needs, after defaults are applied.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub source: ScenarioSource,
    pub atol: Option<f64>,
    pub rtol: Option<f64>,
    pub grid: usize,
    pub quad_order: usize,
    pub steps: usize,
    pub seed: u64,
    pub csv: Option<PathBuf>,
    pub complex: Option<String>,
    pub t1: Option<f64>,
    pub form: FormChoice,
}

/// Grid points per axis when `--grid` is absent.
pub const DEFAULT_GRID: usize = 32;
/// Grid points per axis used by `suite` when `--grid` is absent.
pub const SUITE_GRID: usize = 12;

impl From<Cli> for RunConfig {
    fn from(cli: Cli) -> Self {
        let o = cli.options;
        let source = match (o.builtin, o.scenario) {
            (Some(b), _) => ScenarioSource::Builtin(b),
            (None, Some(p)) => ScenarioSource::File(p),
            (None, None) => ScenarioSource::None,
        };
        let default_grid = if cli.command == Command::Suite {
            SUITE_GRID
        } else {
            DEFAULT_GRID
        };
        RunConfig {
            command: cli.command,
            source,
            atol: o.atol,
            rtol: o.rtol,
            grid: o.grid.unwrap_or(default_grid),
            quad_order: o.quad_order,
            steps: o.steps,
            seed: o.seed,
            csv: o.csv,
            complex: o.complex,
            t1: o.t1,
            form: o.form,
        }
    }
}
