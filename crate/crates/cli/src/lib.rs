//! Command-line front end: scenario loading, checks and report emission.
//!
//! [`run`] takes an argument vector and returns the exit code together with
//! the text for stdout and stderr, so it can be driven from tests.
//!
//! Exit codes: 0 when every gated check passes, 1 when a check fails or a
//! scenario cannot be loaded or evaluated, 2 for usage errors.

pub mod commands;
pub mod config;
pub mod probes;
pub mod report;
pub mod suite;

use std::ffi::OsString;

use clap::Parser;
use vortexhom::integrate::InvariantReport;

pub use commands::CmdError;
pub use config::{Cli, Command, RunConfig};
pub use report::Report;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn usage(message: String) -> Self {
        Outcome {
            code: 2,
            stdout: String::new(),
            stderr: message,
        }
    }
}

pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let mut text = e.render().to_string();
            return if e.use_stderr() {
                if !text.contains("Usage:") {
                    text = format!("{text}\n{}", usage());
                }
                Outcome::usage(text)
            } else {
                Outcome {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    let cfg = RunConfig::from(cli);
    match execute(&cfg) {
        Ok((report, series)) => {
            let mut stderr = String::new();
            let mut code = if report.passed() { 0 } else { 1 };
            if let Some(path) = &cfg.csv {
                if let Err(e) = write_csv(&report, series, path) {
                    stderr = format!("error: writing {}: {e}\n", path.display());
                    code = 1;
                }
            }
            if code != 0 && stderr.is_empty() {
                let names: Vec<String> = report
                    .failures()
                    .iter()
                    .map(|r| format!("{} {}", r.subject, r.name).trim().to_string())
                    .collect();
                stderr = format!("failed: {}\n", names.join(", "));
            }
            Outcome {
                code,
                stdout: report.render(),
                stderr,
            }
        }
        Err(CmdError::Usage(m)) => Outcome::usage(format!("error: {m}\n\n{}", usage())),
        Err(CmdError::Failed(m)) => Outcome {
            code: 1,
            stdout: String::new(),
            stderr: format!("error: {m}\n"),
        },
    }
}

fn usage() -> String {
    use clap::CommandFactory;
    Cli::command().render_usage().to_string()
}

/// Series CSV for the advection commands, the check table otherwise.
fn write_csv(
    report: &Report,
    series: Option<InvariantReport>,
    path: &std::path::Path,
) -> Result<(), String> {
    if let Some(series) = series {
        let f = std::fs::File::create(path).map_err(|e| e.to_string())?;
        return series.write_csv(f).map_err(|e| e.to_string());
    }
    report.write_csv(path)
}

/// Builds the report for a parsed configuration, with the time series of
/// the advection commands.
pub fn execute(cfg: &RunConfig) -> Result<(Report, Option<InvariantReport>), CmdError> {
    let mut r = Report::new(cfg.command.name());
    match cfg.command {
        Command::Homology => commands::homology(cfg, &mut r)?,
        Command::Suite => return Ok((suite::suite(cfg), None)),
        Command::Stokes if cfg.source == config::ScenarioSource::None => {
            commands::stokes_shipped(cfg, &mut r)?
        }
        _ => {
            let scn = commands::load_scenario(cfg)?;
            r.info("scenario", scn.name());
            let ctx = commands::Ctx::new(cfg, scn);
            commands::dispatch(&ctx, &mut r)?;
            let series = ctx.series.borrow_mut().take();
            return Ok((r, series));
        }
    }
    Ok((r, None))
}
