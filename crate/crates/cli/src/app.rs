//! Argument parsing and command dispatch.

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lcg_core::conjecture::{ce_closed_form, conservativeness};
use lcg_core::dynamics::{run_dynamics, stability_analysis};
use lcg_core::equilibria::{nash, pareto, price_of_anarchy};
use lcg_core::{validate_assumptions, Outcome};

use crate::error::{exit, CliError};
use crate::report::{OutputFormat, Payload, RunReport};
use crate::scenario::{Overrides, ScenarioFile};

pub const DEFAULT_SAMPLES: usize = 200;

#[derive(Debug, Parser)]
#[command(name = "lcg", version, about = "Equilibria and belief dynamics for linearly coupled games")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute an equilibrium in closed form
    Solve {
        kind: SolveKind,
        #[command(flatten)]
        common: Common,
    },
    /// Run best-response or Jacobi belief dynamics and write the trajectory
    Simulate {
        #[command(flatten)]
        common: Common,
    },
    /// Stability of the belief dynamics, price of anarchy, or conservativeness
    Analyze {
        kind: AnalyzeKind,
        #[command(flatten)]
        common: Common,
    },
    /// Sample the game and check assumptions A1-A4
    Validate {
        #[command(flatten)]
        common: Common,
        /// Number of interior sample points
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolveKind {
    Ne,
    Pareto,
    Ce,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AnalyzeKind {
    Stability,
    Poa,
    Conservativeness,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Scenario file (TOML)
    #[arg(long)]
    pub scenario: PathBuf,
    /// Output format; simulate defaults to csv, everything else to table
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    /// Write the result here instead of standard output
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Pareto weights, overriding the scenario
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub weights: Option<Vec<f64>>,
    /// Belief slopes, overriding the scenario
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub lambda: Option<Vec<f64>>,
    /// Jacobi stepsize, overriding the scenario
    #[arg(long, allow_negative_numbers = true)]
    pub epsilon: Option<f64>,
    /// Seed for the assumption validator
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Solve { common, .. }
            | Command::Simulate { common }
            | Command::Analyze { common, .. }
            | Command::Validate { common, .. } => common,
        }
    }

    fn label(&self) -> String {
        match self {
            Command::Solve { kind, .. } => format!("solve {}", value_name(*kind)),
            Command::Simulate { .. } => "simulate".into(),
            Command::Analyze { kind, .. } => format!("analyze {}", value_name(*kind)),
            Command::Validate { .. } => "validate".into(),
        }
    }
}

fn value_name(v: impl ValueEnum) -> String {
    v.to_possible_value().map(|p| p.get_name().to_string()).unwrap_or_default()
}

/// Loads the scenario, applies flag overrides and runs the command.
pub fn run(command: &Command) -> Result<RunReport, CliError> {
    let common = command.common();
    let overrides = Overrides { weights: common.weights.clone(), lambda: common.lambda.clone(), epsilon: common.epsilon };
    let file = ScenarioFile::load(&common.scenario)?.apply(&overrides);
    run_scenario(command, &file)
}

pub fn run_scenario(command: &Command, file: &ScenarioFile) -> Result<RunReport, CliError> {
    let scenario = file.resolve()?;
    let spec = &scenario.spec;
    let started = Instant::now();
    let result = match command {
        Command::Solve { kind: SolveKind::Ne, .. } => Payload::Equilibrium(nash(spec)?),
        Command::Solve { kind: SolveKind::Pareto, .. } => Payload::Equilibrium(pareto(spec, scenario.require_weights()?)?),
        Command::Solve { kind: SolveKind::Ce, .. } => Payload::Equilibrium(ce_closed_form(spec, scenario.require_lambda()?)?),
        Command::Simulate { .. } => {
            let lambda = scenario.require_lambda()?;
            Payload::Trajectory(run_dynamics(spec, lambda, scenario.require_dynamics()?)?)
        }
        Command::Analyze { kind: AnalyzeKind::Stability, .. } => {
            Payload::Stability(stability_analysis(spec, scenario.require_lambda()?)?)
        }
        Command::Analyze { kind: AnalyzeKind::Poa, .. } => {
            Payload::PriceOfAnarchy(price_of_anarchy(spec, scenario.require_weights()?)?)
        }
        Command::Analyze { kind: AnalyzeKind::Conservativeness, .. } => {
            let profile = conservativeness(spec, scenario.require_lambda()?)?;
            let pareto = profile.is_pareto();
            Payload::Conservativeness { profile, pareto }
        }
        Command::Validate { samples, common } => Payload::Validation(validate_assumptions(spec, *samples, common.seed)?),
    };
    Ok(RunReport {
        command: command.label(),
        scenario: scenario.to_file(),
        result,
        duration_seconds: started.elapsed().as_secs_f64(),
    })
}

fn render(command: &Command, report: &RunReport) -> Result<String, CliError> {
    let simulate = matches!(command, Command::Simulate { .. });
    let format = command
        .common()
        .format
        .unwrap_or(if simulate { OutputFormat::Csv } else { OutputFormat::Table });
    match format {
        OutputFormat::Json => Ok(report.to_json() + "\n"),
        OutputFormat::Csv => Ok(report.to_csv()),
        OutputFormat::Table => report.to_table().ok_or_else(|| CliError::Config {
            path: "--format".into(),
            message: "simulate writes csv or json".into(),
        }),
    }
}

fn summary(report: &RunReport) -> Option<String> {
    let Payload::Trajectory(traj) = &report.result else {
        return None;
    };
    let outcome = match traj.outcome {
        Outcome::Converged { iterations } => format!("converged after {iterations} iterations"),
        Outcome::MaxItersReached => format!("stopped after {} iterations without converging", traj.records.len() - 1),
        Outcome::Diverged => format!("diverged at iteration {}", traj.records.len() - 1),
    };
    let actions: Vec<String> = traj.final_actions().iter().map(|a| format!("{a:.6}")).collect();
    Some(format!("{outcome}; final actions [{}]", actions.join(", ")))
}

fn write_out(path: &std::path::Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io { path: path.display().to_string(), source: e })
}

fn execute_command(command: &Command, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let report = run(command)?;
    let text = render(command, &report)?;
    let common = command.common();
    let io_err = |e| CliError::Io { path: "<stdout>".into(), source: e };
    match &common.out {
        Some(path) => write_out(path, &text)?,
        None => stdout.write_all(text.as_bytes()).map_err(io_err)?,
    }
    if let Some(line) = summary(&report) {
        if common.out.is_some() {
            writeln!(stdout, "{line}").map_err(io_err)?;
        } else {
            eprintln!("{line}");
        }
    }
    if let Payload::Validation(v) = &report.result {
        if !v.all_passed() {
            return Ok(exit::ASSUMPTION_FAILED);
        }
    }
    Ok(exit::SUCCESS)
}

/// Full command-line entry point; returns the process exit code.
pub fn execute<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = stderr.write_all(text.as_bytes());
                return exit::CONFIG;
            }
            let _ = stdout.write_all(text.as_bytes());
            return exit::SUCCESS;
        }
    };
    match execute_command(&cli.command, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
