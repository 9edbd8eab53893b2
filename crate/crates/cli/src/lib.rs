//! Command-line front end for `lcg-core`: scenario files, subcommands and
//! report rendering.

pub mod app;
pub mod error;
pub mod format;
pub mod report;
pub mod scenario;

pub use app::{execute, run, run_scenario, AnalyzeKind, Cli, Command, Common, SolveKind};
pub use error::{exit, CliError};
pub use report::{OutputFormat, Payload, RunReport};
pub use scenario::{DynamicsSection, Overrides, Scenario, ScenarioFile};
