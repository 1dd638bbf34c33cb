//! Command-line runner for the `qotto` library: dynamics traces, witness
//! scans, single cycles, parameter sweeps and law audits, all written as CSV.

pub mod args;
pub mod commands;
pub mod error;
pub mod output;
pub mod settings;

pub use args::{Cli, Command, Options};
pub use error::{CliError, CliResult};
pub use output::Table;
pub use settings::Settings;

pub fn run(cli: &Cli) -> CliResult<()> {
    let settings = Settings::resolve(&cli.options)?;
    commands::run(cli.command, &settings).map(|_| ())
}
