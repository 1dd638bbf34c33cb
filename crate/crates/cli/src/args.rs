use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

/// Strongly coupled quantum Otto engine simulator.
#[derive(Debug, Parser)]
#[command(name = "qotto", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Finite-time power ratio P/P0 = sin^2 F(t) for both coupling profiles.
    Dynamics,
    /// Decay rate and CP-divisibility witness along t for both profiles.
    Witness,
    /// One Otto cycle: per-stroke energy ledger plus a summary.
    Cycle,
    /// One cycle per point of a parameter sweep.
    Sweep,
    /// Law audits over seeded random cycle configurations.
    Audit,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Dynamics => "dynamics",
            Command::Witness => "witness",
            Command::Cycle => "cycle",
            Command::Sweep => "sweep",
            Command::Audit => "audit",
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct Options {
    /// TOML file with flat keys (omega_c, beta_h, tau_c, profile_h, ...).
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Bath parameter g = tanh(beta*omega) for dynamics and witness scans.
    #[arg(long, global = true)]
    pub g: Option<f64>,

    /// Scan horizon.
    #[arg(long = "t-max", global = true)]
    pub t_max: Option<f64>,

    /// Samples per scan, or random configurations for `audit`.
    #[arg(long, global = true)]
    pub points: Option<usize>,

    /// Also integrate the joint dynamics numerically.
    #[arg(long, global = true)]
    pub oracle: bool,

    /// Samples per contact stroke for oracle runs (odd).
    #[arg(long, global = true)]
    pub steps: Option<usize>,

    /// Output CSV path (default: $QOTTO_OUT_DIR/<command>.csv, else stdout).
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Sweep axis and grid, AXIS:LO:HI:N.
    #[arg(long, global = true, value_name = "AXIS:LO:HI:N")]
    pub sweep: Option<String>,

    /// Seed for `audit`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Frequency used by the witness scan.
    #[arg(long, global = true)]
    pub omega: Option<f64>,

    /// Two-column (t, f) table added as a third profile in scans.
    #[arg(long, global = true, value_name = "FILE")]
    pub table: Option<PathBuf>,

    #[arg(long = "omega-c", global = true)]
    pub omega_c: Option<f64>,
    #[arg(long = "omega-h", global = true)]
    pub omega_h: Option<f64>,
    #[arg(long = "beta-c", global = true)]
    pub beta_c: Option<f64>,
    #[arg(long = "beta-h", global = true)]
    pub beta_h: Option<f64>,
    #[arg(long = "tau-u1", global = true)]
    pub tau_u1: Option<f64>,
    #[arg(long = "tau-h", global = true)]
    pub tau_h: Option<f64>,
    #[arg(long = "tau-u2", global = true)]
    pub tau_u2: Option<f64>,
    #[arg(long = "tau-c", global = true)]
    pub tau_c: Option<f64>,

    /// Hot-bath profile: markovian, non_markovian or tabulated.
    #[arg(long = "profile-h", global = true)]
    pub profile_h: Option<String>,
    /// Cold-bath profile: markovian, non_markovian or tabulated.
    #[arg(long = "profile-c", global = true)]
    pub profile_c: Option<String>,
    #[arg(long = "table-h", global = true, value_name = "FILE")]
    pub table_h: Option<PathBuf>,
    #[arg(long = "table-c", global = true, value_name = "FILE")]
    pub table_c: Option<PathBuf>,
}
