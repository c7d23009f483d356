//! `revpref`: revealed-preference tests, index numbers, forecasting sets and
//! Monte Carlo experiments on price/quantity CSV panels.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Exit status for a successful run.
pub const EXIT_OK: u8 = 0;
/// The tested axiom (or checked property) does not hold.
pub const EXIT_VIOLATED: u8 = 1;
/// Malformed flags or input data.
pub const EXIT_INPUT: u8 = 2;
/// Anything else.
pub const EXIT_INTERNAL: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "revpref", version, about = "Revealed-preference demand analysis")]
pub struct Cli {
    /// Output directory for reports and the run manifest.
    #[arg(long, global = true, env = "REVPREF_OUT", default_value = "revpref-out")]
    pub out: PathBuf,
    /// Worker threads for Monte Carlo commands (0 = all cores). Results do
    /// not depend on this value.
    #[arg(long, global = true, default_value_t = 0)]
    pub workers: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct Panel {
    /// Price table: header `period,<good ids>`, one row per period.
    pub prices: PathBuf,
    /// Quantity table with the same layout.
    pub quantities: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum AxiomArg {
    Garp,
    Harp,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Test GARP(ω) or HARP(ω); exits 1 when violated.
    Test {
        #[arg(long, value_enum, default_value = "harp")]
        axiom: AxiomArg,
        #[arg(long, default_value_t = 1.0)]
        omega: f64,
        /// Slack on the violated comparison (0 = exact).
        #[arg(long, default_value_t = 0.0)]
        tolerance: f64,
        #[command(flatten)]
        panel: Panel,
    },
    /// Afriat numbers, HARP multipliers and Konüs-Divisia index series.
    Indices {
        #[arg(long, default_value_t = 1.0)]
        omega: f64,
        #[command(flatten)]
        panel: Panel,
    },
    /// GARP and HARP irrationality indices with witnesses.
    Irrationality {
        #[command(flatten)]
        panel: Panel,
    },
    /// HARP forecasting cone for a new price vector; optional membership
    /// checks and Monte Carlo size of the forecasting sets.
    Forecast {
        #[arg(long, default_value_t = 1.0)]
        omega: f64,
        /// New price vector, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        new_price: Vec<f64>,
        /// Expenditure for the polytope description.
        #[arg(long)]
        expenditure: Option<f64>,
        /// Candidate demand to classify, comma separated.
        #[arg(long, value_delimiter = ',')]
        point: Option<Vec<f64>>,
        /// Trials for the size measures (requires --seed).
        #[arg(long, requires = "seed")]
        trials: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        panel: Panel,
    },
    /// Power of the GARP and HARP tests against AR-simulated prices.
    Power {
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        max_order: usize,
        /// Bins for the ω_H histogram.
        #[arg(long, default_value_t = 20)]
        bins: usize,
        #[command(flatten)]
        panel: Panel,
    },
    /// Probability that random groups of goods satisfy GARP(1) and HARP(1).
    Groups {
        /// Group sizes, comma separated (each in [2, m]).
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long)]
        samples: u64,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        panel: Panel,
    },
    /// Index hierarchy over a JSON partition tree.
    Hierarchy {
        #[arg(long)]
        tree: PathBuf,
        #[command(flatten)]
        panel: Panel,
    },
    /// Built-in example panels.
    Fixture {
        #[command(subcommand)]
        which: FixtureCommand,
    },
    /// Synthetic Cobb-Douglas panel.
    Synth {
        #[arg(long)]
        periods: usize,
        #[arg(long)]
        goods: usize,
        #[arg(long)]
        seed: u64,
        /// Log-normal multiplicative noise on quantities.
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
    },
    /// Re-run the command recorded in a manifest.
    Replay { manifest: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum FixtureCommand {
    /// Three-good ray Engel-curve counterexample.
    EngelRays {
        #[arg(long, default_value_t = 0.0)]
        epsilon: f64,
        /// Compare the HARP forecasting set with the GARP support set on a
        /// grid of the budget plane; exits 1 unless strict inclusion holds.
        #[arg(long)]
        check_inclusion: bool,
        /// Grid resolution per axis for the inclusion check. Powers of two
        /// keep every grid point exactly on the budget plane, where the
        /// intersection demands tie with the new expenditure.
        #[arg(long, default_value_t = 64)]
        grid: usize,
    },
    /// Two-period panel with cross values [[3,4],[3,5]].
    TwoPeriod,
}

/// Input problems map to exit status 2.
#[derive(Debug)]
pub struct InputError(pub String);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

pub fn input_error(e: impl std::fmt::Display) -> anyhow::Error {
    InputError(e.to_string()).into()
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { EXIT_OK });
        }
    };
    match commands::run(&cli, &argv[1..]) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = if e.downcast_ref::<InputError>().is_some() {
                EXIT_INPUT
            } else {
                EXIT_INTERNAL
            };
            ExitCode::from(code)
        }
    }
}
