//! Command-line front end for the `inflanow` pipeline.

pub mod commands;
pub mod config;
pub mod toy;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use inflanow::ErrorKind;

pub const EXIT_OK: u8 = 0;
pub const EXIT_IO: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_CONFIG: u8 = 3;
pub const EXIT_DATA: u8 = 4;
pub const EXIT_NUMERICAL: u8 = 5;

const EXIT_CODES_HELP: &str = "\
Exit codes:
  0  success
  1  file system error
  2  usage error (bad arguments, unknown model)
  3  configuration error
  4  data error (malformed or missing input rows)
  5  numerical error (singular design, zero denominator, degenerate test)";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] inflanow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Data(_) => EXIT_DATA,
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io { .. } => EXIT_IO,
            CliError::Core(e) => match e.kind() {
                ErrorKind::Config => EXIT_CONFIG,
                ErrorKind::Data => EXIT_DATA,
                ErrorKind::Numerical => EXIT_NUMERICAL,
                ErrorKind::Io => EXIT_IO,
            },
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "inflanow", version, about = "News-sentiment inflation nowcasting", after_help = EXIT_CODES_HELP)]
pub struct Cli {
    /// Configuration file.
    #[arg(long, global = true, default_value = "inflanow.toml")]
    pub config: PathBuf,
    /// Output directory; overrides `out_dir` from the configuration.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Override a configuration key, e.g. `--set scheme=rolling`. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Filter and score articles; writes probabilities.csv, scored.csv and rejections.csv.
    Score,
    /// Aggregate scored.csv into news_index.csv and news_index_meta.csv.
    BuildIndex,
    /// Fit models on the training window; `all` fits every model.
    Fit {
        #[arg(required = true)]
        models: Vec<String>,
    },
    /// Nowcast one month with a model fitted on the training window.
    Nowcast {
        model: String,
        #[arg(long)]
        month: String,
    },
    /// Nowcast every evaluation month; writes forecasts.csv and the evaluation report.
    Backtest {
        #[arg(required = true)]
        models: Vec<String>,
    },
    /// RMSE and Giacomini-White tests from a forecast file.
    Evaluate {
        /// Forecast file; defaults to forecasts.csv in the output directory.
        #[arg(long)]
        forecasts: Option<PathBuf>,
    },
    /// Classification metrics of argmax labels in scored.csv against gold labels.
    Metrics {
        /// Gold label file; defaults to `labels` from the configuration.
        #[arg(long)]
        labels: Option<PathBuf>,
    },
    /// Write the bundled synthetic data set.
    #[command(hide = true)]
    GenerateToy {
        dir: PathBuf,
        #[arg(long, default_value_t = toy::DEFAULT_SEED)]
        seed: u64,
    },
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    if let Command::GenerateToy { dir, seed } = &cli.command {
        return toy::write_toy(dir, *seed);
    }
    let settings = config::Settings::load(&cli.config, &cli.overrides, cli.out.as_deref())?;
    commands::dispatch(&settings, &cli.command)
}
