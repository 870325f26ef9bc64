mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{ExperimentConfig, Format, DEFAULT_SEED};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config or output path: exit 2.
    Config(String),
    /// An experiment assertion did not hold: exit 1.
    Failed(String),
}

impl From<wlckf::Error> for CliError {
    fn from(e: wlckf::Error) -> Self {
        CliError::Failed(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "wlckf", version, about = "Widely linear complex Kalman filtering experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// WLCKF against the dual-channel real Kalman filter on random models.
    Equivalence {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        trials: Option<usize>,
        /// Draw proper models and also check CKF = WLCKF.
        #[arg(long)]
        proper: bool,
    },
    /// Steady-state improvement surface for the scalar improper-noise model.
    MseSweep {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// θ_t over random scalar models, checking ½ ≤ θ_t ≤ 1.
    ThetaBound {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        draws: Option<usize>,
    },
    /// UWLCKF vs UKF phase tracking under improper noise.
    PhaseDemod {
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// JSON config; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file (a directory for phase-demod CSV); stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    horizon: Option<usize>,
}

/// Effective settings after merging flags over the config file.
pub struct Settings {
    pub cfg: ExperimentConfig,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: Format,
}

fn settings(common: CommonArgs, kind: &str) -> Result<Settings, CliError> {
    let mut cfg = match &common.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    cfg.check_kind(kind)?;
    cfg.runs = common.runs.or(cfg.runs);
    cfg.horizon = common.horizon.or(cfg.horizon);
    Ok(Settings {
        seed: common.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED),
        out: common.out.or(cfg.out.clone()),
        format: common.format.or(cfg.format).unwrap_or(Format::Csv),
        cfg,
    })
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Equivalence { common, trials, proper } => {
            let mut s = settings(common, "equivalence")?;
            s.cfg.trials = trials.or(s.cfg.trials);
            if proper {
                s.cfg.proper = Some(true);
            }
            commands::equivalence(&s)
        }
        Command::MseSweep { common } => commands::mse_sweep(&settings(common, "mse-sweep")?),
        Command::ThetaBound { common, draws } => {
            let mut s = settings(common, "theta-bound")?;
            s.cfg.draws = draws.or(s.cfg.draws);
            commands::theta_bound(&s)
        }
        Command::PhaseDemod { common } => commands::phase_demod(&settings(common, "phase-demod")?),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Failed(msg)) => {
            eprintln!("wlckf: FAILED: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Config(msg)) => {
            eprintln!("wlckf: error: {msg}");
            ExitCode::from(2)
        }
    }
}
