use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use resn::harness::{self, ExperimentConfig, RunLog, Strategy, WeightsFile};
use resn::{ArchGenome, ResnError};

/// Architecture search for stacked LSTM forecasters.
#[derive(Debug, Parser)]
#[command(name = "resn", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Experiment config (JSON). Built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the seed relevant to the command.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads.
    #[arg(long)]
    workers: Option<usize>,
    /// Output file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Search, train the winner and test it, for every repetition.
    Optimize {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = parse_strategy)]
        strategy: Option<Strategy>,
        #[arg(long)]
        repetitions: Option<usize>,
    },
    /// MAE random sampling of one architecture.
    Sample {
        #[command(flatten)]
        common: Common,
        /// Look-back followed by layer widths, e.g. `10,8`.
        #[arg(long)]
        genome: ArchGenome,
    },
    /// Train one architecture; `--out` receives the weights file.
    Train {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        genome: ArchGenome,
        /// Where to write the training report.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Test-split metrics of a saved weights file.
    Evaluate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        weights: PathBuf,
    },
    /// Print the summary table of a run log.
    Report {
        /// Run log written by `optimize`.
        log: PathBuf,
    },
}

fn parse_strategy(s: &str) -> Result<Strategy, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string()))
        .map_err(|_| format!("unknown strategy `{s}` (expected resn, gdet or random_search)"))
}

enum Failure {
    Config(ResnError),
    Run(String),
}

impl From<ResnError> for Failure {
    /// Unreadable or invalid user input counts as a configuration error.
    fn from(e: ResnError) -> Self {
        match e {
            ResnError::Config(_)
            | ResnError::InvalidGenome(_)
            | ResnError::Io { .. }
            | ResnError::Json { .. }
            | ResnError::Parse { .. } => Failure::Config(e),
            other => Failure::Run(other.to_string()),
        }
    }
}

fn load_config(common: &Common) -> Result<ExperimentConfig, Failure> {
    let mut cfg = match &common.config {
        Some(path) => ExperimentConfig::load(path).map_err(Failure::Config)?,
        None => ExperimentConfig::default(),
    };
    if common.workers.is_some() {
        cfg.workers = common.workers;
    }
    cfg.validate().map_err(Failure::Config)?;
    Ok(cfg)
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> Result<(), Failure> {
    if let Some(path) = out {
        harness::write_json(path, value)?;
    }
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Run(e.to_string()))?;
    println!("{text}");
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Optimize {
            common,
            strategy,
            repetitions,
        } => {
            let mut cfg = load_config(&common)?;
            if let Some(seed) = common.seed {
                cfg.master_seed = seed;
            }
            if let Some(s) = strategy {
                cfg.strategy = s;
            }
            if let Some(r) = repetitions {
                cfg.repetitions = r;
            }
            if common.out.is_some() {
                cfg.output = common.out.clone();
            }
            cfg.validate().map_err(Failure::Config)?;
            let log = harness::cmd_optimize(&cfg)?;
            print!("{}", harness::render_report(&log));
            if log.all_failed() {
                return Err(Failure::Run("every repetition failed".into()));
            }
        }
        Command::Sample { common, genome } => {
            let mut cfg = load_config(&common)?;
            if let Some(seed) = common.seed {
                cfg.mrs.rng_seed = seed;
            }
            let report = harness::cmd_sample(&cfg, &genome)?;
            emit(&report, common.out.as_deref())?;
        }
        Command::Train {
            common,
            genome,
            report,
        } => {
            let mut cfg = load_config(&common)?;
            if let Some(seed) = common.seed {
                cfg.train.rng_seed = seed;
            }
            let (net, outcome) = harness::cmd_train(&cfg, &genome)?;
            if let Some(path) = &common.out {
                WeightsFile::from_net(&net).save(path)?;
            }
            if let Some(path) = &report {
                harness::write_json(path, &outcome)?;
            }
            emit(&outcome.test, None)?;
        }
        Command::Evaluate { common, weights } => {
            let cfg = load_config(&common)?;
            let metrics = harness::cmd_evaluate(&cfg, &weights)?;
            emit(&metrics, common.out.as_deref())?;
        }
        Command::Report { log } => {
            let log = RunLog::load(&log).map_err(Failure::Config)?;
            print!("{}", harness::render_report(&log));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
