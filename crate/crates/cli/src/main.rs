//! `tenk`: score 10-K filings for AI disclosure, build AI indices and evaluate them.

mod config;
mod error;
mod stages;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{FileConfig, PipelineConfig};
use error::CliError;
use stages::MethodChoice;

#[derive(Debug, Parser)]
#[command(
    name = "tenk",
    version,
    about = "10-K AI scoring, AI index construction and evaluation"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// Flat TOML config file; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed for MM elemental-subset sampling.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Ingest from raw_dir instead of EDGAR.
    #[arg(long, global = true)]
    pub offline: bool,
    /// Event date, YYYY-MM-DD (default 2022-11-30).
    #[arg(long, global = true)]
    pub event_date: Option<String>,
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    pub corpus_dir: Option<PathBuf>,
    /// Raw filings laid out as <cik>/<year>.html.
    #[arg(long, global = true)]
    pub raw_dir: Option<PathBuf>,
    /// `date,ticker,close` CSV.
    #[arg(long, global = true)]
    pub prices: Option<PathBuf>,
    /// `date,annualized_yield` CSV (decimal yields).
    #[arg(long, global = true)]
    pub riskfree: Option<PathBuf>,
    /// `ticker,cik` CSV defining the stock universe.
    #[arg(long, global = true)]
    pub securities: Option<PathBuf>,
    /// Keyword rules separated by `;`, `*` suffix for prefixes.
    #[arg(long, global = true)]
    pub keywords: Option<String>,
    /// Score denominator: tokens | max-word.
    #[arg(long, global = true)]
    pub normalization: Option<String>,
    /// Sortino downside set: zero | rf.
    #[arg(long, global = true)]
    pub downside_threshold: Option<String>,
    /// More log output (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fetch (or read offline) and normalize the filing corpus.
    Ingest,
    /// Score every filing; writes scores.csv and mentions_per_year.csv.
    Score,
    /// Annual weights and chained levels for each configured index.
    BuildIndex,
    /// Market-model event study around the event date.
    EventStudy,
    /// Regress event CARs on index weights.
    Regress {
        #[arg(long, value_enum, default_value = "both")]
        method: MethodChoice,
    },
    /// Performance panel and expense-ratio scatter data.
    Report,
    /// score, build-index, event-study, regress and report in sequence.
    Run,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.global.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let cfg = PipelineConfig::resolve(file, &cli.global)?;
    match cli.command {
        Command::Ingest => stages::ingest(&cfg),
        Command::Score => stages::score(&cfg),
        Command::BuildIndex => stages::build_index(&cfg),
        Command::EventStudy => stages::event_study(&cfg),
        Command::Regress { method } => stages::regress(&cfg, method),
        Command::Report => stages::report(&cfg),
        Command::Run => {
            stages::score(&cfg)?;
            stages::build_index(&cfg)?;
            stages::event_study(&cfg)?;
            stages::regress(&cfg, MethodChoice::Both)?;
            stages::report(&cfg)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let level = match cli.global.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tenk: error [{}]: {e}", e.module());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
