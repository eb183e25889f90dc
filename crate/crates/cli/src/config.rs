//! Pipeline configuration: one flat TOML file plus command-line overrides.
//!
//! Precedence is flags > file > defaults. Relative paths in the file are
//! resolved against the file's directory; relative paths given as flags are
//! resolved against the working directory.

use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::Deserialize;
use tenk_core::eventstudy::{DEFAULT_ESTIMATION_LENGTH, DEFAULT_EVENT_LENGTH};
use tenk_core::perf::DownsideThreshold;
use tenk_core::textscore::ScoreNormalization;
use tenk_core::{IndexSpec, KeywordSet};

use crate::error::CliError;

pub const DEFAULT_EVENT_DATE: &str = "2022-11-30";
const DEFAULT_KEYWORDS: &str = "artificial intelligen*; ai; a.i.";

/// Keys accepted in the config file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub raw_dir: Option<PathBuf>,
    pub corpus_dir: Option<PathBuf>,
    pub prices_path: Option<PathBuf>,
    pub riskfree_path: Option<PathBuf>,
    pub securities_path: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
    pub market: Option<String>,
    pub benchmark: Option<String>,
    pub etfs: Option<Vec<String>>,
    pub keywords: Option<String>,
    pub normalization: Option<String>,
    pub indices: Option<Vec<String>>,
    pub ai_group_index: Option<String>,
    pub event_date: Option<String>,
    pub estimation_length: Option<usize>,
    pub event_length: Option<usize>,
    pub seed: Option<u64>,
    pub offline: Option<bool>,
    pub start_year: Option<i32>,
    pub end_year: Option<i32>,
    pub downside_threshold: Option<String>,
    pub perf_start: Option<String>,
    pub perf_end: Option<String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg: FileConfig = toml::from_str(&text)
            .map_err(|e| CliError::usage(format!("config {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [
            &mut cfg.raw_dir,
            &mut cfg.corpus_dir,
            &mut cfg.prices_path,
            &mut cfg.riskfree_path,
            &mut cfg.securities_path,
            &mut cfg.out_dir,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }
}

/// Fully resolved settings for one invocation.
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub raw_dir: Option<PathBuf>,
    pub corpus_dir: PathBuf,
    pub prices_path: PathBuf,
    pub riskfree_path: PathBuf,
    pub securities_path: PathBuf,
    pub out_dir: PathBuf,
    pub market: String,
    pub benchmark: String,
    pub etfs: Vec<String>,
    pub keywords: KeywordSet,
    pub normalization: ScoreNormalization,
    pub indices: Vec<IndexSpec>,
    pub ai_group_index: String,
    pub event_date: NaiveDate,
    pub estimation_length: usize,
    pub event_length: usize,
    pub seed: u64,
    pub offline: bool,
    pub start_year: i32,
    pub end_year: i32,
    pub downside_threshold: DownsideThreshold,
    pub perf_start: Option<NaiveDate>,
    pub perf_end: Option<NaiveDate>,
}

fn parse_date(key: &str, s: &str) -> Result<NaiveDate, CliError> {
    NaiveDate::parse_from_str(s, "%Y-%m-%d")
        .map_err(|e| CliError::usage(format!("{key}: {s:?} is not a YYYY-MM-DD date ({e})")))
}

fn parse_normalization(s: &str) -> Result<ScoreNormalization, CliError> {
    match s {
        "tokens" => Ok(ScoreNormalization::TokenCount),
        "max-word" => Ok(ScoreNormalization::MostFrequentWord),
        other => Err(CliError::usage(format!(
            "normalization: unknown value {other:?} (tokens|max-word)"
        ))),
    }
}

impl PipelineConfig {
    pub fn resolve(file: FileConfig, flags: &crate::GlobalArgs) -> Result<Self, CliError> {
        let keywords_text = flags
            .keywords
            .clone()
            .or(file.keywords)
            .unwrap_or_else(|| DEFAULT_KEYWORDS.to_string());
        let keywords = KeywordSet::parse(&keywords_text)
            .map_err(|e| CliError::usage(format!("keywords: {e}")))?;
        let indices = file
            .indices
            .unwrap_or_else(|| {
                IndexSpec::standard_set()
                    .into_iter()
                    .map(|s| s.name)
                    .collect()
            })
            .iter()
            .map(|s| {
                s.parse::<IndexSpec>()
                    .map_err(|e| CliError::usage(format!("indices: {e}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let event_date = match flags.event_date.as_deref().or(file.event_date.as_deref()) {
            Some(s) => parse_date("event_date", s)?,
            None => parse_date("event_date", DEFAULT_EVENT_DATE)?,
        };
        let downside_threshold = flags
            .downside_threshold
            .clone()
            .or(file.downside_threshold)
            .map(|s| s.parse::<DownsideThreshold>().map_err(CliError::usage))
            .transpose()?
            .unwrap_or_default();
        let normalization = flags
            .normalization
            .as_deref()
            .or(file.normalization.as_deref())
            .map(parse_normalization)
            .transpose()?
            .unwrap_or_default();
        let start_year = file.start_year.unwrap_or(2019);
        let end_year = file.end_year.unwrap_or(2022);
        let perf_start = file
            .perf_start
            .as_deref()
            .map(|s| parse_date("perf_start", s))
            .transpose()?;
        let perf_end = file
            .perf_end
            .as_deref()
            .map(|s| parse_date("perf_end", s))
            .transpose()?;

        let pick = |flag: &Option<PathBuf>, file: Option<PathBuf>, default: &str| {
            flag.clone()
                .or(file)
                .unwrap_or_else(|| PathBuf::from(default))
        };
        Ok(PipelineConfig {
            raw_dir: flags.raw_dir.clone().or(file.raw_dir),
            corpus_dir: pick(&flags.corpus_dir, file.corpus_dir, "corpus"),
            prices_path: pick(&flags.prices, file.prices_path, "prices.csv"),
            riskfree_path: pick(&flags.riskfree, file.riskfree_path, "riskfree.csv"),
            securities_path: pick(&flags.securities, file.securities_path, "securities.csv"),
            out_dir: pick(&flags.out_dir, file.out_dir, "out"),
            market: file.market.unwrap_or_else(|| "SPX".into()),
            benchmark: file.benchmark.unwrap_or_else(|| "IXIC".into()),
            etfs: file.etfs.unwrap_or_default(),
            keywords,
            normalization,
            ai_group_index: file.ai_group_index.unwrap_or_else(|| "TAII05".into()),
            indices,
            event_date,
            estimation_length: file.estimation_length.unwrap_or(DEFAULT_ESTIMATION_LENGTH),
            event_length: file.event_length.unwrap_or(DEFAULT_EVENT_LENGTH),
            seed: flags.seed.or(file.seed).unwrap_or(0),
            offline: flags.offline || file.offline.unwrap_or(false),
            start_year,
            end_year,
            downside_threshold,
            perf_start,
            perf_end,
        })
    }
}
