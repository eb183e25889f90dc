//! One function per subcommand. Each stage reads only persisted upstream
//! artifacts from disk, so any stage can be rerun on its own.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};
use tenk_core::corpus::edgar::{EdgarClient, EdgarEndpoints};
use tenk_core::corpus::{
    load_price_bars, load_prices, load_risk_free, load_securities, Corpus, PriceBar,
};
use tenk_core::eventstudy::{
    run_event_study, two_sample_t, write_index_table, EventWindowSpec, IndexEventRow, TwoSample,
};
use tenk_core::index::{
    chain_index, compute_all_weights, read_index_csv, read_weights_csv, write_index_csv,
    write_weights_csv,
};
use tenk_core::perf::{etf_reference, write_expense_scatter, write_panel, PerfMetrics};
use tenk_core::regress::{mm_fit, ols, Design, MmConfig};
use tenk_core::textscore::{
    mentions_per_year, read_scores, score_filings, write_mentions, write_scores,
};
use tenk_core::{Cik, IndexSeries, IndexSpec, ReturnSeries, YearRange};

use crate::config::PipelineConfig;
use crate::error::CliError;

pub const SCORES_FILE: &str = "scores.csv";
pub const MENTIONS_FILE: &str = "mentions_per_year.csv";
pub const EVENT_REPORT_FILE: &str = "event_study.json";
pub const CAAR_FILE: &str = "caar.csv";
pub const EVENT_TABLE_FILE: &str = "event_table.csv";
pub const GROUPS_FILE: &str = "group_comparison.json";
pub const WARNINGS_FILE: &str = "index_warnings.csv";
pub const PANEL_FILE: &str = "panel.csv";
pub const SCATTER_FILE: &str = "scatter.csv";

pub fn weights_file(name: &str) -> String {
    format!("weights_{name}.csv")
}

pub fn index_file(name: &str) -> String {
    format!("index_{name}.csv")
}

pub fn regress_file(name: &str, method: &str) -> String {
    format!("regress_{name}_{method}.json")
}

fn write_artifact(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io("cli", dir, e))?;
    let path = dir.join(name);
    fs::write(&path, bytes).map_err(|e| CliError::io("cli", &path, e))?;
    log::info!("wrote {}", path.display());
    Ok(path)
}

fn open_artifact(
    dir: &Path,
    name: &str,
    module: &'static str,
    producer: &str,
) -> Result<fs::File, CliError> {
    let path = dir.join(name);
    fs::File::open(&path).map_err(|e| {
        CliError::data(
            module,
            format!("{}: {e} (run `tenk {producer}` first)", path.display()),
        )
    })
}

fn csv_bytes(f: impl FnOnce(&mut Vec<u8>) -> csv::Result<()>) -> Vec<u8> {
    let mut buf = Vec::new();
    f(&mut buf).expect("writing CSV to memory");
    buf
}

fn io_bytes(f: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> Vec<u8> {
    let mut buf = Vec::new();
    f(&mut buf).expect("writing to memory");
    buf
}

fn json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(value).expect("artifact serializes");
    s.push('\n');
    s.into_bytes()
}

pub fn ingest(cfg: &PipelineConfig) -> Result<(), CliError> {
    let mut corpus = Corpus::open(&cfg.corpus_dir)?;
    if cfg.offline {
        let raw_dir = cfg.raw_dir.as_ref().ok_or_else(|| {
            CliError::usage("offline ingest needs raw_dir (config key or --raw-dir)")
        })?;
        let filings = tenk_core::corpus::read_raw_dir(raw_dir)?;
        if filings.is_empty() {
            return Err(CliError::data(
                "corpus",
                format!("no filings under {}", raw_dir.display()),
            ));
        }
        corpus.persist(&filings)?;
        log::info!(
            "ingested {} filings from {}",
            filings.len(),
            raw_dir.display()
        );
        return Ok(());
    }
    let client = EdgarClient::from_env(EdgarEndpoints::sec_gov())?;
    let years = YearRange::new(cfg.start_year, cfg.end_year);
    for (ticker, cik) in load_securities(&cfg.securities_path)? {
        let out = client.fetch_filings(&cik, years, &mut corpus)?;
        log::info!(
            "{ticker} ({cik}): {} filings, gaps {:?}",
            out.filings.len(),
            out.gaps
        );
    }
    Ok(())
}

pub fn score(cfg: &PipelineConfig) -> Result<(), CliError> {
    let corpus = Corpus::open(&cfg.corpus_dir)?;
    let filings = corpus.filings()?;
    if filings.is_empty() {
        return Err(CliError::data(
            "textscore",
            format!(
                "corpus {} is empty (run `tenk ingest` first)",
                cfg.corpus_dir.display()
            ),
        ));
    }
    let records = score_filings(&filings, &cfg.keywords, cfg.normalization)?;
    write_artifact(
        &cfg.out_dir,
        SCORES_FILE,
        &csv_bytes(|b| write_scores(&records, b)),
    )?;
    let mentions = mentions_per_year(&records);
    write_artifact(
        &cfg.out_dir,
        MENTIONS_FILE,
        &csv_bytes(|b| write_mentions(&mentions, b)),
    )?;
    Ok(())
}

/// Stock log returns keyed by CIK through the securities file.
fn stock_returns(
    cfg: &PipelineConfig,
    prices: &BTreeMap<String, ReturnSeries>,
) -> Result<BTreeMap<Cik, ReturnSeries>, CliError> {
    let mut out = BTreeMap::new();
    for (ticker, cik) in load_securities(&cfg.securities_path)? {
        match prices.get(&ticker) {
            Some(series) => {
                out.insert(cik, series.clone());
            }
            None => log::warn!("{ticker} ({cik}) has no prices"),
        }
    }
    Ok(out)
}

fn market_bars<'a>(
    cfg: &PipelineConfig,
    bars: &'a BTreeMap<String, Vec<PriceBar>>,
) -> Result<&'a [PriceBar], CliError> {
    bars.get(&cfg.market).map(Vec::as_slice).ok_or_else(|| {
        CliError::data(
            "corpus",
            format!("market series {} not in prices", cfg.market),
        )
    })
}

#[derive(Serialize)]
struct WarningRow<'a> {
    index: &'a str,
    date: NaiveDate,
    cik: &'a Cik,
    kind: String,
}

pub fn build_index(cfg: &PipelineConfig) -> Result<(), CliError> {
    let scores = open_artifact(&cfg.out_dir, SCORES_FILE, "index", "score")?;
    let records = read_scores(scores)?;
    let bars = load_price_bars(&cfg.prices_path)?;
    let prices = load_prices(&cfg.prices_path)?;
    let returns = stock_returns(cfg, &prices)?;

    let mut warnings = csv::Writer::from_writer(Vec::new());
    for spec in &cfg.indices {
        let weights = compute_all_weights(spec, &records)?;
        let (first, last) = match (weights.keys().next(), weights.keys().next_back()) {
            (Some(f), Some(l)) => (*f, *l),
            _ => return Err(CliError::data("index", "no scored filing years")),
        };
        let calendar: Vec<NaiveDate> = market_bars(cfg, &bars)?
            .iter()
            .map(|b| b.date)
            .filter(|d| (first..=last).contains(&d.year()))
            .collect();
        let out = chain_index(spec, &weights, &returns, &calendar)?;
        write_artifact(
            &cfg.out_dir,
            &weights_file(&spec.name),
            &csv_bytes(|b| write_weights_csv(&weights, b)),
        )?;
        write_artifact(
            &cfg.out_dir,
            &index_file(&spec.name),
            &csv_bytes(|b| write_index_csv(&out.series, b)),
        )?;
        for w in &out.warnings {
            warnings
                .serialize(WarningRow {
                    index: &spec.name,
                    date: w.date,
                    cik: &w.cik,
                    kind: format!("{:?}", w.kind),
                })
                .expect("writing CSV to memory");
        }
    }
    let mut bytes = warnings.into_inner().expect("flush CSV to memory");
    if bytes.is_empty() {
        bytes = b"index,date,cik,kind\n".to_vec();
    }
    write_artifact(&cfg.out_dir, WARNINGS_FILE, &bytes)?;
    Ok(())
}

fn read_index(
    cfg: &PipelineConfig,
    spec: &IndexSpec,
    module: &'static str,
) -> Result<IndexSeries, CliError> {
    let name = index_file(&spec.name);
    let file = open_artifact(&cfg.out_dir, &name, module, "build-index")?;
    Ok(read_index_csv(spec.clone(), file, &name)?)
}

fn read_weights_for(
    cfg: &PipelineConfig,
    index: &str,
    year: i32,
    module: &'static str,
) -> Result<BTreeMap<Cik, f64>, CliError> {
    let name = weights_file(index);
    let file = open_artifact(&cfg.out_dir, &name, module, "build-index")?;
    let all = read_weights_csv(file, &name)?;
    Ok(all
        .get(&year)
        .map(|w| w.entries.clone())
        .unwrap_or_default())
}

#[derive(Serialize)]
struct GroupSummary {
    n: usize,
    mean_car: Option<f64>,
}

#[derive(Serialize)]
struct GroupComparison {
    classification_index: String,
    classification_year: i32,
    ai: GroupSummary,
    non_ai: GroupSummary,
    test: Option<TwoSample>,
    note: Option<String>,
}

fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

pub fn event_study(cfg: &PipelineConfig) -> Result<(), CliError> {
    let prices = load_prices(&cfg.prices_path)?;
    let market = prices
        .get(&cfg.market)
        .ok_or_else(|| {
            CliError::data(
                "eventstudy",
                format!("market series {} not in prices", cfg.market),
            )
        })?
        .clone();
    let spec = EventWindowSpec::new(cfg.event_date, market)
        .with_lengths(cfg.estimation_length, cfg.event_length);

    let returns = stock_returns(cfg, &prices)?;
    let securities: Vec<(String, &ReturnSeries)> = returns
        .iter()
        .map(|(cik, s)| (cik.to_string(), s))
        .collect();
    let report = run_event_study(&securities, &spec)?;
    write_artifact(&cfg.out_dir, EVENT_REPORT_FILE, report.to_json().as_bytes())?;
    write_artifact(
        &cfg.out_dir,
        CAAR_FILE,
        &io_bytes(|b| report.write_caar_csv(b)),
    )?;

    let year = cfg.event_date.year() + 1;
    let ai: BTreeSet<String> = read_weights_for(cfg, &cfg.ai_group_index, year, "eventstudy")?
        .into_iter()
        .filter(|(_, w)| *w > 0.0)
        .map(|(c, _)| c.to_string())
        .collect();
    let (ai_cars, other_cars): (Vec<_>, Vec<_>) =
        report.per_security.iter().partition(|s| ai.contains(&s.id));
    let ai_cars: Vec<f64> = ai_cars.iter().map(|s| s.car).collect();
    let other_cars: Vec<f64> = other_cars.iter().map(|s| s.car).collect();
    let (test, note) = match two_sample_t(&ai_cars, &other_cars) {
        Ok(t) => (Some(t), None),
        Err(e) => {
            log::warn!("group comparison skipped: {e}");
            (None, Some(e.to_string()))
        }
    };
    let groups = GroupComparison {
        classification_index: cfg.ai_group_index.clone(),
        classification_year: year,
        ai: GroupSummary {
            n: ai_cars.len(),
            mean_car: mean(&ai_cars),
        },
        non_ai: GroupSummary {
            n: other_cars.len(),
            mean_car: mean(&other_cars),
        },
        test,
        note,
    };
    write_artifact(&cfg.out_dir, GROUPS_FILE, &json_bytes(&groups))?;

    let mut rows = Vec::new();
    for index in &cfg.indices {
        let series = read_index(cfg, index, "eventstudy")?;
        rows.push(IndexEventRow::new(
            &index.name,
            &series.log_returns(),
            &spec,
        )?);
    }
    for ticker in cfg.etfs.iter().chain(std::iter::once(&cfg.benchmark)) {
        let series = prices
            .get(ticker)
            .ok_or_else(|| CliError::data("eventstudy", format!("{ticker} not in prices")))?;
        rows.push(IndexEventRow::new(ticker, series, &spec)?);
    }
    write_artifact(
        &cfg.out_dir,
        EVENT_TABLE_FILE,
        &io_bytes(|b| write_index_table(&rows, b)),
    )?;
    Ok(())
}

#[derive(Deserialize)]
struct StoredSecurity {
    cik: String,
    car: f64,
}

#[derive(Deserialize)]
struct StoredSpec {
    event_date: NaiveDate,
}

#[derive(Deserialize)]
struct StoredReport {
    spec: StoredSpec,
    per_security: Vec<StoredSecurity>,
}

/// Which estimators `regress` runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum MethodChoice {
    Ols,
    Mm,
    Both,
}

pub fn regress(cfg: &PipelineConfig, methods: MethodChoice) -> Result<(), CliError> {
    let file = open_artifact(&cfg.out_dir, EVENT_REPORT_FILE, "regress", "event-study")?;
    let report: StoredReport = serde_json::from_reader(std::io::BufReader::new(file))
        .map_err(|e| CliError::data("regress", format!("{EVENT_REPORT_FILE}: {e}")))?;
    let year = report.spec.event_date.year() + 1;
    let y: Vec<f64> = report.per_security.iter().map(|s| s.car).collect();
    for index in &cfg.indices {
        let weights = read_weights_for(cfg, &index.name, year, "regress")?;
        let x: Vec<f64> = report
            .per_security
            .iter()
            .map(|s| {
                s.cik
                    .parse::<Cik>()
                    .map(|c| weights.get(&c).copied().unwrap_or(0.0))
                    .map_err(|e| CliError::data("regress", format!("{EVENT_REPORT_FILE}: {e}")))
            })
            .collect::<Result<_, _>>()?;
        let design = Design::with_intercept(&[("weight", &x)])?;
        if matches!(methods, MethodChoice::Ols | MethodChoice::Both) {
            let fit = ols(&y, &design)?;
            write_artifact(
                &cfg.out_dir,
                &regress_file(&index.name, "ols"),
                &json_bytes(&fit),
            )?;
        }
        if matches!(methods, MethodChoice::Mm | MethodChoice::Both) {
            let fit = mm_fit(&y, &design, &MmConfig::with_seed(cfg.seed))?;
            if !fit.converged {
                log::warn!("{}: MM iterations did not converge", index.name);
            }
            write_artifact(
                &cfg.out_dir,
                &regress_file(&index.name, "mm"),
                &json_bytes(&fit),
            )?;
        }
    }
    Ok(())
}

/// Levels and log returns restricted to `[from, to]`; the first level in the
/// window is the starting point, so returns begin on the following date.
fn windowed(
    name: &str,
    levels: &[(NaiveDate, f64)],
    from: NaiveDate,
    to: NaiveDate,
) -> Result<(ReturnSeries, Vec<f64>), CliError> {
    let inside: Vec<(NaiveDate, f64)> = levels
        .iter()
        .copied()
        .filter(|(d, _)| *d >= from && *d <= to)
        .collect();
    let obs = inside
        .windows(2)
        .map(|w| (w[1].0, (w[1].1 / w[0].1).ln()))
        .collect();
    let series = ReturnSeries::new(name, obs)?;
    Ok((series, inside.iter().map(|(_, l)| *l).collect()))
}

pub fn report(cfg: &PipelineConfig) -> Result<(), CliError> {
    let bars = load_price_bars(&cfg.prices_path)?;
    let rf = load_risk_free(&cfg.riskfree_path)?;
    let mut paths: Vec<(String, Vec<(NaiveDate, f64)>)> = Vec::new();
    for index in &cfg.indices {
        paths.push((index.name.clone(), read_index(cfg, index, "perf")?.levels));
    }
    for ticker in cfg.etfs.iter().chain(std::iter::once(&cfg.benchmark)) {
        let b = bars
            .get(ticker)
            .ok_or_else(|| CliError::data("perf", format!("{ticker} not in prices")))?;
        paths.push((
            ticker.clone(),
            b.iter().map(|b| (b.date, b.close)).collect(),
        ));
    }
    let common_start = paths
        .iter()
        .filter_map(|(_, p)| p.first().map(|x| x.0))
        .max();
    let common_end = paths
        .iter()
        .filter_map(|(_, p)| p.last().map(|x| x.0))
        .min();
    let (from, to) = match (cfg.perf_start.or(common_start), cfg.perf_end.or(common_end)) {
        (Some(f), Some(t)) if f < t => (f, t),
        _ => return Err(CliError::data("perf", "series share no common date range")),
    };
    log::info!("performance window {from} to {to}");

    let bench_levels = &paths.last().expect("benchmark pushed last").1;
    let (bench, _) = windowed(&cfg.benchmark, bench_levels, from, to)?;
    let mut rows = Vec::with_capacity(paths.len());
    for (name, levels) in &paths {
        let (returns, lv) = windowed(name, levels, from, to)?;
        let benchmark = (name != &cfg.benchmark).then_some(&bench);
        rows.push(PerfMetrics::compute(
            &returns,
            &lv,
            benchmark,
            &rf,
            cfg.downside_threshold,
        )?);
    }
    write_artifact(
        &cfg.out_dir,
        PANEL_FILE,
        &io_bytes(|b| write_panel(&rows, b)),
    )?;
    let reference = etf_reference();
    write_artifact(
        &cfg.out_dir,
        SCATTER_FILE,
        &io_bytes(|b| write_expense_scatter(&rows, &reference, b)),
    )?;
    Ok(())
}
