//! Price and risk-free CSV ingestion.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use chrono::NaiveDate;

use super::{Cik, CorpusError, PriceBar, ReturnSeries, RiskFreeCurve};
use crate::error::{Error, Result};

/// Loads `date,ticker,close[,market_cap]` and converts each ticker to log returns.
pub fn load_prices(path: &Path) -> Result<BTreeMap<String, ReturnSeries>> {
    let bars = load_price_bars(path)?;
    bars.iter()
        .map(|(ticker, bars)| Ok((ticker.clone(), log_returns(ticker, bars)?)))
        .collect()
}

/// Loads price bars grouped by ticker, in date order.
pub fn load_price_bars(path: &Path) -> Result<BTreeMap<String, Vec<PriceBar>>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(read_price_bars(file, &path.display().to_string())?)
}

/// `ln(close_t / close_{t-1})`; the first bar has no prior close and is dropped.
pub fn log_returns(ticker: &str, bars: &[PriceBar]) -> Result<ReturnSeries, CorpusError> {
    let obs = bars
        .windows(2)
        .map(|w| (w[1].date, (w[1].close / w[0].close).ln()))
        .collect();
    ReturnSeries::new(ticker, obs)
}

fn load_err(source: &str, row: usize, message: impl Into<String>) -> CorpusError {
    CorpusError::Load {
        source_name: source.to_string(),
        row,
        message: message.into(),
    }
}

fn parse_date(s: &str, source: &str, row: usize) -> Result<NaiveDate, CorpusError> {
    NaiveDate::parse_from_str(s.trim(), "%Y-%m-%d")
        .map_err(|e| load_err(source, row, format!("bad date {s:?}: {e}")))
}

fn parse_number(s: &str, what: &str, source: &str, row: usize) -> Result<f64, CorpusError> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| load_err(source, row, format!("bad {what} {s:?}")))?;
    if !v.is_finite() {
        return Err(load_err(source, row, format!("non-finite {what}")));
    }
    Ok(v)
}

fn check_header(
    reader: &mut csv::Reader<impl Read>,
    source: &str,
    required: &[&str],
    optional: &[&str],
) -> Result<usize, CorpusError> {
    let header = reader
        .headers()
        .map_err(|e| load_err(source, 1, e.to_string()))?
        .clone();
    let cols: Vec<&str> = header.iter().map(str::trim).collect();
    let n = cols.len();
    let ok = n >= required.len()
        && n <= required.len() + optional.len()
        && cols
            .iter()
            .zip(required.iter().chain(optional))
            .all(|(a, b)| a == b);
    if !ok {
        let mut want = required.join(",");
        if !optional.is_empty() {
            want.push_str(&format!("[,{}]", optional.join(",")));
        }
        return Err(load_err(
            source,
            1,
            format!("expected header {want}, got {}", cols.join(",")),
        ));
    }
    Ok(n)
}

/// Parses the price CSV schema from any reader. Row numbers are file line numbers.
pub fn read_price_bars(
    input: impl Read,
    source: &str,
) -> Result<BTreeMap<String, Vec<PriceBar>>, CorpusError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input);
    let width = check_header(
        &mut reader,
        source,
        &["date", "ticker", "close"],
        &["market_cap"],
    )?;
    let mut out: BTreeMap<String, Vec<PriceBar>> = BTreeMap::new();
    for (i, rec) in reader.records().enumerate() {
        let row = i + 2;
        let rec = rec.map_err(|e| load_err(source, row, e.to_string()))?;
        if rec.len() != width {
            return Err(load_err(
                source,
                row,
                format!("expected {width} fields, got {}", rec.len()),
            ));
        }
        let date = parse_date(&rec[0], source, row)?;
        let ticker = rec[1].to_string();
        if ticker.is_empty() {
            return Err(load_err(source, row, "empty ticker"));
        }
        let close = parse_number(&rec[2], "close", source, row)?;
        if close <= 0.0 {
            return Err(load_err(source, row, format!("non-positive close {close}")));
        }
        let market_cap = match rec.get(3).filter(|s| !s.is_empty()) {
            Some(s) => {
                let cap = parse_number(s, "market_cap", source, row)?;
                if cap < 0.0 {
                    return Err(load_err(source, row, "negative market_cap"));
                }
                Some(cap)
            }
            None => None,
        };
        let series = out.entry(ticker.clone()).or_default();
        if let Some(prev) = series.last() {
            if prev.date >= date {
                return Err(load_err(
                    source,
                    row,
                    format!("date {date} for {ticker} not after {}", prev.date),
                ));
            }
        }
        series.push(PriceBar {
            date,
            ticker,
            close,
            market_cap,
        });
    }
    Ok(out)
}

/// Loads `date,annualized_yield`.
pub fn load_risk_free(path: &Path) -> Result<RiskFreeCurve> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(read_risk_free(file, &path.display().to_string())?)
}

pub fn read_risk_free(input: impl Read, source: &str) -> Result<RiskFreeCurve, CorpusError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input);
    check_header(&mut reader, source, &["date", "annualized_yield"], &[])?;
    let mut obs: Vec<(NaiveDate, f64)> = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let row = i + 2;
        let rec = rec.map_err(|e| load_err(source, row, e.to_string()))?;
        if rec.len() != 2 {
            return Err(load_err(source, row, "expected 2 fields"));
        }
        let date = parse_date(&rec[0], source, row)?;
        let y = parse_number(&rec[1], "annualized_yield", source, row)?;
        if let Some((prev, _)) = obs.last() {
            if *prev >= date {
                return Err(load_err(
                    source,
                    row,
                    format!("date {date} not after {prev}"),
                ));
            }
        }
        obs.push((date, y));
    }
    RiskFreeCurve::new(obs)
}

/// Loads the `ticker,cik` universe file. Tickers and CIKs must both be unique.
pub fn load_securities(path: &Path) -> Result<BTreeMap<String, Cik>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(read_securities(file, &path.display().to_string())?)
}

pub fn read_securities(
    input: impl Read,
    source: &str,
) -> Result<BTreeMap<String, Cik>, CorpusError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input);
    check_header(&mut reader, source, &["ticker", "cik"], &[])?;
    let mut out = BTreeMap::new();
    let mut seen = std::collections::BTreeSet::new();
    for (i, rec) in reader.records().enumerate() {
        let row = i + 2;
        let rec = rec.map_err(|e| load_err(source, row, e.to_string()))?;
        if rec.len() != 2 || rec[0].is_empty() {
            return Err(load_err(source, row, "expected ticker,cik"));
        }
        let cik: Cik = rec[1]
            .parse()
            .map_err(|e| load_err(source, row, format!("{e}")))?;
        if !seen.insert(cik.clone()) {
            return Err(load_err(source, row, format!("duplicate cik {cik}")));
        }
        if out.insert(rec[0].to_string(), cik).is_some() {
            return Err(load_err(
                source,
                row,
                format!("duplicate ticker {}", &rec[0]),
            ));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn read(csv: &str) -> Result<BTreeMap<String, Vec<PriceBar>>, CorpusError> {
        read_price_bars(csv.as_bytes(), "test.csv")
    }

    fn returns(csv: &str) -> BTreeMap<String, ReturnSeries> {
        read(csv)
            .unwrap()
            .iter()
            .map(|(t, b)| (t.clone(), log_returns(t, b).unwrap()))
            .collect()
    }

    #[test]
    fn log_return_of_ten_percent_move() {
        let r = returns("date,ticker,close\n2021-01-04,T,100\n2021-01-05,T,110\n");
        let obs = r["T"].observations();
        assert_eq!(obs.len(), 1);
        assert_eq!(obs[0].0, NaiveDate::from_ymd_opt(2021, 1, 5).unwrap());
        assert!((obs[0].1 - 0.0953101798043249).abs() < 1e-15);
        assert!((obs[0].1 - 0.0953102).abs() < 1e-7);
    }

    #[test]
    fn flat_price_gives_zero() {
        let r = returns("date,ticker,close\n2021-01-04,T,100\n2021-01-05,T,100\n");
        assert_eq!(r["T"].observations()[0].1, 0.0);
    }

    #[test]
    fn errors_carry_row_numbers() {
        let e = read("date,ticker,close\n2021-01-04,T,-5\n").unwrap_err();
        assert!(matches!(e, CorpusError::Load { row: 2, .. }), "{e}");
        let e = read("date,ticker,close\n2021-01-04,T,1\n2021-01-05,T,abc\n").unwrap_err();
        assert!(matches!(e, CorpusError::Load { row: 3, .. }), "{e}");
        let e = read("date,ticker,close\n2021-01-05,T,1\n2021-01-04,U,1\n2021-01-04,T,1\n")
            .unwrap_err();
        assert!(matches!(e, CorpusError::Load { row: 4, .. }), "{e}");
        let e = read("date,ticker,close\n2021-13-01,T,1\n").unwrap_err();
        assert!(matches!(e, CorpusError::Load { row: 2, .. }), "{e}");
        assert!(read("day,ticker,close\n").is_err());
    }

    #[test]
    fn optional_market_cap() {
        let bars =
            read("date,ticker,close,market_cap\n2021-01-04,T,10,5e9\n2021-01-05,T,11,\n").unwrap();
        assert_eq!(bars["T"][0].market_cap, Some(5e9));
        assert_eq!(bars["T"][1].market_cap, None);
    }

    #[test]
    fn interleaved_tickers() {
        let r = returns(
            "date,ticker,close\n2021-01-04,A,1\n2021-01-04,B,2\n2021-01-05,A,2\n2021-01-05,B,1\n",
        );
        assert!((r["A"].observations()[0].1 - 2f64.ln()).abs() < 1e-15);
        assert!((r["B"].observations()[0].1 + 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn risk_free_csv() {
        let rf =
            read_risk_free("date,annualized_yield\n2021-01-04,0.05\n".as_bytes(), "rf").unwrap();
        assert_eq!(rf.observations().len(), 1);
        assert!(read_risk_free("date,annualized_yield\n2021-01-04,x\n".as_bytes(), "rf").is_err());
    }

    proptest! {
        #[test]
        fn returns_telescope(closes in prop::collection::vec(0.01f64..1000.0, 2..200)) {
            let start = NaiveDate::from_ymd_opt(2020, 1, 1).unwrap();
            let bars: Vec<PriceBar> = closes.iter().enumerate().map(|(i, &c)| PriceBar {
                date: start + chrono::Days::new(i as u64),
                ticker: "T".into(),
                close: c,
                market_cap: None,
            }).collect();
            let r = log_returns("T", &bars).unwrap();
            let total: f64 = r.values().iter().sum();
            let last = closes[0] * total.exp();
            let want = *closes.last().unwrap();
            prop_assert!(((last - want) / want).abs() < 1e-9);
        }
    }

    #[test]
    fn securities_file() {
        let m = read_securities(
            "ticker,cik\nAAA,320193\nBBB,0000000042\n".as_bytes(),
            "s.csv",
        )
        .unwrap();
        assert_eq!(m["AAA"].to_string(), "0000320193");
        assert!(read_securities("ticker,cik\nAAA,1\nBBB,1\n".as_bytes(), "s.csv").is_err());
        assert!(read_securities("ticker,cik\nAAA,1\nAAA,2\n".as_bytes(), "s.csv").is_err());
        assert!(read_securities("ticker,cik\nAAA,x\n".as_bytes(), "s.csv").is_err());
        assert!(read_securities("cik,ticker\n1,AAA\n".as_bytes(), "s.csv").is_err());
    }
}
