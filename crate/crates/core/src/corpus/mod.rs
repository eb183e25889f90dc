//! Filings, market data and the on-disk corpus layout.
//!
//! Everything downstream reads from a local corpus directory:
//!
//! ```text
//! <root>/manifest.csv            cik,year,accession_id,source_uri,sha256
//! <root>/filings/<cik>/<year>.txt
//! ```
//!
//! The EDGAR client in [`edgar`] is the only networked piece and is optional.

mod cik;
mod clean;
pub mod edgar;
mod prices;
mod raw;
mod store;

use std::fmt;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::ErrorKind;

pub use cik::{canonicalize_cik, Cik};
pub use clean::{clean_filing_bytes, clean_filing_text, CleanedText};
pub use prices::{
    load_price_bars, load_prices, load_risk_free, load_securities, log_returns, read_price_bars,
    read_risk_free, read_securities,
};
pub use raw::read_raw_dir;
pub use store::{Corpus, ManifestEntry, MANIFEST_FILE};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("invalid CIK {raw:?}: {reason}")]
    InvalidCik { raw: String, reason: &'static str },
    #[error("{source_name}: row {row}: {message}")]
    Load {
        source_name: String,
        row: usize,
        message: String,
    },
    #[error("fetch failed for CIK {cik}{}: {message}", year.map(|y| format!(" year {y}")).unwrap_or_default())]
    Fetch {
        cik: Cik,
        year: Option<i32>,
        message: String,
    },
    #[error("duplicate filing for CIK {cik} year {year}")]
    DuplicateFiling { cik: Cik, year: i32 },
    #[error("filing not found: CIK {cik} year {year}")]
    MissingFiling { cik: Cik, year: i32 },
    #[error("corrupt corpus at {path}: {message}")]
    Layout { path: String, message: String },
    #[error("invalid series {name}: {message}")]
    InvalidSeries { name: String, message: String },
    #[error("{0}")]
    Config(String),
}

impl CorpusError {
    pub fn kind(&self) -> ErrorKind {
        ErrorKind::Data
    }
}

/// One company-year 10-K document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Filing {
    pub cik: Cik,
    /// Calendar year of the filing date.
    pub filing_year: i32,
    pub accession_id: String,
    /// Cleaned plain text.
    pub text: String,
    pub source_uri: String,
}

/// Inclusive range of calendar years. `start > end` denotes the empty range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct YearRange {
    pub start: i32,
    pub end: i32,
}

impl YearRange {
    pub fn new(start: i32, end: i32) -> Self {
        YearRange { start, end }
    }

    pub fn is_empty(&self) -> bool {
        self.start > self.end
    }

    pub fn contains(&self, year: i32) -> bool {
        year >= self.start && year <= self.end
    }

    pub fn years(&self) -> impl Iterator<Item = i32> {
        self.start..=self.end
    }
}

impl fmt::Display for YearRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.start, self.end)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PriceBar {
    pub date: NaiveDate,
    pub ticker: String,
    pub close: f64,
    pub market_cap: Option<f64>,
}

/// Dated daily log returns for one security, index or benchmark.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ReturnSeries {
    pub ticker: String,
    observations: Vec<(NaiveDate, f64)>,
}

impl ReturnSeries {
    /// Builds a series, rejecting unordered/duplicate dates and non-finite values.
    pub fn new(
        ticker: impl Into<String>,
        observations: Vec<(NaiveDate, f64)>,
    ) -> Result<Self, CorpusError> {
        let ticker = ticker.into();
        check_dated_series(&ticker, &observations)?;
        Ok(ReturnSeries {
            ticker,
            observations,
        })
    }

    pub fn observations(&self) -> &[(NaiveDate, f64)] {
        &self.observations
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn dates(&self) -> impl Iterator<Item = NaiveDate> + '_ {
        self.observations.iter().map(|(d, _)| *d)
    }

    pub fn values(&self) -> Vec<f64> {
        self.observations.iter().map(|(_, v)| *v).collect()
    }

    /// Return on `date`, if observed.
    pub fn get(&self, date: NaiveDate) -> Option<f64> {
        self.observations
            .binary_search_by_key(&date, |(d, _)| *d)
            .ok()
            .map(|i| self.observations[i].1)
    }

    /// Sub-series restricted to `[from, to]`, both inclusive.
    pub fn between(&self, from: NaiveDate, to: NaiveDate) -> ReturnSeries {
        ReturnSeries {
            ticker: self.ticker.clone(),
            observations: self
                .observations
                .iter()
                .filter(|(d, _)| *d >= from && *d <= to)
                .copied()
                .collect(),
        }
    }
}

/// Annualized 3-month T-bill yields.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RiskFreeCurve {
    observations: Vec<(NaiveDate, f64)>,
}

/// Trading days per year used to de-annualize yields.
pub const TRADING_DAYS_PER_YEAR: f64 = 252.0;

impl RiskFreeCurve {
    pub fn new(observations: Vec<(NaiveDate, f64)>) -> Result<Self, CorpusError> {
        check_dated_series("risk-free", &observations)?;
        Ok(RiskFreeCurve { observations })
    }

    /// A curve with a constant yield from the beginning of time.
    pub fn constant(annualized_yield: f64) -> Self {
        RiskFreeCurve {
            observations: vec![(NaiveDate::MIN, annualized_yield)],
        }
    }

    pub fn observations(&self) -> &[(NaiveDate, f64)] {
        &self.observations
    }

    /// Latest annualized yield observed on or before `date`.
    pub fn yield_as_of(&self, date: NaiveDate) -> Option<f64> {
        let idx = self.observations.partition_point(|(d, _)| *d <= date);
        idx.checked_sub(1).map(|i| self.observations[i].1)
    }

    /// Daily rate on `date`: annualized yield / 252.
    pub fn daily_rate(&self, date: NaiveDate) -> Option<f64> {
        self.yield_as_of(date).map(|y| y / TRADING_DAYS_PER_YEAR)
    }
}

fn check_dated_series(name: &str, obs: &[(NaiveDate, f64)]) -> Result<(), CorpusError> {
    for (i, (date, value)) in obs.iter().enumerate() {
        if !value.is_finite() {
            return Err(CorpusError::InvalidSeries {
                name: name.to_string(),
                message: format!("non-finite value on {date}"),
            });
        }
        if i > 0 && obs[i - 1].0 >= *date {
            return Err(CorpusError::InvalidSeries {
                name: name.to_string(),
                message: format!("dates not strictly increasing at {date}"),
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(y: i32, m: u32, day: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, day).unwrap()
    }

    #[test]
    fn series_rejects_duplicates_and_nan() {
        assert!(ReturnSeries::new("T", vec![(d(2021, 1, 4), 0.1), (d(2021, 1, 4), 0.2)]).is_err());
        assert!(ReturnSeries::new("T", vec![(d(2021, 1, 4), f64::NAN)]).is_err());
        let s = ReturnSeries::new("T", vec![(d(2021, 1, 4), 0.1), (d(2021, 1, 5), 0.2)]).unwrap();
        assert_eq!(s.get(d(2021, 1, 5)), Some(0.2));
        assert_eq!(s.get(d(2021, 1, 6)), None);
    }

    #[test]
    fn risk_free_is_as_of() {
        let rf =
            RiskFreeCurve::new(vec![(d(2021, 1, 4), 0.0252), (d(2021, 1, 11), 0.0504)]).unwrap();
        assert_eq!(rf.daily_rate(d(2021, 1, 1)), None);
        assert!((rf.daily_rate(d(2021, 1, 8)).unwrap() - 0.0001).abs() < 1e-15);
        assert!((rf.daily_rate(d(2021, 1, 11)).unwrap() - 0.0002).abs() < 1e-15);
        assert_eq!(
            RiskFreeCurve::constant(0.0).daily_rate(d(1990, 1, 1)),
            Some(0.0)
        );
    }

    #[test]
    fn year_range() {
        assert!(YearRange::new(2022, 2021).is_empty());
        assert_eq!(YearRange::new(2020, 2022).years().count(), 3);
    }
}
