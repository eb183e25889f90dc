//! Market-model event study: AR, CAR, CAAR and their significance tests.

mod stats;
mod window;

use std::io::Write;

use chrono::NaiveDate;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::corpus::ReturnSeries;
use crate::error::ErrorKind;
use crate::numfmt::fmt12;
use crate::regress::{ols, Design, RegressError};

pub use stats::{
    exact_signed_rank_pvalue, mean_t_test, two_sample_t, wilcoxon_signed_rank, TTest, TwoSample,
    Wilcoxon, WILCOXON_EXACT_MAX,
};
pub use window::{EventWindowSpec, EventWindows, DEFAULT_ESTIMATION_LENGTH, DEFAULT_EVENT_LENGTH};

/// Minimum paired observations for a market-model fit.
pub const MIN_ESTIMATION_OBS: usize = 30;

#[derive(Debug, Error)]
pub enum EventStudyError {
    #[error("invalid event window: {0}")]
    InvalidSpec(String),
    #[error("no market trading day on or after {0}")]
    NoTradingDay(NaiveDate),
    #[error("{id}: {found} paired estimation observations, need {needed}")]
    InsufficientObservations {
        id: String,
        needed: usize,
        found: usize,
    },
    #[error("{id}: market returns have zero variance in the estimation window")]
    Singular { id: String },
    #[error("{id}: no returns inside the event window")]
    EmptyWindow { id: String },
    #[error("degenerate sample: {0}")]
    Degenerate(String),
    #[error("market-model regression failed for {id}: {source}")]
    Regression { id: String, source: RegressError },
}

impl EventStudyError {
    pub fn kind(&self) -> ErrorKind {
        match self {
            EventStudyError::InvalidSpec(_) | EventStudyError::NoTradingDay(_) => ErrorKind::Data,
            _ => ErrorKind::Computation,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MarketModelFit {
    pub alpha_hat: f64,
    pub beta_hat: f64,
    /// Residual standard deviation with denominator n − 2.
    pub residual_sd: f64,
    pub n_obs: usize,
}

/// OLS of stock returns on market returns over the estimation window.
pub fn fit_market_model(
    id: &str,
    stock: &ReturnSeries,
    windows: &EventWindows,
    market: &ReturnSeries,
) -> Result<MarketModelFit, EventStudyError> {
    let (ri, rm): (Vec<f64>, Vec<f64>) = windows
        .estimation
        .iter()
        .filter_map(|d| Some((stock.get(*d)?, market.get(*d)?)))
        .unzip();
    if ri.len() < MIN_ESTIMATION_OBS {
        return Err(EventStudyError::InsufficientObservations {
            id: id.to_string(),
            needed: MIN_ESTIMATION_OBS,
            found: ri.len(),
        });
    }
    let design = Design::with_intercept(&[("market", &rm)]).map_err(|source| {
        EventStudyError::Regression {
            id: id.to_string(),
            source,
        }
    })?;
    let fit = ols(&ri, &design).map_err(|source| match source {
        RegressError::Singular => EventStudyError::Singular { id: id.to_string() },
        source => EventStudyError::Regression {
            id: id.to_string(),
            source,
        },
    })?;
    Ok(MarketModelFit {
        alpha_hat: fit.coefficients[0].estimate,
        beta_hat: fit.coefficients[1].estimate,
        residual_sd: fit.scale,
        n_obs: fit.n,
    })
}

/// AR per event-window day; `None` where the stock has no return (a gap).
pub fn abnormal_returns(
    id: &str,
    stock: &ReturnSeries,
    fit: &MarketModelFit,
    windows: &EventWindows,
    market: &ReturnSeries,
) -> Result<Vec<Option<f64>>, EventStudyError> {
    let ars: Vec<Option<f64>> = windows
        .event
        .iter()
        .map(|d| {
            let ri = stock.get(*d)?;
            let rm = market.get(*d)?;
            Some(ri - (fit.alpha_hat + fit.beta_hat * rm))
        })
        .collect();
    if ars.iter().all(Option::is_none) {
        return Err(EventStudyError::EmptyWindow { id: id.to_string() });
    }
    Ok(ars)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SecurityResult {
    #[serde(rename = "cik")]
    pub id: String,
    pub car: f64,
    pub ar: Vec<Option<f64>>,
}

impl SecurityResult {
    pub fn new(id: impl Into<String>, ar: Vec<Option<f64>>) -> Self {
        let car = ar.iter().flatten().sum();
        SecurityResult {
            id: id.into(),
            car,
            ar,
        }
    }

    /// CAR through each window day, gaps contributing zero.
    pub fn cumulative(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.ar
            .iter()
            .map(|a| {
                acc += a.unwrap_or(0.0);
                acc
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaarSummary {
    pub cars: Vec<f64>,
    pub caar_path: Vec<f64>,
    /// Cross-sectional standard error of the CAR through each day.
    pub caar_se: Vec<f64>,
    pub t: TTest,
    pub wilcoxon: Option<Wilcoxon>,
}

/// Aggregates per-security ARs (all the same window length).
pub fn caar(securities: &[SecurityResult]) -> Result<CaarSummary, EventStudyError> {
    let n = securities.len();
    if n < 2 {
        return Err(EventStudyError::Degenerate(format!(
            "{n} securities, need at least 2"
        )));
    }
    let len = securities[0].ar.len();
    if securities.iter().any(|s| s.ar.len() != len) {
        return Err(EventStudyError::Degenerate(
            "securities have different window lengths".into(),
        ));
    }
    let paths: Vec<Vec<f64>> = securities.iter().map(SecurityResult::cumulative).collect();
    let mut caar_path = Vec::with_capacity(len);
    let mut caar_se = Vec::with_capacity(len);
    for k in 0..len {
        let col: Vec<f64> = paths.iter().map(|p| p[k]).collect();
        let (mean, sd) = stats::mean_sd(&col);
        caar_path.push(mean);
        caar_se.push(sd / (n as f64).sqrt());
    }
    let cars: Vec<f64> = securities.iter().map(|s| s.car).collect();
    Ok(CaarSummary {
        t: mean_t_test(&cars),
        wilcoxon: wilcoxon_signed_rank(&cars),
        cars,
        caar_path,
        caar_se,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpecSummary {
    pub event_date: NaiveDate,
    pub day0: NaiveDate,
    pub estimation_length: usize,
    pub event_length: usize,
    pub market: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkippedSecurity {
    #[serde(rename = "cik")]
    pub id: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EventStudyReport {
    pub spec: SpecSummary,
    pub per_security: Vec<SecurityResult>,
    pub caar_path: Vec<f64>,
    #[serde(skip)]
    pub caar_se: Vec<f64>,
    pub t_stat: Option<f64>,
    pub t_p: Option<f64>,
    pub zero_variance: bool,
    pub wilcoxon_z: Option<f64>,
    pub wilcoxon_p: Option<f64>,
    pub n: usize,
    pub skipped: Vec<SkippedSecurity>,
}

impl EventStudyReport {
    pub fn mean_car(&self) -> f64 {
        self.caar_path.last().copied().unwrap_or(0.0)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// `day,caar,ci_low,ci_high` with a 95% normal band.
    pub fn write_caar_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "day,caar,ci_low,ci_high")?;
        for (k, (m, se)) in self.caar_path.iter().zip(&self.caar_se).enumerate() {
            writeln!(
                out,
                "{k},{},{},{}",
                fmt12(*m),
                fmt12(m - 1.96 * se),
                fmt12(m + 1.96 * se)
            )?;
        }
        Ok(())
    }
}

/// Event-window ARs for one security.
pub fn security_ars(
    id: &str,
    stock: &ReturnSeries,
    windows: &EventWindows,
    market: &ReturnSeries,
) -> Result<(MarketModelFit, SecurityResult), EventStudyError> {
    let fit = fit_market_model(id, stock, windows, market)?;
    let ar = abnormal_returns(id, stock, &fit, windows, market)?;
    Ok((fit, SecurityResult::new(id, ar)))
}

/// Runs the study over all securities. Securities that cannot be fitted are
/// skipped and listed; the remainder must number at least two.
pub fn run_event_study(
    securities: &[(String, &ReturnSeries)],
    spec: &EventWindowSpec,
) -> Result<EventStudyReport, EventStudyError> {
    let windows = spec.windows()?;
    let results: Vec<Result<SecurityResult, (String, EventStudyError)>> = securities
        .par_iter()
        .map(|(id, series)| {
            security_ars(id, series, &windows, &spec.market)
                .map(|(_, r)| r)
                .map_err(|e| (id.clone(), e))
        })
        .collect();
    let mut per_security = Vec::new();
    let mut skipped = Vec::new();
    for r in results {
        match r {
            Ok(s) => per_security.push(s),
            Err((id, e)) => {
                log::warn!("event study: skipping {id}: {e}");
                skipped.push(SkippedSecurity {
                    id,
                    reason: e.to_string(),
                });
            }
        }
    }
    let summary = caar(&per_security)?;
    Ok(EventStudyReport {
        spec: spec.summary(&windows),
        n: per_security.len(),
        per_security,
        caar_path: summary.caar_path,
        caar_se: summary.caar_se,
        t_stat: summary.t.t,
        t_p: summary.t.p,
        zero_variance: summary.t.zero_variance,
        wilcoxon_z: summary.wilcoxon.as_ref().and_then(|w| w.z),
        wilcoxon_p: summary.wilcoxon.as_ref().and_then(|w| w.p),
        skipped,
    })
}

/// One row of the single-series summary table (an index, ETF or benchmark).
#[derive(Debug, Clone, PartialEq)]
pub struct IndexEventRow {
    pub name: String,
    /// CAR of the series, percent.
    pub car_pct: f64,
    /// CAR divided by the window length, percent.
    pub ar_pct: f64,
    /// t-test and signed-rank z over the series' daily ARs.
    pub t_stat: Option<f64>,
    pub wilcoxon_z: Option<f64>,
}

impl IndexEventRow {
    pub fn new(
        name: &str,
        returns: &ReturnSeries,
        spec: &EventWindowSpec,
    ) -> Result<Self, EventStudyError> {
        let windows = spec.windows()?;
        let (_, result) = security_ars(name, returns, &windows, &spec.market)?;
        let daily: Vec<f64> = result.ar.iter().flatten().copied().collect();
        Ok(IndexEventRow {
            name: name.to_string(),
            car_pct: 100.0 * result.car,
            ar_pct: 100.0 * result.car / windows.event.len() as f64,
            t_stat: mean_t_test(&daily).t,
            wilcoxon_z: wilcoxon_signed_rank(&daily).and_then(|w| w.z),
        })
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt12).unwrap_or_else(|| "NA".to_string())
}

pub fn write_index_table<W: Write>(rows: &[IndexEventRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "name,car_pct,ar_pct,t_stat,wilcoxon_z")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.name,
            fmt12(r.car_pct),
            fmt12(r.ar_pct),
            opt(r.t_stat),
            opt(r.wilcoxon_z)
        )?;
    }
    Ok(())
}
