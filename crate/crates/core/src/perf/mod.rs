//! Performance panel: moments, alpha/beta, Sharpe, Sortino, drawdown, Omega.
//!
//! Units follow the reporting convention of the panel: `ret` is a daily
//! percentage, `sd` and `alpha` are daily decimals, kurtosis is raw (not excess).

mod etf;

use std::collections::BTreeMap;
use std::io::Write;

use chrono::NaiveDate;
use serde::Serialize;
use thiserror::Error;

use crate::corpus::{ReturnSeries, RiskFreeCurve};
use crate::error::ErrorKind;
use crate::numfmt::fmt12;
use crate::regress::{ols, Design, RegressError};

pub use etf::{etf_reference, EtfInfo};

/// Minimum paired observations for alpha/beta.
pub const MIN_ALPHA_BETA_OBS: usize = 30;

#[derive(Debug, Error)]
pub enum PerfError {
    #[error("{name}: {found} observations, need {needed}")]
    InsufficientData {
        name: String,
        needed: usize,
        found: usize,
    },
    #[error("no risk-free yield on or before {0}")]
    MissingRiskFree(NaiveDate),
    #[error("{name}: level {value} is not positive")]
    NonPositiveLevel { name: String, value: f64 },
    #[error("{name}: alpha/beta regression failed: {source}")]
    Regression { name: String, source: RegressError },
}

impl PerfError {
    pub fn kind(&self) -> ErrorKind {
        match self {
            PerfError::Regression { .. } => ErrorKind::Computation,
            _ => ErrorKind::Data,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Moments {
    pub mean: f64,
    /// Sample standard deviation (n − 1).
    pub sd: f64,
    /// Third standardized central moment; `None` for a constant series.
    pub skew: Option<f64>,
    /// Raw fourth standardized central moment; `None` for a constant series.
    pub kurt: Option<f64>,
}

/// Mean, sd and the standardized third/fourth moments (population central moments).
pub fn moments(r: &[f64]) -> Result<Moments, PerfError> {
    let n = r.len();
    if n < 4 {
        return Err(PerfError::InsufficientData {
            name: "moments".into(),
            needed: 4,
            found: n,
        });
    }
    let nf = n as f64;
    let mean = r.iter().sum::<f64>() / nf;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for v in r {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    let sd = (m2 / (nf - 1.0)).sqrt();
    let (m2, m3, m4) = (m2 / nf, m3 / nf, m4 / nf);
    let (skew, kurt) = if m2 > 0.0 {
        (Some(m3 / m2.powf(1.5)), Some(m4 / (m2 * m2)))
    } else {
        (None, None)
    };
    Ok(Moments {
        mean,
        sd,
        skew,
        kurt,
    })
}

fn paired(r: &ReturnSeries, benchmark: &ReturnSeries) -> (Vec<f64>, Vec<f64>) {
    r.observations()
        .iter()
        .filter_map(|(d, v)| Some((*v, benchmark.get(*d)?)))
        .unzip()
}

/// OLS intercept and slope of `r` on `benchmark` over common dates.
pub fn alpha_beta(r: &ReturnSeries, benchmark: &ReturnSeries) -> Result<(f64, f64), PerfError> {
    let (y, x) = paired(r, benchmark);
    if y.len() < MIN_ALPHA_BETA_OBS {
        return Err(PerfError::InsufficientData {
            name: r.ticker.clone(),
            needed: MIN_ALPHA_BETA_OBS,
            found: y.len(),
        });
    }
    let wrap = |source| PerfError::Regression {
        name: r.ticker.clone(),
        source,
    };
    let design = Design::with_intercept(&[(benchmark.ticker.as_str(), &x)]).map_err(wrap)?;
    let fit = ols(&y, &design).map_err(wrap)?;
    Ok((fit.coefficients[0].estimate, fit.coefficients[1].estimate))
}

/// Daily risk-free rate matched to each observation date (as-of lookup).
pub fn daily_risk_free(r: &ReturnSeries, rf: &RiskFreeCurve) -> Result<Vec<f64>, PerfError> {
    r.dates()
        .map(|d| rf.daily_rate(d).ok_or(PerfError::MissingRiskFree(d)))
        .collect()
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// (r̄ − r̄_f)/SD; `None` when SD is zero.
pub fn sharpe(r: &ReturnSeries, rf: &RiskFreeCurve) -> Result<Option<f64>, PerfError> {
    let values = r.values();
    if values.len() < 2 {
        return Err(PerfError::InsufficientData {
            name: r.ticker.clone(),
            needed: 2,
            found: values.len(),
        });
    }
    let rf = daily_risk_free(r, rf)?;
    let m = mean(&values);
    let sd =
        (values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (values.len() - 1) as f64).sqrt();
    Ok((sd > 0.0).then(|| (m - mean(&rf)) / sd))
}

/// Which returns count as downside in the Sortino ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DownsideThreshold {
    /// Strictly negative raw returns.
    #[default]
    Zero,
    /// Strictly negative excess returns over the daily risk-free rate.
    Rf,
}

impl std::str::FromStr for DownsideThreshold {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "zero" => Ok(DownsideThreshold::Zero),
            "rf" => Ok(DownsideThreshold::Rf),
            other => Err(format!("unknown downside threshold {other:?} (zero|rf)")),
        }
    }
}

/// (r̄ − r̄_f)/SD_down with SD_down the population sd of the downside subset.
/// `None` when the subset is empty or has zero dispersion.
pub fn sortino(
    r: &ReturnSeries,
    rf: &RiskFreeCurve,
    threshold: DownsideThreshold,
) -> Result<Option<f64>, PerfError> {
    let values = r.values();
    if values.is_empty() {
        return Err(PerfError::InsufficientData {
            name: r.ticker.clone(),
            needed: 1,
            found: 0,
        });
    }
    let rf = daily_risk_free(r, rf)?;
    let downside: Vec<f64> = match threshold {
        DownsideThreshold::Zero => values.iter().copied().filter(|v| *v < 0.0).collect(),
        DownsideThreshold::Rf => values
            .iter()
            .zip(&rf)
            .map(|(v, f)| v - f)
            .filter(|e| *e < 0.0)
            .collect(),
    };
    if downside.is_empty() {
        return Ok(None);
    }
    let dm = mean(&downside);
    let sd_down =
        (downside.iter().map(|v| (v - dm).powi(2)).sum::<f64>() / downside.len() as f64).sqrt();
    Ok((sd_down > 0.0).then(|| (mean(&values) - mean(&rf)) / sd_down))
}

/// Largest peak-to-trough decline in percent, one pass with a running maximum.
pub fn max_drawdown(levels: &[f64]) -> Result<f64, PerfError> {
    if levels.len() < 2 {
        return Err(PerfError::InsufficientData {
            name: "max_drawdown".into(),
            needed: 2,
            found: levels.len(),
        });
    }
    let mut peak = f64::MIN;
    let mut worst = 0.0f64;
    for &p in levels {
        if !(p > 0.0) || !p.is_finite() {
            return Err(PerfError::NonPositiveLevel {
                name: "max_drawdown".into(),
                value: p,
            });
        }
        peak = peak.max(p);
        worst = worst.max((peak - p) / peak);
    }
    Ok(100.0 * worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Omega {
    Finite(f64),
    /// No mass below the threshold.
    Infinite,
    /// Every return equals the threshold.
    Undefined,
}

impl Omega {
    pub fn value(&self) -> Option<f64> {
        match self {
            Omega::Finite(v) => Some(*v),
            Omega::Infinite => Some(f64::INFINITY),
            Omega::Undefined => None,
        }
    }
}

/// Σ max(r − r_f, 0) / Σ max(r_f − r, 0).
pub fn omega(r: &ReturnSeries, rf: &RiskFreeCurve) -> Result<Omega, PerfError> {
    let rf = daily_risk_free(r, rf)?;
    let (mut gains, mut losses) = (0.0, 0.0);
    for ((_, v), f) in r.observations().iter().zip(&rf) {
        let e = v - f;
        if e > 0.0 {
            gains += e;
        } else {
            losses -= e;
        }
    }
    Ok(match (gains > 0.0, losses > 0.0) {
        (_, true) => Omega::Finite(gains / losses),
        (true, false) => Omega::Infinite,
        (false, false) => Omega::Undefined,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerfMetrics {
    pub ticker: String,
    /// Mean daily return, percent.
    pub ret: f64,
    /// Daily standard deviation, decimal.
    pub sd: f64,
    pub skew: Option<f64>,
    /// Raw kurtosis.
    pub kurt: Option<f64>,
    /// Daily decimal intercept against the benchmark; `None` for the benchmark itself.
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub sharpe: Option<f64>,
    pub sortino: Option<f64>,
    /// Percent.
    pub mdd: f64,
    pub omega: Omega,
}

impl PerfMetrics {
    /// `returns` are daily log returns; `levels` the price or index path they came from.
    pub fn compute(
        returns: &ReturnSeries,
        levels: &[f64],
        benchmark: Option<&ReturnSeries>,
        rf: &RiskFreeCurve,
        threshold: DownsideThreshold,
    ) -> Result<Self, PerfError> {
        let m = moments(&returns.values()).map_err(|e| match e {
            PerfError::InsufficientData { needed, found, .. } => PerfError::InsufficientData {
                name: returns.ticker.clone(),
                needed,
                found,
            },
            e => e,
        })?;
        let (alpha, beta) = match benchmark {
            Some(b) => {
                let (a, b) = alpha_beta(returns, b)?;
                (Some(a), Some(b))
            }
            None => (None, None),
        };
        Ok(PerfMetrics {
            ticker: returns.ticker.clone(),
            ret: 100.0 * m.mean,
            sd: m.sd,
            skew: m.skew,
            kurt: m.kurt,
            alpha,
            beta,
            sharpe: sharpe(returns, rf)?,
            sortino: sortino(returns, rf, threshold)?,
            mdd: max_drawdown(levels)?,
            omega: omega(returns, rf)?,
        })
    }
}

fn cell(v: Option<f64>) -> String {
    match v {
        Some(x) if x.is_infinite() => "Inf".to_string(),
        Some(x) => fmt12(x),
        None => "NA".to_string(),
    }
}

/// Panel CSV `ticker,ret,sd,skew,kurt,alpha,beta,sr,sor,mdd,omega`; undefined cells are `NA`.
pub fn write_panel<W: Write>(rows: &[PerfMetrics], mut out: W) -> std::io::Result<()> {
    writeln!(out, "ticker,ret,sd,skew,kurt,alpha,beta,sr,sor,mdd,omega")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.ticker,
            fmt12(r.ret),
            fmt12(r.sd),
            cell(r.skew),
            cell(r.kurt),
            cell(r.alpha),
            cell(r.beta),
            cell(r.sharpe),
            cell(r.sortino),
            fmt12(r.mdd),
            cell(r.omega.value()),
        )?;
    }
    Ok(())
}

/// Scatter CSV `ticker,expense_ratio,mean_daily_return` for rows with a known expense ratio.
pub fn write_expense_scatter<W: Write>(
    rows: &[PerfMetrics],
    reference: &BTreeMap<String, EtfInfo>,
    mut out: W,
) -> std::io::Result<()> {
    writeln!(out, "ticker,expense_ratio,mean_daily_return")?;
    for r in rows {
        if let Some(info) = reference.get(&r.ticker) {
            writeln!(
                out,
                "{},{},{}",
                r.ticker,
                fmt12(info.expense_ratio),
                fmt12(r.ret)
            )?;
        }
    }
    Ok(())
}

/// Levels `base · exp(Σ r)` with the base level prepended.
pub fn levels_from_log_returns(r: &ReturnSeries, base: f64) -> Vec<f64> {
    let mut acc = 0.0;
    std::iter::once(base)
        .chain(r.values().into_iter().map(|v| {
            acc += v;
            base * acc.exp()
        }))
        .collect()
}
