use std::collections::BTreeMap;

use chrono::{Datelike, NaiveDate};
use serde::Serialize;

use super::{IndexError, IndexSeries, IndexSpec, WeightVector};
use crate::corpus::{Cik, ReturnSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum WarningKind {
    /// No return on the first day the year's weights were applied.
    ExcludedAtInception,
    /// Return series ended or gapped mid-year.
    DroppedMidYear,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainWarning {
    pub date: NaiveDate,
    pub cik: Cik,
    pub kind: WarningKind,
}

#[derive(Debug, Clone)]
pub struct ChainOutput {
    pub series: IndexSeries,
    pub warnings: Vec<ChainWarning>,
}

/// Active constituents for the current holding period, renormalized on every change.
struct Holdings {
    year: i32,
    raw: BTreeMap<Cik, f64>,
    normalized: Vec<(Cik, f64)>,
}

impl Holdings {
    fn new(weights: &WeightVector) -> Self {
        let mut h = Holdings {
            year: weights.effective_year,
            raw: weights.entries.clone(),
            normalized: Vec::new(),
        };
        h.renormalize();
        h
    }

    fn renormalize(&mut self) {
        let total: f64 = self.raw.values().sum();
        self.normalized = if total > 0.0 {
            self.raw
                .iter()
                .map(|(c, w)| (c.clone(), w / total))
                .collect()
        } else {
            Vec::new()
        };
    }

    fn drop_missing(
        &mut self,
        date: NaiveDate,
        returns: &BTreeMap<Cik, ReturnSeries>,
        kind: WarningKind,
        warnings: &mut Vec<ChainWarning>,
    ) {
        let missing: Vec<Cik> = self
            .raw
            .keys()
            .filter(|c| returns.get(*c).and_then(|s| s.get(date)).is_none())
            .cloned()
            .collect();
        if missing.is_empty() {
            return;
        }
        for cik in missing {
            log::warn!("{date}: constituent {cik} has no return ({kind:?})");
            self.raw.remove(&cik);
            warnings.push(ChainWarning { date, cik, kind });
        }
        self.renormalize();
    }
}

/// Chains daily levels `I_t = I_{t-1} (1 + Σ w_i r_i)`, where `r_i` are simple
/// returns recovered from the stored log returns.
///
/// `weights_by_year` is keyed by effective year; the vector for year `Y` is
/// held from the first calendar date in `Y`. The base level is set on the
/// first calendar date that has a weight vector; returns apply from the next
/// date on. Constituents missing a return are dropped from that date onward
/// and the rest renormalized; no returns are imputed.
pub fn chain_index(
    spec: &IndexSpec,
    weights_by_year: &BTreeMap<i32, WeightVector>,
    returns: &BTreeMap<Cik, ReturnSeries>,
    calendar: &[NaiveDate],
) -> Result<ChainOutput, IndexError> {
    spec.validate()?;
    if calendar.is_empty() {
        return Err(IndexError::Calendar("empty calendar".into()));
    }
    if let Some(w) = calendar.windows(2).find(|w| w[0] >= w[1]) {
        return Err(IndexError::Calendar(format!(
            "dates not strictly increasing: {} then {}",
            w[0], w[1]
        )));
    }
    let start = calendar
        .iter()
        .position(|d| weights_by_year.contains_key(&d.year()))
        .ok_or_else(|| IndexError::MissingWeights {
            year: calendar[0].year(),
        })?;

    let mut levels = vec![(calendar[start], spec.base_level)];
    let mut daily_returns = vec![(calendar[start], 0.0)];
    let mut warnings = Vec::new();
    let mut holdings: Option<Holdings> = None;
    let mut level = spec.base_level;

    for &date in &calendar[start + 1..] {
        let year = date.year();
        if holdings.as_ref().map(|h| h.year) != Some(year) {
            let weights = weights_by_year
                .get(&year)
                .ok_or(IndexError::MissingWeights { year })?;
            let mut h = Holdings::new(weights);
            h.drop_missing(
                date,
                returns,
                WarningKind::ExcludedAtInception,
                &mut warnings,
            );
            holdings = Some(h);
        } else if let Some(h) = holdings.as_mut() {
            h.drop_missing(date, returns, WarningKind::DroppedMidYear, &mut warnings);
        }
        let h = holdings.as_ref().expect("holdings set above");
        if h.normalized.is_empty() {
            return Err(IndexError::AllConstituentsLost { date });
        }
        let ret: f64 = h
            .normalized
            .iter()
            .map(|(cik, w)| {
                let log_r = returns[cik]
                    .get(date)
                    .expect("missing returns were dropped");
                w * log_r.exp_m1()
            })
            .sum();
        if !(ret > -1.0) {
            return Err(IndexError::NonPositiveLevel { date, ret });
        }
        level *= 1.0 + ret;
        levels.push((date, level));
        daily_returns.push((date, ret));
    }

    Ok(ChainOutput {
        series: IndexSeries {
            spec: spec.clone(),
            levels,
            daily_returns,
        },
        warnings,
    })
}
