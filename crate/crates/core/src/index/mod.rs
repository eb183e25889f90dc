//! AI index construction: constituent selection, weighting schemes and
//! daily level chaining with annual rebalancing.
//!
//! Weights computed from filings of year `t` take effect on the first trading
//! day of `t + 1`.

mod chain;
mod io;
mod weights;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Cik, ReturnSeries};
use crate::error::ErrorKind;

pub use chain::{chain_index, ChainOutput, ChainWarning, WarningKind};
pub use io::{read_index_csv, read_weights_csv, write_index_csv, write_weights_csv};
pub use weights::{compute_all_weights, compute_weights, discounted_engagement};

#[derive(Debug, Error)]
pub enum IndexError {
    #[error("no qualifying company for filing year {year}")]
    EmptyIndex { year: i32 },
    #[error("all AI scores are zero for filing year {year}; score weights undefined")]
    DegenerateWeights { year: i32 },
    #[error("calendar error: {0}")]
    Calendar(String),
    #[error("no weight vector effective in {year}")]
    MissingWeights { year: i32 },
    #[error("every constituent lost data by {date}")]
    AllConstituentsLost { date: NaiveDate },
    #[error("index level would become non-positive on {date} (portfolio return {ret})")]
    NonPositiveLevel { date: NaiveDate, ret: f64 },
    #[error("invalid index spec: {0}")]
    InvalidSpec(String),
    #[error("invalid weight vector for {year}: {message}")]
    InvalidWeights { year: i32, message: String },
    #[error("{source_name} row {row}: {message}")]
    Parse {
        source_name: String,
        row: usize,
        message: String,
    },
}

impl IndexError {
    pub fn kind(&self) -> ErrorKind {
        match self {
            IndexError::Calendar(_)
            | IndexError::InvalidSpec(_)
            | IndexError::Parse { .. }
            | IndexError::MissingWeights { .. } => ErrorKind::Data,
            _ => ErrorKind::Computation,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheme {
    /// Equal weights over companies mentioning AI.
    Aii,
    /// Weights proportional to the AI score.
    Saii,
    /// Weights proportional to the discounted dummy history.
    Taii,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum RebalanceRule {
    #[default]
    Annual,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexSpec {
    pub name: String,
    pub scheme: Scheme,
    /// Discount factor on past dummies; only used by TAII.
    pub discount: f64,
    pub base_level: f64,
    pub rebalance: RebalanceRule,
}

pub const DEFAULT_BASE_LEVEL: f64 = 100.0;

impl IndexSpec {
    pub fn aii() -> Self {
        Self::new("AII", Scheme::Aii, 0.0)
    }

    pub fn saii() -> Self {
        Self::new("SAII", Scheme::Saii, 0.0)
    }

    /// TAII with discount `alpha`; 0.5 and 5 get their conventional names.
    pub fn taii(alpha: f64) -> Self {
        let name = if alpha == 0.5 {
            "TAII05".to_string()
        } else if alpha == 5.0 {
            "TAII5X".to_string()
        } else {
            format!("TAII_a{alpha}")
        };
        Self::new(&name, Scheme::Taii, alpha)
    }

    fn new(name: &str, scheme: Scheme, discount: f64) -> Self {
        IndexSpec {
            name: name.to_string(),
            scheme,
            discount,
            base_level: DEFAULT_BASE_LEVEL,
            rebalance: RebalanceRule::Annual,
        }
    }

    /// AII, SAII, TAII05 and TAII5X.
    pub fn standard_set() -> Vec<IndexSpec> {
        vec![Self::aii(), Self::saii(), Self::taii(0.5), Self::taii(5.0)]
    }

    pub fn with_base_level(mut self, base_level: f64) -> Self {
        self.base_level = base_level;
        self
    }

    pub fn validate(&self) -> Result<(), IndexError> {
        if !(self.discount >= 0.0) || !self.discount.is_finite() {
            return Err(IndexError::InvalidSpec(format!(
                "discount {} < 0",
                self.discount
            )));
        }
        if !(self.base_level > 0.0) || !self.base_level.is_finite() {
            return Err(IndexError::InvalidSpec(format!(
                "base level {} <= 0",
                self.base_level
            )));
        }
        Ok(())
    }
}

impl FromStr for IndexSpec {
    type Err = IndexError;

    /// `AII`, `SAII`, `TAII05`, `TAII5X` or `TAII:<alpha>`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let spec = match s.to_ascii_uppercase().as_str() {
            "AII" => Self::aii(),
            "SAII" => Self::saii(),
            "TAII05" => Self::taii(0.5),
            "TAII5X" => Self::taii(5.0),
            other => match other.strip_prefix("TAII:") {
                Some(a) => Self::taii(
                    a.parse()
                        .map_err(|_| IndexError::InvalidSpec(format!("bad discount in {s:?}")))?,
                ),
                None => return Err(IndexError::InvalidSpec(format!("unknown index {s:?}"))),
            },
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl fmt::Display for IndexSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// Weight tolerance on `Σ w = 1`.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightVector {
    /// Calendar year during which these weights are held.
    pub effective_year: i32,
    pub entries: BTreeMap<Cik, f64>,
}

impl WeightVector {
    pub fn new(effective_year: i32, entries: BTreeMap<Cik, f64>) -> Result<Self, IndexError> {
        let wv = WeightVector {
            effective_year,
            entries,
        };
        wv.validate()?;
        Ok(wv)
    }

    pub fn validate(&self) -> Result<(), IndexError> {
        let bad = |message: String| IndexError::InvalidWeights {
            year: self.effective_year,
            message,
        };
        if self.entries.is_empty() {
            return Err(bad("no entries".into()));
        }
        if let Some((cik, w)) = self
            .entries
            .iter()
            .find(|(_, w)| !(**w >= 0.0) || !w.is_finite())
        {
            return Err(bad(format!("weight {w} for {cik}")));
        }
        let sum = self.sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(bad(format!("weights sum to {sum}")));
        }
        Ok(())
    }

    pub fn sum(&self) -> f64 {
        self.entries.values().sum()
    }

    pub fn weight(&self, cik: &Cik) -> f64 {
        self.entries.get(cik).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Daily index levels produced by one weighting scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexSeries {
    pub spec: IndexSpec,
    /// `(date, level)`; the first level is the base level.
    pub levels: Vec<(NaiveDate, f64)>,
    /// `(date, simple portfolio return)`; 0 on the base date.
    pub daily_returns: Vec<(NaiveDate, f64)>,
}

impl IndexSeries {
    /// Daily log returns `ln(I_t / I_{t-1})`, excluding the base date.
    pub fn log_returns(&self) -> ReturnSeries {
        let obs = self
            .levels
            .windows(2)
            .map(|w| (w[1].0, (w[1].1 / w[0].1).ln()))
            .collect();
        ReturnSeries::new(self.spec.name.clone(), obs).expect("index levels are dated and positive")
    }

    pub fn level_values(&self) -> Vec<f64> {
        self.levels.iter().map(|(_, l)| *l).collect()
    }
}
