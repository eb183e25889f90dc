//! Text-based AI exposure scoring of 10-K filings, thematic index
//! construction, and the event-study, regression and performance analytics
//! used to evaluate those indices.
//!
//! Modules follow the pipeline order: [`corpus`] (filings, prices) →
//! [`textscore`] (tokens, TF-IDF scores) → [`index`] (weights, chained levels)
//! → [`eventstudy`], [`regress`], [`perf`].

// `!(x > 0.0)` is used on purpose so NaN fails validation too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod corpus;
pub mod error;
pub mod eventstudy;
pub mod index;
pub mod numfmt;
pub mod perf;
pub mod regress;
pub mod textscore;

pub use corpus::{Cik, Filing, ReturnSeries, RiskFreeCurve, YearRange};
pub use error::{Error, ErrorKind, Result};
pub use index::{IndexSeries, IndexSpec, Scheme, WeightVector};
pub use textscore::{AiScoreRecord, KeywordSet, TokenizedDoc};
