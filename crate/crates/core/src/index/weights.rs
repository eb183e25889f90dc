use std::collections::{BTreeMap, BTreeSet};

use super::{IndexError, IndexSpec, Scheme, WeightVector};
use crate::corpus::Cik;
use crate::textscore::AiScoreRecord;

/// `Σ_j alpha^j · Θ_{t-j}` over a most-recent-first dummy history, with `0^0 = 1`.
pub fn discounted_engagement(history: &[bool], alpha: f64) -> f64 {
    let mut factor = 1.0;
    let mut total = 0.0;
    for &dummy in history {
        if dummy {
            total += factor;
        }
        factor *= alpha;
    }
    total
}

/// Weights derived from filings of `filing_year`, effective the following year.
/// Records after `filing_year` are ignored.
pub fn compute_weights(
    spec: &IndexSpec,
    records: &[AiScoreRecord],
    filing_year: i32,
) -> Result<WeightVector, IndexError> {
    spec.validate()?;
    let raw: BTreeMap<Cik, f64> = match spec.scheme {
        Scheme::Aii => records
            .iter()
            .filter(|r| r.filing_year == filing_year && r.dummy)
            .map(|r| (r.cik.clone(), 1.0))
            .collect(),
        Scheme::Saii => records
            .iter()
            .filter(|r| r.filing_year == filing_year && r.dummy)
            .map(|r| (r.cik.clone(), r.score))
            .collect(),
        Scheme::Taii => taii_engagement(records, filing_year, spec.discount),
    };
    if raw.is_empty() {
        return Err(IndexError::EmptyIndex { year: filing_year });
    }
    let total: f64 = raw.values().sum();
    if !(total > 0.0) {
        return Err(IndexError::DegenerateWeights { year: filing_year });
    }
    let entries = match spec.scheme {
        Scheme::Aii => {
            let w = 1.0 / raw.len() as f64;
            raw.into_keys().map(|c| (c, w)).collect()
        }
        _ => raw.into_iter().map(|(c, v)| (c, v / total)).collect(),
    };
    WeightVector::new(filing_year + 1, entries)
}

/// Positive discounted engagement per company, using every year on record up
/// to `filing_year`. Missing years count as no mention.
fn taii_engagement(records: &[AiScoreRecord], filing_year: i32, alpha: f64) -> BTreeMap<Cik, f64> {
    let mentions: BTreeSet<(&Cik, i32)> = records
        .iter()
        .filter(|r| r.filing_year <= filing_year && r.dummy)
        .map(|r| (&r.cik, r.filing_year))
        .collect();
    let Some(first_year) = records.iter().map(|r| r.filing_year).min() else {
        return BTreeMap::new();
    };
    let companies: BTreeSet<&Cik> = mentions.iter().map(|(c, _)| *c).collect();
    companies
        .into_iter()
        .filter_map(|cik| {
            let history: Vec<bool> = (first_year..=filing_year)
                .rev()
                .map(|y| mentions.contains(&(cik, y)))
                .collect();
            let d = discounted_engagement(&history, alpha);
            (d > 0.0).then(|| (cik.clone(), d))
        })
        .collect()
}

/// One weight vector per filing year present in `records`, keyed by effective year.
pub fn compute_all_weights(
    spec: &IndexSpec,
    records: &[AiScoreRecord],
) -> Result<BTreeMap<i32, WeightVector>, IndexError> {
    let years: BTreeSet<i32> = records.iter().map(|r| r.filing_year).collect();
    years
        .into_iter()
        .map(|y| compute_weights(spec, records, y).map(|w| (w.effective_year, w)))
        .collect()
}
