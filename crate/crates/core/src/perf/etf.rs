use std::collections::BTreeMap;

use chrono::NaiveDate;
use serde::Deserialize;

/// One row of the bundled AI ETF reference table.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct EtfInfo {
    pub ticker: String,
    pub name: String,
    pub inception: NaiveDate,
    /// Percent per year.
    pub expense_ratio: f64,
    pub assets: u32,
}

const REFERENCE: &str = include_str!("../../data/etf_reference.csv");

/// Bundled reference table keyed by ticker.
pub fn etf_reference() -> BTreeMap<String, EtfInfo> {
    csv::Reader::from_reader(REFERENCE.as_bytes())
        .deserialize::<EtfInfo>()
        .map(|r| {
            let info = r.expect("bundled ETF table parses");
            (info.ticker.clone(), info)
        })
        .collect()
}
