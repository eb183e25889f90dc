use std::collections::BTreeMap;
use std::io::{Read, Write};

use chrono::NaiveDate;

use super::{IndexError, IndexSeries, IndexSpec, WeightVector};
use crate::corpus::Cik;
use crate::numfmt::fmt12;

/// `date,level,daily_return`.
pub fn write_index_csv(series: &IndexSeries, out: impl Write) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["date", "level", "daily_return"])?;
    for ((date, level), (_, ret)) in series.levels.iter().zip(&series.daily_returns) {
        w.write_record([date.to_string(), fmt12(*level), fmt12(*ret)])?;
    }
    w.flush()?;
    Ok(())
}

fn parse_err(source: &str, row: usize, message: impl Into<String>) -> IndexError {
    IndexError::Parse {
        source_name: source.to_string(),
        row,
        message: message.into(),
    }
}

fn expect_header(
    reader: &mut csv::Reader<impl Read>,
    source: &str,
    want: &[&str],
) -> Result<(), IndexError> {
    let header = reader
        .headers()
        .map_err(|e| parse_err(source, 1, e.to_string()))?;
    if header.iter().ne(want.iter().copied()) {
        return Err(parse_err(
            source,
            1,
            format!("expected header {}", want.join(",")),
        ));
    }
    Ok(())
}

pub fn read_index_csv(
    spec: IndexSpec,
    input: impl Read,
    source: &str,
) -> Result<IndexSeries, IndexError> {
    let mut reader = csv::Reader::from_reader(input);
    expect_header(&mut reader, source, &["date", "level", "daily_return"])?;
    let mut levels = Vec::new();
    let mut daily_returns = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let row = i + 2;
        let rec = rec.map_err(|e| parse_err(source, row, e.to_string()))?;
        if rec.len() != 3 {
            return Err(parse_err(source, row, "expected 3 fields"));
        }
        let date: NaiveDate = rec[0]
            .parse()
            .map_err(|_| parse_err(source, row, "bad date"))?;
        let level: f64 = rec[1]
            .parse()
            .map_err(|_| parse_err(source, row, "bad level"))?;
        let ret: f64 = rec[2]
            .parse()
            .map_err(|_| parse_err(source, row, "bad return"))?;
        if !(level > 0.0) {
            return Err(parse_err(source, row, "non-positive level"));
        }
        if levels.last().is_some_and(|(d, _)| *d >= date) {
            return Err(parse_err(source, row, "dates not increasing"));
        }
        levels.push((date, level));
        daily_returns.push((date, ret));
    }
    Ok(IndexSeries {
        spec,
        levels,
        daily_returns,
    })
}

/// `year,cik,weight`, ordered by year then CIK.
pub fn write_weights_csv(
    weights: &BTreeMap<i32, WeightVector>,
    out: impl Write,
) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["year", "cik", "weight"])?;
    for (year, wv) in weights {
        for (cik, weight) in &wv.entries {
            w.write_record([year.to_string(), cik.to_string(), fmt12(*weight)])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads weights back. Sums are checked at the 12-digit precision of the file.
pub fn read_weights_csv(
    input: impl Read,
    source: &str,
) -> Result<BTreeMap<i32, WeightVector>, IndexError> {
    let mut reader = csv::Reader::from_reader(input);
    expect_header(&mut reader, source, &["year", "cik", "weight"])?;
    let mut grouped: BTreeMap<i32, BTreeMap<Cik, f64>> = BTreeMap::new();
    for (i, rec) in reader.records().enumerate() {
        let row = i + 2;
        let rec = rec.map_err(|e| parse_err(source, row, e.to_string()))?;
        if rec.len() != 3 {
            return Err(parse_err(source, row, "expected 3 fields"));
        }
        let year: i32 = rec[0]
            .parse()
            .map_err(|_| parse_err(source, row, "bad year"))?;
        let cik: Cik = rec[1]
            .parse()
            .map_err(|e| parse_err(source, row, format!("{e}")))?;
        let weight: f64 = rec[2]
            .parse()
            .map_err(|_| parse_err(source, row, "bad weight"))?;
        if !(weight >= 0.0) {
            return Err(parse_err(source, row, "negative weight"));
        }
        if grouped
            .entry(year)
            .or_default()
            .insert(cik, weight)
            .is_some()
        {
            return Err(parse_err(source, row, "duplicate (year, cik)"));
        }
    }
    grouped
        .into_iter()
        .map(|(year, entries)| {
            let sum: f64 = entries.values().sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(IndexError::InvalidWeights {
                    year,
                    message: format!("weights sum to {sum}"),
                });
            }
            Ok((
                year,
                WeightVector {
                    effective_year: year,
                    entries,
                },
            ))
        })
        .collect()
}
