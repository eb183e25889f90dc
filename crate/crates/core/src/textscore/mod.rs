//! Keyword matching and TF-IDF AI scores per company-year.
//!
//! The IDF corpus for a filing is every filing made in the same calendar year,
//! and a document's score is the sum of its per-keyword TF-IDF values divided
//! by its token count.

mod keywords;
mod tokenize;

use std::collections::{BTreeMap, HashMap};
use std::io::{Read, Write};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::corpus::{Cik, Filing};
use crate::error::ErrorKind;
use crate::numfmt::fmt12;

pub use keywords::{count_keywords, KeywordCounts, KeywordSet, MatchRule, TokenPattern};
pub use tokenize::{tokenize, TokenizedDoc};

#[derive(Debug, Error)]
pub enum ScoreError {
    #[error("empty document (CIK {cik}, year {year})")]
    EmptyDocument { cik: Cik, year: i32 },
    #[error("term present {term_count} times but document frequency is 0")]
    Contradiction { term_count: u64 },
    #[error("invalid tf-idf input: {0}")]
    Domain(String),
    #[error("mixed filing years in one scoring corpus: {0} and {1}")]
    MixedYears(i32, i32),
    #[error("empty scoring corpus")]
    EmptyCorpus,
    #[error("duplicate document for CIK {cik} in {year}")]
    DuplicateDocument { cik: Cik, year: i32 },
    #[error("invalid keyword set: {0}")]
    InvalidKeywords(String),
    #[error("scores file row {row}: {message}")]
    Parse { row: usize, message: String },
}

impl ScoreError {
    pub fn kind(&self) -> ErrorKind {
        match self {
            ScoreError::Contradiction { .. } | ScoreError::Domain(_) => ErrorKind::Computation,
            _ => ErrorKind::Data,
        }
    }
}

/// Per company-year AI engagement metrics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AiScoreRecord {
    pub cik: Cik,
    pub filing_year: i32,
    /// Total keyword occurrences.
    pub keyword_count: u64,
    /// Occurrences of the most common token.
    pub max_word_freq: u64,
    /// Whether any keyword occurs.
    pub dummy: bool,
    /// Length-normalized summed TF-IDF.
    pub score: f64,
}

/// Denominator applied to the summed TF-IDF.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScoreNormalization {
    /// Divide by the document's token count.
    #[default]
    TokenCount,
    /// Divide by the count of the most frequent token instead.
    MostFrequentWord,
}

/// Occurrence count of the most common token.
pub fn max_word_freq(doc: &TokenizedDoc) -> Result<u64, ScoreError> {
    let mut counts: HashMap<&str, u64> = HashMap::new();
    for t in &doc.tokens {
        *counts.entry(t.as_str()).or_default() += 1;
    }
    counts
        .into_values()
        .max()
        .ok_or_else(|| ScoreError::EmptyDocument {
            cik: doc.cik.clone(),
            year: doc.filing_year,
        })
}

/// `TF × IDF` with `TF = term_count / doc.len()` and `IDF = ln(corpus_size / doc_freq)`.
pub fn tfidf(
    term_count: u64,
    doc: &TokenizedDoc,
    doc_freq: usize,
    corpus_size: usize,
) -> Result<f64, ScoreError> {
    if corpus_size == 0 {
        return Err(ScoreError::Domain("corpus size must be at least 1".into()));
    }
    if doc_freq > corpus_size {
        return Err(ScoreError::Domain(format!(
            "document frequency {doc_freq} exceeds corpus size {corpus_size}"
        )));
    }
    if term_count as usize > doc.len() {
        return Err(ScoreError::Domain(format!(
            "term count {term_count} exceeds document length {}",
            doc.len()
        )));
    }
    if term_count == 0 {
        return Ok(0.0);
    }
    if doc_freq == 0 {
        return Err(ScoreError::Contradiction { term_count });
    }
    let tf = term_count as f64 / doc.len() as f64;
    let idf = (corpus_size as f64 / doc_freq as f64).ln();
    Ok(tf * idf)
}

/// Scores all filings of one calendar year against each other.
pub fn score_year(
    docs: &[TokenizedDoc],
    kw: &KeywordSet,
) -> Result<Vec<AiScoreRecord>, ScoreError> {
    score_year_with(docs, kw, ScoreNormalization::TokenCount)
}

pub fn score_year_with(
    docs: &[TokenizedDoc],
    kw: &KeywordSet,
    norm: ScoreNormalization,
) -> Result<Vec<AiScoreRecord>, ScoreError> {
    let first = docs.first().ok_or(ScoreError::EmptyCorpus)?;
    let year = first.filing_year;
    let mut order: Vec<usize> = (0..docs.len()).collect();
    order.sort_by(|&a, &b| docs[a].cik.cmp(&docs[b].cik));
    for w in order.windows(2) {
        if docs[w[0]].cik == docs[w[1]].cik {
            return Err(ScoreError::DuplicateDocument {
                cik: docs[w[0]].cik.clone(),
                year,
            });
        }
    }
    for d in docs {
        if d.filing_year != year {
            return Err(ScoreError::MixedYears(year, d.filing_year));
        }
        if d.is_empty() {
            return Err(ScoreError::EmptyDocument {
                cik: d.cik.clone(),
                year,
            });
        }
    }

    let counts: Vec<KeywordCounts> = docs.par_iter().map(|d| count_keywords(d, kw)).collect();
    // Barrier: document frequencies need every document of the year.
    let mut doc_freq = vec![0usize; kw.len()];
    for c in &counts {
        for (df, &n) in doc_freq.iter_mut().zip(&c.per_rule) {
            *df += usize::from(n > 0);
        }
    }

    order
        .into_iter()
        .map(|i| {
            let doc = &docs[i];
            let c = &counts[i];
            let mut summed = 0.0;
            for (&n, &df) in c.per_rule.iter().zip(&doc_freq) {
                summed += tfidf(n, doc, df, docs.len())?;
            }
            let max_freq = max_word_freq(doc)?;
            let denom = match norm {
                ScoreNormalization::TokenCount => doc.len() as f64,
                ScoreNormalization::MostFrequentWord => max_freq as f64,
            };
            Ok(AiScoreRecord {
                cik: doc.cik.clone(),
                filing_year: year,
                keyword_count: c.total,
                max_word_freq: max_freq,
                dummy: c.total > 0,
                score: summed / denom,
            })
        })
        .collect()
}

/// Tokenizes and scores a whole corpus, one IDF corpus per filing year.
/// Output is ordered by `(cik, year)`.
pub fn score_filings(
    filings: &[Filing],
    kw: &KeywordSet,
    norm: ScoreNormalization,
) -> Result<Vec<AiScoreRecord>, ScoreError> {
    let mut by_year: BTreeMap<i32, Vec<&Filing>> = BTreeMap::new();
    for f in filings {
        by_year.entry(f.filing_year).or_default().push(f);
    }
    let mut out = Vec::with_capacity(filings.len());
    for (_, group) in by_year {
        let docs: Vec<TokenizedDoc> = group
            .par_iter()
            .map(|f| TokenizedDoc::new(f.cik.clone(), f.filing_year, &f.text))
            .collect();
        out.extend(score_year_with(&docs, kw, norm)?);
    }
    out.sort_by(|a, b| (&a.cik, a.filing_year).cmp(&(&b.cik, b.filing_year)));
    Ok(out)
}

/// Number of filings with a positive AI dummy, per year. Years that have
/// records but no mentions map to 0.
pub fn mentions_per_year(records: &[AiScoreRecord]) -> BTreeMap<i32, usize> {
    let mut out = BTreeMap::new();
    for r in records {
        *out.entry(r.filing_year).or_insert(0) += usize::from(r.dummy);
    }
    out
}

const SCORES_HEADER: [&str; 6] = [
    "cik",
    "year",
    "keyword_count",
    "max_word_freq",
    "dummy",
    "score",
];

/// Writes the scores CSV, rows ordered by `(cik, year)`.
pub fn write_scores(records: &[AiScoreRecord], out: impl Write) -> csv::Result<()> {
    let mut sorted: Vec<&AiScoreRecord> = records.iter().collect();
    sorted.sort_by(|a, b| (&a.cik, a.filing_year).cmp(&(&b.cik, b.filing_year)));
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SCORES_HEADER)?;
    for r in sorted {
        w.write_record([
            r.cik.to_string(),
            r.filing_year.to_string(),
            r.keyword_count.to_string(),
            r.max_word_freq.to_string(),
            r.dummy.to_string(),
            fmt12(r.score),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_scores(input: impl Read) -> Result<Vec<AiScoreRecord>, ScoreError> {
    let mut reader = csv::Reader::from_reader(input);
    let perr = |row: usize, message: String| ScoreError::Parse { row, message };
    let header = reader.headers().map_err(|e| perr(1, e.to_string()))?;
    if header.iter().ne(SCORES_HEADER) {
        return Err(perr(
            1,
            format!("expected header {}", SCORES_HEADER.join(",")),
        ));
    }
    let mut out = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let row = i + 2;
        let rec = rec.map_err(|e| perr(row, e.to_string()))?;
        let field = |k: usize| {
            rec.get(k)
                .ok_or_else(|| perr(row, format!("missing column {k}")))
        };
        let cik: Cik = field(0)?.parse().map_err(|e| perr(row, format!("{e}")))?;
        let parse_err = |what: &str| perr(row, format!("bad {what}"));
        let record = AiScoreRecord {
            cik,
            filing_year: field(1)?.parse().map_err(|_| parse_err("year"))?,
            keyword_count: field(2)?.parse().map_err(|_| parse_err("keyword_count"))?,
            max_word_freq: field(3)?.parse().map_err(|_| parse_err("max_word_freq"))?,
            dummy: field(4)?.parse().map_err(|_| parse_err("dummy"))?,
            score: field(5)?.parse().map_err(|_| parse_err("score"))?,
        };
        if record.dummy != (record.keyword_count > 0)
            || !(record.score >= 0.0)
            || (record.keyword_count == 0 && record.score != 0.0)
        {
            return Err(perr(row, "record violates dummy/score invariants".into()));
        }
        out.push(record);
    }
    Ok(out)
}

pub fn write_mentions(mentions: &BTreeMap<i32, usize>, out: impl Write) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["year", "filings_mentioning_ai"])?;
    for (year, n) in mentions {
        w.write_record([year.to_string(), n.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn doc(cik: u32, year: i32, tokens: &[&str]) -> TokenizedDoc {
        TokenizedDoc {
            cik: Cik::from(cik),
            filing_year: year,
            tokens: tokens.iter().map(|s| s.to_string()).collect(),
        }
    }

    #[test]
    fn max_freq() {
        assert_eq!(max_word_freq(&doc(1, 2021, &["a", "b", "a"])).unwrap(), 2);
        assert_eq!(max_word_freq(&doc(1, 2021, &["x"])).unwrap(), 1);
        assert!(max_word_freq(&doc(1, 2021, &[])).is_err());
    }

    #[test]
    fn tfidf_two_doc_corpus() {
        let d1 = doc(1, 2021, &["ai", "growth"]);
        let v = tfidf(1, &d1, 1, 2).unwrap();
        assert!((v - 0.5 * 2f64.ln()).abs() < 1e-15);
        assert!((v - 0.346574).abs() < 1e-6);
        assert_eq!(tfidf(0, &d1, 0, 2).unwrap(), 0.0);
        assert_eq!(tfidf(1, &d1, 2, 2).unwrap(), 0.0);
        assert!(matches!(
            tfidf(1, &d1, 0, 2),
            Err(ScoreError::Contradiction { .. })
        ));
        assert!(tfidf(3, &d1, 1, 2).is_err());
        assert!(tfidf(1, &d1, 3, 2).is_err());
        assert!(tfidf(1, &d1, 1, 0).is_err());
    }

    #[test]
    fn score_year_two_docs() {
        let kw = KeywordSet::default();
        let recs = score_year(
            &[
                doc(1, 2021, &["ai", "growth"]),
                doc(2, 2021, &["growth", "revenue"]),
            ],
            &kw,
        )
        .unwrap();
        assert!((recs[0].score - 0.5 * 2f64.ln() / 2.0).abs() < 1e-15);
        assert!((recs[0].score - 0.173287).abs() < 1e-6);
        assert!(recs[0].dummy);
        assert_eq!(recs[1].score, 0.0);
        assert!(!recs[1].dummy);
    }

    #[test]
    fn single_doc_year_degenerates() {
        let recs = score_year(
            &[doc(1, 2021, &["we", "use", "ai"])],
            &KeywordSet::default(),
        )
        .unwrap();
        assert_eq!(recs[0].score, 0.0);
        assert!(recs[0].dummy);
        assert_eq!(recs[0].keyword_count, 1);
    }

    #[test]
    fn keyword_free_year() {
        let recs = score_year(
            &[doc(1, 2021, &["x"]), doc(2, 2021, &["y", "z"])],
            &KeywordSet::default(),
        )
        .unwrap();
        assert!(recs.iter().all(|r| r.score == 0.0 && !r.dummy));
    }

    #[test]
    fn score_year_errors() {
        let kw = KeywordSet::default();
        assert!(matches!(score_year(&[], &kw), Err(ScoreError::EmptyCorpus)));
        assert!(matches!(
            score_year(&[doc(1, 2021, &["a"]), doc(2, 2022, &["a"])], &kw),
            Err(ScoreError::MixedYears(2021, 2022))
        ));
        assert!(matches!(
            score_year(&[doc(1, 2021, &["a"]), doc(1, 2021, &["b"])], &kw),
            Err(ScoreError::DuplicateDocument { .. })
        ));
        assert!(matches!(
            score_year(&[doc(1, 2021, &[])], &kw),
            Err(ScoreError::EmptyDocument { .. })
        ));
    }

    #[test]
    fn most_frequent_word_normalization() {
        let docs = [
            doc(1, 2021, &["ai", "the", "the", "x"]),
            doc(2, 2021, &["y"]),
        ];
        let kw = KeywordSet::default();
        let by_len = score_year(&docs, &kw).unwrap();
        let by_max = score_year_with(&docs, &kw, ScoreNormalization::MostFrequentWord).unwrap();
        assert_eq!(by_max[0].max_word_freq, 2);
        assert!((by_max[0].score - by_len[0].score * 4.0 / 2.0).abs() < 1e-15);
    }

    #[test]
    fn mentions() {
        let mut recs = Vec::new();
        for (i, dummy) in [true, false, true, true, false].into_iter().enumerate() {
            recs.push(AiScoreRecord {
                cik: Cik::from(i as u32),
                filing_year: 2021,
                keyword_count: u64::from(dummy),
                max_word_freq: 1,
                dummy,
                score: 0.0,
            });
        }
        assert_eq!(mentions_per_year(&recs), BTreeMap::from([(2021, 3)]));
        assert!(mentions_per_year(&[]).is_empty());
    }

    #[test]
    fn scores_csv_round_trip() {
        let recs = score_year(
            &[
                doc(2, 2021, &["ai", "growth"]),
                doc(1, 2021, &["growth", "revenue"]),
            ],
            &KeywordSet::default(),
        )
        .unwrap();
        let mut buf = Vec::new();
        write_scores(&recs, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(
            text,
            "cik,year,keyword_count,max_word_freq,dummy,score\n\
             0000000001,2021,0,1,false,0\n\
             0000000002,2021,1,1,true,0.17328679514\n"
        );
        let back = read_scores(buf.as_slice()).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back[1].keyword_count, 1);
        assert!(read_scores("cik,year\n".as_bytes()).is_err());
    }

    fn arb_doc(cik: u32) -> impl Strategy<Value = TokenizedDoc> {
        prop::collection::vec(
            prop::sample::select(vec![
                "ai",
                "a.i.",
                "artificial",
                "intelligence",
                "x",
                "y",
                "growth",
            ]),
            1..40,
        )
        .prop_map(move |toks| doc(cik, 2021, &toks))
    }

    proptest! {
        #[test]
        fn record_invariants(docs in (1u32..6).prop_flat_map(|n| (0..n).map(arb_doc).collect::<Vec<_>>())) {
            let recs = score_year(&docs, &KeywordSet::default()).unwrap();
            for r in &recs {
                prop_assert_eq!(r.dummy, r.keyword_count > 0);
                prop_assert!(r.score >= 0.0);
                if r.keyword_count == 0 {
                    prop_assert_eq!(r.score, 0.0);
                }
            }
        }

        #[test]
        fn permutation_invariant(
            docs in (2u32..6).prop_flat_map(|n| (0..n).map(arb_doc).collect::<Vec<_>>()),
            seed in any::<u64>(),
        ) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let kw = KeywordSet::default();
            let a = score_year(&docs, &kw).unwrap();
            let mut shuffled = docs.clone();
            shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            prop_assert_eq!(a, score_year(&shuffled, &kw).unwrap());
        }

        #[test]
        fn doubling_a_document_halves_its_score(
            docs in (2u32..6).prop_flat_map(|n| (0..n).map(arb_doc).collect::<Vec<_>>()),
        ) {
            // A trailing "artificial" would pair with a leading token across the seam.
            prop_assume!(docs[0].tokens.last().map(String::as_str) != Some("artificial"));
            let kw = KeywordSet::default();
            let base = score_year(&docs, &kw).unwrap();
            let mut doubled = docs.clone();
            let extra = doubled[0].tokens.clone();
            doubled[0].tokens.extend(extra);
            let after = score_year(&doubled, &kw).unwrap();
            let idx = base.iter().position(|r| r.cik == docs[0].cik).unwrap();
            let want = base[idx].score / 2.0;
            prop_assert!((after[idx].score - want).abs() <= 1e-15 * want.abs().max(1.0));
            for (b, a) in base.iter().zip(&after) {
                if b.cik != docs[0].cik {
                    prop_assert_eq!(b.score, a.score);
                }
            }
        }
    }
}
