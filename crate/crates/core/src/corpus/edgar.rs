//! Minimal EDGAR client: submissions index lookup plus primary-document download.
//!
//! Requests are serialized through a rate limiter capped at
//! [`MAX_REQUESTS_PER_SECOND`], and every request carries the identifying
//! user agent required by the SEC fair-access policy.

use std::sync::Mutex;
use std::thread;
use std::time::{Duration, Instant};

use chrono::{Datelike, NaiveDate};
use serde::Deserialize;

use super::{clean_filing_bytes, Cik, Corpus, CorpusError, Filing, YearRange};
use crate::error::Result;

/// Environment variable holding the user agent, e.g. `"Jane Doe jane@example.com"`.
pub const USER_AGENT_ENV: &str = "TENK_EDGAR_USER_AGENT";
pub const MAX_REQUESTS_PER_SECOND: u32 = 10;
const ANNUAL_REPORT_FORM: &str = "10-K";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgarEndpoints {
    /// Base of `/submissions/CIK##########.json`.
    pub submissions: String,
    /// Base of `/Archives/edgar/data/...`.
    pub archives: String,
}

impl EdgarEndpoints {
    pub fn sec_gov() -> Self {
        EdgarEndpoints {
            submissions: "https://data.sec.gov".into(),
            archives: "https://www.sec.gov".into(),
        }
    }

    /// Both services behind one base URI (mirrors, test servers).
    pub fn with_base(base: &str) -> Self {
        let base = base.trim_end_matches('/').to_string();
        EdgarEndpoints {
            submissions: base.clone(),
            archives: base,
        }
    }

    fn submissions_url(&self, cik: &Cik) -> String {
        format!("{}/submissions/CIK{}.json", self.submissions, cik)
    }

    fn document_url(&self, cik: &Cik, accession: &str, document: &str) -> String {
        format!(
            "{}/Archives/edgar/data/{}/{}/{}",
            self.archives,
            cik.as_u64(),
            accession.replace('-', ""),
            document
        )
    }
}

#[derive(Debug, Default)]
pub struct FetchOutcome {
    pub filings: Vec<Filing>,
    /// Years in range with no 10-K on record.
    pub gaps: Vec<i32>,
}

#[derive(Deserialize)]
struct Submissions {
    filings: SubmissionFilings,
}

#[derive(Deserialize)]
struct SubmissionFilings {
    // TODO: follow `filings.files` pagination for filers with more than 1,000 filings.
    recent: RecentFilings,
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct RecentFilings {
    accession_number: Vec<String>,
    filing_date: Vec<String>,
    form: Vec<String>,
    primary_document: Vec<String>,
}

struct Candidate {
    year: i32,
    accession: String,
    document: String,
}

pub struct EdgarClient {
    http: reqwest::blocking::Client,
    endpoints: EdgarEndpoints,
    min_interval: Duration,
    last_request: Mutex<Option<Instant>>,
    max_attempts: u32,
    backoff: Duration,
}

impl EdgarClient {
    pub fn new(user_agent: &str, endpoints: EdgarEndpoints) -> Result<Self, CorpusError> {
        if user_agent.trim().is_empty() {
            return Err(CorpusError::Config(format!(
                "EDGAR requires an identifying user agent (set {USER_AGENT_ENV})"
            )));
        }
        let http = reqwest::blocking::Client::builder()
            .user_agent(user_agent.trim())
            .timeout(Duration::from_secs(30))
            .build()
            .map_err(|e| CorpusError::Config(format!("http client: {e}")))?;
        Ok(EdgarClient {
            http,
            endpoints,
            min_interval: Duration::from_secs(1) / MAX_REQUESTS_PER_SECOND,
            last_request: Mutex::new(None),
            max_attempts: 3,
            backoff: Duration::from_millis(500),
        })
    }

    pub fn from_env(endpoints: EdgarEndpoints) -> Result<Self, CorpusError> {
        let ua = std::env::var(USER_AGENT_ENV).unwrap_or_default();
        Self::new(&ua, endpoints)
    }

    pub fn with_retries(mut self, max_attempts: u32, backoff: Duration) -> Self {
        self.max_attempts = max_attempts.max(1);
        self.backoff = backoff;
        self
    }

    /// Downloads every annual 10-K for `cik` filed within `years` and persists
    /// them into `corpus`. Years without a filing are reported as gaps.
    pub fn fetch_filings(
        &self,
        cik: &Cik,
        years: YearRange,
        corpus: &mut Corpus,
    ) -> Result<FetchOutcome> {
        if years.is_empty() {
            return Ok(FetchOutcome::default());
        }
        let index_url = self.endpoints.submissions_url(cik);
        let body = self.get(&index_url).map_err(|m| fetch_err(cik, None, m))?;
        let subs: Submissions = serde_json::from_slice(&body)
            .map_err(|e| fetch_err(cik, None, format!("bad submissions index: {e}")))?;
        let candidates = annual_reports(cik, &subs.filings.recent, years)?;

        let mut outcome = FetchOutcome::default();
        for year in years.years() {
            let Some(c) = candidates.iter().find(|c| c.year == year) else {
                log::info!("CIK {cik}: no 10-K filed in {year}");
                outcome.gaps.push(year);
                continue;
            };
            let url = self.endpoints.document_url(cik, &c.accession, &c.document);
            let raw = self.get(&url).map_err(|m| fetch_err(cik, Some(year), m))?;
            let cleaned = clean_filing_bytes(&raw);
            outcome.filings.push(Filing {
                cik: cik.clone(),
                filing_year: year,
                accession_id: c.accession.clone(),
                text: cleaned.text,
                source_uri: url,
            });
        }
        corpus.persist(&outcome.filings)?;
        Ok(outcome)
    }

    fn throttle(&self) {
        let mut last = self.last_request.lock().expect("rate limiter poisoned");
        if let Some(prev) = *last {
            let next = prev + self.min_interval;
            let now = Instant::now();
            if next > now {
                thread::sleep(next - now);
            }
        }
        *last = Some(Instant::now());
    }

    fn get(&self, url: &str) -> std::result::Result<Vec<u8>, String> {
        let mut last_err = String::new();
        for attempt in 0..self.max_attempts {
            if attempt > 0 {
                thread::sleep(self.backoff * attempt);
            }
            self.throttle();
            match self.http.get(url).send() {
                Ok(resp) if resp.status().is_success() => {
                    return resp.bytes().map(|b| b.to_vec()).map_err(|e| e.to_string());
                }
                Ok(resp) => {
                    let status = resp.status();
                    last_err = format!("GET {url}: HTTP {status}");
                    if !(status.is_server_error() || status.as_u16() == 429) {
                        break;
                    }
                }
                Err(e) => last_err = format!("GET {url}: {e}"),
            }
            log::warn!("{last_err} (attempt {}/{})", attempt + 1, self.max_attempts);
        }
        Err(last_err)
    }
}

fn fetch_err(cik: &Cik, year: Option<i32>, message: String) -> CorpusError {
    CorpusError::Fetch {
        cik: cik.clone(),
        year,
        message,
    }
}

/// Picks one 10-K per filing year. The index lists newest first, so the first
/// hit in a year is the latest-filed report of that year.
fn annual_reports(
    cik: &Cik,
    recent: &RecentFilings,
    years: YearRange,
) -> Result<Vec<Candidate>, CorpusError> {
    let n = recent.form.len();
    if recent.accession_number.len() != n
        || recent.filing_date.len() != n
        || recent.primary_document.len() != n
    {
        return Err(fetch_err(
            cik,
            None,
            "submissions index columns differ in length".into(),
        ));
    }
    let mut out: Vec<Candidate> = Vec::new();
    for i in 0..n {
        if recent.form[i] != ANNUAL_REPORT_FORM {
            continue;
        }
        let date = NaiveDate::parse_from_str(&recent.filing_date[i], "%Y-%m-%d").map_err(|e| {
            fetch_err(
                cik,
                None,
                format!("bad filingDate {:?}: {e}", recent.filing_date[i]),
            )
        })?;
        let year = date.year();
        if years.contains(year) && !out.iter().any(|c| c.year == year) {
            out.push(Candidate {
                year,
                accession: recent.accession_number[i].clone(),
                document: recent.primary_document[i].clone(),
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn url_layout() {
        let ep = EdgarEndpoints::sec_gov();
        let cik = Cik::from(320193u32);
        assert_eq!(
            ep.submissions_url(&cik),
            "https://data.sec.gov/submissions/CIK0000320193.json"
        );
        assert_eq!(
            ep.document_url(&cik, "0000320193-22-000108", "aapl-20220924.htm"),
            "https://www.sec.gov/Archives/edgar/data/320193/000032019322000108/aapl-20220924.htm"
        );
    }

    #[test]
    fn requires_user_agent() {
        assert!(EdgarClient::new("  ", EdgarEndpoints::sec_gov()).is_err());
    }

    #[test]
    fn selects_latest_10k_per_year() {
        let recent = RecentFilings {
            accession_number: vec!["a3".into(), "a2".into(), "a1".into(), "a0".into()],
            filing_date: vec![
                "2022-11-01".into(),
                "2022-02-01".into(),
                "2022-01-15".into(),
                "2021-02-01".into(),
            ],
            form: vec!["10-K".into(), "10-Q".into(), "10-K".into(), "10-K/A".into()],
            primary_document: vec!["d3".into(), "d2".into(), "d1".into(), "d0".into()],
        };
        let got = annual_reports(&Cik::from(1), &recent, YearRange::new(2021, 2022)).unwrap();
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].accession, "a3");
    }
}
