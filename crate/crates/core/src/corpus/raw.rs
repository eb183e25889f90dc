use std::fs;
use std::path::{Path, PathBuf};

use super::{clean_filing_bytes, Cik, CorpusError, Filing};

/// Reads locally saved filings laid out as `<dir>/<cik>/<year>.{html,htm,txt}`.
/// Files are cleaned like fetched ones and returned sorted by path.
pub fn read_raw_dir(dir: &Path) -> Result<Vec<Filing>, CorpusError> {
    let layout = |path: &Path, message: String| CorpusError::Layout {
        path: path.display().to_string(),
        message,
    };
    let list = |p: &Path| -> Result<Vec<PathBuf>, CorpusError> {
        let mut out = Vec::new();
        for entry in fs::read_dir(p).map_err(|e| layout(p, e.to_string()))? {
            out.push(entry.map_err(|e| layout(p, e.to_string()))?.path());
        }
        Ok(out)
    };
    let mut paths = Vec::new();
    for company in list(dir)? {
        if company.is_dir() {
            paths.extend(list(&company)?.into_iter().filter(|p| {
                matches!(
                    p.extension().and_then(|e| e.to_str()),
                    Some("html" | "htm" | "txt")
                )
            }));
        }
    }
    paths.sort();

    let mut filings = Vec::with_capacity(paths.len());
    for path in paths {
        let rel = path.strip_prefix(dir).unwrap_or(&path).to_path_buf();
        let cik: Cik = path
            .parent()
            .and_then(|p| p.file_name())
            .and_then(|n| n.to_str())
            .unwrap_or_default()
            .parse()
            .map_err(|e: CorpusError| layout(&rel, format!("company directory: {e}")))?;
        let year: i32 = path
            .file_stem()
            .and_then(|s| s.to_str())
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| layout(&rel, "file name is not a year".into()))?;
        if filings
            .iter()
            .any(|f: &Filing| f.cik == cik && f.filing_year == year)
        {
            return Err(CorpusError::DuplicateFiling { cik, year });
        }
        let raw = fs::read(&path).map_err(|e| layout(&rel, e.to_string()))?;
        let cleaned = clean_filing_bytes(&raw);
        if cleaned.replacements > 0 {
            log::warn!(
                "{}: {} undecodable sequences replaced",
                rel.display(),
                cleaned.replacements
            );
        }
        filings.push(Filing {
            cik,
            filing_year: year,
            accession_id: "offline".into(),
            text: cleaned.text,
            source_uri: format!("file:{}", rel.display()),
        });
    }
    Ok(filings)
}
