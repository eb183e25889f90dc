use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{Cik, CorpusError, Filing};
use crate::error::{Error, Result};

pub const MANIFEST_FILE: &str = "manifest.csv";
const FILINGS_DIR: &str = "filings";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub cik: Cik,
    pub year: i32,
    pub accession_id: String,
    pub source_uri: String,
    pub sha256: String,
}

/// A corpus directory. Entries are keyed by `(cik, year)` and kept sorted.
#[derive(Debug)]
pub struct Corpus {
    root: PathBuf,
    entries: BTreeMap<(Cik, i32), ManifestEntry>,
}

impl Corpus {
    /// Opens an existing corpus, or an empty one if the directory has no manifest yet.
    pub fn open(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        let manifest = root.join(MANIFEST_FILE);
        let mut entries = BTreeMap::new();
        if manifest.exists() {
            let mut reader = csv::Reader::from_path(&manifest).map_err(|e| layout(&manifest, e))?;
            for rec in reader.deserialize::<ManifestEntry>() {
                let entry = rec.map_err(|e| layout(&manifest, e))?;
                let key = (entry.cik.clone(), entry.year);
                if entries.insert(key, entry.clone()).is_some() {
                    return Err(CorpusError::DuplicateFiling {
                        cik: entry.cik,
                        year: entry.year,
                    }
                    .into());
                }
            }
        }
        Ok(Corpus { root, entries })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn entries(&self) -> impl Iterator<Item = &ManifestEntry> {
        self.entries.values()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn filing_path(&self, cik: &Cik, year: i32) -> PathBuf {
        self.root
            .join(FILINGS_DIR)
            .join(cik.as_str())
            .join(format!("{year}.txt"))
    }

    /// Writes filings and rewrites the manifest. Re-persisting a `(cik, year)`
    /// overwrites it; a batch may not contain the same key twice.
    pub fn persist(&mut self, filings: &[Filing]) -> Result<Vec<ManifestEntry>> {
        let mut seen = std::collections::BTreeSet::new();
        for f in filings {
            if !seen.insert((f.cik.clone(), f.filing_year)) {
                return Err(CorpusError::DuplicateFiling {
                    cik: f.cik.clone(),
                    year: f.filing_year,
                }
                .into());
            }
        }
        let mut written = Vec::with_capacity(filings.len());
        for f in filings {
            let path = self.filing_path(&f.cik, f.filing_year);
            if let Some(dir) = path.parent() {
                fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
            }
            fs::write(&path, f.text.as_bytes()).map_err(|e| Error::io(&path, e))?;
            let entry = ManifestEntry {
                cik: f.cik.clone(),
                year: f.filing_year,
                accession_id: f.accession_id.clone(),
                source_uri: f.source_uri.clone(),
                sha256: sha256_hex(f.text.as_bytes()),
            };
            self.entries
                .insert((f.cik.clone(), f.filing_year), entry.clone());
            written.push(entry);
        }
        self.write_manifest()?;
        Ok(written)
    }

    fn write_manifest(&self) -> Result<()> {
        fs::create_dir_all(&self.root).map_err(|e| Error::io(&self.root, e))?;
        let path = self.root.join(MANIFEST_FILE);
        let mut w = csv::Writer::from_path(&path).map_err(|e| layout(&path, e))?;
        if self.entries.is_empty() {
            w.write_record(["cik", "year", "accession_id", "source_uri", "sha256"])
                .map_err(|e| layout(&path, e))?;
        }
        for entry in self.entries.values() {
            w.serialize(entry).map_err(|e| layout(&path, e))?;
        }
        w.flush().map_err(|e| Error::io(&path, e))?;
        Ok(())
    }

    /// Reads one filing back, verifying its checksum against the manifest.
    pub fn read_filing(&self, cik: &Cik, year: i32) -> Result<Filing> {
        let entry =
            self.entries
                .get(&(cik.clone(), year))
                .ok_or_else(|| CorpusError::MissingFiling {
                    cik: cik.clone(),
                    year,
                })?;
        let path = self.filing_path(cik, year);
        let bytes = fs::read(&path).map_err(|e| Error::io(&path, e))?;
        let digest = sha256_hex(&bytes);
        if digest != entry.sha256 {
            return Err(CorpusError::Layout {
                path: path.display().to_string(),
                message: format!("sha256 mismatch: manifest {} file {digest}", entry.sha256),
            }
            .into());
        }
        let text = String::from_utf8(bytes).map_err(|e| CorpusError::Layout {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Ok(Filing {
            cik: cik.clone(),
            filing_year: year,
            accession_id: entry.accession_id.clone(),
            text,
            source_uri: entry.source_uri.clone(),
        })
    }

    /// All filings in `(cik, year)` order.
    pub fn filings(&self) -> Result<Vec<Filing>> {
        self.entries
            .keys()
            .map(|(cik, year)| self.read_filing(cik, *year))
            .collect()
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn layout(path: &Path, e: impl std::fmt::Display) -> Error {
    CorpusError::Layout {
        path: path.display().to_string(),
        message: e.to_string(),
    }
    .into()
}
