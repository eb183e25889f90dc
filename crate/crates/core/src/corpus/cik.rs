use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::CorpusError;

/// SEC Central Index Key in canonical 10-digit zero-padded form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cik(String);

const CIK_WIDTH: usize = 10;

impl Cik {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Numeric value, as used in EDGAR archive paths.
    pub fn as_u64(&self) -> u64 {
        self.0.parse().expect("canonical CIK is numeric")
    }
}

/// Canonicalizes a numeric identifier to 10 zero-padded digits.
pub fn canonicalize_cik(raw: &str) -> Result<Cik, CorpusError> {
    let trimmed = raw.trim();
    let err = |reason| CorpusError::InvalidCik {
        raw: raw.to_string(),
        reason,
    };
    if trimmed.is_empty() {
        return Err(err("empty"));
    }
    if !trimmed.bytes().all(|b| b.is_ascii_digit()) {
        return Err(err("not a non-negative decimal integer"));
    }
    if trimmed.len() > CIK_WIDTH {
        return Err(err("more than 10 digits"));
    }
    Ok(Cik(format!("{trimmed:0>CIK_WIDTH$}")))
}

impl From<u32> for Cik {
    fn from(n: u32) -> Self {
        Cik(format!("{n:0>CIK_WIDTH$}"))
    }
}

impl TryFrom<u64> for Cik {
    type Error = CorpusError;

    fn try_from(n: u64) -> Result<Self, Self::Error> {
        canonicalize_cik(&n.to_string())
    }
}

impl FromStr for Cik {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        canonicalize_cik(s)
    }
}

impl fmt::Display for Cik {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Serialize for Cik {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Cik {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(d)?;
        canonicalize_cik(&raw).map_err(serde::de::Error::custom)
    }
}
