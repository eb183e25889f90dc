use super::{ScoreError, TokenizedDoc};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenPattern {
    Exact(String),
    /// `prefix*`
    Prefix(String),
}

impl TokenPattern {
    fn matches(&self, token: &str) -> bool {
        match self {
            TokenPattern::Exact(s) => token == s,
            TokenPattern::Prefix(p) => token.starts_with(p.as_str()),
        }
    }
}

/// A keyword: one or more consecutive token patterns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchRule {
    pub name: String,
    pub patterns: Vec<TokenPattern>,
}

impl MatchRule {
    /// Parses `artificial intelligen*` style rules.
    pub fn parse(rule: &str) -> Result<Self, ScoreError> {
        let patterns: Vec<TokenPattern> = rule
            .split_whitespace()
            .map(|p| {
                let p = p.to_lowercase();
                match p.strip_suffix('*') {
                    Some(prefix) if !prefix.is_empty() => TokenPattern::Prefix(prefix.to_string()),
                    Some(_) => TokenPattern::Exact(p),
                    None => TokenPattern::Exact(p),
                }
            })
            .collect();
        if patterns.is_empty() {
            return Err(ScoreError::InvalidKeywords(format!("empty rule {rule:?}")));
        }
        let name = rule
            .split_whitespace()
            .collect::<Vec<_>>()
            .join(" ")
            .to_lowercase();
        Ok(MatchRule { name, patterns })
    }

    fn matches_at(&self, tokens: &[String], at: usize) -> bool {
        tokens.len() - at >= self.patterns.len()
            && self
                .patterns
                .iter()
                .zip(&tokens[at..])
                .all(|(p, t)| p.matches(t))
    }
}

/// Ordered keyword rules; earlier rules win when two match at the same position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeywordSet {
    rules: Vec<MatchRule>,
}

impl Default for KeywordSet {
    fn default() -> Self {
        Self::parse("artificial intelligen*; ai; a.i.").expect("default keywords parse")
    }
}

impl KeywordSet {
    pub fn new(rules: Vec<MatchRule>) -> Result<Self, ScoreError> {
        if rules.is_empty() {
            return Err(ScoreError::InvalidKeywords("no keyword rules".into()));
        }
        Ok(KeywordSet { rules })
    }

    /// Rules separated by `;`, tokens within a rule by whitespace, `*` suffix = prefix match.
    pub fn parse(spec: &str) -> Result<Self, ScoreError> {
        let rules = spec
            .split(';')
            .filter(|r| !r.trim().is_empty())
            .map(MatchRule::parse)
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(rules)
    }

    pub fn rules(&self) -> &[MatchRule] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeywordCounts {
    pub total: u64,
    /// Parallel to [`KeywordSet::rules`].
    pub per_rule: Vec<u64>,
}

/// Counts keyword occurrences scanning left to right; a matched token is never reused.
pub fn count_keywords(doc: &TokenizedDoc, kw: &KeywordSet) -> KeywordCounts {
    let tokens = &doc.tokens;
    let mut per_rule = vec![0u64; kw.rules.len()];
    let mut i = 0;
    while i < tokens.len() {
        match kw.rules.iter().position(|r| r.matches_at(tokens, i)) {
            Some(k) => {
                per_rule[k] += 1;
                i += kw.rules[k].patterns.len();
            }
            None => i += 1,
        }
    }
    KeywordCounts {
        total: per_rule.iter().sum(),
        per_rule,
    }
}
