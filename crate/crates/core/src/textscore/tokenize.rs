use crate::corpus::Cik;

/// A lowercased token stream for one company-year filing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenizedDoc {
    pub cik: Cik,
    pub filing_year: i32,
    pub tokens: Vec<String>,
}

impl TokenizedDoc {
    pub fn new(cik: Cik, filing_year: i32, text: &str) -> Self {
        TokenizedDoc {
            cik,
            filing_year,
            tokens: tokenize(text),
        }
    }

    /// Total token count of the document.
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

fn is_token_char(c: char) -> bool {
    c.is_alphanumeric() && !c.is_uppercase()
}

/// Splits lowercased text on whitespace and punctuation.
///
/// Runs of single letters joined by periods (`a.i.`, `u.s.`) stay one token,
/// trailing period included when present. Everything else is a maximal run of
/// alphanumeric characters.
pub fn tokenize(text: &str) -> Vec<String> {
    let lower = text.to_lowercase();
    let chars: Vec<char> = lower.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        if !is_token_char(chars[i]) {
            i += 1;
            continue;
        }
        let end = dotted_letters(&chars, i).unwrap_or_else(|| {
            let mut j = i;
            while j < chars.len() && is_token_char(chars[j]) {
                j += 1;
            }
            j
        });
        tokens.push(chars[i..end].iter().collect());
        i = end;
    }
    tokens
}

/// End of a `l.l[.l...][.]` sequence of at least two single letters starting at `start`.
fn dotted_letters(chars: &[char], start: usize) -> Option<usize> {
    let single_letter = |i: usize| {
        i < chars.len()
            && chars[i].is_alphabetic()
            && is_token_char(chars[i])
            && !chars.get(i + 1).is_some_and(|&c| is_token_char(c))
    };
    let mut i = start;
    let mut letters = 0;
    while single_letter(i) {
        letters += 1;
        i += 1;
        if chars.get(i) == Some(&'.') {
            i += 1;
        } else {
            break;
        }
    }
    if letters >= 2 {
        // A period that is not followed by another letter was consumed as the
        // trailing period, which is part of the token.
        Some(i)
    } else {
        None
    }
}
