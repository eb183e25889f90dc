//! Markup-to-plain-text conversion for filing documents.

use std::borrow::Cow;

/// Output of [`clean_filing_bytes`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CleanedText {
    pub text: String,
    /// Number of undecodable byte sequences replaced with U+FFFD.
    pub replacements: usize,
}

/// Elements that render inline; removing them must not split the surrounding word.
const INLINE_TAGS: &[&str] = &[
    "a",
    "abbr",
    "b",
    "big",
    "cite",
    "code",
    "del",
    "em",
    "font",
    "i",
    "ins",
    "kbd",
    "mark",
    "q",
    "s",
    "samp",
    "small",
    "span",
    "strike",
    "strong",
    "sub",
    "sup",
    "tt",
    "u",
    "var",
    "ix:nonfraction",
    "ix:nonnumeric",
];

/// Elements whose content is never text.
const SKIPPED_ELEMENTS: &[&str] = &["script", "style", "head", "title"];

/// Cleans raw bytes, substituting undecodable sequences rather than failing.
pub fn clean_filing_bytes(raw: &[u8]) -> CleanedText {
    let replacements = raw
        .utf8_chunks()
        .filter(|c| !c.invalid().is_empty())
        .count();
    let decoded = String::from_utf8_lossy(raw);
    if replacements > 0 {
        log::warn!("replaced {replacements} undecodable byte sequence(s)");
    }
    CleanedText {
        text: clean_filing_text(&decoded),
        replacements,
    }
}

/// Strips markup, decodes entities and collapses whitespace runs.
///
/// The pass is repeated until the text stops changing, so that entity-encoded
/// markup (`&lt;b&gt;`) cannot survive as a tag and the function is idempotent.
/// Every changing pass shortens the text, which bounds the loop.
pub fn clean_filing_text(raw: &str) -> String {
    let mut current = clean_once(raw);
    loop {
        let next = clean_once(&current);
        if next == current {
            return current;
        }
        debug_assert!(next.len() < current.len());
        current = next;
    }
}

fn clean_once(raw: &str) -> String {
    let stripped = strip_tags(raw);
    let decoded = html_escape::decode_html_entities(&stripped);
    collapse_whitespace(&decoded)
}

fn collapse_whitespace(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for word in s.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(word);
    }
    out
}

fn is_tag_start(next: Option<char>) -> bool {
    matches!(next, Some(c) if c.is_ascii_alphabetic() || c == '/' || c == '!' || c == '?')
}

fn strip_tags(raw: &str) -> Cow<'_, str> {
    if !raw.contains('<') {
        return Cow::Borrowed(raw);
    }
    let mut out = String::with_capacity(raw.len());
    let mut rest = raw;
    while let Some(lt) = rest.find('<') {
        out.push_str(&rest[..lt]);
        let tail = &rest[lt..];
        if !is_tag_start(tail[1..].chars().next()) {
            out.push('<');
            rest = &tail[1..];
            continue;
        }
        if let Some(body) = tail.strip_prefix("<!--") {
            rest = match body.find("-->") {
                Some(end) => &body[end + 3..],
                None => "",
            };
            out.push(' ');
            continue;
        }
        let Some(gt) = tail.find('>') else {
            // Unterminated tag: keep the text literally.
            out.push_str(tail);
            rest = "";
            break;
        };
        let inner = &tail[1..gt];
        let name = tag_name(inner);
        rest = &tail[gt + 1..];
        let closing = inner.starts_with('/');
        if !closing && !inner.ends_with('/') && SKIPPED_ELEMENTS.contains(&name.as_str()) {
            rest = skip_element(rest, &name);
            out.push(' ');
        } else if !INLINE_TAGS.contains(&name.as_str()) {
            out.push(' ');
        }
    }
    out.push_str(rest);
    Cow::Owned(out)
}

fn tag_name(inner: &str) -> String {
    inner
        .trim_start_matches('/')
        .chars()
        .take_while(|c| c.is_ascii_alphanumeric() || *c == ':' || *c == '-')
        .collect::<String>()
        .to_ascii_lowercase()
}

/// Skips to just past the closing tag of `name`, case-insensitively.
fn skip_element<'a>(rest: &'a str, name: &str) -> &'a str {
    let needle = format!("</{name}");
    let lower = rest.to_ascii_lowercase();
    match lower.find(&needle) {
        Some(pos) => match rest[pos..].find('>') {
            Some(gt) => &rest[pos + gt + 1..],
            None => "",
        },
        None => "",
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    #[test]
    fn strips_tags_and_entities() {
        assert_eq!(clean_filing_text("<p>AI&nbsp;risk</p>"), "AI risk");
        assert_eq!(clean_filing_text("plain text"), "plain text");
        assert_eq!(clean_filing_text("<b>a</b>.<i>i</i>."), "a.i.");
    }

    #[test]
    fn block_tags_separate_words() {
        assert_eq!(clean_filing_text("<div>one</div><div>two</div>"), "one two");
        assert_eq!(clean_filing_text("<td>a</td><td>b</td>"), "a b");
        assert_eq!(clean_filing_text("line<br/>break"), "line break");
    }

    #[test]
    fn drops_scripts_styles_and_comments() {
        let raw = "<html><head><style>p{color:red}</style></head><body>x<!-- ai -->y\
                   <SCRIPT>var ai=1;</SCRIPT>z</body></html>";
        assert_eq!(clean_filing_text(raw), "x y z");
    }

    #[test]
    fn literal_angle_brackets_survive() {
        assert_eq!(
            clean_filing_text("revenue < 5% and 3 > 2"),
            "revenue < 5% and 3 > 2"
        );
        assert_eq!(clean_filing_text("a <unterminated"), "a <unterminated");
    }

    #[test]
    fn encoded_markup_does_not_survive() {
        let once = clean_filing_text("x &lt;b&gt;y&lt;/b&gt; z");
        assert_eq!(once, "x y z");
    }

    #[test]
    fn sgml_wrapper() {
        let raw = "<DOCUMENT>\n<TYPE>10-K\n<TEXT>\nWe use AI.\n</TEXT>\n</DOCUMENT>";
        assert_eq!(clean_filing_text(raw), "10-K We use AI.");
    }

    #[test]
    fn counts_invalid_utf8() {
        let out = clean_filing_bytes(b"ok \xff\xfe then \xc3 end");
        assert_eq!(out.replacements, 3);
        assert!(out.text.starts_with("ok \u{FFFD}"));
        assert_eq!(
            clean_filing_bytes("fine \u{FFFD}".as_bytes()).replacements,
            0
        );
    }

    proptest! {
        #[test]
        fn idempotent(raw in "([a-zA-Z .,<>/&;!-]|&amp;|&lt;|&gt;|&nbsp;|<p>|</b>|<i>|<!--|-->){0,60}") {
            let once = clean_filing_text(&raw);
            prop_assert_eq!(clean_filing_text(&once), once);
        }

        #[test]
        fn no_whitespace_runs(raw in "\\PC{0,80}") {
            let out = clean_filing_text(&raw);
            prop_assert!(!out.contains("  "));
            prop_assert_eq!(out.trim(), out.as_str());
        }
    }
}
