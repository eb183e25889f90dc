"""Reference text processing shared by the oracle scripts.

Written against the Python standard library only, independently of the Rust
implementation.
"""
import re
from html.parser import HTMLParser

INLINE = {
    "a", "abbr", "b", "big", "cite", "code", "del", "em", "font", "i", "ins", "kbd", "mark", "q",
    "s", "samp", "small", "span", "strike", "strong", "sub", "sup", "tt", "u", "var",
    "ix:nonfraction", "ix:nonnumeric",
}
SKIPPED = {"script", "style", "head", "title"}


class _Text(HTMLParser):
    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.parts = []
        self.skip = []

    def handle_starttag(self, tag, attrs):
        if tag in SKIPPED:
            self.skip.append(tag)
        self.parts.append("" if tag in INLINE else " ")

    def handle_startendtag(self, tag, attrs):
        self.parts.append("" if tag in INLINE else " ")

    def handle_endtag(self, tag):
        if self.skip and self.skip[-1] == tag:
            self.skip.pop()
        self.parts.append("" if tag in INLINE else " ")

    def handle_data(self, data):
        if not self.skip:
            self.parts.append(data)


def clean_html(raw):
    p = _Text()
    p.feed(raw)
    p.close()
    return " ".join("".join(p.parts).split())


_TOKEN = re.compile(r"[a-z]\.[a-z](?![a-z0-9])(?:\.[a-z](?![a-z0-9]))*\.?|[a-z0-9]+")


def tokenize(text):
    """Lowercase tokens; dotted single-letter abbreviations stay whole (ASCII input)."""
    return _TOKEN.findall(text.lower())


KEYWORD_RULES = [
    [("exact", "artificial"), ("prefix", "intelligen")],
    [("exact", "ai")],
    [("exact", "a.i.")],
]


def count_rules(tokens, rules=KEYWORD_RULES):
    counts = [0] * len(rules)
    i = 0
    while i < len(tokens):
        for k, rule in enumerate(rules):
            window = tokens[i : i + len(rule)]
            if len(window) == len(rule) and all(
                t == v if kind == "exact" else t.startswith(v) for (kind, v), t in zip(rule, window)
            ):
                counts[k] += 1
                i += len(rule)
                break
        else:
            i += 1
    return counts
