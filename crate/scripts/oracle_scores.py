#!/usr/bin/env python3
"""Reference TF-IDF scoring of a raw filing directory (<cik>/<year>.html).

usage: oracle_scores.py RAW_DIR SCORES_CSV [MENTIONS_CSV]
"""
import math
import sys
from collections import Counter, defaultdict
from pathlib import Path

from oracle_common import KEYWORD_RULES, clean_html, count_rules, tokenize


def load(raw_dir):
    docs = {}
    for path in sorted(Path(raw_dir).glob("*/*.html")):
        cik = "%010d" % int(path.parent.name)
        year = int(path.stem)
        docs[(cik, year)] = tokenize(clean_html(path.read_text(encoding="utf-8")))
    return docs


def score(docs):
    by_year = defaultdict(list)
    for (cik, year), toks in docs.items():
        by_year[year].append(cik)
    rows = []
    for year, ciks in by_year.items():
        counts = {c: count_rules(docs[(c, year)]) for c in ciks}
        n_docs = len(ciks)
        df = [sum(1 for c in ciks if counts[c][k] > 0) for k in range(len(KEYWORD_RULES))]
        for c in ciks:
            toks = docs[(c, year)]
            length = len(toks)
            total = 0.0
            for k, n in enumerate(counts[c]):
                if n:
                    total += (n / length) * math.log(n_docs / df[k])
            mwf = max(Counter(toks).values())
            kw = sum(counts[c])
            rows.append((c, year, kw, mwf, kw > 0, total / length))
    rows.sort()
    return rows


def main():
    raw_dir, out = sys.argv[1], sys.argv[2]
    rows = score(load(raw_dir))
    with open(out, "w") as f:
        f.write("cik,year,keyword_count,max_word_freq,dummy,score\n")
        for c, y, kw, mwf, dummy, s in rows:
            f.write("%s,%d,%d,%d,%s,%.12g\n" % (c, y, kw, mwf, "true" if dummy else "false", s))
    if len(sys.argv) > 3:
        per_year = defaultdict(int)
        for c, y, kw, mwf, dummy, s in rows:
            per_year[y] += int(dummy)
        with open(sys.argv[3], "w") as f:
            f.write("year,filings_mentioning_ai\n")
            for y in sorted(per_year):
                f.write("%d,%d\n" % (y, per_year[y]))


if __name__ == "__main__":
    main()
