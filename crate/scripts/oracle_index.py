#!/usr/bin/env python3
"""Reference index construction: annual weights and day-by-day chaining.

usage: oracle_index.py SCORES_CSV PRICES_CSV SECURITIES_CSV MARKET OUT_DIR
"""
import csv
import math
import sys
from collections import defaultdict
from pathlib import Path

SCHEMES = {"AII": ("aii", None), "SAII": ("saii", None), "TAII05": ("taii", 0.5), "TAII5X": ("taii", 5.0)}


def read_scores(path):
    rows = []
    with open(path) as f:
        for r in csv.DictReader(f):
            rows.append((r["cik"], int(r["year"]), r["dummy"] == "true", float(r["score"])))
    return rows


def weights(scheme, alpha, rows, year):
    if scheme == "aii":
        firms = [c for c, y, d, s in rows if y == year and d]
        return {c: 1.0 / len(firms) for c in firms}
    if scheme == "saii":
        raw = {c: s for c, y, d, s in rows if y == year and d}
    else:
        first = min(y for _, y, _, _ in rows)
        mentioned = {(c, y) for c, y, d, _ in rows if d and y <= year}
        raw = {}
        for c in sorted({c for c, _ in mentioned}):
            total = 0.0
            for k, y in enumerate(range(year, first - 1, -1)):
                if (c, y) in mentioned:
                    total += alpha ** k
            if total > 0:
                raw[c] = total
    z = sum(raw.values())
    return {c: v / z for c, v in raw.items()}


def read_prices(path):
    closes = defaultdict(dict)
    with open(path) as f:
        for r in csv.DictReader(f):
            closes[r["ticker"]][r["date"]] = float(r["close"])
    return closes


def main():
    scores, prices, securities, market, out = sys.argv[1:6]
    out = Path(out)
    rows = read_scores(scores)
    closes = read_prices(prices)
    with open(securities) as f:
        ticker_of = {"%010d" % int(r["cik"]): r["ticker"] for r in csv.DictReader(f)}
    calendar = sorted(closes[market])

    def simple_return(cik, i):
        t = ticker_of.get(cik)
        if t is None:
            return None
        today, prev = calendar[i], calendar[i - 1]
        series = closes[t]
        if today not in series:
            return None
        dates = sorted(series)
        j = dates.index(today)
        if j == 0:
            return None
        return math.expm1(math.log(series[today] / series[dates[j - 1]]))

    years = sorted({y for _, y, _, _ in rows})
    for name, (scheme, alpha) in SCHEMES.items():
        by_eff = {y + 1: weights(scheme, alpha, rows, y) for y in years}
        with open(out / f"weights_{name}.csv", "w") as f:
            f.write("year,cik,weight\n")
            for y in sorted(by_eff):
                for c in sorted(by_eff[y]):
                    f.write("%d,%s,%.17g\n" % (y, c, by_eff[y][c]))
        start = next(i for i, d in enumerate(calendar) if int(d[:4]) in by_eff)
        level = 100.0
        lines = ["%s,%.17g,%.17g" % (calendar[start], level, 0.0)]
        held_year, held = None, None
        for i in range(start + 1, len(calendar)):
            year = int(calendar[i][:4])
            if year != held_year:
                held_year, held = year, dict(by_eff[year])
            rets = {c: simple_return(c, i) for c in held}
            for c in [c for c, r in rets.items() if r is None]:
                del held[c]
            z = sum(held.values())
            ret = sum((w / z) * rets[c] for c, w in sorted(held.items()))
            level *= 1.0 + ret
            lines.append("%s,%.17g,%.17g" % (calendar[i], level, ret))
        with open(out / f"index_{name}.csv", "w") as f:
            f.write("date,level,daily_return\n" + "\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
