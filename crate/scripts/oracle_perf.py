#!/usr/bin/env python3
"""Reference performance metrics for the fixture series at 50 digits.

usage: oracle_perf.py FIXTURES_DIR OUT_JSON
"""
import bisect
import csv
import json
import sys
from pathlib import Path

import mpmath as mp

mp.mp.dps = 50


def main():
    fx, out = Path(sys.argv[1]), sys.argv[2]
    with open(fx / "perf_series.csv") as f:
        rows = [(r["date"], mp.mpf(r["close"])) for r in csv.DictReader(f)]
    with open(fx / "riskfree.csv") as f:
        curve = [(r["date"], mp.mpf(r["annualized_yield"])) for r in csv.DictReader(f)]
    curve_dates = [d for d, _ in curve]

    dates = [d for d, _ in rows[1:]]
    r = [mp.log(rows[i][1] / rows[i - 1][1]) for i in range(1, len(rows))]
    rf = [curve[bisect.bisect_right(curve_dates, d) - 1][1] / 252 for d in dates]
    n = len(r)
    mean = sum(r) / n
    dev = [x - mean for x in r]
    m2, m3, m4 = (sum(d ** k for d in dev) / n for k in (2, 3, 4))
    sd = mp.sqrt(sum(d ** 2 for d in dev) / (n - 1))
    rf_mean = sum(rf) / n
    neg = [x for x in r if x < 0]
    nm = sum(neg) / len(neg)
    sd_down = mp.sqrt(sum((x - nm) ** 2 for x in neg) / len(neg))
    gains = sum(max(x - f, 0) for x, f in zip(r, rf))
    losses = sum(max(f - x, 0) for x, f in zip(r, rf))
    levels = [c for _, c in rows]
    mdd = max((levels[i] - levels[j]) / levels[i] for i in range(len(levels)) for j in range(i, len(levels)))
    result = {
        "n": n,
        "ret_pct": float(100 * mean),
        "sd": float(sd),
        "skew": float(m3 / m2 ** mp.mpf(1.5)),
        "kurt": float(m4 / m2 ** 2),
        "sharpe": float((mean - rf_mean) / sd),
        "sortino": float((mean - rf_mean) / sd_down),
        "omega": float(gains / losses),
        "mdd_pct": float(100 * mdd),
        "rf_daily": [float(x) for x in rf],
    }
    with open(out, "w") as f:
        json.dump(result, f, indent=1, sort_keys=True)
        f.write("\n")


if __name__ == "__main__":
    main()
