#!/usr/bin/env python3
"""Reference market-model event study on the fixture panel and synthetic sets.

usage: oracle_eventstudy.py FIXTURES_DIR OUT_JSON
"""
import csv
import json
import math
import sys
from collections import defaultdict
from pathlib import Path

import numpy as np
from scipy import stats

EVENT_DATE = "2022-11-30"
EST, EVT = 251, 61


def log_returns(closes):
    dates = sorted(closes)
    return {d: math.log(closes[d] / closes[p]) for p, d in zip(dates, dates[1:])}


def ols2(x, y):
    """Closed-form intercept/slope with centered sums."""
    n = len(x)
    mx, my = sum(x) / n, sum(y) / n
    sxx = sum((a - mx) ** 2 for a in x)
    sxy = sum((a - mx) * (b - my) for a, b in zip(x, y))
    beta = sxy / sxx
    alpha = my - beta * mx
    ssr = sum((b - alpha - beta * a) ** 2 for a, b in zip(x, y))
    return alpha, beta, math.sqrt(ssr / (n - 2))


def signed_rank_z(values):
    v = [x for x in values if x != 0]
    n = len(v)
    ranks = stats.rankdata([abs(x) for x in v])
    w = sum(r for r, x in zip(ranks, v) if x > 0)
    _, counts = np.unique([abs(x) for x in v], return_counts=True)
    var = n * (n + 1) * (2 * n + 1) / 24 - sum(t ** 3 - t for t in counts) / 48
    d = w - n * (n + 1) / 4
    return math.copysign(max(abs(d) - 0.5, 0.0), d) / math.sqrt(var)


def main():
    fx, out = Path(sys.argv[1]), sys.argv[2]
    closes = defaultdict(dict)
    with open(fx / "prices.csv") as f:
        for r in csv.DictReader(f):
            closes[r["ticker"]][r["date"]] = float(r["close"])
    rets = {t: log_returns(c) for t, c in closes.items()}
    mkt = rets["SPX"]
    cal = sorted(mkt)
    day0 = next(i for i, d in enumerate(cal) if d >= EVENT_DATE)
    est, evt = cal[day0 - EST : day0], cal[day0 : day0 + EVT]

    def study(series):
        pairs = [(mkt[d], series[d]) for d in est if d in series]
        if len(pairs) < 30:
            return None
        a, b, sd = ols2([p[0] for p in pairs], [p[1] for p in pairs])
        ars = [series[d] - (a + b * mkt[d]) if d in series else None for d in evt]
        return {"alpha": a, "beta": b, "residual_sd": sd, "n_obs": len(pairs), "ar": ars,
                "car": sum(x for x in ars if x is not None)}

    with open(fx / "securities.csv") as f:
        secs = sorted(("%010d" % int(r["cik"]), r["ticker"]) for r in csv.DictReader(f))
    per = {}
    for cik, t in secs:
        s = study(rets[t])
        if s is not None:
            per[cik] = s
    cars = [per[c]["car"] for c in sorted(per)]
    n = len(cars)
    caar = []
    for k in range(EVT):
        caar.append(sum(sum(x for x in per[c]["ar"][: k + 1] if x is not None) for c in sorted(per)) / n)
    t = stats.ttest_1samp(cars, 0.0)
    wil = stats.wilcoxon(cars, zero_method="wilcox", method="exact")

    with open(fx / "golden" / "oracle" / "weights_TAII05.csv") as f:
        ai = {r["cik"] for r in csv.DictReader(f) if r["year"] == "2023" and float(r["weight"]) > 0}
    ai_cars = [per[c]["car"] for c in sorted(per) if c in ai]
    non_cars = [per[c]["car"] for c in sorted(per) if c not in ai]
    welch = stats.ttest_ind(ai_cars, non_cars, equal_var=False)
    va, vb = np.var(ai_cars, ddof=1) / len(ai_cars), np.var(non_cars, ddof=1) / len(non_cars)
    df = (va + vb) ** 2 / (va ** 2 / (len(ai_cars) - 1) + vb ** 2 / (len(non_cars) - 1))

    table = {}
    for name in ["AII", "SAII", "TAII05", "TAII5X"]:
        levels = {}
        with open(fx / "golden" / "oracle" / f"index_{name}.csv") as f:
            for r in csv.DictReader(f):
                levels[r["date"]] = float(r["level"])
        table[name] = log_returns(levels)
    for t_ in ["BOTZ", "ROBO", "IXIC"]:
        table[t_] = rets[t_]
    rows = {}
    for name, series in table.items():
        s = study(series)
        daily = [x for x in s["ar"] if x is not None]
        rows[name] = {
            "car_pct": 100 * s["car"],
            "ar_pct": 100 * s["car"] / EVT,
            "t_stat": float(stats.ttest_1samp(daily, 0.0).statistic),
            "wilcoxon_z": signed_rank_z(daily),
            "wilcoxon_p_scipy": float(stats.wilcoxon(daily, zero_method="wilcox", correction=True, method="approx").pvalue),
        }

    mm = np.loadtxt(fx / "synthetic" / "market_model.csv", delimiter=",", skiprows=1)
    a, b, sd = ols2(list(mm[:, 0]), list(mm[:, 1]))
    w = np.loadtxt(fx / "synthetic" / "welch.csv", delimiter=",", skiprows=1)
    wt = stats.ttest_ind(w[:, 0], w[:, 1], equal_var=False)

    result = {
        "day0": evt[0],
        "per_security": per,
        "caar_path": caar,
        "t_stat": float(t.statistic),
        "t_p": float(t.pvalue),
        "wilcoxon_p": float(wil.pvalue),
        "n": n,
        "groups": {
            "ai": sorted(c for c in per if c in ai),
            "difference": float(np.mean(ai_cars) - np.mean(non_cars)),
            "t": float(welch.statistic),
            "df": float(df),
            "p": float(welch.pvalue),
        },
        "index_table": rows,
        "synthetic_market_model": {"alpha": a, "beta": b, "residual_sd": sd},
        "synthetic_welch": {"t": float(wt.statistic), "p": float(wt.pvalue),
                             "difference": float(np.mean(w[:, 0]) - np.mean(w[:, 1]))},
    }
    with open(out, "w") as f:
        json.dump(result, f, indent=1, sort_keys=True)
        f.write("\n")


if __name__ == "__main__":
    main()
