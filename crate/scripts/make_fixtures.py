#!/usr/bin/env python3
"""Generate the bundled fixture set under fixtures/.

Everything is seeded; rerunning reproduces the files byte for byte.
"""
import csv
import datetime as dt
import math
import os
import random
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent))
from oracle_common import clean_html, tokenize  # noqa: E402

ROOT = Path(__file__).resolve().parent.parent / "fixtures"
SEED = 20221130

AI_FIRMS = {
    "ALFA": "0000001001",
    "BRVO": "0000001002",
    "CHRL": "0000001003",
    "DLTA": "0000001004",
}
OTHER_FIRMS = {
    t: f"{1005 + i:010d}"
    for i, t in enumerate(
        ["ECHO", "FXTR", "GOLF", "HTLS", "INDG", "JLTT", "KILO", "LIMA", "MIKE", "NOVM", "OSCR", "PAPA"]
    )
}
ETFS = ["BOTZ", "ROBO"]
MARKET, BENCHMARK = "SPX", "IXIC"
EVENT_DATE = dt.date(2022, 11, 30)
EVENT_LENGTH = 61
IPO_DATE = dt.date(2023, 3, 1)  # DLTA
DELIST_DATE = dt.date(2023, 6, 30)  # CHRL, last close

PROSE = [
    "The company designs and sells industrial equipment to customers in the U.S. and abroad.",
    "Revenue grew in each of our operating segments during the fiscal year.",
    "Management said that supply chain conditions improved in the second half.",
    "We paid quarterly dividends and repurchased shares under the existing program.",
    "Scheduled maintenance at two plants reduced output for several weeks.",
    "Our R&amp;D spending focused on product quality and energy efficiency.",
    "Competition in our markets remains intense and pricing pressure may continue.",
    "We rely on third&#8209;party suppliers for certain critical components.",
    "Interest rate changes could affect the cost of our outstanding debt.",
    "Employees received training on safety, compliance and data privacy.",
    "The board reviewed capital allocation priorities again this year.",
    "We operate distribution centers in twelve states and three countries.",
    "Cash flow from operations funded capital expenditures of $41&nbsp;million.",
    "Our customers include utilities, manufacturers and public agencies.",
    "Cybersecurity incidents could disrupt operations and harm our reputation.",
    "We completed the acquisition of a regional services business in March.",
    "Inventory levels were reduced through improved demand planning.",
    "Legal proceedings are described in the notes to the financial statements.",
    "Foreign currency movements reduced reported sales by two percent.",
    "The company&#8217;s headquarters lease was extended through 2030.",
]


def wrap(body_paragraphs, title="Annual Report"):
    head = (
        "<html><head><title>%s</title>"
        "<style>.ai { color: red; }</style></head><body>\n" % title
    )
    paras = "\n".join(f"<p>{p}</p>" for p in body_paragraphs)
    return head + paras + "\n</body></html>\n"


def prose(rng, n):
    return [rng.choice(PROSE) for _ in range(n)]


def filings(rng):
    a, b, c, d = (AI_FIRMS[t] for t in ["ALFA", "BRVO", "CHRL", "DLTA"])
    docs = {}
    docs[(a, 2020)] = wrap(prose(rng, 6) + ["We began piloting AI tools in customer service."] + prose(rng, 4))
    docs[(b, 2020)] = wrap(
        prose(rng, 5) + ["Our <span>artificial</span> <span>intelligence</span> research team was formed."] + prose(rng, 5)
    )
    docs[(c, 2020)] = wrap(
        prose(rng, 8)
        + ["<!-- AI strategy draft --> Maintenance costs were said to be stable.",
           "<script>var ai = 'AI';</script>Orders were fulfilled on time."],
        title="AI Holdings Annual Report",
    )
    docs[(a, 2021)] = wrap(
        prose(rng, 7) + ["AI models now support pricing decisions.", "Spending on A.I. infrastructure doubled."] + prose(rng, 3)
    )
    docs[(b, 2021)] = wrap(prose(rng, 9) + ["We launched AI&#8209;driven quality inspection."] + prose(rng, 2))
    docs[(c, 2021)] = wrap(prose(rng, 6) + ["We evaluate vendors of artificial intelligences for logistics."] + prose(rng, 6))
    docs[(b, 2022)] = wrap(
        prose(rng, 5) + ["AI is central to our roadmap.", "Our AI products grew quickly.", "Customers adopted AI features."] + prose(rng, 5)
    )
    docs[(c, 2022)] = wrap(prose(rng, 10) + ["Routing now uses <b>a</b>.<i>i</i>. based scheduling."] + prose(rng, 3))
    docs[(d, 2022)] = wrap(prose(rng, 4) + ["We are a newly listed AI software company."] + prose(rng, 4))

    # ALFA 2022: the most frequent token ("the") occurs exactly 57 times.
    body = prose(rng, 14) + [
        "Artificial intelligence is embedded across the product line.",
        "AI revenue exceeded expectations.",
    ]
    filler = "The order backlog at the end of the year was the highest on record."
    def mwf(paragraphs):
        toks = tokenize(clean_html(wrap(paragraphs)))
        counts = {}
        for t in toks:
            counts[t] = counts.get(t, 0) + 1
        return counts
    while mwf(body).get("the", 0) < 57:
        body.append(filler if mwf(body)["the"] <= 57 - 4 else "Orders rose at the plant.")
    counts = mwf(body)
    assert counts["the"] == 57, counts["the"]
    assert max(v for k, v in counts.items() if k != "the") < 57
    docs[(a, 2022)] = wrap(body)
    assert len(docs) == 10
    return docs


def business_days(start, end):
    out, d = [], start
    while d <= end:
        if d.weekday() < 5:
            out.append(d)
        d += dt.timedelta(days=1)
    return out


def prices(np_rng):
    days = business_days(dt.date(2021, 1, 4), dt.date(2023, 12, 29))
    n = len(days)
    day0 = next(i for i, d in enumerate(days) if d >= EVENT_DATE)
    in_event = np.zeros(n)
    in_event[day0 : day0 + EVENT_LENGTH] = 1.0

    mkt = np_rng.normal(0.0003, 0.01, n)
    series = {MARKET: mkt, BENCHMARK: 1.15 * mkt + np_rng.normal(0.0, 0.004, n)}
    for t in list(AI_FIRMS) + list(OTHER_FIRMS):
        beta = np_rng.uniform(0.7, 1.3)
        drift = 0.0025 if t in AI_FIRMS else 0.0003
        series[t] = beta * mkt + np_rng.normal(0.0, 0.015, n) + drift * in_event
    for t in ETFS:
        series[t] = 1.1 * mkt + np_rng.normal(0.0, 0.006, n) + 0.0015 * in_event

    rows = []
    for t, r in series.items():
        start = float(np_rng.uniform(40.0, 160.0))
        level = start * np.exp(np.cumsum(np.concatenate([[0.0], r[1:]])))
        for d, p in zip(days, level):
            if t == "DLTA" and d < IPO_DATE:
                continue
            if t == "CHRL" and d > DELIST_DATE:
                continue
            rows.append((d.isoformat(), t, "%.4f" % p))
    rows.sort()
    return days, rows


def riskfree(days):
    start, end = days[0], days[-1]
    out, d = [], start
    while d <= end:
        frac = (d - start).days / (end - start).days
        y = 0.0005 + 0.052 * min(1.0, max(0.0, (frac - 0.33) / 0.5))
        out.append((d.isoformat(), "%.5f" % y))
        d += dt.timedelta(days=7)
    return out


def write_csv(path, header, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def main():
    rng = random.Random(SEED)
    np_rng = np.random.default_rng(SEED)

    for (cik, year), html in filings(rng).items():
        p = ROOT / "filings_raw" / cik / f"{year}.html"
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(html)
    single = ROOT / "single_doc" / "0000002001" / "2019.html"
    single.parent.mkdir(parents=True, exist_ok=True)
    single.write_text(wrap(["We use AI across the business.", "Revenue was stable."]))

    days, rows = prices(np_rng)
    write_csv(ROOT / "prices.csv", ["date", "ticker", "close"], rows)
    write_csv(ROOT / "riskfree.csv", ["date", "annualized_yield"], riskfree(days))
    write_csv(
        ROOT / "securities.csv",
        ["ticker", "cik"],
        sorted(list(AI_FIRMS.items()) + list(OTHER_FIRMS.items())),
    )

    # Ten-return series for the performance checks.
    perf_days = business_days(dt.date(2022, 3, 1), dt.date(2022, 3, 15))[:11]
    closes = [100.0, 101.2, 99.8, 100.5, 102.3, 101.1, 98.7, 99.9, 101.4, 100.2, 103.0]
    write_csv(
        ROOT / "perf_series.csv",
        ["date", "ticker", "close"],
        [(d.isoformat(), "PERF", "%.4f" % c) for d, c in zip(perf_days, closes)],
    )

    # Seeded synthetic data sets for the regression and event-study oracles.
    x = np_rng.uniform(0.0, 1.0, 200)
    y = 0.2 + 0.05 * x + np_rng.normal(0.0, 0.01, 200)
    write_csv(ROOT / "synthetic" / "ols.csv", ["x", "y"], [("%.17g" % a, "%.17g" % b) for a, b in zip(x, y)])

    x = np_rng.uniform(0.0, 10.0, 200)
    y = 2.0 * x + np_rng.normal(0.0, 0.1, 200)
    outlier = np.zeros(200, dtype=bool)
    outlier[np.argsort(-x)[:40]] = True
    y = y + 50.0 * outlier
    write_csv(
        ROOT / "synthetic" / "mm_outliers.csv",
        ["x", "y", "outlier"],
        [("%.17g" % a, "%.17g" % b, int(o)) for a, b, o in zip(x, y, outlier)],
    )

    rm = np_rng.normal(0.0, 0.01, 251)
    ri = 0.0005 + 0.9 * rm + np_rng.normal(0.0, 0.01, 251)
    write_csv(
        ROOT / "synthetic" / "market_model.csv",
        ["market", "stock"],
        [("%.17g" % a, "%.17g" % b) for a, b in zip(rm, ri)],
    )

    a = np_rng.normal(1.0, 1.0, 50)
    b = np_rng.normal(0.0, 1.0, 50)
    write_csv(ROOT / "synthetic" / "welch.csv", ["a", "b"], [("%.17g" % u, "%.17g" % v) for u, v in zip(a, b)])


if __name__ == "__main__":
    main()
