#!/usr/bin/env python3
"""Reference regressions: high-precision OLS on synthetic sets and the
cross-sectional CAR-on-weight fits for the fixture panel.

usage: oracle_regress.py FIXTURES_DIR OUT_JSON
"""
import csv
import json
import sys
from pathlib import Path

import mpmath as mp
import numpy as np
import statsmodels.api as sm

mp.mp.dps = 50


def ols_exact(x, y):
    """Normal equations for one regressor plus intercept at 50 digits."""
    n = mp.mpf(len(x))
    x = [mp.mpf(v) for v in x]
    y = [mp.mpf(v) for v in y]
    mx, my = sum(x) / n, sum(y) / n
    sxx = sum((a - mx) ** 2 for a in x)
    sxy = sum((a - mx) * (b - my) for a, b in zip(x, y))
    slope = sxy / sxx
    icept = my - slope * mx
    ssr = sum((b - icept - slope * a) ** 2 for a, b in zip(x, y))
    s2 = ssr / (n - 2)
    se_slope = mp.sqrt(s2 / sxx)
    se_icept = mp.sqrt(s2 * (1 / n + mx ** 2 / sxx))
    sst = sum((b - my) ** 2 for b in y)
    return {
        "const": float(icept), "slope": float(slope),
        "se_const": float(se_icept), "se_slope": float(se_slope),
        "r2": float(1 - ssr / sst),
    }


def main():
    fx, out = Path(sys.argv[1]), sys.argv[2]
    d = np.loadtxt(fx / "synthetic" / "ols.csv", delimiter=",", skiprows=1)
    m = np.loadtxt(fx / "synthetic" / "mm_outliers.csv", delimiter=",", skiprows=1)
    clean = m[m[:, 2] == 0]
    result = {
        "synthetic_ols": ols_exact(d[:, 0], d[:, 1]),
        "outliers_clean_subset": ols_exact(clean[:, 0], clean[:, 1]),
        "outliers_full_ols": ols_exact(m[:, 0], m[:, 1]),
    }

    es = json.load(open(fx / "golden" / "oracle" / "event_study.json"))
    cars = {c: v["car"] for c, v in es["per_security"].items()}
    fits = {}
    for name in ["AII", "SAII", "TAII05", "TAII5X"]:
        w = {}
        with open(fx / "golden" / "oracle" / f"weights_{name}.csv") as f:
            for r in csv.DictReader(f):
                if r["year"] == "2023":
                    w[r["cik"]] = float(r["weight"])
        ciks = sorted(cars)
        x = np.array([w.get(c, 0.0) for c in ciks])
        y = np.array([cars[c] for c in ciks])
        fit = sm.OLS(y, sm.add_constant(x)).fit()
        fits[name] = {
            "const": float(fit.params[0]), "weight": float(fit.params[1]),
            "se_const": float(fit.bse[0]), "se_weight": float(fit.bse[1]),
            "p_weight": float(fit.pvalues[1]), "r2": float(fit.rsquared), "n": int(fit.nobs),
        }
    result["car_on_weight_ols"] = fits
    with open(out, "w") as f:
        json.dump(result, f, indent=1, sort_keys=True)
        f.write("\n")


if __name__ == "__main__":
    main()
