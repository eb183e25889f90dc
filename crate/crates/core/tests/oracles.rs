//! Agreement with the frozen values under fixtures/golden/oracle, which were
//! produced by independent scripts (see scripts/).

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;

use chrono::{Datelike, Duration, NaiveDate};
use serde_json::Value;
use tenk_core::corpus::{
    load_price_bars, load_prices, load_risk_free, load_securities, read_raw_dir, Filing,
};
use tenk_core::eventstudy::{
    fit_market_model, run_event_study, two_sample_t, EventWindowSpec, EventWindows, IndexEventRow,
};
use tenk_core::index::{chain_index, compute_all_weights};
use tenk_core::perf::{max_drawdown, moments, omega, sharpe, sortino, DownsideThreshold, Omega};
use tenk_core::regress::{ols, Design};
use tenk_core::textscore::{mentions_per_year, score_filings, ScoreNormalization};
use tenk_core::{Cik, IndexSeries, IndexSpec, KeywordSet, ReturnSeries};

fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(rel)
}

fn oracle_json(name: &str) -> Value {
    let text = fs::read_to_string(fixture(&format!("golden/oracle/{name}"))).unwrap();
    serde_json::from_str(&text).unwrap()
}

fn oracle_csv(name: &str) -> Vec<csv::StringRecord> {
    let mut rdr = csv::Reader::from_path(fixture(&format!("golden/oracle/{name}"))).unwrap();
    rdr.records().map(Result::unwrap).collect()
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"))
}

fn close(got: f64, want: f64, tol: f64, what: &str) {
    assert!((got - want).abs() <= tol, "{what}: got {got}, want {want}");
}

fn synthetic(name: &str) -> Vec<Vec<f64>> {
    let mut rdr = csv::Reader::from_path(fixture(&format!("synthetic/{name}"))).unwrap();
    rdr.records()
        .map(|r| r.unwrap().iter().map(|c| c.parse().unwrap()).collect())
        .collect()
}

fn fixture_filings() -> Vec<Filing> {
    read_raw_dir(&fixture("filings_raw")).unwrap()
}

#[test]
fn scores_match_oracle() {
    let recs = score_filings(
        &fixture_filings(),
        &KeywordSet::default(),
        ScoreNormalization::TokenCount,
    )
    .unwrap();
    let want = oracle_csv("scores.csv");
    assert_eq!(recs.len(), want.len());
    for (r, w) in recs.iter().zip(&want) {
        assert_eq!(r.cik.as_str(), &w[0]);
        assert_eq!(r.filing_year.to_string(), &w[1]);
        assert_eq!(r.keyword_count.to_string(), &w[2]);
        assert_eq!(r.max_word_freq.to_string(), &w[3]);
        assert_eq!(r.dummy.to_string(), &w[4]);
        close(r.score, w[5].parse().unwrap(), 1e-12, "score");
    }
    let mentions = mentions_per_year(&recs);
    let want: BTreeMap<i32, usize> = oracle_csv("mentions_per_year.csv")
        .iter()
        .map(|r| (r[0].parse().unwrap(), r[1].parse().unwrap()))
        .collect();
    assert_eq!(mentions, want);
}

#[test]
fn single_document_year_scores_zero() {
    let filings = read_raw_dir(&fixture("single_doc")).unwrap();
    let recs = score_filings(
        &filings,
        &KeywordSet::default(),
        ScoreNormalization::TokenCount,
    )
    .unwrap();
    let want = &oracle_csv("single_doc_scores.csv")[0];
    assert_eq!(recs.len(), 1);
    assert!(recs[0].dummy);
    assert_eq!(recs[0].keyword_count.to_string(), &want[2]);
    assert_eq!(recs[0].score, 0.0);
}

struct Market {
    prices: BTreeMap<String, ReturnSeries>,
    stocks: BTreeMap<Cik, ReturnSeries>,
}

fn market() -> Market {
    let prices = load_prices(&fixture("prices.csv")).unwrap();
    let stocks = load_securities(&fixture("securities.csv"))
        .unwrap()
        .into_iter()
        .map(|(t, c)| (c, prices[&t].clone()))
        .collect();
    Market { prices, stocks }
}

fn build_indices(m: &Market) -> Vec<(IndexSpec, IndexSeries)> {
    let recs = score_filings(
        &fixture_filings(),
        &KeywordSet::default(),
        ScoreNormalization::TokenCount,
    )
    .unwrap();
    let bars = load_price_bars(&fixture("prices.csv")).unwrap();
    IndexSpec::standard_set()
        .into_iter()
        .map(|spec| {
            let w = compute_all_weights(&spec, &recs).unwrap();
            let years = *w.keys().next().unwrap()..=*w.keys().next_back().unwrap();
            let cal: Vec<NaiveDate> = bars["SPX"]
                .iter()
                .map(|b| b.date)
                .filter(|d| years.contains(&d.year()))
                .collect();
            let out = chain_index(&spec, &w, &m.stocks, &cal).unwrap();
            (spec, out.series)
        })
        .collect()
}

#[test]
fn index_weights_and_levels_match_oracle() {
    let m = market();
    let recs = score_filings(
        &fixture_filings(),
        &KeywordSet::default(),
        ScoreNormalization::TokenCount,
    )
    .unwrap();
    for (spec, series) in build_indices(&m) {
        let weights = compute_all_weights(&spec, &recs).unwrap();
        let mut n = 0;
        for row in oracle_csv(&format!("weights_{}.csv", spec.name)) {
            let year: i32 = row[0].parse().unwrap();
            let cik: Cik = row[1].parse().unwrap();
            close(
                weights[&year].weight(&cik),
                row[2].parse().unwrap(),
                1e-12,
                &spec.name,
            );
            n += 1;
        }
        assert_eq!(n, weights.values().map(|w| w.len()).sum::<usize>());
        let want = oracle_csv(&format!("index_{}.csv", spec.name));
        assert_eq!(series.levels.len(), want.len(), "{}", spec.name);
        for ((d, level), w) in series.levels.iter().zip(&want) {
            assert_eq!(d.to_string(), &w[0]);
            close(*level, w[1].parse().unwrap(), 1e-10, &spec.name);
        }
    }
}

fn event_spec(m: &Market) -> EventWindowSpec {
    EventWindowSpec::new(
        NaiveDate::from_ymd_opt(2022, 11, 30).unwrap(),
        m.prices["SPX"].clone(),
    )
}

#[test]
fn event_study_matches_oracle() {
    let m = market();
    let spec = event_spec(&m);
    let o = oracle_json("event_study.json");
    let ids: Vec<(String, &ReturnSeries)> =
        m.stocks.iter().map(|(c, s)| (c.to_string(), s)).collect();
    let rep = run_event_study(&ids, &spec).unwrap();
    assert_eq!(rep.spec.day0.to_string(), o["day0"].as_str().unwrap());
    assert_eq!(rep.n as u64, o["n"].as_u64().unwrap());
    assert_eq!(rep.skipped.len(), 1);
    close(rep.t_stat.unwrap(), f(&o["t_stat"]), 1e-10, "t");
    close(rep.t_p.unwrap(), f(&o["t_p"]), 1e-10, "t p");
    close(
        rep.wilcoxon_p.unwrap(),
        f(&o["wilcoxon_p"]),
        1e-12,
        "wilcoxon p",
    );
    for (got, want) in rep.caar_path.iter().zip(o["caar_path"].as_array().unwrap()) {
        close(*got, f(want), 1e-12, "caar");
    }
    let windows = spec.windows().unwrap();
    for s in &rep.per_security {
        let w = &o["per_security"][&s.id];
        close(s.car, f(&w["car"]), 1e-12, &s.id);
        let fit = fit_market_model(
            &s.id,
            ids.iter().find(|i| i.0 == s.id).unwrap().1,
            &windows,
            &spec.market,
        )
        .unwrap();
        close(fit.alpha_hat, f(&w["alpha"]), 1e-12, "alpha");
        close(fit.beta_hat, f(&w["beta"]), 1e-10, "beta");
        close(fit.residual_sd, f(&w["residual_sd"]), 1e-12, "residual sd");
        assert_eq!(fit.n_obs as u64, w["n_obs"].as_u64().unwrap());
        for (a, b) in s.ar.iter().zip(w["ar"].as_array().unwrap()) {
            match a {
                Some(a) => close(*a, f(b), 1e-12, "ar"),
                None => assert!(b.is_null()),
            }
        }
    }

    let ai: Vec<&str> = o["groups"]["ai"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    let (a, b): (Vec<f64>, Vec<f64>) = (
        rep.per_security
            .iter()
            .filter(|s| ai.contains(&s.id.as_str()))
            .map(|s| s.car)
            .collect(),
        rep.per_security
            .iter()
            .filter(|s| !ai.contains(&s.id.as_str()))
            .map(|s| s.car)
            .collect(),
    );
    let g = two_sample_t(&a, &b).unwrap();
    close(
        g.difference,
        f(&o["groups"]["difference"]),
        1e-12,
        "difference",
    );
    close(g.t, f(&o["groups"]["t"]), 1e-9, "welch t");
    close(g.df, f(&o["groups"]["df"]), 1e-9, "welch df");
    close(g.p, f(&o["groups"]["p"]), 1e-9, "welch p");

    let mut rows = Vec::new();
    for (spec_i, series) in build_indices(&m) {
        rows.push(IndexEventRow::new(&spec_i.name, &series.log_returns(), &spec).unwrap());
    }
    for t in ["BOTZ", "ROBO", "IXIC"] {
        rows.push(IndexEventRow::new(t, &m.prices[t], &spec).unwrap());
    }
    for r in rows {
        let w = &o["index_table"][&r.name];
        close(r.car_pct, f(&w["car_pct"]), 1e-9, &r.name);
        close(r.ar_pct, f(&w["ar_pct"]), 1e-9, &r.name);
        close(r.t_stat.unwrap(), f(&w["t_stat"]), 1e-9, &r.name);
        close(r.wilcoxon_z.unwrap(), f(&w["wilcoxon_z"]), 1e-9, &r.name);
    }
}

#[test]
fn synthetic_market_model_and_welch() {
    let o = oracle_json("event_study.json");
    let rows = synthetic("market_model.csv");
    let start = NaiveDate::from_ymd_opt(2020, 1, 1).unwrap();
    let dates: Vec<NaiveDate> = (0..rows.len() as i64)
        .map(|i| start + Duration::days(i))
        .collect();
    let series = |col: usize| {
        ReturnSeries::new(
            "S",
            dates.iter().zip(&rows).map(|(d, r)| (*d, r[col])).collect(),
        )
        .unwrap()
    };
    let windows = EventWindows {
        estimation: dates.clone(),
        event: Vec::new(),
    };
    let fit = fit_market_model("S", &series(1), &windows, &series(0)).unwrap();
    let want = &o["synthetic_market_model"];
    close(fit.alpha_hat, f(&want["alpha"]), 1e-9, "alpha");
    close(fit.beta_hat, f(&want["beta"]), 1e-9, "beta");
    close(
        fit.residual_sd,
        f(&want["residual_sd"]),
        1e-9,
        "residual sd",
    );

    let rows = synthetic("welch.csv");
    let a: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    let b: Vec<f64> = rows.iter().map(|r| r[1]).collect();
    let g = two_sample_t(&a, &b).unwrap();
    let want = &o["synthetic_welch"];
    close(g.t, f(&want["t"]), 1e-9, "t");
    close(g.difference, f(&want["difference"]), 1e-12, "difference");
    close(g.p, f(&want["p"]), 1e-9, "p");
}

fn check_ols(x: &[f64], y: &[f64], want: &Value, slope: &str) {
    let fit = ols(y, &Design::with_intercept(&[("x", x)]).unwrap()).unwrap();
    close(
        fit.coefficients[0].estimate,
        f(&want["const"]),
        1e-9,
        "const",
    );
    close(fit.coefficients[1].estimate, f(&want[slope]), 1e-9, slope);
    close(
        fit.coefficients[0].se,
        f(&want["se_const"]),
        1e-9,
        "se const",
    );
    close(
        fit.coefficients[1].se,
        f(&want[format!("se_{slope}")]),
        1e-9,
        "se slope",
    );
    close(fit.r2, f(&want["r2"]), 1e-9, "r2");
}

#[test]
fn ols_matches_high_precision_oracle() {
    let o = oracle_json("regress.json");
    let rows = synthetic("ols.csv");
    let (x, y): (Vec<f64>, Vec<f64>) = rows.iter().map(|r| (r[0], r[1])).unzip();
    check_ols(&x, &y, &o["synthetic_ols"], "slope");

    let rows = synthetic("mm_outliers.csv");
    let (x, y): (Vec<f64>, Vec<f64>) = rows.iter().map(|r| (r[0], r[1])).unzip();
    check_ols(&x, &y, &o["outliers_full_ols"], "slope");
    let (x, y): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter(|r| r[2] == 0.0)
        .map(|r| (r[0], r[1]))
        .unzip();
    check_ols(&x, &y, &o["outliers_clean_subset"], "slope");
}

#[test]
fn performance_metrics_match_oracle() {
    let o = oracle_json("perf.json");
    let r = load_prices(&fixture("perf_series.csv"))
        .unwrap()
        .remove("PERF")
        .unwrap();
    let levels: Vec<f64> = load_price_bars(&fixture("perf_series.csv")).unwrap()["PERF"]
        .iter()
        .map(|b| b.close)
        .collect();
    let rf = load_risk_free(&fixture("riskfree.csv")).unwrap();
    assert_eq!(r.len() as u64, o["n"].as_u64().unwrap());
    for (d, want) in r.dates().zip(o["rf_daily"].as_array().unwrap()) {
        close(rf.daily_rate(d).unwrap(), f(want), 1e-15, "rf");
    }
    let m = moments(&r.values()).unwrap();
    close(100.0 * m.mean, f(&o["ret_pct"]), 1e-9, "ret");
    close(m.sd, f(&o["sd"]), 1e-9, "sd");
    close(m.skew.unwrap(), f(&o["skew"]), 1e-9, "skew");
    close(m.kurt.unwrap(), f(&o["kurt"]), 1e-9, "kurt");
    close(
        sharpe(&r, &rf).unwrap().unwrap(),
        f(&o["sharpe"]),
        1e-9,
        "sharpe",
    );
    let sor = sortino(&r, &rf, DownsideThreshold::Zero).unwrap().unwrap();
    close(sor, f(&o["sortino"]), 1e-9, "sortino");
    close(
        max_drawdown(&levels).unwrap(),
        f(&o["mdd_pct"]),
        1e-9,
        "mdd",
    );
    match omega(&r, &rf).unwrap() {
        Omega::Finite(v) => close(v, f(&o["omega"]), 1e-9, "omega"),
        other => panic!("omega {other:?}"),
    }
}
