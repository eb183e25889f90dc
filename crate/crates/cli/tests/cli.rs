use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn tenk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tenk"))
        .args(args)
        .env_remove("RUST_LOG")
        .output()
        .unwrap()
}

/// Runs `tenk` against the fixture config with its outputs redirected under `dir`.
fn tenk_in(dir: &Path, args: &[&str]) -> Output {
    let config = fixtures().join("pipeline.toml");
    let out = dir.join("out");
    let corpus = dir.join("corpus");
    let mut full = vec![
        "--config",
        config.to_str().unwrap(),
        "--out-dir",
        out.to_str().unwrap(),
        "--corpus-dir",
        corpus.to_str().unwrap(),
    ];
    full.extend_from_slice(args);
    tenk(&full)
}

fn ok(o: Output) -> Output {
    assert!(
        o.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    o
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn artifacts(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect()
}

#[test]
fn help_and_usage_errors() {
    assert_eq!(tenk(&["--help"]).status.code(), Some(0));
    assert_eq!(tenk(&["--version"]).status.code(), Some(0));
    assert_eq!(tenk(&[]).status.code(), Some(1));
    assert_eq!(tenk(&["frobnicate"]).status.code(), Some(1));
    let bad = tenk(&["--event-date", "30/11/2022", "score"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(
        stderr(&bad).contains("tenk: error [cli]"),
        "{}",
        stderr(&bad)
    );

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(&cfg, "colour = \"blue\"\n").unwrap();
    let o = tenk(&["--config", cfg.to_str().unwrap(), "score"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("colour"));
}

#[test]
fn missing_upstream_artifact_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = tenk_in(dir.path(), &["build-index"]);
    assert_eq!(o.status.code(), Some(2));
    let msg = stderr(&o);
    assert!(
        msg.contains("[index]") && msg.contains("tenk score"),
        "{msg}"
    );

    let o = tenk_in(dir.path(), &["score"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("[textscore]"));
}

#[test]
fn no_qualifying_firms_fails_build_index() {
    let dir = tempfile::tempdir().unwrap();
    ok(tenk_in(dir.path(), &["ingest"]));
    ok(tenk_in(dir.path(), &["--keywords", "quokka", "score"]));
    let o = tenk_in(dir.path(), &["--keywords", "quokka", "build-index"]);
    assert_ne!(o.status.code(), Some(0));
    let msg = stderr(&o);
    assert!(
        msg.contains("[index]") && msg.contains("no qualifying company"),
        "{msg}"
    );
}

#[test]
fn pipeline_is_deterministic_and_matches_golden() {
    let golden = artifacts(&fixtures().join("golden/pipeline"));
    let mut runs = Vec::new();
    for _ in 0..2 {
        let dir = tempfile::tempdir().unwrap();
        ok(tenk_in(dir.path(), &["ingest"]));
        ok(tenk_in(dir.path(), &["run"]));
        runs.push(artifacts(&dir.path().join("out")));
    }
    assert_eq!(runs[0], runs[1]);
    assert_eq!(
        runs[0].keys().collect::<Vec<_>>(),
        golden.keys().collect::<Vec<_>>()
    );
    for (name, bytes) in &golden {
        assert!(&runs[0][name] == bytes, "{name} differs from golden");
    }
}

#[test]
fn downstream_stages_rebuild_from_persisted_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    ok(tenk_in(dir.path(), &["ingest"]));
    ok(tenk_in(dir.path(), &["run"]));
    let out = dir.path().join("out");
    let full = artifacts(&out);
    for name in full
        .keys()
        .filter(|n| !n.starts_with("scores") && !n.starts_with("mentions"))
    {
        fs::remove_file(out.join(name)).unwrap();
    }
    for stage in ["build-index", "event-study", "regress", "report"] {
        ok(tenk_in(dir.path(), &[stage]));
    }
    assert_eq!(artifacts(&out), full);

    fs::remove_file(out.join("panel.csv")).unwrap();
    ok(tenk_in(dir.path(), &["report"]));
    assert_eq!(artifacts(&out), full);
}

#[test]
fn regress_selects_method_and_honours_seed() {
    let dir = tempfile::tempdir().unwrap();
    ok(tenk_in(dir.path(), &["ingest"]));
    ok(tenk_in(dir.path(), &["run"]));
    let out = dir.path().join("out");
    let mm = fs::read(out.join("regress_AII_mm.json")).unwrap();
    for f in fs::read_dir(&out).unwrap() {
        let p = f.unwrap().path();
        if p.file_name()
            .unwrap()
            .to_string_lossy()
            .starts_with("regress_")
        {
            fs::remove_file(p).unwrap();
        }
    }
    ok(tenk_in(dir.path(), &["regress", "--method", "ols"]));
    assert!(out.join("regress_AII_ols.json").exists());
    assert!(!out.join("regress_AII_mm.json").exists());
    ok(tenk_in(
        dir.path(),
        &["--seed", "7", "regress", "--method", "mm"],
    ));
    let reseeded: Value =
        serde_json::from_slice(&fs::read(out.join("regress_AII_mm.json")).unwrap()).unwrap();
    assert_eq!(reseeded["seed"], 7);
    ok(tenk_in(dir.path(), &["regress", "--method", "mm"]));
    assert_eq!(fs::read(out.join("regress_AII_mm.json")).unwrap(), mm);
}

#[test]
fn regress_artifacts_match_oracle() {
    let golden = fixtures().join("golden");
    let oracle: Value =
        serde_json::from_slice(&fs::read(golden.join("oracle/regress.json")).unwrap()).unwrap();
    for (name, want) in oracle["car_on_weight_ols"].as_object().unwrap() {
        let path = golden.join(format!("pipeline/regress_{name}_ols.json"));
        let fit: Value = serde_json::from_slice(&fs::read(path).unwrap()).unwrap();
        let coef = |i: usize, key: &str| fit["coefficients"][i][key].as_f64().unwrap();
        let w = |key: &str| want[key].as_f64().unwrap();
        let close = |a: f64, b: f64| assert!((a - b).abs() < 1e-9, "{name}: {a} vs {b}");
        close(coef(0, "estimate"), w("const"));
        close(coef(1, "estimate"), w("weight"));
        close(coef(0, "se"), w("se_const"));
        close(coef(1, "se"), w("se_weight"));
        close(coef(1, "p"), w("p_weight"));
        close(fit["r2"].as_f64().unwrap(), w("r2"));
        assert_eq!(fit["n"], want["n"]);
    }
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    ok(tenk_in(dir.path(), &["ingest"]));
    ok(tenk_in(dir.path(), &["score"]));
    ok(tenk_in(dir.path(), &["build-index"]));
    ok(tenk_in(
        dir.path(),
        &["--event-date", "2022-12-15", "event-study"],
    ));
    let rep: Value =
        serde_json::from_slice(&fs::read(dir.path().join("out/event_study.json")).unwrap())
            .unwrap();
    assert_eq!(rep["spec"]["event_date"], "2022-12-15");
    assert_eq!(rep["spec"]["day0"], "2022-12-15");
}
