//! End-to-end tests driving the compiled binary: exit codes, output shapes,
//! locale handling and determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fuzzy-klassen"))
        .args(args)
        .env_remove("KLASSEN_FIS_CONFIG")
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

#[test]
fn analyze_replay_reproduces_the_reference_quadrant_column() {
    let out = run(&[
        "analyze",
        "--district-scores",
        &data("cilegon_scores.csv"),
        "--reference-scores",
        &data("banten_scores.csv"),
        "--format",
        "json",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let quadrants: Vec<&str> = report["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|row| row["fuzzy"].as_str().unwrap())
        .collect();
    assert_eq!(
        quadrants,
        vec!["K1", "K1", "K1", "K1", "K1", "K1", "K4", "K1", "K1"]
    );
    assert_eq!(report["summary"]["fuzzy_counts"]["K1"], 8);
    assert!(report["rows"][0]["traditional"].is_null());
}

#[test]
fn analyze_is_byte_deterministic() {
    let args = ["analyze", "--config", &data("replay.conf")];
    let first = run(&args);
    let second = run(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
    assert!(!first.stdout.is_empty());
}

#[test]
fn analyze_table_format_lists_sectors_and_summary() {
    let out = run(&[
        "analyze",
        "--config",
        &data("replay.conf"),
        "--format",
        "table",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("District:  Kota Cilegon"));
    assert!(text.contains("Fuzzy quadrants:       K1=8  K2=0  K3=0  K4=1"));
    assert!(text.contains("Config digest:         sha256:"));
    assert!(text
        .lines()
        .any(|l| l.starts_with("V7") && l.contains("K4")));
}

#[test]
fn analyze_uses_the_env_config_when_no_flag_given() {
    let out = Command::new(env!("CARGO_BIN_EXE_fuzzy-klassen"))
        .args(["analyze"])
        .env("KLASSEN_FIS_CONFIG", data("replay.conf"))
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("\"district\": \"Kota Cilegon\""));
}

#[test]
fn analyze_with_raw_district_flags_v1_against_reference_scores() {
    let out = run(&[
        "analyze",
        "--config",
        &data("cilegon.conf"),
        "--format",
        "json",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let v1 = &report["rows"][0];
    assert_eq!(v1["sector"], "V1");
    // computed from raw data with the known triple: rd ~ 36.05, rc ~ 35.44
    let rd = v1["district"]["rd"].as_f64().unwrap();
    let rc = v1["district"]["rc"].as_f64().unwrap();
    assert!((rd - 36.053217).abs() < 1e-3, "rd = {rd}");
    assert!((rc - 35.444413).abs() < 1e-3, "rc = {rc}");
    assert_eq!(v1["fuzzy"], "K1");
}

#[test]
fn missing_rule_file_exits_2_naming_the_path() {
    let out = run(&[
        "analyze",
        "--config",
        &data("replay.conf"),
        "--rules",
        "/no/such/file.rules",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("/no/such/file.rules"));
}

#[test]
fn empty_dataset_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.csv");
    std::fs::write(&empty, "region,sector,year,value\n").unwrap();
    let out = run(&[
        "analyze",
        "--district",
        empty.to_str().unwrap(),
        "--reference-scores",
        &data("banten_scores.csv"),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("no data rows"));
}

#[test]
fn missing_inputs_exit_2() {
    let out = run(&["analyze"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("district"));
}

#[test]
fn unknown_flag_exits_2() {
    let out = run(&["analyze", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn fuzzify_prints_four_decimal_degrees() {
    let out = run(&[
        "fuzzify",
        "--breakpoints",
        "V1=216831,283777,350722",
        "V1",
        "296121.45",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let line = stdout(&out);
    assert_eq!(line, "low=0.0000 medium=0.8156 high=0.1844\n");
}

#[test]
fn fuzzify_at_the_peak_and_below_the_foot() {
    let peak = run(&[
        "fuzzify",
        "--breakpoints",
        "V1=216831,283777,350722",
        "V1",
        "283777",
    ]);
    assert!(stdout(&peak).contains("medium=1.0000"));
    let below = run(&[
        "fuzzify",
        "--breakpoints",
        "V1=216831,283777,350722",
        "V1",
        "100000",
    ]);
    assert!(stdout(&below).contains("low=1.0000"));
}

#[test]
fn fuzzify_without_breakpoints_or_district_exits_2() {
    let out = run(&["fuzzify", "V1", "296121.45"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("V1"));
}

#[test]
fn fuzzify_comma_locale_value() {
    let out = run(&[
        "fuzzify",
        "--locale",
        "comma",
        "--breakpoints",
        "V1=216831,283777,350722",
        "V1",
        "296.121,45",
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("medium=0.8156"));
}

#[test]
fn curves_emits_one_row_per_grid_point_and_respects_the_clip_bound() {
    let out = run(&[
        "curves",
        "--district",
        &data("cilegon_2012.csv"),
        "--breakpoints",
        "V1=216831,283777,350722",
        "V1",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(header[0], "point");
    assert!(header.contains(&"RD.low"));
    assert!(header.contains(&"RD.rule9"));
    assert!(header.contains(&"RD.aggregate"));
    assert!(header.contains(&"RC.aggregate"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 100);

    let aggregate_idx = header.iter().position(|h| *h == "RD.aggregate").unwrap();
    let max_aggregate = rows
        .iter()
        .map(|row| {
            row.split(',')
                .nth(aggregate_idx)
                .unwrap()
                .parse::<f64>()
                .unwrap()
        })
        .fold(0.0f64, f64::max);
    assert!(max_aggregate <= 0.816, "max aggregate {max_aggregate}");
    // 6-decimal cells
    assert!(rows[0].split(',').nth(1).unwrap().len() >= 8);
}

#[test]
fn locale_modes_yield_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    let comma = dir.path().join("comma.csv");
    std::fs::write(
        &comma,
        "region,sector,year,value\n\
         Kota Cilegon,V1,2011,\"293.563,49\"\n\
         Kota Cilegon,V1,2012,\"296.121,45\"\n\
         Kota Cilegon,V2,2011,\"12.101,38\"\n\
         Kota Cilegon,V2,2012,\"12.935,68\"\n",
    )
    .unwrap();
    let dot = dir.path().join("dot.csv");
    std::fs::write(
        &dot,
        "region,sector,year,value\n\
         Kota Cilegon,V1,2011,293563.49\n\
         Kota Cilegon,V1,2012,296121.45\n\
         Kota Cilegon,V2,2011,12101.38\n\
         Kota Cilegon,V2,2012,12935.68\n",
    )
    .unwrap();
    let scores = dir.path().join("ref.csv");
    std::fs::write(&scores, "region,sector,rd,rc\nRef,V1,30,30\nRef,V2,30,30\n").unwrap();
    let run_with = |file: &std::path::Path, locale: &str| {
        let out = run(&[
            "analyze",
            "--district",
            file.to_str().unwrap(),
            "--reference-scores",
            scores.to_str().unwrap(),
            "--locale",
            locale,
            "--format",
            "json",
        ]);
        assert!(out.status.success(), "stderr: {}", stderr(&out));
        out.stdout
    };
    // the reference score file is plain integers, valid in both locales
    assert_eq!(run_with(&comma, "comma"), run_with(&dot, "dot"));
}

#[test]
fn rules_check_passes_the_shipped_file_and_flags_edits() {
    let ok = run(&["rules-check", &data("klassen_default.rules")]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(stdout(&ok).contains("OK"));

    let dir = tempfile::tempdir().unwrap();
    let shortened = dir.path().join("short.rules");
    let text: String = std::fs::read_to_string(data("klassen_default.rules"))
        .unwrap()
        .lines()
        .filter(|l| !l.contains("Vt IS medium AND Vt1 IS medium"))
        .collect::<Vec<_>>()
        .join("\n");
    std::fs::write(&shortened, text).unwrap();
    let missing = run(&["rules-check", shortened.to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(stdout(&missing).contains("no rule covers"));
    assert!(stdout(&missing).contains("Vt=medium"));

    let malformed = dir.path().join("bad.rules");
    std::fs::write(
        &malformed,
        "IF Vt IS low AND Vt1 IS low THEN RD IS low\nIF broken\n",
    )
    .unwrap();
    let bad = run(&["rules-check", malformed.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stderr(&bad).contains("line 2"));

    let gone = run(&["rules-check", "/no/such.rules"]);
    assert_eq!(gone.status.code(), Some(2));
}

#[test]
fn output_flag_writes_the_report_to_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("report.json");
    let out = run(&[
        "analyze",
        "--config",
        &data("replay.conf"),
        "--output",
        target.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).is_empty());
    let written = std::fs::read_to_string(&target).unwrap();
    assert!(written.contains("\"district\": \"Kota Cilegon\""));
}

#[test]
fn custom_rules_change_the_analysis() {
    // all-low consequents: every sector scores identically, so everything
    // compared against itself stays K1
    let dir = tempfile::tempdir().unwrap();
    let rules = dir.path().join("flat.rules");
    let mut text = String::new();
    for current in ["low", "medium", "high"] {
        for previous in ["low", "medium", "high"] {
            text.push_str(&format!(
                "IF Vt IS {current} AND Vt1 IS {previous} THEN RD IS low ALSO RC IS low\n"
            ));
        }
    }
    std::fs::write(&rules, text).unwrap();
    let out = run(&[
        "analyze",
        "--district",
        &data("cilegon_2012.csv"),
        "--reference",
        &data("cilegon_2012.csv"),
        "--rules",
        rules.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    for row in report["rows"].as_array().unwrap() {
        assert_eq!(row["fuzzy"], "K1");
        assert_eq!(row["agreement"], true);
    }
}
