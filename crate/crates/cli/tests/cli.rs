use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn pfpart(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pfpart"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

#[test]
fn plancherel_measure_lists_seven_partitions() {
    let out = pfpart(&["measure", "--family", "plancherel", "--eta", "1", "--n-cut", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("size,partition,measure_re,measure_im"));
    assert_eq!(lines.count(), 7);
    assert!(stderr(&out).contains("\"n_cut\":3"));
}

#[test]
fn measure_json_records_carry_partitions_as_arrays() {
    let out = pfpart(&[
        "measure", "--family", "z", "--z", "2.5", "--xi", "0.2", "--n-cut", "2", "--format", "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let records = doc["records"].as_array().unwrap();
    assert_eq!(records.len(), 4);
    assert_eq!(records[3]["partition"], serde_json::json!([1, 1]));
    assert!(records[0]["measure"]["re"].is_f64());
    assert_eq!(doc["metadata"]["family"], "z");
    assert_eq!(doc["metadata"]["xi"], 0.2);
}

#[test]
fn invalid_xi_exits_with_code_two() {
    let out = pfpart(&["measure", "--family", "z", "--z", "2.5", "--xi", "1.2", "--n-cut", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("0 < xi < 1"));
    assert!(stdout(&out).is_empty());
}

#[test]
fn missing_family_and_bad_route_exit_with_code_two() {
    assert_eq!(pfpart(&["measure", "--n-cut", "2"]).status.code(), Some(2));
    let out = pfpart(&[
        "kernel",
        "--family",
        "plancherel",
        "--eta",
        "1",
        "--route",
        "fast",
        "--x",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn kernel_table_has_required_columns_and_zero_diagonal() {
    let out = pfpart(&["kernel", "--family", "plancherel", "--eta", "1", "--x", "-6:2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,y,S_re,S_im,route,error"));
    let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(str::to_owned).collect()).collect();
    assert_eq!(rows.len(), 81);
    for row in &rows {
        let (re, im): (f64, f64) = (row[2].parse().unwrap(), row[3].parse().unwrap());
        assert!(re.is_finite() && im.is_finite());
        if row[0] == row[1] {
            assert_eq!((re, im), (0.0, 0.0));
        }
    }
}

#[test]
fn kernel_diff_mode_reports_route_gap() {
    let out = pfpart(&[
        "kernel", "--family", "z", "--z", "2.5", "--xi", "0.2", "--x", "-3:1", "--route", "contour", "--diff",
        "closed", "--format", "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let gap = doc["metadata"]["max_gap"].as_f64().unwrap();
    assert!(gap < 1e-9, "{gap}");
    assert_eq!(doc["records"][0]["alt_route"], "closed");
}

#[test]
fn kernel_failure_exits_with_code_three_and_names_the_entry() {
    let out = pfpart(&[
        "kernel", "--family", "z", "--z", "2.5", "--xi", "0.99", "--route", "closed", "--x", "0:1",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("(x, y) = (0, 1)"));
}

#[test]
fn correlate_with_oracle_agrees() {
    let out = pfpart(&[
        "correlate",
        "--family",
        "z",
        "--z",
        "2.5",
        "--xi",
        "0.2",
        "--oracle",
        "--format",
        "json",
        "0",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(doc["records"][0]["discrepancy"].as_f64().unwrap() < 1e-8);

    let out = pfpart(&[
        "correlate",
        "--family",
        "plancherel",
        "--eta",
        "0.8",
        "--oracle",
        "--format",
        "json",
        "-4",
        "-2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let rho = doc["records"][0]["rho"]["re"].as_f64().unwrap();
    assert!(rho > 0.0 && rho < 1.0);
    assert!(doc["records"][0]["discrepancy"].as_f64().unwrap() < 1e-8);
}

#[test]
fn empty_query_gives_one() {
    let out = pfpart(&["correlate", "--family", "plancherel", "--eta", "0.8"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "points,rho_re,rho_im\n[],1.0,0.0\n");
}

#[test]
fn small_eta_correlation_tends_to_one() {
    let out = pfpart(&[
        "correlate",
        "--family",
        "plancherel",
        "--eta",
        "0.001",
        "--",
        "-2",
        "-4",
        "-6",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let line = stdout(&out).lines().nth(1).unwrap().to_owned();
    let re: f64 = line.rsplit(',').nth(1).unwrap().parse().unwrap();
    assert!((re - 1.0).abs() < 1e-5, "{line}");
}

#[test]
fn unresolved_oracle_exits_with_code_four() {
    let out = pfpart(&[
        "correlate",
        "--family",
        "z",
        "--z",
        "2.5",
        "--xi",
        "0.2",
        "--oracle",
        "--n-cut",
        "3",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn duplicate_points_are_a_config_error() {
    let out = pfpart(&["correlate", "--family", "plancherel", "--eta", "1", "1", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn output_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<_> = (0..2).map(|i| dir.path().join(format!("k{i}.json"))).collect();
    for p in &paths {
        let out = pfpart(&[
            "kernel",
            "--family",
            "z",
            "--z",
            "3.3",
            "--xi",
            "0.35",
            "--route",
            "contour",
            "--x",
            "-4:2",
            "--format",
            "json",
            "--output",
            p.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
        assert!(stdout(&out).is_empty());
    }
    assert_eq!(fs::read(&paths[0]).unwrap(), fs::read(&paths[1]).unwrap());
}

#[test]
fn config_file_values_yield_to_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(
        &cfg,
        "family = \"plancherel\"\neta = 1.0\nn-cut = 2\nformat = \"json\"\n",
    )
    .unwrap();
    let out = pfpart(&["measure", "--config", cfg.to_str().unwrap(), "--n-cut", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["metadata"]["n_cut"], 3);
    assert_eq!(doc["records"].as_array().unwrap().len(), 7);

    fs::write(&cfg, "family = \"plancherel\"\neta = 0\n").unwrap();
    assert_eq!(
        pfpart(&["measure", "--config", cfg.to_str().unwrap()]).status.code(),
        Some(2)
    );
}

#[test]
fn generic_family_loads_coefficients() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("e.json");
    fs::write(&path, r#"[1, 0.3, {"re": 0.1, "im": 0.05}]"#).unwrap();
    let out = pfpart(&[
        "correlate",
        "--family",
        "generic",
        "--coefficients",
        path.to_str().unwrap(),
        "--oracle",
        "--",
        "-4",
        "-2",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
}

#[test]
fn verify_emits_a_passing_report() {
    let out = pfpart(&["verify"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["passed"], true);
    assert_eq!(doc["identities"]["passed"], true);
    assert!(doc["records"].as_array().unwrap().len() >= 6);
}
