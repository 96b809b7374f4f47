use std::f64::consts::PI;
use std::process::{Command, Output};

use levykernel_cli::table::SweepTable;
use serde_json::Value;

fn run_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_levykernel"));
    cmd.args(args)
        .env_remove("LEVYKERNEL_THREADS")
        .env_remove("LEVYKERNEL_CONFIG");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn run(args: &[&str]) -> Output {
    run_env(args, &[])
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn table(args: &[&str]) -> SweepTable {
    SweepTable::from_csv(&ok(args)).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&ok(args)).unwrap()
}

#[test]
fn poisson_closed_form() {
    let t = table(&["eval", "--d", "2", "--alpha", "1", "--r", "1", "--method", "closed"]);
    assert_eq!(t.rows.len(), 1);
    assert_eq!(t.rows[0].method, "closed_form");
    let expect = 2f64.powf(-1.5) / (2.0 * PI);
    assert!((t.rows[0].value / expect - 1.0).abs() < 1e-15, "{}", t.rows[0].value);
}

#[test]
fn gaussian_at_origin() {
    let v = json(&["eval", "--d", "2", "--alpha", "2", "--r", "0", "--json"]);
    let value = v["result"]["value"].as_f64().unwrap();
    assert!((value - 1.0 / (4.0 * PI)).abs() < 1e-17);
    assert_eq!(v["result"]["method"], "closed_form");
}

#[test]
fn symbol_contour_verified_against_oracle() {
    let v = json(&[
        "eval",
        "--symbol",
        r#"{"kind":"relativistic","alpha":1,"m":1}"#,
        "--beta",
        "0.5",
        "--r",
        "4",
        "--method",
        "mb",
        "--verify",
        "--json",
    ]);
    assert_eq!(v["result"]["method"], "mb_contour");
    assert!(v["verify"]["rel_gap"].as_f64().unwrap() < 1e-6);
}

#[test]
fn symbol_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sym.json");
    std::fs::write(&path, r#"{"kind":"stable","alpha":1.5}"#).unwrap();
    let arg = format!("@{}", path.display());
    let from_file = table(&["eval", "--symbol", &arg, "--r", "2"]);
    let stable = table(&["eval", "--alpha", "1.5", "--r", "2", "--method", "mb"]);
    assert!((from_file.rows[0].value / stable.rows[0].value - 1.0).abs() < 1e-6);
}

#[test]
fn sweep_rows_and_oracle_footer() {
    let t = table(&[
        "sweep", "--alpha", "1.5", "--r-min", "0.5", "--r-max", "50", "--points", "3", "--log", "--method", "mb",
        "--verify",
    ]);
    assert_eq!(t.rows_for("mb_contour").count(), 3);
    assert_eq!(t.rows_for("oracle").count(), 3);
    assert!(t.rows.windows(2).all(|w| w[0].r <= w[1].r));
    let gap = t.summary("max_rel_gap(mb,oracle)").unwrap();
    assert!(gap < 1e-6, "{gap}");
}

#[test]
fn even_beta_tail_slope() {
    let t = table(&[
        "sweep", "--d", "2", "--alpha", "1.5", "--beta", "2", "--r-min", "20", "--r-max", "200", "--points", "8",
        "--log", "--method", "mb",
    ]);
    let slope = t.summary("tail_slope(mb)").unwrap();
    let expect = -(2.0 + 2.0 + 1.5);
    assert!((slope / expect - 1.0).abs() < 0.02, "{slope}");
}

#[test]
fn csv_output_round_trips() {
    let text = ok(&[
        "sweep",
        "--alpha",
        "0.8",
        "--beta",
        "0.5",
        "--r-min",
        "0.3",
        "--r-max",
        "30",
        "--points",
        "5",
        "--log",
        "--method",
        "mb,oracle",
    ]);
    let t = SweepTable::from_csv(&text).unwrap();
    assert_eq!(t.to_csv(), text);
    assert!(text.lines().any(|l| l == "r,t,method,value,est_error"));
    assert_eq!(t.meta("levykernel"), Some(env!("CARGO_PKG_VERSION")));
}

#[test]
fn json_sweep_matches_csv() {
    let args = [
        "sweep", "--alpha", "1.2", "--r-min", "1", "--r-max", "4", "--points", "4",
    ];
    let csv = table(&args);
    let mut with_json = args.to_vec();
    with_json.push("--json");
    let j: SweepTable = serde_json::from_str(&ok(&with_json)).unwrap();
    assert_eq!(j, csv);
}

#[test]
fn output_is_bit_reproducible_across_thread_counts() {
    let args = [
        "sweep",
        "--alpha",
        "1.3",
        "--beta",
        "0.7",
        "--r-min",
        "0.1",
        "--r-max",
        "100",
        "--points",
        "12",
        "--log",
        "--method",
        "auto,mb,oracle",
    ];
    let a = run_env(&args, &[("LEVYKERNEL_THREADS", "1")]);
    let b = run_env(&args, &[("LEVYKERNEL_THREADS", "4")]);
    let c = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn compare_against_closed_form() {
    let v = json(&[
        "compare",
        "--alpha",
        "1",
        "--r-min",
        "0.5",
        "--r-max",
        "100",
        "--points",
        "8",
        "--log",
        "--method",
        "mb,closed",
    ]);
    let pair = &v["pairs"][0];
    assert_eq!(pair["points"], 8);
    assert!(pair["max_rel_diff"].as_f64().unwrap() < 1e-8);
    assert_eq!(v["leading_term"]["expected_slope"], -3.0);
}

#[test]
fn compare_identical_routes_gives_zero() {
    // auto resolves to the closed form here
    let v = json(&[
        "compare",
        "--alpha",
        "2",
        "--r-min",
        "0",
        "--r-max",
        "3",
        "--points",
        "5",
        "--method",
        "closed,auto",
    ]);
    assert_eq!(v["pairs"][0]["max_rel_diff"].as_f64(), Some(0.0));
    assert!(v["leading_term"].is_null());
}

#[test]
fn compare_fits_the_leading_term() {
    let v = json(&[
        "compare",
        "--alpha",
        "1.5",
        "--r-min",
        "10",
        "--r-max",
        "200",
        "--points",
        "8",
        "--log",
        "--method",
        "mb,oracle",
    ]);
    let lead = &v["leading_term"];
    assert_eq!(lead["reference"], "oracle");
    assert!(lead["rel_gap"].as_f64().unwrap() < 0.03, "{lead}");
    let slope = v["tail_fit"][0]["slope"].as_f64().unwrap();
    assert!((slope + 3.5).abs() < 0.05, "{slope}");
}

#[test]
fn compare_records_failing_methods() {
    let v = json(&[
        "compare",
        "--alpha",
        "1.5",
        "--r-min",
        "1",
        "--r-max",
        "30",
        "--points",
        "4",
        "--method",
        "mb,small-r",
    ]);
    assert!(!v["failures"].as_array().unwrap().is_empty());
    assert_eq!(v["failures"][0]["method"], "small-r");
}

#[test]
fn envelopes() {
    let v = json(&[
        "envelope", "--alpha", "1.2", "--r-min", "0.1", "--r-max", "100", "--points", "10", "--log",
    ]);
    assert_eq!(v["holds"], true);
    assert_eq!(v["rows"].as_array().unwrap().len(), 10);
    let v = json(&[
        "envelope",
        "--symbol",
        r#"{"kind":"sum_stable","a":0.6,"b":1.4}"#,
        "--t",
        "2",
        "--r-min",
        "0.1",
        "--r-max",
        "100",
        "--points",
        "8",
        "--log",
    ]);
    assert_eq!(v["holds"], true);
    assert_eq!(v["small_time_branch"], false);
    let out = run(&[
        "envelope",
        "--symbol",
        r#"{"kind":"relativistic","alpha":1,"m":1}"#,
        "--r-min",
        "1",
        "--r-max",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn symbols_listing() {
    let v = json(&["symbols", "--json"]);
    let names: Vec<&str> = v
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["name"].as_str().unwrap())
        .collect();
    assert_eq!(names, ["stable", "sum_stable", "relativistic", "perturbed"]);
    assert!(ok(&["symbols"]).contains("r^a + r^b"));
}

#[test]
fn out_flag_writes_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("k.csv");
    let p = path.to_str().unwrap();
    let stdout = ok(&[
        "sweep", "--alpha", "1.5", "--r-min", "1", "--r-max", "2", "--points", "2", "--out", p,
    ]);
    assert!(stdout.is_empty());
    let t = SweepTable::from_csv(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(t.rows.len(), 2);
}

#[test]
fn config_sets_default_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("lk.toml");
    std::fs::write(&path, "tol = 1e-6\n").unwrap();
    let p = path.to_str().unwrap();
    let t = table(&["--config", p, "eval", "--alpha", "1.5", "--r", "1"]);
    assert_eq!(t.meta("tol"), Some("9.9999999999999995e-7"));
    let t = table(&["eval", "--config", p, "--alpha", "1.5", "--r", "1", "--tol", "1e-9"]);
    assert_eq!(t.meta("tol"), Some("1.0000000000000001e-9"));
    let out = run_env(&["eval", "--alpha", "1.5", "--r", "1"], &[("LEVYKERNEL_CONFIG", p)]);
    let t = SweepTable::from_csv(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(t.meta("tol"), Some("9.9999999999999995e-7"));

    std::fs::write(&path, "tol = \"tight\"\n").unwrap();
    assert_eq!(
        run(&["--config", p, "eval", "--alpha", "1.5", "--r", "1"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["eval", "--r", "1"][..],
        &["eval", "--alpha", "3", "--r", "1"],
        &["eval", "--alpha", "1.5", "--r", "1", "--method", "bogus"],
        &[
            "eval",
            "--alpha",
            "1.5",
            "--symbol",
            r#"{"kind":"stable","alpha":1}"#,
            "--r",
            "1",
        ],
        &[
            "eval",
            "--symbol",
            r#"{"kind":"stable","alpha":1.5}"#,
            "--r",
            "1",
            "--method",
            "series",
        ],
        &["eval", "--symbol", r#"{"kind":"warp","alpha":1.5}"#, "--r", "1"],
        &[
            "eval",
            "--alpha",
            "1.5",
            "--r",
            "1",
            "--method",
            "mb",
            "--contour-c",
            "5",
        ],
        &[
            "eval",
            "--alpha",
            "1.5",
            "--r",
            "1",
            "--method",
            "mb",
            "--contour-c",
            "1.9999999999",
        ],
        &["eval", "--alpha", "1.5", "--r", "1", "--method", "closed"],
        &["sweep", "--alpha", "1.5", "--r-min", "0", "--r-max", "1", "--log"],
        &["sweep", "--alpha", "1.5", "--r-min", "2", "--r-max", "1"],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
    let out = run_env(
        &["eval", "--alpha", "1.5", "--r", "1"],
        &[("LEVYKERNEL_THREADS", "many")],
    );
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn numeric_failures_exit_3_with_diagnostics() {
    let out = run(&[
        "eval",
        "--symbol",
        r#"{"kind":"stable","alpha":1.5}"#,
        "--r",
        "1",
        "--t",
        "1e-280",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["error"], "non_convergent");
    assert_eq!(v["r"], 1.0);
    assert!(v["detail"]["iterations"].as_u64().is_some());

    let out = run(&["eval", "--alpha", "1.5", "--r", "30", "--method", "small-r"]);
    assert_eq!(out.status.code(), Some(3));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["method"], "small-r");
}
