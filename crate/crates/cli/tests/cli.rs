use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn dickson(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dickson"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}\nstderr: {}",
        out.status,
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&stdout(&dickson(args))).unwrap()
}

fn schema_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("schema")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("dickson-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

const SMALL_SUITE: [&str; 12] = [
    "--field", "7", "--field", "2^3", "suite", "--n", "2..4", "--a", "1..2", "--k", "1..2",
    "--suites",
];

fn small_suite(extra: &[&str]) -> Vec<String> {
    let mut args: Vec<String> = SMALL_SUITE.iter().map(|s| s.to_string()).collect();
    args.push("all".into());
    args.extend(extra.iter().map(|s| s.to_string()));
    args
}

#[test]
fn suite_output_is_byte_identical() {
    for format in ["json", "csv"] {
        let args = small_suite(&["--format", format]);
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let first = stdout(&dickson(&args));
        let second = stdout(&dickson(&args));
        assert_eq!(first, second);
        assert!(!first.is_empty());
    }
}

#[test]
fn report_validates_against_schema() {
    let schema: Value = serde_json::from_str(
        &std::fs::read_to_string(schema_dir().join("run_report.schema.json")).unwrap(),
    )
    .unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    for extra in [&[][..], &["--timings"][..]] {
        let args = small_suite(extra);
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let report = json(&args);
        let errors: Vec<String> = validator
            .iter_errors(&report)
            .map(|e| e.to_string())
            .collect();
        assert!(errors.is_empty(), "{errors:?}");
    }
    // the schema is not vacuous
    let mut bad = json(&[
        "--field", "7", "suite", "--suites", "valueset", "--n", "2", "--a", "1",
    ]);
    bad["instances"][0]["status"] = Value::from("maybe");
    assert!(!validator.is_valid(&bad));
}

#[test]
fn csv_header_matches_schema_file() {
    let header = std::fs::read_to_string(schema_dir().join("instances.csv.header")).unwrap();
    let args = small_suite(&["--format", "csv"]);
    let args: Vec<&str> = args.iter().map(String::as_str).collect();
    let out = stdout(&dickson(&args));
    assert_eq!(out.lines().next().unwrap(), header.trim_end());
    assert!(out.lines().count() > 1);
}

#[test]
fn empty_range_fails_before_running() {
    for bad in [
        &["--field", "7", "suite", "--n", "5..2"][..],
        &["--field", "7", "suite", "--k", ""][..],
        &["suite", "--n", "2"][..],
        &["--field", "7", "suite", "--a", "9..12"][..],
    ] {
        let out = dickson(bad);
        assert_eq!(out.status.code(), Some(2), "{bad:?}");
        assert!(out.stdout.is_empty());
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.starts_with("error:"), "{err}");
        assert!(!err.contains("suite "), "instances ran: {err}");
    }
}

#[test]
fn config_file_round_trips() {
    let dir = scratch("config");
    let dumped = stdout(&dickson(&[
        "--field",
        "7",
        "--field",
        "2^3",
        "--budget-dp",
        "12345",
        "suite",
        "--n",
        "3,5..7",
        "--a",
        "1",
        "--suites",
        "region,valueset",
        "--c1",
        "0.3",
        "--dump-config",
    ]));
    let path = dir.join("exp.cfg");
    std::fs::write(&path, &dumped).unwrap();
    let again = stdout(&dickson(&[
        "suite",
        "--config",
        path.to_str().unwrap(),
        "--dump-config",
    ]));
    assert_eq!(dumped, again);
    assert!(dumped.contains("budget-dp = 12345\n"));
    assert!(dumped.contains("n = 3,5..7\n"));

    // flags override the file
    let over = stdout(&dickson(&[
        "suite",
        "--config",
        path.to_str().unwrap(),
        "--n",
        "2",
        "--dump-config",
    ]));
    assert!(over.contains("n = 2\n"));

    // the file drives a run and --out writes the report
    let out_path = dir.join("report.json");
    let status = dickson(&[
        "suite",
        "--config",
        path.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(status.status.success());
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(report["config"]["budget_dp"], 12345);
    assert_eq!(report["pass"], true);
}

#[test]
fn valueset_suite_small_fields() {
    let mut args = vec![];
    for q in [
        "4", "5", "7", "8", "9", "11", "13", "16", "25", "27", "32", "49", "64",
    ] {
        args.extend(["--field", q]);
    }
    args.extend(["suite", "--suites", "valueset", "--n", "2..12"]);
    let report = json(&args);
    assert_eq!(report["pass"], true);
    assert_eq!(report["suites"]["valueset"]["pass"], 2827);
    assert_eq!(report["suites"]["valueset"]["fail"], 0);
}

#[test]
fn region_suite_reports_k_min() {
    let report = json(&[
        "--field", "2^16", "suite", "--suites", "region", "--n", "3", "--a", "1",
    ]);
    assert_eq!(report["pass"], true);
    let region = &report["instances"][0]["detail"]["region"];
    assert_eq!(region["k_min"], 16);
    assert_eq!(
        region["k_max"],
        report["instances"][0]["detail"]["oracle_k_max"]
    );
    assert_eq!(region["published"]["k_max"], 21182);
}

#[test]
fn budget_overflow_is_a_skip() {
    let report = json(&[
        "--field",
        "2^4",
        "--budget-subsets",
        "5",
        "suite",
        "--suites",
        "deephole",
        "--n",
        "2",
        "--a",
        "1",
        "--k",
        "2",
    ]);
    let inst = &report["instances"][0];
    assert_eq!(inst["status"], "skipped");
    assert!(inst["reason"].as_str().unwrap().starts_with("budget:"));
    assert_eq!(report["pass"], true);
}

#[test]
fn subcommand_errors() {
    let out = dickson(&["--field", "6", "field"]);
    assert_eq!(out.status.code(), Some(2));
    let out = dickson(&[
        "--field", "7", "deephole", "--n", "2", "--k", "1", "--b1", "9",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = dickson(&["--field", "2^16", "region", "--n", "3", "--c1", "0.001"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not below"));
}

#[test]
fn deephole_word_inputs_agree() {
    // x^2 on D = {0, 2, 5, 6} as a literal and as a value list
    let by_poly = json(&[
        "--field", "7", "deephole", "--n", "2", "--k", "1", "--poly", "0,0,1",
    ]);
    let by_word = json(&[
        "--field",
        "7",
        "deephole",
        "--n",
        "2",
        "--k",
        "1",
        "--word",
        "[0,4,4,1]",
    ]);
    assert_eq!(by_poly["words"], by_word["words"]);
    let word = &by_poly["words"][0];
    assert_eq!(word["deep_hole"], false);
    assert_eq!(word["verdict"]["subset"], serde_json::json!([2, 5]));
    assert_eq!(word["verdict"]["v"], "4");

    let all = json(&[
        "--field",
        "2^3",
        "deephole",
        "--n",
        "3",
        "--k",
        "2",
        "--all-b1",
        "--brute-force-crosscheck",
    ]);
    let words = all["words"].as_array().unwrap();
    assert_eq!(words.len(), 8);
    assert!(words.iter().all(|w| w["crosscheck_agrees"] == true));
}
