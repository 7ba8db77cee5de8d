use std::path::PathBuf;
use std::process::Command;

use eqweight_cli::render::{render, Format};
use eqweight_cli::run::run;
use eqweight_cli::scenario::{digest, parse};
use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn load(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap()
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_eqweight"))
}

const POINT: &str = r#"{"version": 1, "name": "point", "space": {"builtin": "point_z2"}, "window": 3, "tasks": [{"kind": "cohomology"}]}"#;

#[test]
fn minimal_scenario_parses() {
    let s = parse(POINT).unwrap();
    assert_eq!(s.tasks.len(), 1);
    assert!(s.resolution.periodic);
    assert_eq!(s.digest, digest(POINT.as_bytes()));
}

#[test]
fn unknown_builtin_is_one_located_error() {
    let doc = POINT.replace("point_z2", "klein_bottle");
    let errs = parse(&doc).unwrap_err();
    assert_eq!(errs.len(), 1);
    assert_eq!(errs[0].path, "/space/builtin");
    assert!(errs[0].message.contains("klein_bottle"));
}

#[test]
fn unknown_fields_are_rejected() {
    for doc in [
        POINT.replace(r#""window": 3"#, r#""window": 3, "colour": 1"#),
        POINT.replace(r#"{"kind": "cohomology"}"#, r#"{"kind": "cohomology", "page": 2}"#),
        POINT.replace(r#"{"kind": "cohomology"}"#, r#"{"kind": "cup", "pages": 2}"#),
        POINT.replace(r#"{"kind": "cohomology"}"#, r#"{"kind": "homotopy"}"#),
    ] {
        let errs = parse(&doc).unwrap_err();
        assert!(errs[0].path.starts_with("line "), "{doc}: {:?}", errs);
    }
}

#[test]
fn semantic_errors_carry_their_location() {
    let doc = r#"{"version": 2, "name": "x", "space": {"builtin": "reflection_circle"}, "window": 4,
        "budgets": {"max_depth": 3},
        "tasks": [{"kind": "hs", "filtration": "first", "pages": [1]}, {"kind": "identity", "identities": ["projection", "bogus"]}]}"#;
    let paths: Vec<String> = parse(doc).unwrap_err().into_iter().map(|e| e.path).collect();
    for want in ["/version", "/resolution/depth", "/tasks/0/pages/0", "/tasks/1/identities/1"] {
        assert!(paths.iter().any(|p| p == want), "{want} missing from {paths:?}");
    }
}

#[test]
fn budgets_reject_large_bar_resolutions() {
    let doc = r#"{"version": 1, "name": "x", "space": {"builtin": "rotation_circle_z4"}, "resolution": {"kind": "bar"}, "window": 8, "tasks": []}"#;
    let errs = parse(doc).unwrap_err();
    assert!(errs[0].message.contains("max_rank"), "{errs:?}");
}

#[test]
fn shipped_full_scenario_lists_six_tasks() {
    let s = parse(&load("reflection_circle_full.json")).unwrap();
    assert_eq!(s.tasks.len(), 6);
}

fn dims(task: &Value) -> Vec<(i64, u64)> {
    task["result"]["dims"].as_array().unwrap().iter().map(|p| (p[0].as_i64().unwrap(), p[1].as_u64().unwrap())).collect()
}

#[test]
fn reflection_circle_report_has_the_expected_cohomology() {
    let report = run(&parse(&load("reflection_circle_full.json")).unwrap());
    assert!(report.all_passed);
    let tasks = report.value["tasks"].as_array().unwrap();
    let want: Vec<(i64, u64)> = (0..=8).map(|k| (k, if k == 0 { 1 } else { 2 })).collect();
    assert_eq!(dims(&tasks[0]), want);
    let homology: Vec<(i64, u64)> = (-8..=1).map(|k| (k, if k == 1 { 1 } else { 2 })).collect();
    assert_eq!(dims(&tasks[1]), homology);
    assert_eq!(tasks[5]["result"]["all_bijective"], Value::Bool(true));
}

#[test]
fn antipodal_report_has_the_expected_cohomology() {
    let report = run(&parse(&load("antipodal_circle_full.json")).unwrap());
    let want: Vec<(i64, u64)> = (0..=6).map(|k| (k, u64::from(k <= 1))).collect();
    assert_eq!(dims(&report.value["tasks"][0]), want);
}

#[test]
fn identity_suite_passes() {
    let report = run(&parse(&load("identity_suite.json")).unwrap());
    assert!(report.all_passed);
    let results = report.value["tasks"][0]["result"]["results"].as_array().unwrap();
    assert_eq!(results.len(), 7);
    assert!(results.iter().all(|r| r["passed"] == Value::Bool(true) && r["checked"].as_u64().unwrap() > 0));
}

#[test]
fn table_shows_hs_page_two_as_two_rows_of_ones() {
    let report = run(&parse(&load("reflection_circle_full.json")).unwrap());
    let text = render(&report.value, Format::Table);
    let page = text.split("E_2 (columns group_degree").nth(1).unwrap();
    let rows: Vec<&str> = page.lines().skip(1).take(2).collect();
    assert!(rows[0].trim_start().starts_with("1 |"), "{rows:?}");
    assert!(rows[1].trim_start().starts_with("0 |"), "{rows:?}");
    for row in rows {
        let cells: Vec<&str> = row.split('|').nth(1).unwrap().split_whitespace().collect();
        assert!(cells.iter().filter(|c| **c != ".").all(|c| *c == "1"), "{row}");
    }
}

#[test]
fn empty_task_list_renders_an_empty_array() {
    let doc = POINT.replace(r#"[{"kind": "cohomology"}]"#, "[]");
    let report = run(&parse(&doc).unwrap());
    assert_eq!(report.value["tasks"], Value::Array(vec![]));
    assert!(render(&report.value, Format::Json).contains("\"tasks\": []"));
}

#[test]
fn reports_are_byte_stable_across_runs_and_thread_modes() {
    let s = parse(&load("reflection_circle_full.json")).unwrap();
    let a = render(&run(&s).value, Format::Json);
    let b = render(&run(&s).value, Format::Json);
    let c = eqweight::par::sequential(|| render(&run(&s).value, Format::Json));
    assert_eq!(a, b);
    assert_eq!(a, c);
    assert_eq!(render(&run(&s).value, Format::Table), render(&run(&s).value, Format::Table));
    assert!(!a.contains("elapsed_ms"));
}

#[test]
fn timing_is_opt_in() {
    let doc = POINT.replace(r#""window": 3,"#, r#""window": 3, "output": {"timing": true},"#);
    let report = run(&parse(&doc).unwrap());
    assert!(report.value["tasks"][0].get("elapsed_ms").is_some());
}

#[test]
fn exit_codes_follow_the_outcome() {
    let dir = tempfile::tempdir().unwrap();
    let ok = dir.path().join("ok.json");
    std::fs::write(&ok, POINT).unwrap();
    let out = dir.path().join("report.json");
    let status = bin().args(["run", ok.to_str().unwrap(), "--out", out.to_str().unwrap()]).status().unwrap();
    assert_eq!(status.code(), Some(0));
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(written["tasks"][0]["status"], "ok");

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, POINT.replace("point_z2", "nowhere")).unwrap();
    let o = bin().args(["run", bad.to_str().unwrap()]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/space/builtin"));

    // An empty space leaves nothing to check, which counts as a failure.
    let failing = dir.path().join("failing.json");
    let doc = r#"{"version": 1, "name": "x", "window": 2,
        "space": {"simplicial": {"name": "empty", "group": {"cyclic": 2}, "counts": [0], "faces": [[]], "action": [[[]], [[]]]}},
        "tasks": [{"kind": "identity", "identities": ["commutativity"]}]}"#;
    std::fs::write(&failing, doc).unwrap();
    let o = bin().args(["run", failing.to_str().unwrap()]).output().unwrap();
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stdout));

    let o = bin().args(["validate", ok.to_str().unwrap()]).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let o = bin().arg("list-builtins").output().unwrap();
    assert!(String::from_utf8_lossy(&o.stdout).contains("reflection_circle"));
}
