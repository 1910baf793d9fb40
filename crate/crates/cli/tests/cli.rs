use std::path::{Path, PathBuf};

use matroid_kappa::{ElementSet, GroundSet};
use matroid_kappa_cli::{run, Outcome};
use serde_json::Value;
use tempfile::TempDir;

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn cli(args: &[&str]) -> Outcome {
    cli_env(args, None)
}

fn cli_env(args: &[&str], env: Option<&str>) -> Outcome {
    run(
        std::iter::once("matroid-kappa").chain(args.iter().copied()),
        env,
    )
}

fn u24(dir: &Path) -> String {
    write(dir, "u24.txt", "type: uniform\nelements: a b c d\nk: 2\n")
        .display()
        .to_string()
}

fn k4(dir: &Path) -> String {
    let text = "type: graphic\nelements: e12 e13 e14 e23 e24 e34\n\
                edges: e12=1-2 e13=1-3 e14=1-4 e23=2-3 e24=2-4 e34=3-4\n";
    write(dir, "k4.txt", text).display().to_string()
}

#[test]
fn kappa_of_a_pair_in_u24() {
    let dir = TempDir::new().unwrap();
    let out = cli(&["kappa", &u24(dir.path()), "--set=a,b"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert_eq!(out.stdout, "kappa = 2\n");
}

#[test]
fn overlapping_minor_is_rejected() {
    let dir = TempDir::new().unwrap();
    let out = cli(&["minor", "--contract=a", "--delete=a", &u24(dir.path())]);
    assert_eq!(out.code, 1);
    assert!(
        out.stderr.contains("contract and delete overlap"),
        "{}",
        out.stderr
    );
    assert!(out.stdout.is_empty());
}

#[test]
fn large_link_exceeds_budget() {
    let dir = TempDir::new().unwrap();
    let labels: Vec<String> = (0..20).map(|i| format!("f{i}")).collect();
    let file = write(
        dir.path(),
        "free.txt",
        &format!("type: uniform\nelements: {}\nk: 20\n", labels.join(" ")),
    );
    let args = [
        "link",
        file.to_str().unwrap(),
        "--x=f0",
        "--y=f1",
        "--budget=16",
    ];
    let out = cli(&args);
    assert_eq!(out.code, 2, "{}", out.stderr);
    let out = cli_env(&args[..4], Some("16"));
    assert_eq!(out.code, 2, "{}", out.stderr);
}

#[test]
fn budget_flag_beats_environment() {
    let dir = TempDir::new().unwrap();
    let file = k4(dir.path());
    let args = ["link", &file, "--x=e12", "--y=e34"];
    assert_eq!(cli_env(&args, Some("2")).code, 2);
    let mut with_flag = args.to_vec();
    with_flag.push("--budget=20");
    assert_eq!(cli_env(&with_flag, Some("2")).code, 0);
    assert_eq!(cli_env(&args, Some("many")).code, 1);
}

#[test]
fn identical_invocations_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let file = k4(dir.path());
    let invocations: Vec<Vec<&str>> = vec![
        vec!["circuits", &file],
        vec![
            "--output=json",
            "kappa-between",
            &file,
            "--x=e12,e13",
            "--y=e24,e34",
        ],
        vec![
            "link",
            &file,
            "--x=e12,e13",
            "--y=e14,e24",
            "--constructive",
        ],
        vec!["separation", &file, "--k=3"],
        vec![
            "family",
            "--id=double-ladder",
            "stabilize",
            "--x=rung[0]",
            "--y=rung[3]",
        ],
    ];
    for args in invocations {
        let a = cli(&args);
        let b = cli(&args);
        assert_eq!(a, b, "{args:?}");
        assert_eq!(a.code, 0, "{args:?}: {}", a.stderr);
    }
}

fn collect_sets(value: &Value, out: &mut Vec<Vec<String>>) {
    match value {
        Value::Array(items) if items.iter().all(Value::is_string) => {
            out.push(
                items
                    .iter()
                    .map(|s| s.as_str().unwrap().to_string())
                    .collect(),
            );
        }
        Value::Array(items) => items.iter().for_each(|v| collect_sets(v, out)),
        Value::Object(map) => map.values().for_each(|v| collect_sets(v, out)),
        _ => {}
    }
}

#[test]
fn json_sets_round_trip() {
    let dir = TempDir::new().unwrap();
    let file = k4(dir.path());
    let ground = GroundSet::new(["e12", "e13", "e14", "e23", "e24", "e34"]).unwrap();
    for args in [
        vec!["--output=json", "circuits", &file],
        vec!["--output=json", "components", &file],
        vec![
            "--output=json",
            "kappa-between",
            &file,
            "--x=e12",
            "--y=e34",
        ],
        vec!["--output=json", "link", &file, "--x=e12,e13", "--y=e14,e24"],
    ] {
        let out = cli(&args);
        assert_eq!(out.code, 0, "{}", out.stderr);
        let value: Value = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(value["schema"], "matroid-kappa/1");
        let mut sets = Vec::new();
        collect_sets(&value, &mut sets);
        assert!(!sets.is_empty(), "{args:?}");
        for labels in sets {
            let set = ElementSet::from_labels(&ground, &labels).unwrap();
            let back: Vec<String> = set.labels().map(String::from).collect();
            assert_eq!(back, labels);
        }
    }
}

#[test]
fn set_from_file() {
    let dir = TempDir::new().unwrap();
    let file = u24(dir.path());
    let list = write(dir.path(), "x.txt", "a\n\nb\n");
    let out = cli(&["kappa", &file, &format!("--set=@{}", list.display())]);
    assert_eq!(out.stdout, "kappa = 2\n");
    let missing = cli(&["kappa", &file, "--set=@/nonexistent/list"]);
    assert_eq!(missing.code, 1);
}

#[test]
fn usage_errors_and_help() {
    assert_eq!(cli(&["bogus"]).code, 1);
    assert_eq!(cli(&["kappa", "x.txt", "--set=a", "--nope"]).code, 1);
    let help = cli(&["--help"]);
    assert_eq!(help.code, 0);
    assert!(help.stdout.contains("kappa-between"));
}

#[test]
fn parse_errors_carry_line_numbers() {
    let dir = TempDir::new().unwrap();
    let file = write(
        dir.path(),
        "bad.txt",
        "type: uniform\nelements: a b\nk: two\n",
    );
    let out = cli(&["rank", file.to_str().unwrap()]);
    assert_eq!(out.code, 1);
    assert!(out.stderr.contains("line 3"), "{}", out.stderr);
}

#[test]
fn dual_output_parses_back() {
    let dir = TempDir::new().unwrap();
    let out = cli(&["dual", &k4(dir.path())]);
    assert_eq!(out.code, 0);
    let dual = write(dir.path(), "dual.txt", &out.stdout);
    let rank = cli(&["rank", dual.to_str().unwrap()]);
    assert_eq!(rank.stdout, "rank = 3\n");
}

#[test]
fn sum_and_components() {
    let dir = TempDir::new().unwrap();
    let a = u24(dir.path());
    let b = write(
        dir.path(),
        "t.txt",
        "type: graphic\nelements: p q r\nedges: p=x-y q=y-z r=z-x\n",
    );
    let out = cli(&["sum", &a, b.to_str().unwrap()]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let sum = write(dir.path(), "sum.txt", &out.stdout);
    let comps = cli(&["components", sum.to_str().unwrap()]);
    assert!(
        comps.stdout.starts_with("components = 2\n"),
        "{}",
        comps.stdout
    );
    let conn = cli(&["connected", sum.to_str().unwrap()]);
    assert_eq!(conn.stdout, "2-connected: no\n");
}

#[test]
fn check_axioms_reports_failure() {
    let dir = TempDir::new().unwrap();
    let file = write(
        dir.path(),
        "n.txt",
        "type: explicit\nelements: a b c\nindependent:\n{}\na\nb\nc\na,b\n",
    );
    let out = cli(&["check-axioms", file.to_str().unwrap()]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out.stdout.contains("(I3) FAIL"), "{}", out.stdout);
    assert!(out.stdout.ends_with("matroid: no\n"));
}

#[test]
fn trace_is_json_lines() {
    let dir = TempDir::new().unwrap();
    let trace = dir.path().join("trace.jsonl");
    let out = cli(&[
        "link",
        &k4(dir.path()),
        "--x=e12,e23",
        "--y=e14,e24",
        "--constructive",
        &format!("--trace={}", trace.display()),
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let text = std::fs::read_to_string(trace).unwrap();
    let stages: Vec<String> = text
        .lines()
        .map(|l| {
            serde_json::from_str::<Value>(l).unwrap()["stage"]
                .as_str()
                .unwrap()
                .to_string()
        })
        .collect();
    assert_eq!(stages.first().map(String::as_str), Some("grow"));
    assert_eq!(stages.last().map(String::as_str), Some("result"));
    assert!(stages.iter().any(|s| s == "break"));
}

#[test]
fn family_window_queries() {
    let out = cli(&[
        "family",
        "--id=double-ladder",
        "--window=5",
        "kappa-between",
        "--x=rung[0]",
        "--y=rung[3]",
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out.stdout.contains("kappa = 1"), "{}", out.stdout);
    let out = cli(&["family", "--id=double-ladder", "--window=20", "describe"]);
    assert_eq!(out.code, 2);
    let out = cli(&["family", "--id=theta", "rungs"]);
    assert_eq!(out.code, 1);
    let out = cli(&["family", "--id=nope", "describe"]);
    assert_eq!(out.code, 1);
}

#[test]
fn stabilization_report_is_json() {
    let out = cli(&[
        "--output=json",
        "family",
        "--id=infinite-uniform(2)",
        "stabilize",
        "--x=a1",
        "--y=a2",
        "--plateau=4",
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let value: Value = serde_json::from_str(&out.stdout).unwrap();
    let report = &value["report"];
    assert_eq!(report["certified_value"], 1);
    assert!(report["values"].as_array().unwrap().len() >= 4);
}
