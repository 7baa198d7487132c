use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use jetprolong::cli::ProblemFile;
use serde_json::Value;

fn problem(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("examples/problems")
        .join(name)
}

fn jetprolong(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jetprolong"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json_report(args: &[&str]) -> (String, Output) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let mut all = args.to_vec();
    all.extend(["--json", path.to_str().unwrap()]);
    let out = jetprolong(&all);
    (std::fs::read_to_string(&path).unwrap(), out)
}

#[test]
fn passing_file_exits_zero() {
    let gauge = problem("gauge.txt");
    let out = jetprolong(&["run-file", gauge.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains("4 tasks: 4 pass, 0 fail"));
}

#[test]
fn failing_task_exits_one() {
    let heat = problem("heat.txt");
    let out = jetprolong(&["run-file", heat.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("[fail] stretch-x-only"), "{text}");
    assert!(text.contains("residual: 2*u_xx"), "{text}");
}

#[test]
fn input_errors_exit_two() {
    let file = problem("lambda_symmetry.txt");
    let f = file.to_str().unwrap();
    let undeclared = jetprolong(&["prolong", f, "--field", "Z"]);
    assert_eq!(undeclared.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&undeclared.stderr).contains("undeclared field `Z`"));
    assert_eq!(
        jetprolong(&["run-file", "/nonexistent/problem.txt"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        jetprolong(&["prolong", f, "--field", "X", "--order", "0"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn single_verb_prolong() {
    let file = problem("heat.txt");
    let out = jetprolong(&[
        "prolong",
        file.to_str().unwrap(),
        "--field",
        "linear",
        "--order",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(
        stdout(&out).contains("Ψ: u; Ψ_x: u_x; Ψ_t: u_t"),
        "{}",
        stdout(&out)
    );
}

#[test]
fn json_is_deterministic_and_parallel_safe() {
    for name in ["heat.txt", "compat.txt", "gauge.txt", "matrix.txt"] {
        let f = problem(name);
        let f = f.to_str().unwrap();
        let (a, _) = json_report(&["run-file", f]);
        let (b, _) = json_report(&["run-file", f]);
        let (c, _) = json_report(&["run-file", f, "--parallel"]);
        assert_eq!(a, b, "{name}");
        assert_eq!(a, c, "{name}");
        let v: Value = serde_json::from_str(&a).unwrap();
        assert_eq!(v["seed"], 20_240_501);
    }
}

#[test]
fn residuals_reparse_to_the_same_expression() {
    let f = problem("heat.txt");
    let (json, _) = json_report(&["run-file", f.to_str().unwrap()]);
    let v: Value = serde_json::from_str(&json).unwrap();
    let file = ProblemFile::parse(&std::fs::read_to_string(&f).unwrap()).unwrap();
    let spec = file.spec;
    let mut seen = 0;
    for task in v["tasks"].as_array().unwrap() {
        for r in task["residuals"].as_array().unwrap() {
            let text = r.as_str().unwrap();
            let e = spec.parse(text).unwrap();
            assert_eq!(e.to_string(), text);
            seen += 1;
        }
    }
    assert_eq!(seen, 1);
}

#[test]
fn strict_escalates_vacuous_passes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("vacuous.txt");
    std::fs::write(
        &path,
        "[jet]\nindependent = x\ndependent = u\norder = 2\n\n\
         [field shift]\nphi.u = 1\n\n[mu L]\nlambda.x = x\n\n\
         [task coincidence]\nop = coincidence\nfield = shift\nmu = L\n",
    )
    .unwrap();
    let p = path.to_str().unwrap();
    let lax = jetprolong(&["run-file", p]);
    assert!(
        stdout(&lax).contains("[vacuous-pass] coincidence"),
        "{}",
        stdout(&lax)
    );
    assert_eq!(lax.status.code(), Some(0));
    let strict = jetprolong(&["run-file", p, "--strict"]);
    assert_eq!(strict.status.code(), Some(1));
}

#[test]
fn seed_is_reported() {
    let f = problem("gauge.txt");
    let (json, _) = json_report(&["run-file", f.to_str().unwrap(), "--seed", "7"]);
    let v: Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["seed"], 7);
}
