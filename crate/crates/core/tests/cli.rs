//! End-to-end runs of the `rankhull` binary: exit codes, determinism and
//! file round trips.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rankhull"))
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit status")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR"));
    dir.join(name)
}

#[test]
fn demo_reproduces_both_constructions() {
    let out = run(&["demo"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert_eq!(r["summary"]["passed"], 2);
}

#[test]
fn reduce_and_lcd_exit_codes() {
    let two = data("hull_two_f4.json");
    let two = two.to_str().unwrap();
    let out = run(&["reduce", two, "--ell", "0"]);
    assert_eq!(code(&out), 0);
    assert_eq!(report(&out)["checks"]["hull_dim_formula"], 0);

    // Over F_2 a hull can only be lowered by two or more.
    let out = run(&["reduce", two, "--ell", "1"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("usage"));

    let out = run(&["reduce", two, "--ell", "3"]);
    assert_eq!(code(&out), 2);

    let one = data("hull_one_f4.json");
    let out = run(&["lcd", one.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
}

#[test]
fn input_errors_exit_with_two() {
    let bad = scratch("malformed_code.json");
    std::fs::write(&bad, r#"{"p": 2, "m": 2, "n": 4, "k": 2}"#).unwrap();
    let out = run(&["reduce", bad.to_str().unwrap(), "--ell", "0"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("field `e`"));

    let out = run(&["lcd", "/nonexistent/code.json"]);
    assert_eq!(code(&out), 2);

    let out = run(&["explore", "5", "1", "1", "4", "2"]);
    assert_eq!(code(&out), 2);

    let out = run(&["verify", "--checks", "nonsense"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn reduced_code_round_trips_through_a_file() {
    let path = scratch("reduced.json");
    let out = run(&["--out", path.to_str().unwrap(), "reduce", data("hull_two_f4.json").to_str().unwrap(), "--ell", "0"]);
    assert_eq!(code(&out), 0);
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let next = scratch("reduced_output.json");
    std::fs::write(&next, written["output"].to_string()).unwrap();

    // The output is LCD; reducing it to zero again is the identity.
    let out = run(&["reduce", next.to_str().unwrap(), "--ell", "0"]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert_eq!(r["output"]["generator"], written["output"]["generator"]);
    assert_eq!(r["output"]["witness_chain"].as_array().unwrap().len(), 2);
}

#[test]
fn same_seed_gives_identical_reports() {
    let grid = scratch("grid.json");
    std::fs::write(&grid, "[[2, 1, 2, 4, 2], [3, 1, 1, 5, 2]]").unwrap();
    let args = ["--seed", "11", "verify", "--trials", "3", "--grid", grid.to_str().unwrap()];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);

    let one = data("hull_two_f4.json");
    let assoc = ["--seed", "3", "associate", one.to_str().unwrap(), "--ell", "0"];
    let a = run(&assoc);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, run(&assoc).stdout);
    let r = report(&a);
    assert_eq!(r["matrix_hull_dim"], 4);
    assert_eq!(r["reduction"]["matrix_hull_dim"], 0);
}

#[test]
fn explore_reports_exhaustive_search() {
    let out = run(&["explore", "2", "1", "2", "3", "1", "--trials", "2"]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert_eq!(r["mode"], "exhaustive");
    assert_eq!(r["gl_order"], "168");
}
