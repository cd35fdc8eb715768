//! End-to-end binary tests: golden output, exit codes, determinism.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cusped")).args(args).output().expect("spawn cusped")
}

fn run_paths(args: &[&dyn AsRef<std::ffi::OsStr>]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_cusped"));
    for a in args {
        cmd.arg(a);
    }
    cmd.output().expect("spawn cusped")
}

fn tri(name: &str) -> String {
    fixture(name).to_string_lossy().into_owned()
}

fn borromean_report_args() -> Vec<String> {
    vec![
        "report".into(),
        tri("borromean.tri"),
        "--curves".into(),
        tri("borromean.curves"),
        "--anchor".into(),
        "3".into(),
        "--link".into(),
        tri("borromean.link"),
        "--eliminate".into(),
        "d=b a b^-1".into(),
        "--eliminate".into(),
        "e=c b c^-1".into(),
        "--eliminate".into(),
        "f=a c a^-1".into(),
        "--compare-table".into(),
        tri("borromean.table"),
    ]
}

#[test]
fn validate_prints_class_counts() {
    let out = run(&["validate", &tri("borromean.tri")]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout), "tets = 8\nedges = 8\ncusps = 3\n");

    let out = run(&["validate", &tri("figure8.tri")]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout), "tets = 2\nedges = 2\ncusps = 1\n");
}

#[test]
fn report_matches_borromean_golden() {
    let args = borromean_report_args();
    let refs: Vec<&dyn AsRef<std::ffi::OsStr>> =
        args.iter().map(|a| a as &dyn AsRef<std::ffi::OsStr>).collect();
    let out = run_paths(&refs);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let golden = fs::read(fixture("borromean.report.golden")).unwrap();
    assert_eq!(out.stdout, golden);
}

#[test]
fn report_matches_figure8_golden() {
    let out = run(&[
        "report",
        &tri("figure8.tri"),
        "--curves",
        &tri("figure8.curves"),
        "--anchor",
        "0",
    ]);
    assert!(out.status.success());
    let golden = fs::read(fixture("figure8.report.golden")).unwrap();
    assert_eq!(out.stdout, golden);
}

#[test]
fn wirtinger_matches_golden() {
    let out = run(&[
        "wirtinger",
        &tri("borromean.link"),
        "--eliminate",
        "d=b a b^-1",
        "--eliminate",
        "e=c b c^-1",
        "--eliminate",
        "f=a c a^-1",
    ]);
    assert!(out.status.success());
    let golden = fs::read(fixture("borromean.wirtinger.golden")).unwrap();
    assert_eq!(out.stdout, golden);
}

#[test]
fn corrupt_triangulation_exits_one() {
    let path = std::env::temp_dir().join("cusped-test-unglued.tri");
    fs::write(&path, "tetrahedra 2\nglue 0 0 1 0 0132\n").unwrap();
    let out = run(&["validate", &path.to_string_lossy()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unglued"));

    let path = std::env::temp_dir().join("cusped-test-badperm.tri");
    fs::write(&path, "tetrahedra 2\nglue 0 0 1 1 0132\n").unwrap();
    let out = run(&["solve", &path.to_string_lossy(), "--curves", &tri("figure8.curves")]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unconverged_solve_exits_two() {
    let out = run(&[
        "solve",
        &tri("borromean.tri"),
        "--curves",
        &tri("borromean.curves"),
        "--max-iters",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("did not converge"));
}

#[test]
fn bad_seed_exits_one() {
    let lower = run(&[
        "solve",
        &tri("borromean.tri"),
        "--curves",
        &tri("borromean.curves"),
        "--seed",
        "1-2i",
    ]);
    assert_eq!(lower.status.code(), Some(1));

    let garbage = run(&[
        "solve",
        &tri("borromean.tri"),
        "--curves",
        &tri("borromean.curves"),
        "--seed",
        "pear",
    ]);
    assert_eq!(garbage.status.code(), Some(1));
}

#[test]
fn seed_flag_reaches_the_same_solution() {
    let out = run(&[
        "solve",
        &tri("figure8.tri"),
        "--curves",
        &tri("figure8.curves"),
        "--seed",
        "0.4+1.2i",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("shape.0 = 0.500000000+0.866025404i"));
    assert!(text.contains("shape.1 = 0.500000000+0.866025404i"));
}

#[test]
fn compare_table_mismatch_exits_one() {
    let table = fs::read_to_string(fixture("borromean.table")).unwrap();
    let variant = table.replace("row 1 -1 ", "row 1 -1+1i ");
    assert_ne!(table, variant);
    let path = std::env::temp_dir().join("cusped-test-variant.table");
    fs::write(&path, variant).unwrap();
    let out = run(&[
        "report",
        &tri("borromean.tri"),
        "--curves",
        &tri("borromean.curves"),
        "--anchor",
        "3",
        "--compare-table",
        &path.to_string_lossy(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("compare.1 = MISMATCH"));
    assert!(text.contains("compare.0 = ok"));
    // the note still explains which value is consistent
    assert!(text.contains("compare.note = coordinate (1,0)"));
}

#[test]
fn report_runs_are_byte_identical() {
    let args = borromean_report_args();
    let refs: Vec<&dyn AsRef<std::ffi::OsStr>> =
        args.iter().map(|a| a as &dyn AsRef<std::ffi::OsStr>).collect();
    let first = run_paths(&refs);
    let second = run_paths(&refs);
    assert!(first.status.success());
    assert_eq!(first.status.code(), second.status.code());
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn precision_flag_controls_digits() {
    let out = run(&[
        "solve",
        &tri("borromean.tri"),
        "--curves",
        &tri("borromean.curves"),
        "--precision",
        "3",
    ]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("shape.0 = 0.500+0.500i"));
}
