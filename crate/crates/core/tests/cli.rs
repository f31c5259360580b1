use std::path::PathBuf;
use std::process::{Command, Output};

use lmhs_heights::cli::Report;

fn lmhs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lmhs")).args(args).output().expect("spawn lmhs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    dir.join(format!("{name}-{}.json", std::process::id()))
}

const GENERATOR: [&str; 10] = ["--curve", "[0,0,1,-1,0]", "--P", "0,0", "--Q", "inf", "--u", "x", "--v", "x/y"];

#[test]
fn verify_succeeds_and_writes_round_tripping_json() {
    let path = scratch("verify");
    let mut args = vec!["verify"];
    args.extend(GENERATOR);
    args.extend(["--json", path.to_str().unwrap()]);
    let out = lmhs(&args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let table = String::from_utf8(out.stdout).unwrap();
    assert!(table.contains("residual"), "{table}");

    let written = std::fs::read_to_string(&path).unwrap();
    let report = Report::from_json(written.trim_end()).unwrap();
    assert_eq!(report.to_json().unwrap(), written.trim_end());
    std::fs::remove_file(path).ok();
}

#[test]
fn json_format_matches_file_output() {
    let path = scratch("nonarch");
    let out = lmhs(&[
        "nonarch", "--curve", "[0,-1,1,-5,-16]", "--P", "4,3", "--Q", "inf", "--u", "x-4", "--v", "x/y",
        "--format", "json", "--json", path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout, std::fs::read_to_string(&path).unwrap());
    let report = Report::from_json(stdout.trim_end()).unwrap();
    assert_eq!(report.to_json().unwrap(), stdout.trim_end());
    std::fs::remove_file(path).ok();
}

#[test]
fn periods_and_lmhs_limit_run() {
    assert_eq!(lmhs(&["periods", "--curve", "[0,0,1,-1,0]"]).status.code(), Some(0));
    let out = lmhs(&["lmhs-limit", "--family", "x^3+x^2", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(matches!(Report::from_json(String::from_utf8(out.stdout).unwrap().trim()).unwrap(), Report::LmhsLimit(_)));
}

#[test]
fn residual_above_tolerance_exits_one() {
    let mut args = vec!["verify", "--residual-tol", "1e-30"];
    args.extend(GENERATOR);
    assert_eq!(lmhs(&args).status.code(), Some(1));
}

#[test]
fn invalid_input_exits_two() {
    let out = lmhs(&["verify", "--curve", "[0,0,1,-1]", "--P", "0,0", "--Q", "inf", "--u", "x", "--v", "x/y"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("curve"));
    assert_eq!(lmhs(&["verify", "--bogus"]).status.code(), Some(2));
    let additive = lmhs(&["verify", "--curve", "[0,0,0,0,-2]", "--P", "3,5", "--Q", "inf", "--u", "x-3", "--v", "x/y"]);
    assert_eq!(additive.status.code(), Some(2));
}
