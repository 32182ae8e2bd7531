//! End-to-end tests of the command-line surface: exit codes, output schema,
//! and byte-level determinism.

use std::process::{Command, Output};

fn sievelab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sievelab"))
        .args(args)
        .output()
        .expect("failed to spawn binary")
}

fn stdout_of(args: &[&str]) -> String {
    let out = sievelab(args);
    assert!(
        out.status.success(),
        "command {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn farey_list_two_rows() {
    let out = stdout_of(&["farey", "--q0", "4", "--list"]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "q,a,value");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("2,1,"));
    assert!(lines[2].starts_with("2,3,"));
}

#[test]
fn farey_count_and_max_window() {
    let out = stdout_of(&["farey", "--q0", "4", "--alpha", "0.5", "--delta", "0.3"]);
    assert!(out.lines().nth(1).unwrap().ends_with(",2"));
    let out = stdout_of(&["farey", "--q0", "4", "--max-window", "--delta", "0.3"]);
    let row = out.lines().nth(1).unwrap();
    let max_count: u64 = row.split(',').nth(2).unwrap().parse().unwrap();
    assert_eq!(max_count, 2);
}

#[test]
fn farey_without_mode_is_usage_error() {
    let out = sievelab(&["farey", "--q0", "4"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_flag_is_usage_error() {
    let out = sievelab(&["--bogus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gauss_scan_small_modulus_passes() {
    let out = sievelab(&["gauss-scan", "--cmax", "64"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 65); // header + one row per modulus
    assert!(text.starts_with("c,k,l,re,im,ratio\n"));
}

#[test]
fn sieve_ones_matches_hand_value() {
    let out = stdout_of(&["sieve", "--n", "1", "--gen", "ones", "--qmax", "2"]);
    let row = out.lines().nth(1).unwrap();
    let value: f64 = row.split(',').next_back().unwrap().parse().unwrap();
    assert!((value - 3.0).abs() < 1e-12);
}

#[test]
fn sieve_cover_agrees_with_full_sum() {
    let out = sievelab(&[
        "sieve",
        "--n",
        "8",
        "--gen",
        "random-phase",
        "--cover",
        "--qmax",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0), "cover/full mismatch");
}

#[test]
fn roots_plain_and_scaled() {
    let out = stdout_of(&["roots", "--k", "8", "--l", "1"]);
    let xs: Vec<&str> = out.lines().skip(1).collect();
    assert_eq!(xs, vec!["8,1,1", "8,1,3", "8,1,5", "8,1,7"]);
    let out = stdout_of(&["roots", "--k", "4", "--g", "2", "--c", "1"]);
    assert_eq!(out.lines().nth(1).unwrap(), "2,1,4,0");
}

#[test]
fn approx_emits_expected_convergent() {
    let out = stdout_of(&["approx", "--alpha", "0.3", "--tau", "10"]);
    let row = out.lines().nth(1).unwrap();
    let fields: Vec<&str> = row.split(',').collect();
    assert_eq!(fields[2], "3");
    assert_eq!(fields[3], "10");
}

#[test]
fn identical_invocations_are_byte_identical() {
    let args = [
        "ratio-grid",
        "--n-list",
        "16,32",
        "--q-list",
        "2",
        "--seeds",
        "0,1",
    ];
    let a = stdout_of(&args);
    let b = stdout_of(&args);
    assert_eq!(a, b);
}

#[test]
fn thread_count_does_not_change_output() {
    let base = [
        "sieve", "--n", "32", "--gen", "random-phase", "--seed", "9", "--qmax", "4",
    ];
    let one = stdout_of(&[&base[..], &["--threads", "1"]].concat());
    let two = stdout_of(&[&base[..], &["--threads", "2"]].concat());
    assert_eq!(one, two);
}

#[test]
fn json_format_carries_meta_and_rows() {
    let out = stdout_of(&[
        "farey", "--q0", "4", "--list", "--format", "json", "--seed", "5",
    ]);
    let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(doc["meta"]["seed"], 5);
    assert!(doc["meta"]["version"].is_string());
    assert_eq!(doc["rows"].as_array().unwrap().len(), 2);
    assert_eq!(doc["rows"][0]["a"], 1);
}

#[test]
fn inclusion_verify_small_run_is_clean() {
    let out = sievelab(&[
        "inclusion-verify",
        "--draws",
        "20",
        "--q0-max",
        "300",
        "--seed",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 21);
    for line in text.lines().skip(1) {
        assert!(line.ends_with(",0"), "violations reported: {line}");
    }
}

#[test]
fn integral_check_small_grid() {
    let out = sievelab(&[
        "integral-check",
        "--jmax",
        "2",
        "--lmax",
        "2",
        "--rstars",
        "1",
        "--zs",
        "1e-2",
        "--q0s",
        "100",
    ]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join("sievelab_cli_test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("block.csv");
    let _ = stdout_of(&["farey", "--q0", "9", "--list", "--out", path.to_str().unwrap()]);
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 15); // header + 14 fractions
    std::fs::remove_file(path).unwrap();
}

#[test]
fn sieve_reads_coefficient_file() {
    let dir = std::env::temp_dir().join("sievelab_cli_test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("coeffs.txt");
    std::fs::write(&path, "1 0\n1 0\n1 0\n1 0\n").unwrap();
    let out = stdout_of(&["sieve", "--coeffs", path.to_str().unwrap(), "--qmax", "2"]);
    let row = out.lines().nth(1).unwrap();
    let value: f64 = row.split(',').next_back().unwrap().parse().unwrap();
    assert!((value - 16.0).abs() < 1e-9, "got {value}");
    std::fs::remove_file(path).unwrap();
}
