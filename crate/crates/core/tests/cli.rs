//! End-to-end checks of the binary: output shapes, the config-echo
//! reproducibility contract, and error surfacing.

use std::path::Path;
use std::process::Command;

fn zeroscan() -> Command {
    Command::new(env!("CARGO_BIN_EXE_zeroscan"))
}

fn run_ok(args: &[&str]) -> String {
    let out = zeroscan().args(args).output().expect("binary runs");
    assert!(
        out.status.success(),
        "command {args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf8 output")
}

#[test]
fn sieve_lists_prime_powers_with_weights() {
    let text = run_ok(&["sieve", "--limit", "10"]);
    let mut lines = text.lines();
    assert!(lines
        .next()
        .unwrap()
        .starts_with("# zeroscan sieve --limit 10"));
    assert_eq!(lines.next().unwrap(), "p,n,value,weight,freq");
    let rows: Vec<&str> = lines.collect();
    // 2, 3, 4, 5, 7, 8, 9 in ascending value order.
    assert_eq!(rows.len(), 7);
    assert_eq!(rows[0], "2,1,2,0.6931471805599453,0.6931471805599453");
    assert!(rows[2].starts_with("2,2,4,"));
    assert!(rows[6].starts_with("3,2,9,"));
}

#[test]
fn chars_json_describes_the_group() {
    let text = run_ok(&["chars", "--modulus", "8"]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["phi"], 4);
    let chars = v["characters"].as_array().unwrap();
    assert_eq!(chars.len(), 4);
    assert_eq!(chars[0]["label"], 0);
    assert_eq!(chars[0]["parity"], "even");
    assert!(chars.iter().any(|c| c["parity"] == "odd"));
}

#[test]
fn scan_is_byte_reproducible_from_its_own_header() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("a.csv");
    let second = dir.path().join("b.csv");
    let args = [
        "scan", "--limit", "5000", "--y-min", "14", "--y-max", "14.5", "--step", "0.1", "--eps",
        "paper",
    ];
    run_with_output(&args, &first);
    run_with_output(&args, &second);
    let bytes_a = std::fs::read(&first).unwrap();
    assert_eq!(
        bytes_a,
        std::fs::read(&second).unwrap(),
        "same run, same bytes"
    );

    // The first line is `# <command>`; replaying that command reproduces
    // the file exactly.
    let text = String::from_utf8(bytes_a.clone()).unwrap();
    let header = text.lines().next().unwrap().strip_prefix("# ").unwrap();
    let mut replay: Vec<&str> = header.split_whitespace().collect();
    assert_eq!(replay.remove(0), "zeroscan");
    let third = dir.path().join("c.csv");
    run_with_output(&replay, &third);
    assert_eq!(
        bytes_a,
        std::fs::read(&third).unwrap(),
        "replayed run, same bytes"
    );
}

fn run_with_output<S: AsRef<str>>(args: &[S], path: &Path) {
    let out = zeroscan()
        .args(args.iter().map(|s| s.as_ref()))
        .arg("--output")
        .arg(path)
        .output()
        .expect("binary runs");
    assert!(
        out.status.success(),
        "failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn scan_then_match_finds_the_first_zero() {
    let dir = tempfile::tempdir().unwrap();
    let scan_path = dir.path().join("scan.csv");
    run_with_output(
        &[
            "scan", "--limit", "50000", "--y-min", "13", "--y-max", "15", "--step", "0.01",
        ],
        &scan_path,
    );
    let zeros_path = dir.path().join("zeros.txt");
    std::fs::write(&zeros_path, "# reference\n14.134725\n21.022040\n").unwrap();
    let text = run_ok(&[
        "match",
        "--scan",
        scan_path.to_str().unwrap(),
        "--zeros",
        zeros_path.to_str().unwrap(),
        "--depth-frac",
        "0.5",
    ]);
    let data: Vec<&str> = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("detected_y"))
        .collect();
    assert_eq!(data.len(), 1, "exactly one dip in [13, 15]:\n{text}");
    let cells: Vec<&str> = data[0].split(',').collect();
    let detected: f64 = cells[0].parse().unwrap();
    let matched: f64 = cells[1].parse().unwrap();
    assert!((detected - 14.1347).abs() < 0.05);
    assert_eq!(matched, 14.134725);
}

#[test]
fn landau_reports_the_pinned_json_fields() {
    let dir = tempfile::tempdir().unwrap();
    let zeros_path = dir.path().join("zeros.txt");
    std::fs::write(&zeros_path, "14.134725\n21.022040\n25.010858\n").unwrap();
    let text = run_ok(&[
        "landau",
        "--x",
        "2",
        "--T",
        "30",
        "--zeros",
        zeros_path.to_str().unwrap(),
    ]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["count"], 3);
    assert!(v["re"].is_f64() && v["im"].is_f64() && v["predicted_re"].is_f64());
    assert!(v["config"].as_str().unwrap().contains("--T 30"));
}

#[test]
fn figure_without_required_zeros_fails_loudly() {
    let dir = tempfile::tempdir().unwrap();
    let out = zeroscan()
        .args(["figure", "--id", "fig2", "--limit", "2000"])
        .arg("--output")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(
        err.contains("--zeros"),
        "stderr should name the missing table: {err}"
    );
}

#[test]
fn domain_errors_exit_with_code_two() {
    let out = zeroscan().args(["sieve", "--limit", "1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));

    let out = zeroscan()
        .args([
            "scan", "--limit", "5000", "--y-min", "5", "--y-max", "1", "--step", "0.1",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn scan_json_format_wraps_rows_with_config() {
    let text = run_ok(&[
        "scan", "--limit", "5000", "--y-min", "0", "--y-max", "1", "--step", "0.5", "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert!(v["config"].as_str().unwrap().starts_with("zeroscan scan"));
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);
    assert!(v["rows"][0]["prime_sum_re"].is_f64());
}
