use std::path::Path;
use std::process::{Command, Output};

use chowla_lab::manifest::{manifest_path, RunManifest};
use chowla_lab::output::{digest_file, Format};
use serde_json::{json, Value};

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chowla-lab"))
        .args(args)
        .env_remove("CHOWLA_LAB_TABLE_LIMIT")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    csv::Reader::from_reader(text.as_bytes())
        .records()
        .map(|r| r.unwrap().iter().map(str::to_string).collect())
        .collect()
}

#[test]
fn correlate_emits_one_csv_row() {
    let o = lab(&["correlate", "--x", "1000", "--shifts", "0,1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.starts_with(
        "experiment,x,shifts,q,r,u,A_x,raw_sum,value,reference_bound,elapsed_ms\n"
    ));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0], "liouville");
    assert_eq!(rows[0][2], "0;1");
    assert!(stderr(&o).starts_with("manifest: "));
}

#[test]
fn correlate_matches_direct_liouville_sum() {
    // Oracle: λ by trial division.
    fn liouville(mut n: u64) -> i64 {
        let mut omega = 0;
        let mut p = 2;
        while p * p <= n {
            while n % p == 0 {
                n /= p;
                omega += 1;
            }
            p += 1;
        }
        if n > 1 {
            omega += 1;
        }
        if omega % 2 == 0 {
            1
        } else {
            -1
        }
    }
    let expected: i64 = (1..=2000u64).map(|n| liouville(n) * liouville(n + 3)).sum();
    let o = lab(&["correlate", "--x", "2000", "--shifts", "0,3", "--threads", "3"]);
    assert!(o.status.success());
    assert_eq!(csv_rows(&stdout(&o))[0][7], expected.to_string());
}

#[test]
fn snf_solve_json() {
    let o = lab(&["snf-solve", "--a", "2,3", "--h", "1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["solvable"], json!(true));
    assert_eq!(v["particular"], json!([1, 1]));
    assert_eq!(v["step"], json!([3, 2]));
    assert_eq!(v["lcm"], json!(6));
}

#[test]
fn snf_solve_unsolvable() {
    let o = lab(&["snf-solve", "--a", "2,4", "--h", "1"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["solvable"], json!(false));
    assert_eq!(v["particular"], Value::Null);
    assert_eq!(v["necessary_condition"], json!(false));
}

#[test]
fn duplicate_shifts_are_a_usage_error() {
    let o = lab(&["correlate", "--x", "100", "--shifts", "0,1,1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("shifts must be distinct"));
}

#[test]
fn r_conflicts_with_eta_proxy() {
    let o = lab(&["correlate", "--x", "100", "--shifts", "0,1", "--r", "5", "--eta-proxy", "1e9"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn manifest_digest_matches_file() {
    let dir = tempfile::tempdir().unwrap();
    for (format, name) in [(Format::Csv, "csv"), (Format::Json, "json")] {
        let out = dir.path().join(format!("corr.{name}"));
        let o = lab(&[
            "correlate",
            "--x",
            "5000",
            "--shifts",
            "0,2",
            "--r",
            "30",
            "--function",
            "lambda-r",
            "--format",
            name,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        assert!(o.stdout.is_empty());
        let manifest = RunManifest::read(&manifest_path(&out)).unwrap();
        assert_eq!(manifest.subcommand, "correlate");
        assert_eq!(manifest.format, name);
        assert_eq!(manifest.rows, 1);
        assert_eq!(manifest.parameters["x"], json!(5000));
        assert_eq!(manifest.digest, digest_file(&out, format).unwrap());
    }
}

#[test]
fn identical_runs_have_identical_digests() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, threads: &str| {
        let out = dir.path().join(name);
        let o = lab(&[
            "correlate", "--x", "20000", "--shifts", "0,1,4", "--threads", threads, "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success());
        RunManifest::read(&manifest_path(&out)).unwrap().digest
    };
    assert_eq!(run("a.csv", "1"), run("b.csv", "1"));
    assert_eq!(run("a.csv", "1"), run("c.csv", "7"));
}

#[test]
fn empty_scan_grid_is_header_only() {
    let o = lab(&["scan", "--x", "", "--shifts", "0,1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 1);
    assert!(text.trim_end().ends_with("elapsed_ms,status"));
}

#[test]
fn scan_requires_ascending_grid() {
    let o = lab(&["scan", "--x", "100,50", "--shifts", "0,1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn scan_rows_follow_grid() {
    let o = lab(&["scan", "--x", "100,1000,10000", "--shifts", "0"]);
    assert!(o.status.success());
    let rows = csv_rows(&stdout(&o));
    let sums: Vec<&str> = rows.iter().map(|r| r[7].as_str()).collect();
    // Summatory Liouville function at 10^2, 10^3, 10^4.
    assert_eq!(sums, ["-2", "-14", "-94"]);
    assert!(rows.iter().all(|r| r[11] == "ok"));
}

#[test]
fn charsum_consecutive_product() {
    let o = lab(&["charsum", "--p", "101"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows[0][0], "101");
    assert_eq!(rows[0][2], "-1");
    assert_eq!(rows[0][4], "true");
}

#[test]
fn charsum_composite_modulus() {
    let o = lab(&["charsum", "--discriminant", "-84", "--poly", "0:1,1:1,5:2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows[0][0], "84");
    assert_eq!(rows[0][4], "true");
}

#[test]
fn charsum_needs_a_character() {
    let o = lab(&["charsum"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sieve_count_defaults() {
    let o = lab(&["sieve-count", "--x", "100000"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 3);
    // Integers in [1, 10^5] coprime to 2·3·5·7·11·13·17·19.
    assert!(rows.iter().all(|r| r[3] == "17103" && r[5] == "true"));
}

#[test]
fn moment_chain() {
    let o = lab(&["moment", "--x", "10000", "--m", "10", "--eps", "0.6", "--k", "4"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows[0][3], "4");
    assert_eq!(rows[0][11], "true");
    let fraction: f64 = rows[0][6].parse().unwrap();
    let chebyshev: f64 = rows[0][9].parse().unwrap();
    assert!(fraction <= chebyshev);
}

#[test]
fn capacity_errors_exit_one() {
    let o = lab(&["correlate", "--x", "100000", "--shifts", "0,1", "--table-limit", "1000"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("capacity"));
}

#[test]
fn table_limit_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_chowla-lab"))
        .args(["correlate", "--x", "100000", "--shifts", "0,1"])
        .env("CHOWLA_LAB_TABLE_LIMIT", "1000")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn selftest_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("selftest.json");
    let o = lab(&["selftest", "--format", "json", "--threads", "4", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 10);
    assert!(rows.iter().all(|r| r["status"] == "PASS"));
    assert!(Path::new(&manifest_path(&out)).exists());
}
