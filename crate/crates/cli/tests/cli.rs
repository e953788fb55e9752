use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use semifourier::json::sequence_from_str;
use semifourier::{eisf, parse};

const EXAMPLE_ONE: &str = "exp(x*int(exp(-x^2))) - int(exp(-x^2)) - 3";
const EXP_LOG: &str = "x*inv(exp(x)-1) - int(inv(exp(x)-1)) - inv(x)";

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_semifourier"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

#[test]
fn compute_example_one_table() {
    let o = bin(&["compute", EXAMPLE_ONE]);
    assert!(o.status.success());
    let out = stdout(&o);
    let rows = out.lines().filter(|l| l.contains(" | ")).count();
    assert_eq!(rows, 18, "header plus 17 rows");
    assert!(out.contains("where\n  f1 = exp(-x^2)\n  f2 = int(f1)\n  f3 = exp(x*f2)\n"));
    assert!(out.contains("17 | 10321920 "));
}

#[test]
fn compute_cubic_is_the_fourier_sequence() {
    let o = bin(&["compute", "x^3+3*x^2+5*x+7"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(out.lines().last(), Some("4 | 6                     | 1"));
    assert!(!out.contains("where"));
}

#[test]
fn parse_error_exits_two() {
    let o = bin(&["compute", "exp("]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("parse error"));
}

#[test]
fn golden_tables_match_byte_for_byte() {
    let mut seen = 0;
    for entry in fs::read_dir(fixture_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("expr") {
            continue;
        }
        let o = bin(&["compute", "--file", path.to_str().unwrap()]);
        assert!(o.status.success(), "{}", path.display());
        let golden = fs::read_to_string(path.with_extension("table")).unwrap();
        assert_eq!(stdout(&o), golden, "{}", path.display());
        seen += 1;
    }
    assert_eq!(seen, 7);
}

#[test]
fn fixtures_flag_runs_the_corpus() {
    let o = bin(&["compute", "--fixtures"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(out.lines().filter(|l| l.ends_with(" ok")).count(), 7);
    assert!(out.contains("exp-int     45 rows"));
}

#[test]
fn json_output_reingests() {
    let o = bin(&["compute", "--json", EXP_LOG]);
    assert!(o.status.success());
    let seq = sequence_from_str(&stdout(&o)).unwrap();
    assert_eq!(seq, eisf(&parse(EXP_LOG).unwrap()).unwrap());
}

#[test]
fn verify_example_one_numerically() {
    let o = bin(&[
        "verify",
        EXAMPLE_ONE,
        "--interval",
        "-2",
        "2",
        "--points",
        "20",
    ]);
    assert!(o.status.success(), "{}", stdout(&o));
    let out = stdout(&o);
    assert!(out.contains("symbolic: pass"));
    assert!(out.contains("numeric on [-2, 2], 20 samples"));
}

#[test]
fn verify_exp_log_symbolically() {
    let o = bin(&["verify", "--json", EXP_LOG]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["length"], 7);
    assert_eq!(v["symbolic"]["pass"], true);
    assert!(v["numeric"].is_null());
}

#[test]
fn interval_across_a_pole_reports_discarded_samples() {
    let o = bin(&[
        "verify",
        EXP_LOG,
        "--interval",
        "-1",
        "1",
        "--base-point",
        "0.5",
    ]);
    let out = stdout(&o);
    assert!(o.status.success(), "{out}");
    assert!(out.contains("discarded sample x = -1"));
    assert!(out.contains("singularity near x = 0"));
}

#[test]
fn unusable_interval_is_an_evaluation_error() {
    let o = bin(&["verify", EXP_LOG, "--interval", "-1", "1"]);
    assert_eq!(o.status.code(), Some(5));
}

#[test]
fn count_roots_of_the_cubic() {
    let o = bin(&[
        "count-roots",
        "x^3+3*x^2+5*x+7",
        "--interval",
        "-10",
        "0",
        "--json",
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["nu_a"], 3);
    assert_eq!(v["nu_b"], 0);
    assert_eq!(v["bound"], 3);
    assert_eq!(v["parity"], "odd");
}

#[test]
fn count_roots_edge_cases() {
    let o = bin(&["count-roots", "7", "--interval", "-1", "1"]);
    assert!(stdout(&o).contains("bound = 0 (even)"));
    // three simple roots at 1, 2, 3
    let o = bin(&["count-roots", "(x-1)*(x-2)*(x-3)", "--interval", "0", "4"]);
    assert!(stdout(&o).contains("bound = 3 (odd)"));
    let o = bin(&["count-roots", "x^2 - 2"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn count_roots_through_a_tower() {
    // exp(x) - 2 has the single root log 2
    let o = bin(&[
        "count-roots",
        "exp(x) - 2",
        "--interval",
        "0",
        "1",
        "--json",
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["bound"], 1);
}

#[test]
fn budget_exhaustion_exits_four() {
    let o = bin(&["compute", EXAMPLE_ONE, "--budget", "10"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("budget"));
}

#[test]
fn trace_nests_calls() {
    let o = bin(&["trace", EXAMPLE_ONE]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.starts_with("In1 = f3 - f2 - 3\n|    In2 = -f2 - 3\n|    |    In3 = -f1\n"));
    assert!(out.lines().last().unwrap().starts_with("    10321920"));
    let o = bin(&["compute", "--trace", EXAMPLE_ONE]);
    assert!(stdout(&o).contains("Out1 =\n"));
}

#[test]
fn file_input_skips_comments() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("in.expr");
    fs::write(&path, "# a cubic\nx^3 + 3*x^2\n  + 5*x + 7\n").unwrap();
    let o = bin(&["compute", "-f", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 5);
}
