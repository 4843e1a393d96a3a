use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use quatrank::io::{read_matrix, write_matrix};
use quatrank::QMatrix;
use serde_json::Value;
use tempfile::TempDir;

fn quatrank(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quatrank")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn put(dir: &Path, name: &str, rows: &[&[&str]]) -> String {
    let path = dir.join(format!("{name}.json"));
    write_matrix(&path, &QMatrix::parse_rows(rows).unwrap()).unwrap();
    path.display().to_string()
}

/// Writes a 1×1 quintuple and returns the `--a … --e` arguments.
fn quint(dir: &Path, a: &str, b: &str, c: &str, d: &str, e: &str) -> Vec<String> {
    let mut args = Vec::new();
    for (flag, lit) in [("a", a), ("b", b), ("c", c), ("d", d), ("e", e)] {
        args.push(format!("--{flag}"));
        args.push(put(dir, flag, &[&[lit]]));
    }
    args
}

fn refs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

#[test]
fn rank_of_zero_matrix() {
    let dir = TempDir::new().unwrap();
    let z = put(dir.path(), "z", &[&["0", "0"], &["0", "0"]]);
    let o = quatrank(&["rank", &z]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "0\n");

    let m = put(dir.path(), "m", &[&["1", "i"], &["j", "-k"]]);
    let o = quatrank(&["--format", "json", "rank", &m]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["rank"], 1);
}

#[test]
fn solve_writes_exact_solution() {
    let dir = TempDir::new().unwrap();
    let out: PathBuf = dir.path().join("sol");
    let mut args = vec!["solve".to_string()];
    args.extend(quint(dir.path(), "k", "i", "0", "j", "0"));
    args.extend(["--out".to_string(), out.display().to_string()]);
    let o = quatrank(&refs(&args));
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("substitution: exact"));
    assert_eq!(read_matrix(&out.join("X.json")).unwrap(), QMatrix::parse_rows(&[&["1"]]).unwrap());
}

#[test]
fn min_rank_modes() {
    let dir = TempDir::new().unwrap();
    let mut args = vec!["--format".to_string(), "json".into(), "solve".into(), "--min-rank-x".into()];
    args.extend(quint(dir.path(), "1", "1", "0", "1", "0"));
    let o = quatrank(&refs(&args));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["min_rank_x"], 1);
    assert_eq!(v["rank_x"], 1);
    assert_eq!(v["substitution"], "exact");
}

#[test]
fn inconsistent_equation_exits_one_and_names_the_equality() {
    let dir = TempDir::new().unwrap();
    let mut args = vec!["solve".to_string()];
    args.extend(quint(dir.path(), "1", "0", "0", "1", "1"));
    let o = quatrank(&refs(&args));
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("r[A C B] = r[C B]"));
}

#[test]
fn bad_input_exits_two() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"rows": 1, "cols": 1, "entries": [["2*q"]]}"#).unwrap();
    let o = quatrank(&["rank", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("parse error"));

    let mut args = vec!["solve".to_string()];
    args.extend(quint(dir.path(), "1", "1", "1", "1", "1"));
    let b = put(dir.path(), "b2", &[&["1"], &["1"]]);
    args[4] = b;
    let o = quatrank(&refs(&args));
    assert_eq!(o.status.code(), Some(2));

    assert_eq!(quatrank(&["solve", "--nonsense"]).status.code(), Some(2));
}

#[test]
fn decompose_writes_verified_document() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("dec");
    let mut args = vec!["decompose".to_string()];
    args.extend(quint(dir.path(), "1", "1", "1", "1", "1"));
    args.extend(["--out".to_string(), out.display().to_string()]);
    let o = quatrank(&refs(&args));
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("overall: pass"));
    let doc: Value = serde_json::from_str(&fs::read_to_string(out.join("decomposition.json")).unwrap()).unwrap();
    assert_eq!(doc["dims"]["m3"], 1);
    for key in ["P", "P_inv", "Q", "Q_inv", "T1", "T2_inv", "V1", "V2_inv"] {
        assert!(doc["transforms"][key].is_object(), "{key}");
    }
    assert!(doc["factors"]["S_A"].is_object());
    assert!(doc["core"]["A5"].is_object());
}

#[test]
fn extremal_p_and_f1() {
    let dir = TempDir::new().unwrap();
    let mut args = vec!["--format".to_string(), "json".into(), "extremal".into(), "p".into()];
    args.extend(quint(dir.path(), "1", "1", "1", "1", "1"));
    let v: Value = serde_json::from_str(&stdout(&quatrank(&refs(&args)))).unwrap();
    assert_eq!((v["min_rank"].as_u64(), v["max_rank"].as_u64()), (Some(0), Some(1)));

    let a = put(dir.path(), "fa", &[&["1", "0"], &["0", "1"]]);
    let b = put(dir.path(), "fb", &[&["1"], &["0"]]);
    let c = put(dir.path(), "fc", &[&["0", "0"]]);
    let out = dir.path().join("w");
    let o = quatrank(&["extremal", "f1", "--a", &a, "--b", &b, "--c", &c, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("min rank    1"));
    assert!(out.join("min_X.json").exists() && out.join("max_Y.json").exists());
}

#[test]
fn selftest_is_deterministic_and_passes() {
    let args = ["selftest", "--cases", "6", "--max-dim", "3", "--seed", "1"];
    let first = quatrank(&args);
    assert_eq!(first.status.code(), Some(0), "{}", stdout(&first));
    assert!(stdout(&first).ends_with("overall: pass\n"));
    assert_eq!(first.stdout, quatrank(&args).stdout);
}
