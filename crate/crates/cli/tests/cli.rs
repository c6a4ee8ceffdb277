//! End-to-end tests against the built binary: output bytes, exit codes,
//! format parity, and the cache file protocol.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_cmtorsion"));
    // keep the ambient environment from injecting a cache
    c.env_remove("CMTORSION_CACHE");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary must run")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{:?} failed: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf-8 output")
}

fn temp_path(tag: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("cmtorsion-test-{}-{tag}", std::process::id()));
    p
}

#[test]
fn class_number_row() {
    let out = stdout(&["class-number", "-D", "-23"]);
    assert_eq!(out, "d,h,d0,f,w\n-23,3,-23,1,2\n");
}

#[test]
fn cm_degree_row_matches_reference() {
    let out = stdout(&["cm-degree", "-N", "23"]);
    assert_eq!(
        out,
        "n,d_cm,attaining,scan_bound\n23,22,\"-7,-11,-19,-28,-43,-67\",652\n"
    );
}

#[test]
fn forms_rows_are_lexicographic() {
    let out = stdout(&["forms", "-D", "-23"]);
    assert_eq!(out, "a,b,c\n1,1,6\n2,-1,3\n2,1,3\n");
}

#[test]
fn table1_check_passes() {
    let out = run(&["table1", "--check"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 23); // header + 22 rows
    assert!(text.contains("2,1,,\"-3,-4,-7,-8,-12,-16,-28\",,out-of-model"));
    assert!(text.contains("23,22,22,"));
    assert!(!text.contains("mismatch"));
}

#[test]
fn validation_errors_exit_2() {
    for args in [
        &["cm-degree", "-N", "24"][..],
        &["class-number", "-D", "-5"][..],
        &["cartan", "-D", "-3", "-N", "9"][..],
        &["upper-bound"][..],
        &["no-such-subcommand"][..],
        &["cm-degree", "--bogus-flag"][..],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "args: {args:?}");
        assert!(!out.stderr.is_empty(), "args: {args:?}");
    }
}

#[test]
fn output_is_byte_deterministic() {
    for args in [
        &["crossover", "--max-n", "30"][..],
        &["growth-sequence", "--max-n", "10"][..],
        &["inert-family"][..],
        &["thresholds", "-N", "17", "--format", "json"][..],
    ] {
        let a = stdout(args);
        let b = stdout(args);
        assert_eq!(a, b, "args: {args:?}");
    }
}

#[test]
fn json_and_csv_rows_agree() {
    let csv = stdout(&["crossover", "--max-n", "40"]);
    let json = stdout(&["crossover", "--max-n", "40", "--format", "json"]);
    let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(parsed["schema_version"], "1");
    assert_eq!(parsed["command"], "crossover");
    assert!(parsed["parameters"].is_object());
    assert!(parsed["provenance"].is_object());

    let mut csv_lines = csv.lines();
    let header: Vec<&str> = csv_lines.next().unwrap().split(',').collect();
    let rows = parsed["rows"].as_array().unwrap();
    let csv_rows: Vec<&str> = csv_lines.collect();
    assert_eq!(rows.len(), csv_rows.len());
    // identical row multisets: compare each JSON row re-rendered as CSV
    for (json_row, csv_row) in rows.iter().zip(&csv_rows) {
        let rendered: Vec<String> = header
            .iter()
            .map(|col| {
                let v = json_row[*col].as_str().unwrap().to_string();
                if v.contains(',') {
                    format!("\"{v}\"")
                } else {
                    v
                }
            })
            .collect();
        assert_eq!(&rendered.join(","), csv_row);
    }
}

#[test]
fn crossover_window_flags_candidate() {
    let out = stdout(&["crossover", "--max-n", "17"]);
    let n13: Vec<&str> = out
        .lines()
        .find(|l| l.starts_with("13,"))
        .unwrap()
        .split(',')
        .collect();
    assert_eq!(n13[7], "4"); // d_cm
    assert_eq!(n13[8], "cm-above-threshold");
    let n17 = out.lines().find(|l| l.starts_with("17,")).unwrap();
    assert!(n17.ends_with("cm-above-threshold,true"));
}

#[test]
fn conditional_crossover_at_127_is_indeterminate() {
    let out = stdout(&["crossover", "--max-n", "130", "--conditional"]);
    let n127 = out.lines().find(|l| l.starts_with("127,")).unwrap();
    assert!(n127.contains("indeterminate"), "{n127}");
}

#[test]
fn growth_sequence_first_rows() {
    let out = stdout(&["growth-sequence", "--max-n", "2"]);
    let mut lines = out.lines();
    lines.next();
    assert_eq!(
        lines.next().unwrap(),
        "1,7,7,6,12,0.583333333333,0.611375756505"
    );
    let second = lines.next().unwrap();
    assert!(second.starts_with("2,13,91,72,144,0.631944444444,"));
}

#[test]
fn cache_file_roundtrip() {
    let path = temp_path("cache");
    let _ = std::fs::remove_file(&path);
    let out = bin()
        .args(["class-number", "-D", "-47", "--cache"])
        .arg(&path)
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.lines().any(|l| l == "-47 5"), "cache: {text}");
    // sorted by |D|
    let ds: Vec<i64> = text
        .lines()
        .map(|l| l.split_whitespace().next().unwrap().parse().unwrap())
        .collect();
    let mut sorted = ds.clone();
    sorted.sort_by_key(|d| d.unsigned_abs());
    assert_eq!(ds, sorted);

    // the cache is loaded at startup and trusted
    std::fs::write(&path, "-47 99\n").unwrap();
    let out = bin()
        .args(["class-number", "-D", "-47", "--cache"])
        .arg(&path)
        .output()
        .unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("-47,99"), "poisoned cache not loaded: {text}");
    let _ = std::fs::remove_file(&path);
}

#[test]
fn cache_env_var_is_default_path() {
    let path = temp_path("env-cache");
    let _ = std::fs::remove_file(&path);
    let out = Command::new(env!("CARGO_BIN_EXE_cmtorsion"))
        .args(["class-number", "-D", "-11"])
        .env("CMTORSION_CACHE", &path)
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("-11 1"));
    let _ = std::fs::remove_file(&path);
}

#[test]
fn poisoned_cache_fails_table1_check_with_exit_1() {
    let path = temp_path("poison");
    std::fs::write(&path, "-3 99\n").unwrap();
    let out = bin()
        .args(["table1", "--check", "--cache"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("mismatch"));
    let _ = std::fs::remove_file(&path);
}

#[test]
fn upper_bound_sweep_includes_fit() {
    let out = stdout(&["upper-bound", "--max-n", "100"]);
    let lines: Vec<&str> = out.lines().collect();
    assert!(lines[0].ends_with("slope_approx"));
    let first = lines[1].split(',').collect::<Vec<_>>();
    assert_eq!(first[0], "5");
    assert_eq!(first[1], "2"); // least nonresidue mod 5
    assert_eq!(first[2], "-8");
    // same fitted slope annotated on every row
    let slopes: Vec<&str> = lines[1..]
        .iter()
        .map(|l| *l.split(',').collect::<Vec<_>>().last().unwrap())
        .collect();
    assert!(slopes.windows(2).all(|w| w[0] == w[1]));
    assert!(!slopes[0].is_empty());
}
