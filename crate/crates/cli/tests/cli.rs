use std::process::{Command, Output};

fn grouplog(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_grouplog")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("grouplog-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn check_passes_and_reports_sorted_json() {
    let o = grouplog(&["check", "--p", "2", "--group", "D8", "--ring", "Zp", "--prec", "6", "--suite", "log-integrality", "--samples", "100", "--seed", "42"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["suites"][0]["samples"], 100);
    // two-space indent, keys sorted
    assert!(text.starts_with("{\n  \"config\": {\n    \"ext\": null,\n    \"group\": \"D8\""));
    assert!(text.ends_with("}\n"));
}

#[test]
fn check_all_lists_every_suite() {
    let o = grouplog(&["check", "--group", "C4", "--suite", "all", "--samples", "10"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["suites"].as_array().unwrap().len(), grouplog::suites::SUITES.len());
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["check", "--group", "C6"][..],
        &["check", "--group", "C4", "--prec", "1"],
        &["check", "--group", "C4", "--samples", "0"],
        &["check", "--group", "C4", "--suite", "nonsense"],
        &["check", "--group", "C4", "--ext", "g=2"],
        &["check", "--group", "C256"],
        &["check", "--group", "C4", "--ring", "powser:0"],
        &["check"],
        &["frobnicate"],
    ] {
        assert_eq!(grouplog(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn config_file_and_out_path() {
    let cfg = scratch("run.cfg");
    let out = scratch("report.json");
    std::fs::write(&cfg, format!("# cell\np=3\ngroup=C9\nring=powser:2\nprec=4\nsuite=exp-log\nsamples=5\nout={}\n", out.display())).unwrap();
    let o = grouplog(&["check", "--config", cfg.to_str().unwrap(), "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["config"]["seed"], 7);
    assert_eq!(v["config"]["ring"], "powser:2");
    std::fs::write(&cfg, "colour=blue\n").unwrap();
    assert_eq!(grouplog(&["check", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn descent_suites_take_an_extension() {
    let o = grouplog(&["check", "--group", "D8", "--prec", "4", "--suite", "norm-preimage", "--samples", "3", "--ext", "f=3"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["config"]["ext"], 3);
}

#[test]
fn eval_prints_log() {
    let o = grouplog(&["eval", "1 - 2*c", "--group", "C2", "--ring", "Zp", "--p", "2", "--prec", "4", "--log"]);
    assert_eq!(o.status.code(), Some(0));
    // L(1 − 2c) = log 3·(1 − c) and log 3 ≡ 4 mod 16
    assert!(stdout(&o).contains("log:     4*[1] + 12*[c] @2^4"), "{}", stdout(&o));
}

#[test]
fn eval_normalises() {
    let o = grouplog(&["eval", "r*s - s*r", "--group", "D8"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("element: r*s + 63*s*r @2^6"), "{s}");
    assert!(s.contains("phi:     0 @2^6"));
}

#[test]
fn eval_reports_parse_position() {
    let o = grouplog(&["eval", "1 +"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("position 4"), "{err}");
    assert!(err.contains("   ^"));
}

#[test]
fn eval_log_needs_a_one_unit() {
    let o = grouplog(&["eval", "1 + 3*c", "--log"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn char_tables() {
    let d8 = stdout(&grouplog(&["char-table", "D8"]));
    assert_eq!(d8.lines().filter(|l| l.starts_with('X')).count(), 5);
    let c2 = grouplog(&["char-table", "C2", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&c2)).unwrap();
    let vals: Vec<Vec<String>> = v["characters"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["values"].as_array().unwrap().iter().map(|x| x.as_str().unwrap().to_string()).collect())
        .collect();
    assert_eq!(vals.len(), 2);
    assert!(vals.iter().flatten().all(|x| x == "1" || x == "-1"));
    let q16: serde_json::Value = serde_json::from_str(&stdout(&grouplog(&["char-table", "Q16", "--json"]))).unwrap();
    assert_eq!(q16["characters"].as_array().unwrap().len(), 7);
    let h27 = grouplog(&["char-table", "H27"]);
    assert_eq!(h27.status.code(), Some(0));
    assert!(stdout(&h27).starts_with("H27: 11 classes, values in Z[z] with z a root of unity of order 3"));
    assert_eq!(grouplog(&["char-table", "C6"]).status.code(), Some(2));
}
