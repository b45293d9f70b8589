use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn qsynth(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsynth"))
        .args(args)
        .env_remove("QSYNTH_ORACLE_LIMIT")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Two-site chain with one boson and one fermion mode per site.
const TOY: &str = r#"{
    "dims": 1, "extent": 2, "boundary": "open", "ordering": "snake",
    "boson": {"num": 2, "Q": 1, "R": 1.0},
    "fermion": {"modes_per_site": 1},
    "potential": [{"coeff": 0.5, "bosons": [0, 0]}, {"coeff": 0.5, "bosons": [1, 1]}],
    "hopping": [
        {"n": 1, "nprime": 1, "a": 1, "b": 1, "dagger": [true, false], "coeff": {"re": 0.7}},
        {"n": 2, "nprime": 2, "a": 1, "b": 1, "dagger": [true, false], "coeff": {"re": -0.7}},
        {"n": 1, "nprime": 2, "a": 1, "b": 1, "dagger": [true, false], "coeff": {"re": 1.0},
         "boson_monomial": [{"boson": 0, "power": 1}]}
    ]
}"#;

fn toy_file(dir: &Path) -> String {
    let p = dir.join("toy.json");
    fs::write(&p, TOY).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn synth_writes_a_deterministic_circuit() {
    let dir = tempfile::tempdir().unwrap();
    let model = toy_file(dir.path());
    let out = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    let (a, b) = (out("a.qc"), out("b.qc"));
    for path in [&a, &b] {
        let o = qsynth(&[
            "synth", "--model", &model, "--encoding", "jw", "--policy", "fused", "--epsilon", "0.1", "--out", path,
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let text = fs::read_to_string(&a).unwrap();
    assert!(text.starts_with("qubits 4\n"));
    assert!(text.contains("cx "));
    assert_eq!(text, fs::read_to_string(&b).unwrap());
}

#[test]
fn verify_passes_and_reports_trotter_error() {
    let dir = tempfile::tempdir().unwrap();
    let model = toy_file(dir.path());
    let o = qsynth(&["verify", "--model", &model, "--epsilon", "0.1", "--tol", "1e-8"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let s = stdout(&o);
    let dev: f64 = s
        .lines()
        .find_map(|l| l.strip_prefix("fused_vs_naive "))
        .and_then(|r| r.split_whitespace().next())
        .unwrap()
        .parse()
        .unwrap();
    assert!(dev <= 1e-8);
    assert!(s.contains("trotter_error"));
}

#[test]
fn verify_respects_oracle_limit() {
    let dir = tempfile::tempdir().unwrap();
    let model = toy_file(dir.path());
    let o = qsynth(&["verify", "--model", &model, "--oracle-limit", "3"]);
    assert_eq!(o.status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_qsynth"))
        .args(["verify", "--model", &model])
        .env("QSYNTH_ORACLE_LIMIT", "3")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr(&o).lines().count(), 1);
}

#[test]
fn count_emits_one_json_line() {
    let o = qsynth(&["count", "--preset", "hopping_toy", "--d", "2", "--L", "3", "--policy", "naive"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let s = stdout(&o);
    assert_eq!(s.lines().count(), 1);
    let v: serde_json::Value = serde_json::from_str(s.trim()).unwrap();
    assert!(v["cnot"].as_u64().unwrap() > 0);
    assert_eq!(v["meta"]["policy"], "naive");
    assert_eq!(v["meta"]["L"], 3);
    assert_eq!(s, stdout(&qsynth(&["count", "--preset", "hopping_toy", "--d", "2", "--L", "3", "--policy", "naive"])));
}

#[test]
fn scaling_writes_reports_per_extent() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("scaling.jsonl");
    let o = qsynth(&["scaling", "--d", "1", "--Ls", "4,6,8", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(stderr(&o).contains("cnot exponent"));
    let o = qsynth(&["scaling", "--Ls", "4,4"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn block_encode_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let model = toy_file(dir.path());
    let o = qsynth(&["block-encode", "--model", &model]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert!(v["verify_deviation"].as_f64().unwrap() < 1e-10);
    assert!(v["lambda"].as_f64().unwrap() > 0.0);
}

#[test]
fn vc_check_square() {
    let o = qsynth(&["vc-check", "--L", "2", "--d", "2", "--modes", "1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let s = stdout(&o);
    assert!(s.contains("noncommuting_with_h 0"));
    assert!(s.contains("physical_rank 16 expected 16"));
    assert!(s.trim_end().ends_with("ok"));
}

#[test]
fn vc_with_periodic_or_row_major_is_a_config_error() {
    let o = qsynth(&["synth", "--preset", "hopping_toy", "--d", "2", "--encoding", "vc", "--boundary", "periodic"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).is_empty());
    assert_eq!(stderr(&o).lines().count(), 1);
    let o = qsynth(&["count", "--preset", "hopping_toy", "--d", "2", "--encoding", "vc", "--ordering", "row-major-lex"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"dims\": 1").unwrap();
    for args in [
        vec!["synth", "--model", bad.to_str().unwrap()],
        vec!["synth", "--model", "/nonexistent/model.json"],
        vec!["synth", "--preset", "nope"],
        vec!["synth"],
        vec!["verify", "--preset", "hopping_toy", "--tol", "0"],
        vec!["count", "--preset", "hopping_toy", "--param", "mass"],
        vec!["frobnicate"],
    ] {
        let o = qsynth(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn export_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let model = toy_file(dir.path());
    let a = dir.path().join("a.qc");
    let b = dir.path().join("b.qc");
    let o = qsynth(&["synth", "--model", &model, "--out", a.to_str().unwrap()]);
    assert!(o.status.success());
    let o = qsynth(&["export", "--input", a.to_str().unwrap(), "--out", b.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(fs::read_to_string(&a).unwrap(), fs::read_to_string(&b).unwrap());

    fs::write(&a, "qubits 2\ncx 0 5\n").unwrap();
    let o = qsynth(&["export", "--input", a.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"));
}
