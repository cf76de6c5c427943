use std::path::PathBuf;
use std::process::{Command, Output};

fn corpus(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "corpus", name]
        .iter()
        .collect();
    p.to_string_lossy().into_owned()
}

fn qdt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdt"))
        .args(args)
        .env_remove("QDT_JOBS")
        .output()
        .expect("qdt runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn check_corpus() {
    for name in [
        "p1cubed.json",
        "blowup_a1.json",
        "blowup_a1_a2.json",
        "blowup_a1_a2_a3.json",
    ] {
        let o = qdt(&["check", &corpus(name)]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", stdout(&o));
        assert!(stdout(&o).trim_end().ends_with("PASS"));
    }
    let o = qdt(&["check", &corpus("p3.json")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL: central_symmetry"));
    let o = qdt(&["check", &corpus("skewed_octants.json"), "--format", "structured"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["passed"], false);
    assert_eq!(v["orientation"]["violations"][0]["kind"], "even_total");
}

#[test]
fn malformed_fan_reports_location() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\n  \"rays\": [[1, 0, 0]],\n  \"cones\": [[0, 1\n}\n").unwrap();
    let o = qdt(&["check", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line"));
    let unknown = dir.path().join("unknown.json");
    std::fs::write(&unknown, r#"{"rays": [], "cones": [], "colour": 1}"#).unwrap();
    let o = qdt(&["check", unknown.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("colour"));
}

#[test]
fn invariants_table_ends_with_q8() {
    let o = qdt(&["invariants", &corpus("p1cubed.json"), "--max-order", "8", "--auto"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.lines().last(), Some("8 → -98"));
    assert!(out.contains("exponent: -8"));
    assert!(out.contains("bott_c3: -16"));
}

#[test]
fn structured_output_is_deterministic() {
    let args = [
        "invariants",
        &corpus("blowup_a1.json"),
        "--max-order",
        "6",
        "--format",
        "structured",
    ];
    let a = qdt(&args);
    let b = qdt(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    assert_eq!(keys.len(), 5);
    assert_eq!(v["series"], serde_json::json!(["1", "0", "-6", "0", "3", "0", "34"]));
    assert_eq!(v["exponent"], "-6");
    assert_eq!(v["bott_c3"], "-12");
    assert_eq!(v["manifest"]["command"], "invariants");
    assert_eq!(v["manifest"]["fan_sha256"].as_str().unwrap().len(), 64);
    assert!(v["manifest"].get("elapsed_ms").is_none());
    let text = stdout(&a);
    let order: Vec<usize> = [
        "\"series\"",
        "\"exponent\"",
        "\"bott_c3\"",
        "\"weights\"",
        "\"manifest\"",
    ]
    .iter()
    .map(|k| text.find(k).unwrap())
    .collect();
    assert!(order.windows(2).all(|w| w[0] < w[1]));
    let timed = qdt(&[&args[..], &["--timings"]].concat());
    let v: serde_json::Value = serde_json::from_slice(&timed.stdout).unwrap();
    assert!(v["manifest"]["elapsed_ms"].is_u64());
}

#[test]
fn jobs_do_not_change_results() {
    let base = [
        "invariants",
        &corpus("blowup_a1_a2.json"),
        "--max-order",
        "6",
        "--format",
        "structured",
    ];
    let one = qdt(&[&base[..], &["--jobs", "1"]].concat());
    let four = Command::new(env!("CARGO_BIN_EXE_qdt"))
        .args(base)
        .env("QDT_JOBS", "4")
        .output()
        .unwrap();
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn explicit_degenerate_weights() {
    let o = qdt(&[
        "invariants",
        &corpus("p1cubed.json"),
        "--weights",
        "1",
        "1",
        "1",
        "--format",
        "structured",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let d = &v["error"]["detail"];
    assert_eq!(d["kind"], "degenerate_weights");
    assert!(d["cone"].is_u64());
    assert!(d["partition"].is_array());

    let o = qdt(&[
        "invariants",
        &corpus("p1cubed.json"),
        "--weights",
        "1",
        "3",
        "5",
        "--max-order",
        "6",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("colength 3"));
}

#[test]
fn invariants_with_tau() {
    let o = qdt(&[
        "invariants",
        &corpus("p1cubed.json"),
        "--max-order",
        "4",
        "--tau",
        "1,1,1",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("tau: 1,1,1"));
    let o = qdt(&["invariants", &corpus("p1cubed.json"), "--tau", "2,1,1"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn invariants_on_invalid_fan() {
    let o = qdt(&["invariants", &corpus("p3.json"), "--max-order", "2"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn vertex_commands() {
    let o = qdt(&["vertex", "--weights", "-2", "-6", "-10", "--max-order", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("2 → -64/5"));
    // These weights are degenerate at colength 3.
    let o = qdt(&[
        "vertex",
        "--weights",
        "-2",
        "-6",
        "-10",
        "--max-order",
        "3",
        "--classical",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = qdt(&[
        "vertex",
        "--weights",
        "-2",
        "-6",
        "-10",
        "--max-order",
        "2",
        "--classical",
    ]);
    assert_eq!(o.status.code(), Some(0));
    // M(-q)^(-gamma) = 1 + gamma q + ..., gamma = 64/5
    assert!(stdout(&o).contains("1 → 64/5"));
    let o = qdt(&[
        "vertex",
        "--weights",
        "-2",
        "-14",
        "-34",
        "--max-order",
        "3",
        "--classical",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let o = qdt(&["vertex", "--weights", "1", "2", "3"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn blowup_chain() {
    let dir = tempfile::tempdir().unwrap();
    let once = dir.path().join("once.json");
    let twice = dir.path().join("twice.json");
    let o = qdt(&[
        "blowup",
        &corpus("p1cubed.json"),
        "--cone-orbit",
        "0",
        "--out",
        once.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("8 rays, 12 cones"));
    assert_eq!(
        std::fs::read_to_string(&once).unwrap(),
        std::fs::read_to_string(corpus("blowup_a1.json")).unwrap()
    );
    assert_eq!(qdt(&["check", once.to_str().unwrap()]).status.code(), Some(0));
    let o = qdt(&[
        "blowup",
        once.to_str().unwrap(),
        "--cone-orbit",
        "2",
        "--out",
        twice.to_str().unwrap(),
    ]);
    assert!(stdout(&o).contains("10 rays, 16 cones"));
    let o = qdt(&["blowup", &corpus("p1cubed.json"), "--cone-orbit", "4"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("out of range"));
}

#[test]
fn oracle_matches_series() {
    for (n, value) in [(2, "-8"), (3, "0"), (4, "12")] {
        let o = qdt(&["oracle", &corpus("p1cubed.json"), "--n", &n.to_string(), "--auto"]);
        assert_eq!(o.status.code(), Some(0));
        let out = stdout(&o);
        assert!(out.contains(&format!("oracle q^{n}: {value}")), "{out}");
        assert!(out.trim_end().ends_with("MATCH"));
    }
}
