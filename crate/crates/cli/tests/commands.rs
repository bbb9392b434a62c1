use serde_json::Value;
use std::path::Path;
use std::process::Command;

fn scarot(args: &[&str]) -> (Option<i32>, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_scarot")).args(args).output().unwrap();
    let json = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out.status.code(), json)
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn single_row_mean_has_zero_objective() {
    let dir = tempfile::tempdir().unwrap();
    let f = path(dir.path(), "one.csv");
    std::fs::write(&f, "2,1\n3,0.5,1\n").unwrap();
    let (code, v) = scarot(&["mean", "--input", &f]);
    assert_eq!(code, Some(0));
    assert_eq!(v["objective"], 0.0);
    assert_eq!(v["orbit"].as_array().unwrap().len(), 4);
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert!(v["runtime_seconds"].is_number());
}

#[test]
fn toy_pair_distance() {
    let dir = tempfile::tempdir().unwrap();
    let (x, y) = (path(dir.path(), "x.csv"), path(dir.path(), "y.csv"));
    let e = 0.05f64;
    // diag(e^ε, e^-ε) and its rotation by π/4.
    let (a, b) = (e.exp(), (-e).exp());
    std::fs::write(&x, format!("2,1\n{a:.17e},0,{b:.17e}\n")).unwrap();
    let (m, o) = ((a + b) / 2.0, (a - b) / 2.0);
    std::fs::write(&y, format!("2,1\n{m:.17e},{o:.17e},{m:.17e}\n")).unwrap();
    let (code, v) = scarot(&["--k", "3", "dist", "--x", &x, "--y", &y]);
    assert_eq!(code, Some(0));
    let d = v["results"][0]["distance"].as_f64().unwrap();
    assert!((d - 3f64.sqrt() * std::f64::consts::FRAC_PI_4).abs() < 1e-9);
}

#[test]
fn identical_groups_overlap() {
    let dir = tempfile::tempdir().unwrap();
    let f = path(dir.path(), "g.csv");
    let (code, _) = scarot(&["--seed", "4", "simulate", "--case", "1", "--n", "40", "--output", &f]);
    assert_eq!(code, Some(0));
    let (code, v) = scarot(&["--bootstrap", "30", "group-test", "--input1", &f, "--input2", &f]);
    assert_eq!(code, Some(0));
    for frame in ["psr", "log_euclidean"] {
        assert!(v[frame]["p_value"].as_f64().unwrap() > 0.999);
        assert_eq!(v[frame]["mean1_in_region2"], true);
    }
    assert_eq!(v["label"], "approximate bootstrap test");
}

#[test]
fn compare_has_tagged_rows() {
    let dir = tempfile::tempdir().unwrap();
    let f = path(dir.path(), "c.csv");
    scarot(&["simulate", "--case", "1", "--n", "10", "--output", &f]);
    let out = Command::new(env!("CARGO_BIN_EXE_scarot")).args(["compare", "--input", &f]).output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1 + 10 + 3);
    assert!(lines.iter().all(|l| l.split(',').count() == 2 + 2 * 3));
    let tags: Vec<&str> = lines[11..].iter().map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(tags, ["le_mean", "ai_mean", "psr_mean"]);
}

#[test]
fn simulate_rejects_empty_sample() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = scarot(&["simulate", "--case", "2", "--n", "0", "--output", &path(dir.path(), "z.csv")]);
    assert_eq!(code, Some(2));
}
