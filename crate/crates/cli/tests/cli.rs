use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_meshrep")).args(args).env_remove("MESHREP_SEED").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn decompose_inline_module() {
    let o = run(&["decompose", "--dims", "1,2,1", "--map", "1;0", "--map", "0 1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().any(|l| l == "M[1,2] + M[2,3]"), "{}", stdout(&o));
    let o = run(&["decompose", "--intervals", "1-3,2-2", "-q", "1<-2->3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("M[1,3] + M[2,2]") || stdout(&o).contains("M[2,2] + M[1,3]"), "{}", stdout(&o));
}

#[test]
fn functor_commands() {
    let o = run(&["coxeter", "--intervals", "1-3"]);
    assert_eq!(stdout(&o), "quiver: 1->2->3\nΣ^-1M[1,1]\n");
    let o = run(&["serre", "--intervals", "1-3"]);
    assert!(stdout(&o).lines().any(|l| l == "M[1,1]"), "{}", stdout(&o));
    assert_eq!(run(&["reflect", "--intervals", "2-2", "--at", "1"]).status.code(), Some(2));
    let o = run(&["reflect", "--intervals", "2-2", "-q", "F", "--at", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o), "quiver: 1<-2\nΣ^-1M[2,2]\n");
}

#[test]
fn frac_cy_check_passes() {
    let o = run(&["check", "frac-cy", "--n", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("PASS frac-cy"), "{out}");
    assert!(out.contains("S^4 ≅ Σ^2 on 6·window indecomposables"), "{out}");
}

#[test]
fn zero_module_diagram_is_all_zero() {
    let o = run(&["ar-quiver", "-q", "FF", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let vs = doc["vertices"].as_array().unwrap();
    assert!(!vs.is_empty());
    assert!(vs.iter().all(|v| v["value"] == "0"));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(run(&["check", "no-such-suite"]).status.code(), Some(2));
    assert_eq!(run(&["decompose", "--dims", "1,2", "--map", "1 2 3"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn triangle_fill_and_verify() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("t.json");
    let o = run(&["triangle", "fill", "--n", "3", "-o", path(&good)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let o = run(&["triangle", "verify", path(&good)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "distinguished");

    // drop one phi component: still parseable, no longer distinguished
    let mut doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&good).unwrap()).unwrap();
    let phi = doc["phi"].as_array_mut().unwrap();
    assert!(!phi.is_empty());
    phi.remove(0);
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, serde_json::to_string(&doc).unwrap()).unwrap();
    let o = run(&["triangle", "verify", path(&bad)]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).starts_with("not distinguished"));
}

#[test]
fn output_is_deterministic() {
    let args = ["triangle", "fill", "--n", "2", "--seed", "11"];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.stdout, b.stdout);
    let other = run(&["triangle", "fill", "--n", "2", "--seed", "12"]);
    assert_ne!(a.stdout, other.stdout);
    let env = Command::new(env!("CARGO_BIN_EXE_meshrep"))
        .args(["triangle", "fill", "--n", "2", "--seed", "12"])
        .env("MESHREP_SEED", "11")
        .output()
        .unwrap();
    assert_eq!(env.stdout, a.stdout);
    let dot = ["ar-quiver", "--intervals", "1-2", "--format", "dot"];
    assert_eq!(run(&dot).stdout, run(&dot).stdout);
}

#[test]
fn tensor_of_documents() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("c.json");
    let o = run(&["tilt", "coxeter", "-q", "FF", "--format", "json", "-o", path(&f)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let o = run(&["tensor", path(&f), path(&f), "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("degree,left,right,dim"));
}
