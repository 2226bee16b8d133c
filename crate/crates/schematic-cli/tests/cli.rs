use std::path::PathBuf;
use std::process::{Command, Output};

fn corpus(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_schematic")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn trace_ends_with_cycle() {
    let path = corpus("long_run.prob");
    let out = run(&[path.to_str().unwrap(), "--trace"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.lines().last(), Some("cycle i=15 j=5"));
    assert!(text.contains("--- instance 0 ---"));
    assert!(text.contains("stab: 8"));
}

#[test]
fn clash_exits_one_and_oracle_agrees() {
    let path = corpus("swap_clash.prob");
    let out = run(&[path.to_str().unwrap(), "--oracle", "5"]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.starts_with("oracle: instances 0..=5, first failure at instance"), "{text}");
    assert!(text.contains("; agrees"));
    assert!(text.lines().last().unwrap().starts_with("not unifiable at instance"));
    assert!(out.stderr.is_empty());
}

#[test]
fn json_has_all_fields() {
    let path = corpus("long_run.prob");
    let out = run(&[path.to_str().unwrap(), "--json", "--oracle"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["verdict"], "cycle");
    assert_eq!(v["i"], 15);
    assert_eq!(v["j"], 5);
    assert_eq!(v["stab_index"], 8);
    assert!(v["mapping"].is_object());
    assert_eq!(v["instances"].as_array().unwrap().len(), 16);
    assert_eq!(v["oracle"]["agrees"], true);
}

#[test]
fn max_iterations_exhausts() {
    let path = corpus("long_run.prob");
    let out = run(&[path.to_str().unwrap(), "--max-iterations", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).starts_with("exhausted after"));
}

#[test]
fn missing_file_is_input_error() {
    let out = run(&["/nonexistent/problem.prob"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn syntax_error_reports_position() {
    let dir = std::env::temp_dir().join(format!("schematic-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.prob");
    std::fs::write(&path, "schema: L[i] -> f(X[i], L[i+1])\nproblem: L[0] = a;\n").unwrap();
    let out = run(&[path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.prob:"), "{err}");
    std::fs::remove_dir_all(&dir).ok();
}
