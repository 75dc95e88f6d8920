use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

struct Env {
    dir: TempDir,
}

impl Env {
    fn new() -> Self {
        Env { dir: tempfile::tempdir().unwrap() }
    }

    fn file(&self, name: &str, contents: &str) -> PathBuf {
        let path = self.dir.path().join(name);
        std::fs::write(&path, contents).unwrap();
        path
    }

    fn identity(&self, n: usize) -> PathBuf {
        let rows: Vec<String> =
            (0..n).map(|i| (0..n).map(|j| if i == j { "1" } else { "0" }).collect::<Vec<_>>().join(" ")).collect();
        self.file(&format!("i{n}.txt"), &format!("{n}\n{}\n", rows.join("\n")))
    }
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quadform")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn p(path: &PathBuf) -> &str {
    path.to_str().unwrap()
}

#[test]
fn check_reports_conditions() {
    let env = Env::new();
    let s = env.identity(8);
    let t = env.file("t.txt", "[[1, 0], [0, 1]]");
    let o = run(&["check", "--gram", p(&s), "--target", p(&t), "-q", "3", "-j", "1"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["globally_represented"], true);
    assert_eq!(v["condition_i"]["isotropy"]["method"], "rank_shortcut");
    assert_eq!(v["condition_ii"]["valuation"], 0);
    let s3 = env.identity(3);
    let t1 = env.file("one.txt", "1\n1\n");
    let o = run(&["check", "--gram", p(&s3), "--target", p(&t1), "-q", "3"]);
    assert_eq!(code(&o), 1);
    assert_eq!(json(&o)["rank_check"], false);
}

#[test]
fn help_documents_condition_ii() {
    let o = run(&["check", "--help"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("ord_q(det T) <= j - 1"));
}

#[test]
fn input_errors_exit_two() {
    let env = Env::new();
    let s = env.identity(2);
    let bad = env.file("bad.txt", "2\n1 2\n3 4\n");
    assert_eq!(code(&run(&["invariants", "--gram", p(&bad)])), 2);
    assert_eq!(code(&run(&["invariants", "--gram", "/nonexistent/file"])), 2);
    assert_eq!(code(&run(&["minimum", "--gram", p(&s), "--format", "xml"])), 2);
    assert_eq!(code(&run(&["jordan", "--gram", p(&s), "-p", "4"])), 2);
    assert_eq!(code(&run(&["genus", "--gram", p(&s), "-p", "2"])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
}

#[test]
fn local_and_global_representation() {
    let env = Env::new();
    let s = env.identity(3);
    let seven = env.file("seven.txt", "1\n7\n");
    let o = run(&["localrep", "--gram", p(&s), "--target", p(&seven)]);
    assert_eq!(code(&o), 1);
    assert_eq!(json(&o)["2"]["status"], "not_representable");
    let o = run(&["localrep", "--gram", p(&s), "--target", p(&seven), "-p", "3"]);
    assert_eq!(code(&o), 0);
    assert_eq!(code(&run(&["represent", "--gram", p(&s), "--target", p(&seven)])), 1);
    let six = env.file("six.txt", "1\n6\n");
    let o = run(&["represent", "--gram", p(&s), "--target", p(&six), "--limit", "100"]);
    assert_eq!(code(&o), 0);
    // 6 = 4 + 1 + 1: 3 positions times 4 signs, up to the sign of the whole
    assert_eq!(json(&o).as_array().unwrap().len(), 12);
}

#[test]
fn isotropy_and_minimum() {
    let env = Env::new();
    let s = env.identity(5);
    let t = env.file("t.txt", "2\n1 0\n0 1\n");
    let x = env.file("x.txt", "5 2\n1 0\n0 1\n0 0\n0 0\n0 0\n");
    let o = run(&["isotropy", "--gram", p(&s), "--target", p(&t), "-q", "2", "--witness", p(&x)]);
    assert_eq!((code(&o), json(&o)["isotropic"].clone()), (1, Value::Bool(false)));
    let o = run(&["isotropy", "--gram", p(&s), "--target", p(&t), "-q", "3"]);
    assert_eq!((code(&o), json(&o)["isotropic"].clone()), (0, Value::Bool(true)));
    let d = env.file("d.txt", "2\n2 0\n0 3\n");
    assert_eq!(json(&run(&["minimum", "--gram", p(&d)]))["minimum"], "2");
    let o = run(&["minimum", "--gram", p(&d), "--bound", "5", "--format", "csv"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("norm,x1,x2"));
    assert_eq!(text.lines().count(), 1 + 4);
}

#[test]
fn extend_genus_and_scan() {
    let env = Env::new();
    let s = env.identity(4);
    let tm = env.file("tm.txt", "2\n1 0\n0 3\n");
    let glue = env.file("glue.txt", "2 1\n1\n0\n");
    let sigma = env.file("sigma.txt", "4 1\n1\n0\n0\n0\n");
    let o = run(&["extend", "--gram", p(&s), "--target", p(&tm), "--glue", p(&glue), "--sigma", p(&sigma)]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["x"][0], serde_json::json!(["1", "0"]));
    let s2 = env.identity(2);
    let sigma2 = env.file("sigma2.txt", "2 1\n1\n0\n");
    let o = run(&["extend", "--gram", p(&s2), "--target", p(&tm), "--glue", p(&glue), "--sigma", p(&sigma2)]);
    assert_eq!(code(&o), 1);
    assert_eq!(json(&o), Value::Null);

    let o = run(&["genus", "--gram", p(&env.identity(5)), "-p", "3"]);
    let v = json(&o);
    assert_eq!((v["complete"].clone(), v["classes"].as_array().unwrap().len()), (Value::Bool(true), 1));

    let o = run(&["scan", "--gram", p(&s), "--family", "unary:30", "-q", "3", "-j", "1"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["rows"].as_array().unwrap().len(), 30);
    assert_eq!(v["empirical_c"], "0");
    let o = run(&["scan", "--gram", p(&s), "--family", "unary:30", "-q", "3", "--max-rows", "10", "--format", "csv"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("det,mu,local_ok,classes_total,classes_representing,exception"));
    assert_eq!(text.lines().count(), 11);
    assert_eq!(code(&run(&["scan", "--gram", p(&s), "--family", "cubes:3", "-q", "3"])), 2);
}
