use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_permmut")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn record(args: &[&str]) -> (Value, i32) {
    let mut all = vec!["--format", "record"];
    all.extend_from_slice(args);
    let o = run(&all);
    (serde_json::from_slice(&o.stdout).expect("record is JSON"), o.status.code().unwrap())
}

fn temp_file(name: &str, contents: &str) -> std::path::PathBuf {
    let path = std::env::temp_dir().join(format!("permmut-{}-{name}", std::process::id()));
    std::fs::File::create(&path).unwrap().write_all(contents.as_bytes()).unwrap();
    path
}

#[test]
fn expand_examples() {
    let (r, code) = record(&["expand", "<<x1,x2>,x3>"]);
    assert_eq!(code, 0);
    let want = "x2 x3 q^2 x1 - x1 x3 p q x2 + x1 x2 p^2 x3 - x1 x2 p q x3";
    assert_eq!(r["results"]["expansion"], want);
    let (r, _) = record(&["expand", "f(x1,x2,x3)"]);
    assert_eq!(r["results"]["expansion"], "0");
    let (r, _) = record(&["expand", "x1"]);
    assert_eq!(r["results"]["expansion"], "x1");
    let bad = run(&["expand", "<x1,"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("syntax error"));
}

#[test]
fn identities_examples() {
    let (r, code) = record(&["identities", "--degree", "3", "--known", "f,wa"]);
    assert_eq!(code, 0);
    assert_eq!(r["results"]["new_dim"], 0);
    let (r, _) = record(&["identities", "--degree", "4", "--known", "f,wa,hbar,ibar"]);
    assert_eq!(r["results"]["new_generators"], 2);
    assert_eq!(r["results"]["kernel_dim"], 107);
    let (r, _) = record(&["identities", "--degree", "2"]);
    assert_eq!(r["results"]["kernel_dim"], 0);
    let (r, _) = record(&["identities", "--degree", "3", "--known", "f,wa", "--paper-order"]);
    assert_eq!(r["results"]["matrix"]["rank"], 5);
    assert_eq!(r["results"]["matrix"]["rows"].as_array().unwrap().len(), 12);
    assert_eq!(run(&["identities", "--degree", "3", "--known", "nope"]).status.code(), Some(2));
    assert_eq!(run(&["identities", "--degree", "4", "--paper-order"]).status.code(), Some(2));
    assert_eq!(run(&["identities", "--degree", "6"]).status.code(), Some(2));
}

#[test]
fn cohn_examples() {
    let o = run(&["cohn"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("12 equations in 4 unknowns"));
    assert!(text.contains("λ2 + λ3 = 1"));
    assert!(text.contains("verdict: exceptional image certified"));
    let (r, _) = record(&["cohn", "--target", "<<x2,x3>,x4>"]);
    assert_eq!(r["results"]["in_mutation_ideal"], true);
    assert_eq!(r["results"]["verdict"], "not certified");
    let (r, _) = record(&["cohn", "--generator", "0"]);
    assert_eq!(r["results"]["in_mutation_ideal"], false);
    assert_eq!(r["results"]["in_perm_ideal"], false);
}

#[test]
fn findim_examples() {
    let o = run(&["findim", "--check", "wa"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "wa: no (a = e1, b = e1, c = e3 gives -e1)\n");
    let (r, code) = record(&["findim", "--check", "f"]);
    assert_eq!(code, 0);
    assert_eq!(r["results"][0]["holds"], true);

    let zero = temp_file("zero.alg", r#"{"dim": 2, "names": ["e1", "e2"], "table": []}"#);
    let o = run(&["findim", zero.to_str().unwrap(), "--check", "f,wa,flex,hbar,criterion,jacobi,mutate"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));

    let broken = temp_file("broken.alg", "{\"dim\": 2,\n \"names\": [\"e1\", \"e2\"],\n \"table\": [[1, 1, 2, \"1\"],]\n}");
    let o = run(&["findim", broken.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));

    // brackets read as a mutation of the counterexample
    let o = run(&["findim", "--check", "f", "--p", "e1", "--q", "e2 - e3"]);
    assert!(o.status.code().is_some_and(|c| c <= 1));
}

#[test]
fn basis_subcommand() {
    let (r, code) = record(&["basis", "--vars", "3", "--degree", "3"]);
    assert_eq!(code, 0);
    assert_eq!(r["results"]["multilinear_dim"], 7);
    assert_eq!(run(&["basis", "--vars", "3", "--degree", "0"]).status.code(), Some(2));
}

#[test]
fn records_round_trip_and_repeat() {
    let args = ["identities", "--degree", "4", "--known", "f,wa"];
    let (a, _) = record(&args);
    let (b, _) = record(&args);
    let text = serde_json::to_string(&a).unwrap();
    let back: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(back, a);
    for key in ["command", "inputs", "results", "passed", "elapsed_ms"] {
        assert!(a.get(key).is_some(), "{key}");
    }
    assert_eq!(a["results"], b["results"]);
    assert_eq!(stdout(&run(&["cohn"])), stdout(&run(&["cohn"])));
}

#[test]
fn usage_errors() {
    assert_eq!(run(&[]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["findim", "--p", "e1"]).status.code(), Some(2));
}

#[test]
fn verify_paper_with_low_limit_skips() {
    let (r, code) = record(&["verify-paper", "--limit", "2"]);
    assert_eq!(code, 0);
    let statuses: Vec<&str> = r["results"].as_array().unwrap().iter().map(|o| o["status"].as_str().unwrap()).collect();
    assert!(statuses.contains(&"skipped"));
    assert!(!statuses.contains(&"fail"));
}

#[test]
fn verify_paper_reports_a_corrupted_identity() {
    let o = run(&["verify-paper", "--limit", "2", "--extra-identity", "<a,b> - <b,a>"]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("[FAIL] vanishing identities"));
    assert!(text.contains("failed: <a,b> - <b,a>"));
}

#[test]
fn verify_paper_full_run() {
    let o = run(&["verify-paper"]);
    let text = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{text}");
    assert!(text.contains("12 passed, 0 failed, 0 skipped"));
}
