use std::process::{Command, Output};

use serde_json::Value;

fn evoclass(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_evoclass")).args(args).env_remove("EVOCLASS_THREADS").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn ok(args: &[&str]) -> String {
    let o = evoclass(args);
    assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    stdout(&o)
}

fn json(args: &[&str]) -> Value {
    let mut a = args.to_vec();
    a.extend(["--format", "json"]);
    serde_json::from_str(ok(&a).trim()).unwrap()
}

#[test]
fn enumerate_row_counts() {
    assert_eq!(ok(&["enumerate", "--q", "2", "--n", "2"]).lines().count(), 16 + 1);
    assert_eq!(ok(&["enumerate", "--q", "3", "--n", "2", "--format", "csv"]).lines().count(), 81 + 1);
    let gf4 = ok(&["enumerate", "--q", "4", "--n", "2", "--format", "json"]);
    assert_eq!(gf4.lines().count(), 256);
    let last: Value = serde_json::from_str(gf4.lines().last().unwrap()).unwrap();
    assert_eq!(last["algebra"], "[1,1],[1,1];[1,1],[1,1]");
    assert_eq!(ok(&["enumerate", "--p", "2", "--k", "2", "--n", "1"]).lines().count(), 4 + 1);
}

#[test]
fn check_examples() {
    let v = json(&["check", "--q", "2", "--left", "1,0;0,0", "--right", "0,1;0,0", "--relation", "isotopism"]);
    assert_eq!(v["related"], true);
    assert!(v["witness"]["H"].is_string());
    let v = json(&["check", "--q", "2", "--left", "1,0;0,0", "--right", "0,1;0,0", "--relation", "isomorphism"]);
    assert_eq!(v["related"], false);
    assert!(v["witness"].is_null());
    let v = json(&["check", "--q", "2", "--left", "0,0;0,0", "--right", "1,0;0,0", "--relation", "isotopism"]);
    assert_eq!(v["related"], false);
    assert_eq!(v["left_signature"]["annihilator_dim"], 2);
    let text = ok(&["check", "--q", "2", "--left", "0,0;0,0", "--right", "1,0;0,0"]);
    assert!(text.contains("witness   none"));
}

#[test]
fn check_reads_documents() {
    let dir = tempfile::tempdir().unwrap();
    let left = dir.path().join("left.json");
    let right = dir.path().join("right.json");
    std::fs::write(&left, r#"{"q": 7, "n": 2, "rows": [[1, 0], [2, 0]]}"#).unwrap();
    std::fs::write(&right, r#"{"p": 7, "n": 2, "rows": [["1", "0"], ["1", "0"]]}"#).unwrap();
    let (l, r) = (left.to_str().unwrap(), right.to_str().unwrap());
    let v = json(&["check", "--q", "7", "--left-file", r, "--right-file", l]);
    assert_eq!(v["related"], true);
    assert_eq!(v["witness"]["F"], "1,0;0,2");
    let o = evoclass(&["check", "--q", "5", "--left-file", l, "--right", "1,0;1,0"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn classify_examples() {
    assert_eq!(json(&["classify", "--q", "5", "--relation", "isomorphism", "--method", "bruteforce"])["class_count"], 23);
    assert_eq!(json(&["classify", "--q", "7", "--relation", "isotopism", "--method", "invariant"])["class_count"], 4);
    let v = json(&["classify", "--q", "2", "--relation", "isomorphism", "--method", "groebner", "--members"]);
    assert_eq!(v["class_count"], 9);
    let members: usize = v["classes"].as_array().unwrap().iter().map(|c| c["members"].as_array().unwrap().len()).sum();
    assert_eq!(members, 16);
    assert!(v.get("timing_ms").is_none());
    assert!(json(&["classify", "--q", "2", "--timing"])["timing_ms"].is_u64());
    let csv = ok(&["classify", "--q", "3", "--format", "csv"]);
    assert_eq!(csv.lines().count(), 13 + 1);
}

#[test]
fn output_is_deterministic_across_worker_counts() {
    let args = ["classify", "--q", "5", "--members", "--format", "json"];
    let one = ok(&[&args[..], &["--threads", "1"]].concat());
    let four = ok(&[&args[..], &["--threads", "4"]].concat());
    assert_eq!(one, four);
    let env = Command::new(env!("CARGO_BIN_EXE_evoclass")).args(args).env("EVOCLASS_THREADS", "3").output().unwrap();
    assert_eq!(stdout(&env), one);
}

#[test]
fn tables_report() {
    let text = ok(&["tables"]);
    assert!(text.contains("isomorphism classes:      9 / 13 / 23 / 38"), "{text}");
    assert!(!text.contains("differs"));
    let v = json(&["tables", "--only", "5"]);
    let f = &v["fields"][0];
    assert_eq!(f["listing"]["collisions"].as_array().unwrap().len(), 0);
    assert_eq!(f["listing"]["uncovered"].as_array().unwrap().len(), 0);
    assert_eq!(f["representatives"].as_array().unwrap().len(), 23);
    assert!(v["adjudication"].is_null());
}

#[test]
fn count_maps_record() {
    let v = json(&["count-maps", "--q", "3", "--left", "1,0;0,1", "--right", "1,0;0,1"]);
    assert_eq!(v["count"], 2);
    assert_eq!(v["relation"], "isomorphism");
    assert_eq!(v["method"], "groebner");
    let e = json(&["count-maps", "--q", "3", "--left", "1,0;0,1", "--right", "1,0;0,1", "--method", "exhaustive", "--rabinowitsch"]);
    assert_eq!(e["count"], 2);
    let o = evoclass(&["count-maps", "--q", "3", "--left", "1,0;0,1", "--right", "1,0;0,1", "--relation", "strong-isotopism"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn groebner_debug() {
    let v = json(&["groebner", "--q", "3", "--vars", "x,y", "x^2 - y", "x*y - 1"]);
    assert_eq!(v["standard_monomials"], serde_json::json!({"finite": 3}));
    assert_eq!(v["basis"].as_array().unwrap().len(), 3);
    let unit = json(&["groebner", "--q", "5", "--vars", "x", "x", "x - 1"]);
    assert_eq!(unit["unit_ideal"], true);
    assert_eq!(unit["basis"], serde_json::json!(["1"]));
}

#[test]
fn exit_codes() {
    for bad in [
        &["classify", "--q", "6"][..],
        &["check", "--q", "3", "--left", "1,0", "--right", "0,0;0,0"],
        &["check", "--q", "3", "--left", "9,0;0,0", "--right", "0,0;0,0"],
        &["enumerate"],
        &["frobnicate"],
        &["classify", "--q", "3", "--method", "magic"],
        &["classify", "--q", "3", "--cap", "nonsense=1"],
        &["classify", "--q", "3", "--relation", "strong-isotopism", "--method", "invariant"],
    ] {
        assert_eq!(evoclass(bad).status.code(), Some(1), "{bad:?}");
    }
    for capped in [
        &["classify", "--q", "5", "--relation", "isotopism"][..],
        &["enumerate", "--q", "2", "--n", "5"],
        &["classify", "--q", "3", "--cap", "isomorphism-max-q=2"],
        &["enumerate", "--q", "257", "--n", "1", "--cap", "field=256"],
        &["groebner", "--q", "7", "--vars", "x,y,z", "--cap", "max-pairs=1", "x^2+y", "y^2+z", "z^2+x*y"],
    ] {
        let o = evoclass(capped);
        assert_eq!(o.status.code(), Some(2), "{capped:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(evoclass(&["--help"]).status.code(), Some(0));
}
