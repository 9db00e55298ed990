use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn cyglue(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cyglue")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn sweep_reports_in_parameter_order() {
    let out = cyglue(&["sweep", "main", "--param", "a=1..6", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let j = json(&out);
    let items = j["items"].as_array().unwrap();
    let a: Vec<i64> = items.iter().map(|i| i["parameters"]["a"].as_i64().unwrap()).collect();
    assert_eq!(a, vec![1, 2, 3, 4, 5, 6]);
    for (i, item) in items.iter().enumerate() {
        let a = i as i64 + 1;
        assert_eq!(item["e_x"], Value::from(-256 * a * a + 32 * a - 224));
        assert_eq!(item["b2_x"], Value::from(a + 3));
    }
}

#[test]
fn sweep_collects_item_errors() {
    let out = cyglue(&["sweep", "arbitrary_b2", "--param", "a=1", "c=12..15", "--format", "json"]);
    assert_eq!(out.status.code(), Some(2));
    let j = json(&out);
    assert_eq!(j["passed"], Value::from(2));
    assert_eq!(j["errors"], Value::from(2));
    assert_eq!(j["items"][3]["error"]["kind"], "input");
}

#[test]
fn empty_sweep() {
    let out = cyglue(&["sweep", "oguiso", "--param", "a=5..1", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out)["items"].as_array().unwrap().is_empty());
}

#[test]
fn report_rerenders_saved_output() {
    let dir = std::env::temp_dir().join(format!("cyglue-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("r.json");
    let out = cyglue(&["verify", "oguiso", "--param", "a=2", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let saved = std::fs::read_to_string(&path).unwrap();

    let mut child = Command::new(env!("CARGO_BIN_EXE_cyglue"))
        .args(["report", "--format", "json"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(saved.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim_end(), saved.trim_end());

    let out = cyglue(&["report", path.to_str().unwrap()]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("TrivialOnly"), "{text}");
    assert!(text.contains("b2(X) = 1"), "{text}");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn certify_ample() {
    let out = cyglue(&["certify-ample", "--lattice", "oguiso", "--a", "4", "--k", "4", "--zbound", "30"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["ample"], Value::Bool(true));

    let out = cyglue(&["certify-ample", "--lattice", "wehler", "--class", "1,0,0"]);
    assert_eq!(out.status.code(), Some(1));

    let out = cyglue(&["certify-ample", "--lattice", "wehler", "--class", "19,-4,12"]);
    assert_eq!(out.status.code(), Some(0));

    let out = cyglue(&["certify-ample", "--lattice", "oguiso"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn input_errors_exit_2() {
    for args in [
        vec!["verify", "nonexistent"],
        vec!["verify", "main"],
        vec!["verify", "main", "--param", "a=x"],
        vec!["verify", "oguiso", "--param", "a=0"],
        vec!["verify", "main", "--param", "a=1", "--center", "x3:0=1,1,1"],
        vec!["verify", "main", "--param", "a=1", "--checks", "everything"],
        vec!["sweep", "main", "--param", "a=1"],
        vec!["frobnicate"],
    ] {
        assert_eq!(cyglue(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn stage_subset_skips_other_expectations() {
    let out = cyglue(&["verify", "main", "--param", "a=2", "--checks", "invariants"]);
    assert_eq!(out.status.code(), Some(0));
    let j = json(&out);
    assert!(j["projectivity"].is_null());
    let names: Vec<&str> = j["expectations"].as_array().unwrap().iter().map(|e| e["name"].as_str().unwrap()).collect();
    assert_eq!(names, vec!["b2_x0", "b2_x", "e_x"]);
}
