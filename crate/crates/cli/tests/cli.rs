use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn data(name: &str) -> String {
    format!("{}/../../data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn stacky(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_stacky"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut pipe = child.stdin.take().unwrap();
    pipe.write_all(stdin.unwrap_or_default().as_bytes()).unwrap();
    drop(pipe);
    child.wait_with_output().unwrap()
}

fn stderr_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).unwrap()
}

#[test]
fn usage_errors_exit_2() {
    let out = stacky(&["dh-scan", &data("triangle.json")], None);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"], "usage");

    let out = stacky(&["--grid", "0", "analyze", &data("triangle.json")], None);
    assert_eq!(out.status.code(), Some(2));

    let out = stacky(&["dh-scan", &data("triangle.json"), "--xi", "1,banana"], None);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_json_on_stdin_is_a_schema_error() {
    let out = stacky(&["analyze", "-"], Some("{\"schema\": "));
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"], "schema");
}

#[test]
fn structural_failures_exit_3() {
    let out = stacky(&["analyze", &data("non_spanning.json")], None);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(stderr_json(&out)["error"], "data");

    let out = stacky(&["dh-scan", &data("triangle.json"), "--xi", "0,0"], None);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn negative_direction_is_accepted() {
    let out = stacky(&["dh-scan", &data("triangle.json"), "--xi", "-1,0"], None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    let walls: Vec<&str> = r["walls"].as_array().unwrap().iter().map(|w| w["exact"].as_str().unwrap()).collect();
    assert_eq!(walls, ["-1", "0"]);
    assert_eq!(r["chambers"][0]["linear_coefficient"]["exact"], "1");
}

#[test]
fn embedded_csv_without_out() {
    let out = stacky(&["dh-scan", &data("square.json"), "--xi", "1,1"], None);
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    let csv = r["csv"].as_str().unwrap();
    assert!(csv.starts_with("u_exact,u_float,chamber_id,V_exact,V_float\n"));
    assert_eq!(csv.lines().count() as u64, r["rows"].as_u64().unwrap() + 1);
}
