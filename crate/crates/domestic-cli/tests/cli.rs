use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn domestic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_domestic")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn analyze_families() {
    let v = json(&domestic(&["analyze", "--family", "sp:3:0", "--format", "json"]));
    assert_eq!(v["domesticity"], "strongly-exceptional-domestic");
    assert_eq!(v["type"], "C3");

    let v = json(&domestic(&["analyze", "--family", "an-duality:2", "--format", "json"]));
    assert_eq!(v["order"], 8);
    assert_eq!(v["pi"], serde_json::json!([2, 1]));

    let v = json(&domestic(&["analyze", "--identity", "--model", "C:2", "--format", "json"]));
    assert_eq!(v["displacement"], 0);
    assert_eq!(v["circled"], serde_json::json!([]));
}

#[test]
fn ascii_output_shows_the_diagram_and_the_report() {
    let out = domestic(&["analyze", "--family", "sp:3:1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("sp:3:1 on C_3(2)"));
    assert!(text.contains("(o)"));
    assert!(text.contains("\"exceptional-domestic\""));
}

#[test]
fn exit_codes() {
    assert_eq!(domestic(&["analyze", "--family", "nonsense:1"]).status.code(), Some(2));
    assert_eq!(domestic(&["analyze"]).status.code(), Some(2));
    assert_eq!(domestic(&["analyze", "--family", "an-duality:5", "--budget", "100"]).status.code(), Some(3));
    assert_eq!(domestic(&["search", "F4.theta6p", "--strategy", "aset", "--budget", "100"]).status.code(), Some(3));
    assert_eq!(domestic(&["search", "G2.theta1"]).status.code(), Some(2));
    assert_eq!(domestic(&["verify", "no-such-suite"]).status.code(), Some(2));
    assert_eq!(domestic(&["verify", "e7"]).status.code(), Some(2));
}

#[test]
fn verify_reports_are_stable() {
    let a = domestic(&["verify", "e8-displacement-menu", "--format", "json"]);
    let b = domestic(&["--jobs", "2", "verify", "e8-displacement-menu", "--format", "json"]);
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v[0]["pass"], true);
    assert_eq!(v[0]["cases"][0]["computed"], "[57, 90, 107, 108, 119, 120]");
}

#[test]
fn verify_intro_posets() {
    let out = domestic(&["verify", "intro-b3-posets"]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("PASS intro-b3-posets"));
}

#[test]
fn enumerate_sp4_finds_one_exceptional_class() {
    let v = json(&domestic(&["enumerate", "sp4", "--format", "json"]));
    let rows = v.as_array().unwrap();
    assert_eq!(rows.iter().map(|r| r["size"].as_u64().unwrap()).sum::<u64>(), 720);
    let exceptional: Vec<&Value> = rows.iter().filter(|r| r["domesticity"].as_str().unwrap().contains("exceptional")).collect();
    assert_eq!(exceptional.len(), 1);
    assert_eq!(exceptional[0]["displacement"], 3);
    assert_eq!(domestic(&["enumerate", "sp8"]).status.code(), Some(2));
}

#[test]
fn enumerate_gl3_includes_dualities() {
    let v = json(&domestic(&["enumerate", "gl3", "--format", "json"]));
    let rows = v.as_array().unwrap();
    let total = |d: bool| rows.iter().filter(|r| r["duality"] == d).map(|r| r["size"].as_u64().unwrap()).sum::<u64>();
    assert_eq!((total(false), total(true)), (168, 168));
}

#[test]
fn exported_automorphisms_analyze_identically() {
    let exported = domestic(&["export", "automorphism", "--family", "sp:3:1"]);
    assert!(exported.status.success());
    let mut child = Command::new(env!("CARGO_BIN_EXE_domestic"))
        .args(["analyze", "--json", "-", "--format", "json"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(&exported.stdout).unwrap();
    let from_json = json(&child.wait_with_output().unwrap());
    let direct = json(&domestic(&["analyze", "--family", "sp:3:1", "--format", "json"]));
    assert_eq!(from_json["maximal_types"], direct["maximal_types"]);
    assert_eq!(from_json["displacement"], direct["displacement"]);
}

#[test]
fn export_diagrams_as_csv() {
    let out = domestic(&["export", "diagrams", "--family", "sp:2:0", "--family", "a3-polarity", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "element,model,circled,shaded,capped,displacement,domesticity,order");
    assert_eq!(lines[1], "sp:2:0,C_2(2),1 2,1 2,false,3,strongly-exceptional-domestic,4");
    assert!(lines[2].starts_with("a3-polarity,A_3(2),2,,true,4,domestic,"));
}

#[test]
fn catalogue_lists_chevalley_elements() {
    let v = json(&domestic(&["export", "catalogue", "--format", "json"]));
    let names: Vec<&str> = v.as_array().unwrap().iter().map(|x| x.as_str().unwrap()).collect();
    assert!(names.contains(&"F4.theta4p"));
    assert!(names.contains(&"E8.theta2"));
}

#[test]
fn chevalley_searches() {
    let v = json(&domestic(&["search", "F4.theta4p", "--strategy", "coset", "--types", "1,2", "--restrict", "--format", "json"]));
    assert_eq!(v["candidates"], 3885);
    assert_eq!(v["found"], false);

    let v = json(&domestic(&["search", "F4.theta4p", "--strategy", "aset", "--format", "json"]));
    assert_eq!(v["a_size"], 8);
    assert_eq!(v["max_length"], 23);
    assert_eq!(v["hit_w0"], false);

    let v = json(&domestic(&["search", "F4.theta2", "--strategy", "fixed", "--vertex-type", "4", "--format", "json"]));
    assert_eq!(v["fixed"], 2287);

    let v = json(&domestic(&["search", "E6.sigma", "--strategy", "sample", "--samples", "200", "--seed", "4", "--format", "json"]));
    assert_eq!(v["candidates"], 200);
}
