use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crystalkit")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn element_reports_coords_and_sigma() {
    let out = run(&["element", "-t", "A3", "e1^2 e3 e2^4", "--word", "2,1,2,3,2,1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["element"]["type"], "A3");
    assert_eq!(v["element"]["word"], serde_json::json!([1, 2, 1, 3, 2, 1]));
    assert_eq!(v["weight"], serde_json::json!([2, 4, 1]));
    assert_eq!(v["data"].as_array().unwrap().len(), 2);
    let back = run(&["element", "-t", "A3", &v["sigma"].to_string()]);
    assert_eq!(json(&back)["sigma"], v["element"]);
}

#[test]
fn grouped_strings_apply_right_to_left() {
    let a = json(&run(&["element", "-t", "A2", "(e1 e2)^2"]));
    let b = json(&run(&["element", "-t", "A2", "e1 e2 e1 e2"]));
    assert_eq!(a["element"], b["element"]);
    let c = json(&run(&["element", "-t", "A2", "e2 e1"]));
    assert_eq!(c["phi"], serde_json::json!([0, 1]));
}

#[test]
fn polytope_shape() {
    let v = json(&run(&["polytope", "-t", "A2", "e1 e2"]));
    assert_eq!(v["weight"], serde_json::json!([1, 1]));
    assert_eq!(v["vertices"].as_array().unwrap().len(), 6);
    assert!(v["vertices"][0].get("w").is_some() && v["vertices"][0].get("mu").is_some());
    assert!(v["bz"][0].get("gamma").is_some() && v["bz"][0].get("M").is_some());
}

#[test]
fn compare_exit_codes() {
    let (small, big) = ("(e1 e3) e2^2 (e1 e3)", "e2 (e1 e3)^2 e2");
    let ok = run(&["compare", "-t", "A3", small, big]);
    let no = run(&["compare", "-t", "A3", big, small]);
    assert_eq!((ok.status.code(), no.status.code()), (Some(0), Some(1)));
    let refuted = run(&["compare", "-t", "A2", "e1 e2", "e2 e1", "--order", "str"]);
    assert_eq!(refuted.status.code(), Some(1));
    let v = json(&refuted);
    assert_eq!(v["verdict"], "refuted");
    assert!(v["witness"].is_array());
    assert_eq!(run(&["compare", "-t", "A2", "e1", "e2"]).status.code(), Some(2));
    assert_eq!(run(&["compare", "-t", "A2", "e1 (", "e2"]).status.code(), Some(2));
    assert_eq!(run(&["compare", "-t", "A9", "e1", "e1"]).status.code(), Some(2));
}

#[test]
fn compare_inconclusive_at_depth_one() {
    let pair = ["compare", "-t", "A3", "[0,1,1,0,1,0]", "[0,0,2,1,0,0]", "--order", "str"];
    let shallow = run(&[&pair[..], &["--depth", "1"]].concat());
    assert_eq!(shallow.status.code(), Some(3));
    assert_eq!(json(&shallow)["verdict"], "consistent_to_depth");
    assert_eq!(run(&pair).status.code(), Some(1));
    let out = run(&["compare", "-t", "A4", "E-case-I", "e1", "--order", "str"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn enumerate_weight() {
    let v = json(&run(&["enumerate", "-t", "A2", "1,1"]));
    assert_eq!(v.as_array().unwrap().len(), 2);
    assert_eq!(run(&["enumerate", "-t", "A2", "1,1,1"]).status.code(), Some(2));
}

#[test]
fn frobenius_subcommands() {
    assert_eq!(json(&run(&["frobenius", "fr", "-l", "2", "t1^2 t2^3"]))["monomial"], "0");
    assert_eq!(json(&run(&["frobenius", "fr", "-l", "2", "-p", "2", "t2^p t4^2p"]))["monomial"], "t2 t4^2");
    assert_eq!(json(&run(&["frobenius", "fr-split", "-l", "3", "t1 t3^2"]))["monomial"], "t1^3 t3^6");
    let v = json(&run(&["frobenius", "s-ell", "-t", "A2", "-l", "2", "e1 e2"]));
    assert_eq!(v["coords"], serde_json::json!([2, 0, 2]));
    assert_eq!(run(&["frobenius", "fr", "-l", "0", "t1"]).status.code(), Some(2));
}

#[test]
fn degeneration_in_a2() {
    let yes = run(&["degeneration", "-t", "A2", "--orientation", "1->2", "0,1,0", "1,0,1"]);
    assert_eq!(yes.status.code(), Some(0));
    assert_eq!(json(&yes)["degenerates"], true);
    let no = run(&["degeneration", "-t", "A2", "--orientation", "1->2", "1,0,1", "0,1,0"]);
    assert_eq!(no.status.code(), Some(1));
    let bad = run(&["degeneration", "-t", "A2", "--orientation", "1->3", "1,0,1", "0,1,0"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn delta_scan_small_grid() {
    let out = run(&["delta-scan", "--max-p", "1", "--v-max", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("p,v,tau,delta"));
    let rows: Vec<&str> = text.lines().skip(1).filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.ends_with(",0")));
    assert!(text.contains("# negative 0"));
}

#[test]
fn suite_section_and_negative_control() {
    let ok = run(&["paper-suite", "--section", "6"]);
    assert_eq!(ok.status.code(), Some(0));
    let v = json(&ok);
    assert_eq!(v.as_array().unwrap().len(), 2);
    let bad = run(&["paper-suite", "--section", "families", "--corrupt-tables", "--format", "table"]);
    assert_eq!(bad.status.code(), Some(1));
    let text = String::from_utf8(bad.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("[FAIL] 15")), "{text}");
}

#[test]
fn delta_scan_output_does_not_depend_on_jobs() {
    let one = run(&["delta-scan", "--max-p", "1", "--v-max", "2", "--emit", "negative", "--jobs", "1"]);
    let three = run(&["delta-scan", "--max-p", "1", "--v-max", "2", "--emit", "negative", "--jobs", "3"]);
    assert_eq!(one.stdout, three.stdout);
    assert_eq!(run(&["delta-scan", "--jobs", "0"]).status.code(), Some(2));
}

#[test]
fn signed_flag_negates_weights() {
    let plain = json(&run(&["element", "-t", "A2", "e1 e2"]));
    let signed = json(&run(&["--signed", "element", "-t", "A2", "e1 e2"]));
    assert_eq!(plain["weight"], serde_json::json!([1, 1]));
    assert_eq!(signed["weight"], serde_json::json!([-1, -1]));
    assert_eq!(plain["element"], signed["element"]);
}
