use std::fs;
use std::path::{Path, PathBuf};

use artin_wpd_cli::{run, EXIT_CHECK_FAILED, EXIT_INPUT, EXIT_OK};
use serde_json::Value;
use tempfile::TempDir;

const G4: &str = "vertices: a b c d\nedge: a c 3\nedge: a d 2\nedge: b c 2\nedge: b d 2\n";

fn invoke(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("artin-wpd").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn construct_then_verify() {
    let dir = TempDir::new().unwrap();
    let graph = write(dir.path(), "g4.graph", G4);
    let cert = dir.path().join("g4.json");
    let (code, out, _) = invoke(&["construct", s(&graph), "-o", s(&cert)]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("|gamma| = 18"));
    let doc: Value = serde_json::from_str(&fs::read_to_string(&cert).unwrap()).unwrap();
    assert_eq!(doc["schema"], 1);
    assert_eq!(doc["gamma"]["letters"].as_array().unwrap().len(), 18);

    let (code, out, _) = invoke(&["verify", s(&graph), s(&cert)]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert!(out.ends_with("certificate verified\n"));
}

#[test]
fn certificate_is_byte_stable() {
    let dir = TempDir::new().unwrap();
    let graph = write(dir.path(), "g4.graph", G4);
    let (_, first, _) = invoke(&["construct", s(&graph)]);
    let (_, second, _) = invoke(&["construct", s(&graph)]);
    assert_eq!(first, second);
    assert!(first.starts_with("{\n  \"schema\": 1,"));
}

#[test]
fn tampered_certificate_reports_step() {
    let dir = TempDir::new().unwrap();
    let graph = write(dir.path(), "g4.graph", G4);
    let (_, text, _) = invoke(&["construct", s(&graph)]);
    let mut doc: Value = serde_json::from_str(&text).unwrap();
    doc["key4"]["entries"][3]["tag"] = Value::String("KEY".into());
    let cert = write(dir.path(), "bad.json", &doc.to_string());
    let (code, out, _) = invoke(&["verify", s(&graph), s(&cert)]);
    assert_eq!(code, EXIT_CHECK_FAILED);
    assert!(out.contains("failure: key4.entries[3].tag"));
    assert!(out.contains("step   3"));
    assert!(out.ends_with("certificate rejected\n"));
}

#[test]
fn lcm_option_shrinks_schedule() {
    let dir = TempDir::new().unwrap();
    let graph = write(dir.path(), "g4.graph", G4);
    let (code, text, _) = invoke(&["construct", s(&graph), "--lcm"]);
    assert_eq!(code, EXIT_OK);
    let doc: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["schedule"]["n"], 2);
    assert_eq!(doc["length_policy"], "lcm");
    let cert = write(dir.path(), "lcm.json", &text);
    assert_eq!(invoke(&["verify", s(&graph), s(&cert)]).0, EXIT_OK);
}

#[test]
fn deferred_and_ineligible() {
    let dir = TempDir::new().unwrap();
    let pentagon = write(
        dir.path(),
        "p.graph",
        "vertices: a b c d e\nedge: a b 3\nedge: b c 3\nedge: c d 3\nedge: d e 3\nedge: e a 3\n",
    );
    let (code, out, _) = invoke(&["construct", s(&pentagon)]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(serde_json::from_str::<Value>(&out).unwrap()["status"], "deferred");

    let square = write(dir.path(), "sq.graph", "vertices: a b c d\nedge: a c 2\nedge: c b 2\nedge: b d 2\nedge: d a 2\n");
    let (code, out, _) = invoke(&["construct", s(&square)]);
    assert_eq!(code, EXIT_CHECK_FAILED);
    assert_eq!(serde_json::from_str::<Value>(&out).unwrap()["status"], "ineligible");

    let (code, out, _) = invoke(&["classify", s(&square)]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(serde_json::from_str::<Value>(&out).unwrap()["irreducible"], false);
}

#[test]
fn input_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let bad = write(dir.path(), "bad.graph", "vertices: a b\nedge: a a 2\n");
    let (code, _, err) = invoke(&["classify", s(&bad)]);
    assert_eq!(code, EXIT_INPUT);
    assert!(err.contains("line 2"), "{err}");
    assert_eq!(invoke(&["classify", "/nonexistent/graph"]).0, EXIT_INPUT);
    let graph = write(dir.path(), "g4.graph", G4);
    let junk = write(dir.path(), "junk.json", "{ not json");
    assert_eq!(invoke(&["verify", s(&graph), s(&junk)]).0, EXIT_INPUT);
    assert_eq!(invoke(&["construct", s(&graph), "--exact-limit", "1"]).0, EXIT_INPUT);
    assert_eq!(invoke(&["dihedral-sweep", "2"]).0, EXIT_INPUT);
}

#[test]
fn shadow_writes_dot() {
    let dir = TempDir::new().unwrap();
    let graph = write(dir.path(), "pair.graph", "vertices: a b\nedge: a b 2\n");
    let dot = dir.path().join("pair.dot");
    let (code, out, _) = invoke(&["shadow", s(&graph), "--radius", "2", "--dot", s(&dot)]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["stats"]["vertices"], 9);
    assert_eq!(v["stats"]["edges"], 12);
    assert_eq!(v["stats"]["squares"], 4);
    assert_eq!(v["stats"]["hyperplanes"], 4);
    assert_eq!(fs::read_to_string(&dot).unwrap().matches(" -- ").count(), 12);
}

#[test]
fn dihedral_sweep_table() {
    let (code, out, _) = invoke(&["dihedral-sweep", "100"]);
    assert_eq!(code, EXIT_OK);
    let rows: Vec<&str> = out.lines().skip(1).collect();
    assert_eq!(rows.len(), 98);
    assert!(rows.iter().all(|r| r.ends_with("yes")));
}
